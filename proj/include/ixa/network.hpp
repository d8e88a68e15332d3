#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ixa/tokenizer.hpp"

namespace ixa {

enum class Activation { Relu, Tanh };
/// How token embeddings become one input vector: the mean over non-PAD
/// positions, or the concatenation of all positions (PAD positions zero).
enum class Pooling { Mean, Flatten };

struct LayerSpec {
  std::size_t size = 128;
  Activation activation = Activation::Relu;

  bool operator==(const LayerSpec&) const = default;
};

/// Embedding -> pooling -> dense hidden layers -> k heads of 2k+1 Q-values.
struct NetworkSpec {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;
  std::vector<LayerSpec> hidden = {{128, Activation::Relu}};
  std::size_t heads = 3;
  std::size_t input_length = kDefaultStateLength;
  Pooling pooling = Pooling::Flatten;

  std::size_t head_width() const { return 2 * heads + 1; }
  std::size_t output_size() const { return heads * head_width(); }
  std::size_t pooled_size() const {
    return pooling == Pooling::Mean ? embed_dim : embed_dim * input_length;
  }

  /// Throws ConfigError.
  void validate() const;
  /// Stable textual form; the model file hash is computed over it.
  std::string canonical() const;
  std::uint64_t hash() const;

  bool operator==(const NetworkSpec&) const = default;
};

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view bytes);

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const Tensor&) const = default;
};

/// Tensors in declaration order: embedding, (weight, bias) per hidden layer,
/// output weight, output bias. Weights are (in x out), row-major.
struct Params {
  std::vector<Tensor> tensors;

  std::size_t parameter_count() const;
  void fill(double value);
  bool operator==(const Params&) const = default;
};

using Gradients = Params;

/// Closed form: V*d + sum(in*out + out) over dense layers incl. the output.
std::size_t parameter_count(const NetworkSpec& spec);

/// All-zero tensors with the right names and shapes.
Params zero_params(const NetworkSpec& spec);

/// Dense weights ~ U(+-sqrt(6/(fan_in+fan_out))), embeddings ~ U(+-0.05), biases 0.
Params init_params(const NetworkSpec& spec, std::mt19937_64& rng);

/// Q-values for a batch, row-major (batch x heads x head_width).
struct QValues {
  std::size_t batch = 0;
  std::size_t heads = 0;
  std::size_t width = 0;
  std::vector<double> values;

  std::span<const double> head(std::size_t row, std::size_t h) const {
    return {values.data() + (row * heads + h) * width, width};
  }
  double at(std::size_t row, std::size_t h, std::size_t a) const {
    return values[(row * heads + h) * width + a];
  }
};

/// Activations kept for backward.
struct ForwardCache {
  std::size_t batch = 0;
  std::vector<std::vector<TokenId>> tokens;
  std::vector<double> pooled;                  // batch x pooled_size
  std::vector<std::vector<double>> pre;        // per hidden layer, batch x size
  std::vector<std::vector<double>> post;       // per hidden layer, batch x size
  QValues q;
};

/// Throws Error if a token id is >= vocab_size or a state has the wrong length.
ForwardCache forward_batch(const NetworkSpec& spec, const Params& params,
                           std::span<const StateTokens> states);
QValues forward(const NetworkSpec& spec, const Params& params, const StateTokens& state);

/// d(loss)/d(params) given d(loss)/d(Q) laid out like cache.q.values.
/// Embedding rows of tokens absent from the batch get exactly zero.
Gradients backward(const NetworkSpec& spec, const Params& params, const ForwardCache& cache,
                   std::span<const double> dq);

}  // namespace ixa
