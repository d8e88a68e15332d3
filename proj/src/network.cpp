#include "ixa/network.hpp"

#include <algorithm>
#include <cmath>

#include "ixa/error.hpp"
#include "ixa/kernels.hpp"

namespace ixa {

using nlohmann::json;

namespace {

std::string_view activation_name(Activation a) { return a == Activation::Relu ? "relu" : "tanh"; }

Activation activation_from(std::string_view s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

std::string_view pooling_name(Pooling p) { return p == Pooling::Mean ? "mean" : "flatten"; }

Pooling pooling_from(std::string_view s) {
  if (s == "mean") return Pooling::Mean;
  if (s == "flatten") return Pooling::Flatten;
  throw ConfigError("unknown pooling '" + std::string(s) + "'");
}

struct LayerDims {
  std::size_t in;
  std::size_t out;
};

std::vector<LayerDims> dense_dims(const NetworkSpec& spec) {
  std::vector<LayerDims> dims;
  std::size_t in = spec.pooled_size();
  for (const LayerSpec& layer : spec.hidden) {
    dims.push_back({in, layer.size});
    in = layer.size;
  }
  dims.push_back({in, spec.output_size()});
  return dims;
}

void check_layout(const NetworkSpec& spec, const Params& params) {
  const auto dims = dense_dims(spec);
  if (params.tensors.size() != 1 + 2 * dims.size()) {
    throw Error("parameter tensor count does not match the network spec");
  }
  if (params.tensors[0].size() != spec.vocab_size * spec.embed_dim) {
    throw Error("embedding shape does not match the network spec");
  }
  for (std::size_t l = 0; l < dims.size(); ++l) {
    if (params.tensors[1 + 2 * l].size() != dims[l].in * dims[l].out ||
        params.tensors[2 + 2 * l].size() != dims[l].out) {
      throw Error("dense layer " + std::to_string(l) + " shape does not match the network spec");
    }
  }
}

}  // namespace

void NetworkSpec::validate() const {
  if (vocab_size < 1) throw ConfigError("network: vocab_size must be >= 1");
  if (embed_dim < 1) throw ConfigError("network: embed_dim must be >= 1");
  if (heads < 1) throw ConfigError("network: heads must be >= 1");
  if (input_length < 1) throw ConfigError("network: input_length must be >= 1");
  for (const LayerSpec& l : hidden) {
    if (l.size < 1) throw ConfigError("network: hidden layer size must be >= 1");
  }
}

std::string NetworkSpec::canonical() const { return to_json(*this).dump(); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t NetworkSpec::hash() const { return fnv1a64(canonical()); }

json to_json(const NetworkSpec& spec) {
  json hidden = json::array();
  for (const LayerSpec& l : spec.hidden) {
    hidden.push_back({{"size", l.size}, {"activation", activation_name(l.activation)}});
  }
  return json{{"vocab_size", spec.vocab_size}, {"embed_dim", spec.embed_dim},
              {"hidden", hidden},              {"heads", spec.heads},
              {"input_length", spec.input_length}, {"pooling", pooling_name(spec.pooling)}};
}

NetworkSpec network_spec_from_json(const json& j) {
  NetworkSpec spec;
  try {
    spec.vocab_size = j.at("vocab_size").get<std::size_t>();
    spec.embed_dim = j.at("embed_dim").get<std::size_t>();
    spec.heads = j.at("heads").get<std::size_t>();
    spec.input_length = j.at("input_length").get<std::size_t>();
    spec.pooling = pooling_from(j.at("pooling").get<std::string>());
    spec.hidden.clear();
    for (const json& l : j.at("hidden")) {
      spec.hidden.push_back({l.at("size").get<std::size_t>(),
                             activation_from(l.at("activation").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("network spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::size_t Params::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors) n += t.size();
  return n;
}

void Params::fill(double value) {
  for (Tensor& t : tensors) std::fill(t.values.begin(), t.values.end(), value);
}

std::size_t parameter_count(const NetworkSpec& spec) {
  std::size_t n = spec.vocab_size * spec.embed_dim;
  for (const LayerDims& d : dense_dims(spec)) n += d.in * d.out + d.out;
  return n;
}

Params zero_params(const NetworkSpec& spec) {
  spec.validate();
  Params p;
  p.tensors.push_back({"embedding", {spec.vocab_size, spec.embed_dim},
                       std::vector<double>(spec.vocab_size * spec.embed_dim, 0.0)});
  const auto dims = dense_dims(spec);
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const bool is_output = l + 1 == dims.size();
    const std::string prefix = is_output ? "output" : "dense" + std::to_string(l);
    p.tensors.push_back({prefix + ".weight", {dims[l].in, dims[l].out},
                         std::vector<double>(dims[l].in * dims[l].out, 0.0)});
    p.tensors.push_back({prefix + ".bias", {dims[l].out}, std::vector<double>(dims[l].out, 0.0)});
  }
  return p;
}

Params init_params(const NetworkSpec& spec, std::mt19937_64& rng) {
  Params p = zero_params(spec);
  std::uniform_real_distribution<double> embed(-0.05, 0.05);
  for (double& v : p.tensors[0].values) v = embed(rng);
  const auto dims = dense_dims(spec);
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[l].in + dims[l].out));
    std::uniform_real_distribution<double> dense(-limit, limit);
    for (double& v : p.tensors[1 + 2 * l].values) v = dense(rng);
  }
  return p;
}

ForwardCache forward_batch(const NetworkSpec& spec, const Params& params,
                           std::span<const StateTokens> states) {
  check_layout(spec, params);
  ForwardCache cache;
  cache.batch = states.size();
  const std::size_t d = spec.embed_dim;
  const std::size_t pooled = spec.pooled_size();
  const auto& embedding = params.tensors[0].values;

  cache.tokens.reserve(states.size());
  cache.pooled.assign(cache.batch * pooled, 0.0);
  for (std::size_t b = 0; b < states.size(); ++b) {
    const StateTokens& s = states[b];
    if (s.size() != spec.input_length) {
      throw Error("state length " + std::to_string(s.size()) + " != network input length " +
                  std::to_string(spec.input_length));
    }
    for (TokenId id : s.ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= spec.vocab_size) {
        throw Error("token id " + std::to_string(id) + " outside vocabulary of size " +
                    std::to_string(spec.vocab_size));
      }
    }
    cache.tokens.push_back(s.ids);
    double* row = cache.pooled.data() + b * pooled;
    if (spec.pooling == Pooling::Flatten) {
      for (std::size_t l = 0; l < s.ids.size(); ++l) {
        if (s.ids[l] == Vocabulary::kPad) continue;
        const double* e = embedding.data() + static_cast<std::size_t>(s.ids[l]) * d;
        std::copy(e, e + d, row + l * d);
      }
    } else {
      std::size_t count = 0;
      for (TokenId id : s.ids) {
        if (id == Vocabulary::kPad) continue;
        const double* e = embedding.data() + static_cast<std::size_t>(id) * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += e[j];
        ++count;
      }
      if (count > 0) {
        for (std::size_t j = 0; j < d; ++j) row[j] /= static_cast<double>(count);
      }
    }
  }

  const auto dims = dense_dims(spec);
  const std::vector<double>* input = &cache.pooled;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const kernels::Shape shape{cache.batch, dims[l].in, dims[l].out};
    std::vector<double> z(cache.batch * dims[l].out);
    kernels::affine_forward(*input, params.tensors[1 + 2 * l].values,
                            params.tensors[2 + 2 * l].values, z, shape);
    std::vector<double> a(z.size());
    if (spec.hidden[l].activation == Activation::Relu) {
      std::transform(z.begin(), z.end(), a.begin(), [](double v) { return v > 0.0 ? v : 0.0; });
    } else {
      std::transform(z.begin(), z.end(), a.begin(), [](double v) { return std::tanh(v); });
    }
    cache.pre.push_back(std::move(z));
    cache.post.push_back(std::move(a));
    input = &cache.post.back();
  }
  const LayerDims& out = dims.back();
  cache.q.batch = cache.batch;
  cache.q.heads = spec.heads;
  cache.q.width = spec.head_width();
  cache.q.values.assign(cache.batch * out.out, 0.0);
  const std::size_t last = 1 + 2 * (dims.size() - 1);
  kernels::affine_forward(*input, params.tensors[last].values, params.tensors[last + 1].values,
                          cache.q.values, {cache.batch, out.in, out.out});
  return cache;
}

QValues forward(const NetworkSpec& spec, const Params& params, const StateTokens& state) {
  return forward_batch(spec, params, std::span<const StateTokens>(&state, 1)).q;
}

Gradients backward(const NetworkSpec& spec, const Params& params, const ForwardCache& cache,
                   std::span<const double> dq) {
  check_layout(spec, params);
  if (dq.size() != cache.q.values.size() || cache.pooled.size() != cache.batch * spec.pooled_size() ||
      cache.post.size() != spec.hidden.size()) {
    throw Error("backward: gradient or cache shape does not match the forward pass");
  }
  Gradients grads = zero_params(spec);
  const auto dims = dense_dims(spec);
  const std::size_t rows = cache.batch;

  std::vector<double> upstream(dq.begin(), dq.end());
  for (std::size_t l = dims.size(); l-- > 0;) {
    const std::vector<double>& input = l == 0 ? cache.pooled : cache.post[l - 1];
    const kernels::Shape shape{rows, dims[l].in, dims[l].out};
    kernels::weight_grad(input, upstream, grads.tensors[1 + 2 * l].values, shape);
    kernels::bias_grad(upstream, grads.tensors[2 + 2 * l].values, shape);

    std::vector<double> down(rows * dims[l].in);
    kernels::input_grad(upstream, params.tensors[1 + 2 * l].values, down, shape);
    if (l > 0) {
      const std::vector<double>& z = cache.pre[l - 1];
      const std::vector<double>& a = cache.post[l - 1];
      if (spec.hidden[l - 1].activation == Activation::Relu) {
        for (std::size_t i = 0; i < down.size(); ++i) {
          if (!(z[i] > 0.0)) down[i] = 0.0;
        }
      } else {
        for (std::size_t i = 0; i < down.size(); ++i) down[i] *= 1.0 - a[i] * a[i];
      }
    }
    upstream = std::move(down);
  }

  // upstream is now d(loss)/d(pooled); scatter into embedding rows.
  const std::size_t d = spec.embed_dim;
  const std::size_t pooled = spec.pooled_size();
  auto& dembed = grads.tensors[0].values;
  for (std::size_t b = 0; b < rows; ++b) {
    const auto& ids = cache.tokens[b];
    const double* g = upstream.data() + b * pooled;
    if (spec.pooling == Pooling::Flatten) {
      for (std::size_t l = 0; l < ids.size(); ++l) {
        if (ids[l] == Vocabulary::kPad) continue;
        double* row = dembed.data() + static_cast<std::size_t>(ids[l]) * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += g[l * d + j];
      }
    } else {
      const auto count = static_cast<std::size_t>(
          std::count_if(ids.begin(), ids.end(), [](TokenId id) { return id != Vocabulary::kPad; }));
      if (count == 0) continue;
      const double inv = 1.0 / static_cast<double>(count);
      for (TokenId id : ids) {
        if (id == Vocabulary::kPad) continue;
        double* row = dembed.data() + static_cast<std::size_t>(id) * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += g[j] * inv;
      }
    }
  }
  return grads;
}

}  // namespace ixa
