#include "ixa/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ixa/error.hpp"

namespace ixa {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'I', 'X', 'Q', 'N'};

class Writer {
 public:
  template <typename T>
  void pod(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(std::string_view s) {
    pod(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(const void* data, std::size_t n) { out_.append(static_cast<const char*>(data), n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T pod(const char* what) {
    need(sizeof(T), what);
    T value;
    std::memcpy(&value, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string str(const char* what) {
    const auto n = pod<std::uint32_t>(what);
    need(n, what);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void raw(void* dst, std::size_t n, const char* what) {
    need(n, what);
    std::memcpy(dst, in_.data() + pos_, n);
    pos_ += n;
  }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw ModelFormatError(std::string("model file truncated while reading ") + what);
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const ModelFile& model) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.pod(kModelFormatVersion);
  w.pod(model.spec.hash());
  w.str(model.spec.canonical());
  w.pod(static_cast<std::uint32_t>(model.vocab.size()));
  for (const std::string& t : model.vocab.tokens()) w.str(t);
  w.str(model.meta.is_null() ? std::string("{}") : model.meta.dump());
  w.pod(static_cast<std::uint32_t>(model.params.tensors.size()));
  for (const Tensor& t : model.params.tensors) {
    w.pod(static_cast<std::uint64_t>(t.size()));
    w.raw(t.values.data(), t.size() * sizeof(double));
  }
  return w.take();
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

ModelFile deserialize_model(std::string_view bytes, const std::optional<NetworkSpec>& expected) {
  Reader r(bytes);
  char magic[4];
  r.raw(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(magic)) != 0) throw ModelFormatError("not a model file (bad magic)");
  const auto version = r.pod<std::uint32_t>("version");
  if (version != kModelFormatVersion) {
    throw ModelFormatError("unsupported model format version " + std::to_string(version) +
                           " (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  const auto stored_hash = r.pod<std::uint64_t>("spec hash");
  const std::string spec_text = r.str("network spec");
  if (fnv1a64(spec_text) != stored_hash) throw ModelFormatError("network spec hash does not match its contents");

  ModelFile model;
  nlohmann::json spec_json = nlohmann::json::parse(spec_text, nullptr, false);
  if (spec_json.is_discarded()) throw ModelFormatError("network spec is not valid JSON");
  try {
    model.spec = network_spec_from_json(spec_json);
  } catch (const ConfigError& e) {
    throw ModelFormatError(e.what());
  }
  if (expected && expected->hash() != stored_hash) {
    throw ModelFormatError("network spec hash mismatch: file has " + std::to_string(stored_hash) +
                           ", expected " + std::to_string(expected->hash()) + " (" +
                           expected->canonical() + " vs " + spec_text + ")");
  }

  const auto token_count = r.pod<std::uint32_t>("vocabulary size");
  std::vector<std::string> tokens;
  for (std::uint32_t i = 0; i < token_count; ++i) tokens.push_back(r.str("vocabulary token"));
  try {
    model.vocab = Vocabulary(std::move(tokens));
  } catch (const Error& e) {
    throw ModelFormatError(std::string("vocabulary: ") + e.what());
  }
  if (model.vocab.size() != model.spec.vocab_size) {
    throw ModelFormatError("vocabulary size does not match the network spec");
  }

  model.meta = nlohmann::json::parse(r.str("metadata"), nullptr, false);
  if (model.meta.is_discarded()) throw ModelFormatError("metadata is not valid JSON");

  model.params = zero_params(model.spec);
  const auto tensor_count = r.pod<std::uint32_t>("tensor count");
  if (tensor_count != model.params.tensors.size()) throw ModelFormatError("tensor count does not match the network spec");
  for (Tensor& t : model.params.tensors) {
    const auto n = r.pod<std::uint64_t>("tensor size");
    if (n != t.size()) throw ModelFormatError("tensor '" + t.name + "' has the wrong size");
    r.raw(t.values.data(), t.size() * sizeof(double), "tensor values");
  }
  if (!r.at_end()) throw ModelFormatError("trailing bytes after the last tensor");
  return model;
}

ModelFile load_model(const std::filesystem::path& path, const std::optional<NetworkSpec>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str(), expected);
}

}  // namespace ixa
