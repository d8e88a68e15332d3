#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "ixa/error.hpp"
#include "ixa/model_io.hpp"
#include "ixa/workload.hpp"

using namespace ixa;

namespace {

ModelFile sample_model() {
  ModelFile m;
  m.vocab = build_vocabulary(default_schema());
  m.spec.vocab_size = m.vocab.size();
  m.spec.hidden = {{16, Activation::Relu}};
  std::mt19937_64 rng(1);
  m.params = init_params(m.spec, rng);
  m.meta = {{"stage", "test"}, {"updates", 12}};
  return m;
}

}  // namespace

TEST_CASE("save then load reproduces parameters bit for bit") {
  testing::TempDir dir;
  const ModelFile m = sample_model();
  save_model(dir / "m.model", m);
  const ModelFile back = load_model(dir / "m.model", m.spec);
  CHECK(back.spec == m.spec);
  CHECK(back.params == m.params);
  CHECK(back.vocab == m.vocab);
  CHECK(back.meta == m.meta);
  CHECK(serialize_model(back) == serialize_model(m));
}

TEST_CASE("every truncation is rejected") {
  const std::string bytes = serialize_model(sample_model());
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{10}, std::size_t{40}, bytes.size() / 2,
                          bytes.size() - 8, bytes.size() - 1}) {
    CHECK_THROWS_AS(deserialize_model(std::string_view(bytes).substr(0, cut)), ModelFormatError);
  }
  CHECK_THROWS_AS(deserialize_model(bytes + "x"), ModelFormatError);
}

TEST_CASE("bad magic and unsupported version") {
  std::string bytes = serialize_model(sample_model());
  std::string bad = bytes;
  bad[0] = 'Z';
  CHECK_THROWS_AS(deserialize_model(bad), ModelFormatError);
  std::string version = bytes;
  version[4] = static_cast<char>(kModelFormatVersion + 1);
  try {
    deserialize_model(version);
    FAIL("expected an error");
  } catch (const ModelFormatError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
}

TEST_CASE("loading against a different network spec names the hash mismatch") {
  const ModelFile m = sample_model();
  NetworkSpec other = m.spec;
  other.embed_dim = 16;
  try {
    deserialize_model(serialize_model(m), other);
    FAIL("expected an error");
  } catch (const ModelFormatError& e) {
    CHECK(std::string(e.what()).find("hash") != std::string::npos);
  }
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(load_model("/nonexistent/m.model"), IoError);
}
