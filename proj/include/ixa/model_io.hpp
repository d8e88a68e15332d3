#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "ixa/network.hpp"
#include "ixa/vocabulary.hpp"

namespace ixa {

// Model file layout, all integers little-endian:
//   magic "IXQN" | u32 version | u64 spec hash
//   u32 length + canonical network spec JSON
//   u32 token count, then per token: u32 length + bytes (id order)
//   u32 length + metadata JSON
//   u32 tensor count, then per tensor: u64 element count + f64 values
//   (declaration order, row-major)
inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelFile {
  NetworkSpec spec;
  Params params;
  Vocabulary vocab;
  nlohmann::json meta;
};

/// Throws IoError.
void save_model(const std::filesystem::path& path, const ModelFile& model);
std::string serialize_model(const ModelFile& model);

/// Throws ModelFormatError on a bad magic, version, hash or truncated data.
/// With `expected`, the stored spec hash must equal expected->hash().
ModelFile load_model(const std::filesystem::path& path,
                     const std::optional<NetworkSpec>& expected = std::nullopt);
ModelFile deserialize_model(std::string_view bytes,
                            const std::optional<NetworkSpec>& expected = std::nullopt);

}  // namespace ixa
