#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "ixa/query.hpp"
#include "ixa/schema.hpp"

namespace testing {

// Two-attribute schema used by the worked examples.
inline ixa::Schema name_age_schema() {
  return ixa::Schema({{"name", ixa::AttrType::String, 1000, 0, 0},
                      {"age", ixa::AttrType::Int, 100, 0, 99}});
}

inline ixa::Query eq_count(const std::string& field, ixa::Literal value) {
  return {ixa::make_predicate(ixa::CmpOp::Eq, field, std::move(value)), ixa::Aggregation::count()};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ixa_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace testing
