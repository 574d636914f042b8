#ifndef CGBENCH_IO_UTIL_HPP
#define CGBENCH_IO_UTIL_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cgbench/error.hpp"

namespace cgbench {

inline std::string read_file(const std::string& path) {
  if (std::filesystem::is_directory(path))
    throw Error(Errc::io_error, path + " is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::io_error, "cannot read " + path);
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
}

/// Writes to a sibling temp file first, then renames over the target, so an
/// interrupted write never leaves a truncated document behind.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  write_file(tmp, content);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot replace " + path);
  }
}

}  // namespace cgbench

#endif  // CGBENCH_IO_UTIL_HPP
