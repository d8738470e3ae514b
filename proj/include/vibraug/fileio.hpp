#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "vibraug/error.hpp"

namespace vibraug {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path.string() + "'");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("error reading file '" + path.string() + "'");
  return content;
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("error writing file '" + path.string() + "'");
}

// Write-to-temp then rename, so readers never observe a half-written file.
inline void atomic_write_file(const std::filesystem::path& path,
                              std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error("cannot replace file '" + path.string() + "': " + ec.message());
}

}  // namespace vibraug
