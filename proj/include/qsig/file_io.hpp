#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "qsig/error.hpp"

namespace qsig {

// Binary-exact file helpers. Everything in the pipeline is bytes (tokens,
// keys, envelopes), so text-mode translation must never get a chance.
inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw error(errc::io_error, "failed reading " + path.string());
  }
  return std::move(buffer).str();
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error(errc::io_error, "cannot open " + path.string() + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out.good()) throw error(errc::io_error, "failed writing " + path.string());
}

}  // namespace qsig
