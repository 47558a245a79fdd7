#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pkgm/common.hpp"

namespace pkgm {

// Split on tabs; no quoting or escaping. Trailing '\r' is stripped first.
inline std::vector<std::string_view> split_tabs(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Calls fn(line_number, fields) for every non-empty line. Line numbers
// are 1-based. Throws IoError if the file cannot be opened.
inline void for_each_tsv_line(
    const std::filesystem::path& path,
    const std::function<void(size_t, const std::vector<std::string_view>&)>&
        fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    fn(lineno, split_tabs(line));
  }
}

}  // namespace pkgm
