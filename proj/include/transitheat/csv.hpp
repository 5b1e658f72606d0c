#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "transitheat/timeutil.hpp"

namespace transitheat::csv {

inline void strip_bom(std::string& line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF)
    line.erase(0, 3);
}

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// RFC-style quoting: quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  out.reserve(16);
  std::string cell;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == ',' && !quoted) {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\r') {
      continue;
    } else {
      cell += c;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// Streaming reader over a header-first comma-separated table.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path.string()), in_(path) {
    if (!in_) throw InputError("cannot open " + path_);
    std::string header;
    if (!std::getline(in_, header)) throw InputError(path_ + ": empty file");
    strip_bom(header);
    header_ = split_line(header);
    for (size_t i = 0; i < header_.size(); ++i) cols_[trim(header_[i])] = i;
    line_no_ = 1;
  }

  const std::string& path() const { return path_; }
  long line_no() const { return line_no_; }
  const std::vector<std::string>& header() const { return header_; }

  bool has_col(const std::string& name) const { return cols_.count(name) > 0; }

  int col(const std::string& name) const {
    auto it = cols_.find(name);
    return it == cols_.end() ? -1 : static_cast<int>(it->second);
  }

  int require_col(const std::string& name) const {
    auto it = cols_.find(name);
    if (it == cols_.end())
      throw InputError(path_ + ": missing required column '" + name + "'");
    return static_cast<int>(it->second);
  }

  // Skips blank lines. Returns false at EOF.
  bool next(std::vector<std::string>& row) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      row = split_line(line);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw InputError(path_ + ":" + std::to_string(line_no_) + ": field '" + field +
                     "': " + msg);
  }

  const std::string& get(const std::vector<std::string>& row, int idx,
                         const std::string& field) const {
    if (idx < 0 || idx >= static_cast<int>(row.size()))
      fail(field, "missing value");
    return row[static_cast<size_t>(idx)];
  }

  double get_double(const std::vector<std::string>& row, int idx,
                    const std::string& field) const {
    const std::string& s = get(row, idx, field);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      fail(field, "not a number: '" + s + "'");
    return v;
  }

  long get_long(const std::vector<std::string>& row, int idx,
                const std::string& field) const {
    const std::string& s = get(row, idx, field);
    long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      fail(field, "not an integer: '" + s + "'");
    return v;
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, size_t> cols_;
  long line_no_ = 0;
};

// key = value config text; '#' starts a comment; keys are unique.
inline std::unordered_map<std::string, std::string> parse_kv_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::unordered_map<std::string, std::string> kv;
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n == 1) strip_bom(line);
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError(path.string() + ":" + std::to_string(n) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw InputError(path.string() + ":" + std::to_string(n) + ": empty key");
    if (!kv.emplace(key, val).second)
      throw InputError(path.string() + ":" + std::to_string(n) + ": duplicate key '" + key + "'");
  }
  return kv;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace transitheat::csv
