#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace invforge {

/// Ordered flat `key=value` text, one pair per line. Blank lines and lines
/// starting with '#' are ignored on parse. Keys are unique.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text, std::string_view origin = "<text>");
  static KeyValues read_file(const std::string& path);

  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::int64_t value);
  void set(std::string key, std::uint64_t value);
  void set(std::string key, int value) { set(std::move(key), static_cast<std::int64_t>(value)); }

  bool contains(std::string_view key) const;
  const std::string& get(std::string_view key) const;  // throws ConfigError if absent
  std::string get_or(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::uint64_t get_uint(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  std::string to_string() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Round-trip-exact decimal text for a double.
std::string format_double(double value);
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);
std::vector<double> parse_double_list(std::string_view text, std::string_view what);

/// Writes `contents` to `path` via a temporary sibling and rename, so a
/// failed write never leaves a partial file under the final name.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace invforge
