#pragma once

// Flat key-value text, the format of intrinsics files, CLI config files and
// reports. One `key = value` per line or whitespace-separated `key=value`
// tokens on a row; `#` starts a comment.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace dnorm {

class KeyValues {
 public:
  /// Throws ParseError on duplicate keys.
  void insert(std::string key, std::string value, std::uint64_t offset);

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;

  // Typed getters throw ParseError (with the value's byte offset) when the key
  // is missing or the value does not parse completely.
  std::string get_string(std::string_view key) const;
  double get_double(std::string_view key) const;
  long long get_int(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;

  std::optional<double> find_double(std::string_view key) const;
  std::optional<long long> find_int(std::string_view key) const;

  const std::map<std::string, std::string, std::less<>>& entries() const { return values_; }

 private:
  std::uint64_t offset_of(std::string_view key) const;

  std::map<std::string, std::string, std::less<>> values_;
  std::map<std::string, std::uint64_t, std::less<>> offsets_;
};

/// Line-oriented form: `key = value` per line.
KeyValues parse_key_value_text(std::string_view text);

/// Single-row form: `k1=v1 k2=v2 ...`.
KeyValues parse_key_value_row(std::string_view row);

/// Parses a double from the complete string after trimming surrounding
/// whitespace; anything else left over is an error. Accepts "inf", "+inf" and
/// "-inf".
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

}  // namespace dnorm
