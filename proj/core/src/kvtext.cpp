#include "dnorm/kvtext.hpp"

#include <cctype>
#include <charconv>
#include <limits>

#include "dnorm/error.hpp"

namespace dnorm {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

}  // namespace

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) return std::nullopt;
  }
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) return std::nullopt;
  }
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

void KeyValues::insert(std::string key, std::string value, std::uint64_t offset) {
  if (values_.contains(key)) throw ParseError("duplicate key '" + key + "'", offset);
  offsets_[key] = offset;
  values_.emplace(std::move(key), std::move(value));
}

bool KeyValues::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> KeyValues::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t KeyValues::offset_of(std::string_view key) const {
  const auto it = offsets_.find(key);
  return it == offsets_.end() ? 0 : it->second;
}

std::string KeyValues::get_string(std::string_view key) const {
  auto v = get(key);
  if (!v) throw ParseError("missing key '" + std::string(key) + "'", 0);
  return *v;
}

std::optional<double> KeyValues::find_double(std::string_view key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  const auto d = parse_double(*v);
  if (!d) {
    throw ParseError("value of '" + std::string(key) + "' is not a number: '" + *v + "'",
                     offset_of(key));
  }
  return d;
}

std::optional<long long> KeyValues::find_int(std::string_view key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  const auto i = parse_int(*v);
  if (!i) {
    throw ParseError("value of '" + std::string(key) + "' is not an integer: '" + *v + "'",
                     offset_of(key));
  }
  return i;
}

double KeyValues::get_double(std::string_view key) const {
  const auto d = find_double(key);
  if (!d) throw ParseError("missing key '" + std::string(key) + "'", 0);
  return *d;
}

long long KeyValues::get_int(std::string_view key) const {
  const auto i = find_int(key);
  if (!i) throw ParseError("missing key '" + std::string(key) + "'", 0);
  return *i;
}

std::size_t KeyValues::get_size(std::string_view key) const {
  const long long i = get_int(key);
  if (i < 0) throw ParseError("value of '" + std::string(key) + "' is negative", offset_of(key));
  return static_cast<std::size_t>(i);
}

KeyValues parse_key_value_text(std::string_view text) {
  KeyValues kv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::size_t lead = 0;
    const std::string_view body = trim(line, &lead);
    if (!body.empty()) {
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("expected 'key = value'", pos + lead);
      }
      const std::string_view key = trim(body.substr(0, eq));
      std::size_t value_lead = 0;
      const std::string_view value = trim(body.substr(eq + 1), &value_lead);
      if (key.empty()) throw ParseError("empty key", pos + lead);
      kv.insert(std::string(key), std::string(value), pos + lead + eq + 1 + value_lead);
    }
    pos = end + 1;
  }
  return kv;
}

KeyValues parse_key_value_row(std::string_view row) {
  KeyValues kv;
  std::size_t pos = 0;
  while (pos < row.size()) {
    while (pos < row.size() && is_space(row[pos])) ++pos;
    if (pos >= row.size()) break;
    std::size_t end = pos;
    while (end < row.size() && !is_space(row[end])) ++end;
    const std::string_view token = row.substr(pos, end - pos);
    const auto eq = token.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError("expected key=value token, got '" + std::string(token) + "'", pos);
    }
    kv.insert(std::string(token.substr(0, eq)), std::string(token.substr(eq + 1)), pos + eq + 1);
    pos = end;
  }
  return kv;
}

}  // namespace dnorm
