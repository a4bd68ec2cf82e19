#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace halfint {

using i128 = __int128;
using u128 = unsigned __int128;

inline int sign(i128 v) { return (v > 0) - (v < 0); }

inline i128 abs128(i128 v) { return v < 0 ? -v : v; }

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  // magnitude as unsigned so INT128_MIN survives
  u128 mag = neg ? u128(0) - u128(v) : u128(v);
  std::string out;
  while (mag != 0) {
    out.push_back(char('0' + int(mag % 10)));
    mag /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

inline i128 parse_i128(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  bool neg = false;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
    neg = s[pos] == '-';
    ++pos;
  }
  std::size_t end = s.size();
  while (end > pos && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
  if (pos == end) throw std::invalid_argument("empty integer literal");
  u128 mag = 0;
  const u128 limit = u128(1) << 127;
  for (std::size_t i = pos; i < end; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') throw std::invalid_argument("bad integer literal: " + std::string(s));
    mag = mag * 10 + u128(c - '0');
    if (mag > limit) throw std::out_of_range("integer literal exceeds 128 bits");
  }
  if (!neg && mag == limit) throw std::out_of_range("integer literal exceeds 128 bits");
  return neg ? i128(u128(0) - mag) : i128(mag);
}

inline i128 checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("128-bit multiply overflow");
  return r;
}

inline i128 checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("128-bit add overflow");
  return r;
}

inline i128 ipow(i128 base, unsigned e) {
  i128 r = 1;
  while (e--) r = checked_mul(r, base);
  return r;
}

inline long double to_ld(i128 v) { return static_cast<long double>(v); }

}  // namespace halfint
