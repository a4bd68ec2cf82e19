#pragma once

#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "int128.hpp"
#include "qseries.hpp"

namespace halfint {

namespace coeff_io_detail {

constexpr char kMagic[4] = {'H', 'I', 'C', 'F'};
constexpr std::uint32_t kVersion = 1;

inline std::uint64_t fnv1a64(const unsigned char* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void put_le(std::vector<unsigned char>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

// Minimal two's-complement width; zero encodes as length 0.
inline void put_int(std::vector<unsigned char>& out, i128 v) {
  unsigned char buf[16];
  u128 u = static_cast<u128>(v);
  for (int i = 0; i < 16; ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
  int len = 16;
  if (v == 0) {
    len = 0;
  } else {
    const unsigned char fill = v < 0 ? 0xff : 0x00;
    while (len > 1 && buf[len - 1] == fill && ((buf[len - 2] & 0x80) == (fill & 0x80))) --len;
  }
  out.push_back(static_cast<unsigned char>(len));
  out.insert(out.end(), buf, buf + len);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  return data;
}

inline bool looks_textual(const std::string& s) {
  for (unsigned char c : s)
    if (!(std::isprint(c) || c == '\n' || c == '\r' || c == '\t')) return false;
  return true;
}

inline CoeffTable parse_csv(const std::string& data, const std::string& path) {
  CoeffTable t;
  t.weight_times_two = 13;
  t.alpha.assign(1, 0);
  std::istringstream in(data);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("weight_times_two=");
      if (pos != std::string::npos) t.weight_times_two = std::stoi(line.substr(pos + 17));
      continue;
    }
    if (line == "n,alpha") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected n,alpha");
    try {
      const i128 n = parse_i128(line.substr(0, comma));
      const i128 a = parse_i128(line.substr(comma + 1));
      if (n != i128(t.alpha.size()))
        throw FormatError(path + ":" + std::to_string(lineno) + ": indices must run 1,2,3,...");
      t.alpha.push_back(a);
    } catch (const std::invalid_argument& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const std::out_of_range& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (t.weight_times_two <= 0 || t.weight_times_two % 2 == 0)
    throw FormatError(path + ": weight_times_two must be odd and positive");
  return t;
}

}  // namespace coeff_io_detail

inline std::vector<unsigned char> encode_coeffs(const CoeffTable& t) {
  using namespace coeff_io_detail;
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  put_le(out, kVersion, 4);
  put_le(out, static_cast<std::uint32_t>(t.weight_times_two), 4);
  put_le(out, t.N(), 8);
  for (std::uint64_t n = 1; n <= t.N(); ++n) put_int(out, t.alpha[n]);
  put_le(out, fnv1a64(out.data(), out.size()), 8);
  return out;
}

inline CoeffTable decode_coeffs(const std::string& data, const std::string& path = "<memory>") {
  using namespace coeff_io_detail;
  if (data.size() < 4 || std::memcmp(data.data(), kMagic, 4) != 0) {
    if (looks_textual(data)) return parse_csv(data, path);
    throw FormatError(path + ": bad magic, not a coefficient file");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  const std::size_t header = 4 + 4 + 4 + 8;
  if (data.size() < header + 8) throw ChecksumError(path + ": file truncated");
  const std::size_t body = data.size() - 8;
  if (fnv1a64(p, body) != get_le(p + body, 8)) throw ChecksumError(path + ": checksum mismatch");
  const auto version = static_cast<std::uint32_t>(get_le(p + 4, 4));
  if (version != kVersion)
    throw FormatError(path + ": unsupported format version " + std::to_string(version));
  CoeffTable t;
  t.weight_times_two = static_cast<int>(get_le(p + 8, 4));
  const std::uint64_t N = get_le(p + 12, 8);
  if (N > (body - header)) throw FormatError(path + ": record count exceeds file size");
  t.alpha.assign(N + 1, 0);
  std::size_t pos = header;
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (pos >= body) throw FormatError(path + ": record stream ends early");
    const unsigned len = p[pos++];
    if (len > 16 || pos + len > body) throw FormatError(path + ": bad record length");
    u128 u = 0;
    for (unsigned i = 0; i < len; ++i) u |= u128(p[pos + i]) << (8 * i);
    if (len > 0 && len < 16 && (p[pos + len - 1] & 0x80)) u |= ~u128(0) << (8 * len);
    t.alpha[n] = static_cast<i128>(u);
    pos += len;
  }
  if (pos != body) throw FormatError(path + ": trailing bytes after records");
  return t;
}

inline void save_coeffs(const CoeffTable& t, const std::string& path) {
  const auto bytes = encode_coeffs(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

inline CoeffTable load_coeffs(const std::string& path) {
  return decode_coeffs(coeff_io_detail::read_file(path), path);
}

}  // namespace halfint
