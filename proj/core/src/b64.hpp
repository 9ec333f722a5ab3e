#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "i3d/error.hpp"

namespace i3d::detail {

inline const char* b64_alphabet() {
  return "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

inline std::string b64_encode(const unsigned char* data, std::size_t n) {
  const char* abc = b64_alphabet();
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= n; i += 3) {
    unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(abc[(v >> 18) & 63]);
    out.push_back(abc[(v >> 12) & 63]);
    out.push_back(abc[(v >> 6) & 63]);
    out.push_back(abc[v & 63]);
  }
  if (i + 1 == n) {
    unsigned v = data[i] << 16;
    out.push_back(abc[(v >> 18) & 63]);
    out.push_back(abc[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (i + 2 == n) {
    unsigned v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(abc[(v >> 18) & 63]);
    out.push_back(abc[(v >> 12) & 63]);
    out.push_back(abc[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline std::vector<unsigned char> b64_decode(const std::string& s) {
  int lut[256];
  for (int i = 0; i < 256; ++i) lut[i] = -1;
  const char* abc = b64_alphabet();
  for (int i = 0; i < 64; ++i) lut[static_cast<unsigned char>(abc[i])] = i;
  std::vector<unsigned char> out;
  out.reserve(s.size() / 4 * 3);
  unsigned acc = 0;
  int bits = 0;
  for (char c : s) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    int v = lut[static_cast<unsigned char>(c)];
    if (v < 0) throw IoError("invalid base64 character");
    acc = (acc << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((acc >> bits) & 0xff));
    }
  }
  return out;
}

// float32 little-endian pack, independent of host byte order
inline std::string b64_encode_f32(const std::vector<float>& v) {
  std::vector<unsigned char> bytes(v.size() * 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint32_t u;
    std::memcpy(&u, &v[i], 4);
    bytes[4 * i + 0] = static_cast<unsigned char>(u & 0xff);
    bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
    bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
  }
  return b64_encode(bytes.data(), bytes.size());
}

inline std::vector<float> b64_decode_f32(const std::string& s, std::size_t expect) {
  std::vector<unsigned char> bytes = b64_decode(s);
  if (bytes.size() != expect * 4) throw IoError("model payload size mismatch");
  std::vector<float> v(expect);
  for (std::size_t i = 0; i < expect; ++i) {
    std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
    std::memcpy(&v[i], &u, 4);
  }
  return v;
}

}  // namespace i3d::detail
