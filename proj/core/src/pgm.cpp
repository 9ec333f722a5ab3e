#include "i3d/pgm.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace i3d {

namespace {

// Skips PNM whitespace and '#' comments, then reads one unsigned integer.
long read_pnm_int(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) throw IoError("malformed PNM header");
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

}  // namespace

void write_pgm(const Image& img, const std::filesystem::path& path, int maxval) {
  if (maxval != 255 && maxval != 65535) throw IoError("PGM maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
  const int w = img.width(), h = img.height();
  if (maxval == 255) {
    std::vector<std::uint8_t> row(w);
    for (int v = 0; v < h; ++v) {
      const double* src = img.row(v);
      for (int u = 0; u < w; ++u) {
        double x = src[u];
        x = x < 0 ? 0 : (x > 1 ? 1 : x);
        row[u] = static_cast<std::uint8_t>(std::lround(x * 255.0));
      }
      out.write(reinterpret_cast<const char*>(row.data()), w);
    }
  } else {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 2);
    for (int v = 0; v < h; ++v) {
      const double* src = img.row(v);
      for (int u = 0; u < w; ++u) {
        double x = src[u];
        x = x < 0 ? 0 : (x > 1 ? 1 : x);
        const auto q = static_cast<std::uint16_t>(std::lround(x * 65535.0));
        row[2 * u] = static_cast<std::uint8_t>(q >> 8);  // PGM is big-endian
        row[2 * u + 1] = static_cast<std::uint8_t>(q & 0xff);
      }
      out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') throw IoError("not a binary PGM: " + path.string());
  const long w = read_pnm_int(in);
  const long h = read_pnm_int(in);
  const long maxval = read_pnm_int(in);
  if (w < 1 || h < 1 || (maxval != 255 && maxval != 65535)) {
    throw IoError("unsupported PGM geometry in " + path.string());
  }
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  if (maxval == 255) {
    std::vector<std::uint8_t> raw(px.size());
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoError("truncated PGM: " + path.string());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = raw[i] / 255.0;
  } else {
    std::vector<std::uint8_t> raw(px.size() * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoError("truncated PGM: " + path.string());
    for (std::size_t i = 0; i < px.size(); ++i) {
      const std::uint16_t q = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
      px[i] = q / 65535.0;
    }
  }
  return Image::from_data(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

void write_pfm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "Pf\n" << img.width() << " " << img.height() << "\n-1.0\n";
  const int w = img.width(), h = img.height();
  std::vector<float> row(w);
  for (int v = h - 1; v >= 0; --v) {  // PFM stores rows bottom-up
    const double* src = img.row(v);
    for (int u = 0; u < w; ++u) row[u] = static_cast<float>(src[u]);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Image read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "Pf") throw IoError("not a grayscale PFM: " + path.string());
  long w = 0, h = 0;
  double scale = 0.0;
  in >> w >> h >> scale;
  in.get();  // single whitespace after the scale line
  if (w < 1 || h < 1 || scale >= 0.0) {
    throw IoError("unsupported PFM header in " + path.string());
  }
  std::vector<double> px(static_cast<std::size_t>(w) * h);
  std::vector<float> row(static_cast<std::size_t>(w));
  for (long v = h - 1; v >= 0; --v) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("truncated PFM: " + path.string());
    for (long u = 0; u < w; ++u) px[static_cast<std::size_t>(v) * w + u] = row[u];
  }
  return Image::from_data(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

}  // namespace i3d
