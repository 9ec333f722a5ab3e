#include <array>
#include <cmath>

#include "i3d/error.hpp"
#include "i3d/features.hpp"

namespace i3d {

namespace {

// 8-neighborhood, bit i set when neighbor i exceeds the center. Uniform
// patterns (at most two 0/1 transitions around the ring) get their own
// bins in first-seen order; everything else shares bin 58.
constexpr int kBins = 59;

std::array<int, 256> build_uniform_table() {
  std::array<int, 256> table{};
  int next = 0;
  for (int p = 0; p < 256; ++p) {
    const int rotated = ((p << 1) | (p >> 7)) & 0xff;
    const int transitions = __builtin_popcount(p ^ rotated);
    table[p] = transitions <= 2 ? next++ : -1;
  }
  for (int p = 0; p < 256; ++p) {
    if (table[p] < 0) table[p] = kBins - 1;
  }
  return table;
}

const std::array<int, 256>& uniform_table() {
  static const std::array<int, 256> table = build_uniform_table();
  return table;
}

constexpr int kDu[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDv[8] = {0, 1, 1, 1, 0, -1, -1, -1};

}  // namespace

FeatureVector lbp_descriptor(const Image& i_f, const LandmarkSet& lm) {
  const PatchRegion face = make_face_region(lm, i_f.width(), i_f.height());
  if (face.width() < 9 || face.height() < 9) {
    throw RegionError("face patch too small for a 3x3 LBP grid");
  }
  const auto& table = uniform_table();

  FeatureVector fv;
  fv.layout = FeatureLayout::lbp531;
  fv.values.assign(kLbpDim, 0.0f);

  for (int cy = 0; cy < 3; ++cy) {
    for (int cx = 0; cx < 3; ++cx) {
      const int ux0 = face.x0 + face.width() * cx / 3;
      const int ux1 = face.x0 + face.width() * (cx + 1) / 3;
      const int vy0 = face.y0 + face.height() * cy / 3;
      const int vy1 = face.y0 + face.height() * (cy + 1) / 3;

      std::array<double, kBins> hist{};
      double total = 0;
      for (int v = vy0; v < vy1; ++v) {
        if (v < 1 || v >= i_f.height() - 1) continue;
        const double* r0 = i_f.row(v);
        for (int u = ux0; u < ux1; ++u) {
          if (u < 1 || u >= i_f.width() - 1) continue;
          const double c = r0[u];
          int code = 0;
          for (int k = 0; k < 8; ++k) {
            if (i_f.at(u + kDu[k], v + kDv[k]) > c) code |= 1 << k;
          }
          hist[table[code]] += 1.0;
          total += 1.0;
        }
      }
      if (total <= 0) throw RegionError("empty LBP cell");
      float* dst = fv.values.data() + (cy * 3 + cx) * kBins;
      for (int b = 0; b < kBins; ++b) {
        dst[b] = static_cast<float>(hist[b] / total);
      }
    }
  }
  return fv;
}

FeatureVector chan_features(const Image& i_a, const Image& i_f, const LandmarkSet& lm) {
  if (i_a.width() != i_f.width() || i_a.height() != i_f.height()) {
    throw ShapeError("flash pair must be registered to equal dims");
  }
  FeatureVector fv = lbp_descriptor(i_f, lm);
  fv.layout = FeatureLayout::chan532;

  const PatchRegion face = make_face_region(lm, i_f.width(), i_f.height());
  double sum = 0, sum2 = 0, n = 0;
  for (int v = face.y0; v < face.y1; ++v) {
    const double* fa = i_a.row(v);
    const double* ff = i_f.row(v);
    for (int u = face.x0; u < face.x1; ++u) {
      const double d = ff[u] - fa[u];
      sum += d;
      sum2 += d * d;
      n += 1.0;
    }
  }
  const double mean = sum / n;
  const double var = std::max(sum2 / n - mean * mean, 0.0);
  fv.values.push_back(static_cast<float>(std::sqrt(var)));
  return fv;
}

}  // namespace i3d
