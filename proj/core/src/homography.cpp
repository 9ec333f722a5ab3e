#include "i3d/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace i3d {

Homography Homography::from_matrix(const std::array<double, 9>& m) {
  Homography h;
  h.m_ = m;
  const double d = h.det();
  if (!std::isfinite(d) || std::abs(d) <= 1e-12) {
    throw RankError("homography matrix is singular");
  }
  if (m[8] == 0.0) throw RankError("homography m22 is zero, cannot normalize");
  for (double& x : h.m_) x /= m[8];
  h.m_[8] = 1.0;
  return h;
}

Homography Homography::translation(double du, double dv) {
  Homography h;
  h.m_ = {1, 0, du, 0, 1, dv, 0, 0, 1};
  return h;
}

double Homography::det() const {
  const auto& m = m_;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Vec2 Homography::apply(const Vec2& p) const {
  const auto& m = m_;
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

Homography Homography::inverse() const {
  const auto& m = m_;
  const double d = det();
  if (std::abs(d) <= 1e-12) throw RankError("homography not invertible");
  std::array<double, 9> inv = {
      (m[4] * m[8] - m[5] * m[7]) / d, (m[2] * m[7] - m[1] * m[8]) / d,
      (m[1] * m[5] - m[2] * m[4]) / d, (m[5] * m[6] - m[3] * m[8]) / d,
      (m[0] * m[8] - m[2] * m[6]) / d, (m[2] * m[3] - m[0] * m[5]) / d,
      (m[3] * m[7] - m[4] * m[6]) / d, (m[1] * m[6] - m[0] * m[7]) / d,
      (m[0] * m[4] - m[1] * m[3]) / d};
  return from_matrix(inv);
}

namespace {

struct PointNorm {
  Eigen::Matrix3d t;          // similarity taking raw points to normalized ones
  std::vector<Vec2> points;   // normalized points
};

// Hartley normalization: centroid to the origin, mean distance sqrt(2).
PointNorm normalize_points(const std::vector<Vec2>& pts) {
  double cx = 0, cy = 0;
  for (const Vec2& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean_dist = 0;
  for (const Vec2& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;

  PointNorm out;
  out.t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  out.points.reserve(pts.size());
  for (const Vec2& p : pts) out.points.push_back({s * (p.x - cx), s * (p.y - cy)});
  return out;
}

}  // namespace

Homography estimate_homography(const std::vector<Vec2>& src, const std::vector<Vec2>& dst) {
  if (src.size() != dst.size()) throw ShapeError("correspondence lists differ in length");
  const std::size_t n = src.size();
  if (n < 4) throw InsufficientDataError("homography needs at least 4 correspondences");

  const PointNorm ns = normalize_points(src);
  const PointNorm nd = normalize_points(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = ns.points[i];
    const Vec2& q = nd.points[i];
    a.row(2 * i) << p.x, p.y, 1, 0, 0, 0, -q.x * p.x, -q.x * p.y, -q.x;
    a.row(2 * i + 1) << 0, 0, 0, p.x, p.y, 1, -q.y * p.x, -q.y * p.y, -q.y;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // A unique solution needs rank 8: the nullspace must be one-dimensional.
  if (sv(7) <= 1e-9 * sv(0)) {
    throw RankError("degenerate correspondence configuration (collinear points?)");
  }
  const Eigen::VectorXd hvec = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << hvec(0), hvec(1), hvec(2), hvec(3), hvec(4), hvec(5), hvec(6), hvec(7), hvec(8);

  const Eigen::Matrix3d h = nd.t.inverse() * hn * ns.t;
  return Homography::from_matrix(
      {h(0, 0), h(0, 1), h(0, 2), h(1, 0), h(1, 1), h(1, 2), h(2, 0), h(2, 1), h(2, 2)});
}

Homography estimate_homography(const LandmarkSet& src, const LandmarkSet& dst) {
  std::vector<Vec2> s, d;
  s.reserve(kNumLandmarks);
  d.reserve(kNumLandmarks);
  for (int i = 0; i < kNumLandmarks; ++i) {
    s.push_back(src[static_cast<LandmarkName>(i)]);
    d.push_back(dst[static_cast<LandmarkName>(i)]);
  }
  return estimate_homography(s, d);
}

MaskedImage warp_homography(const Image& img, const Homography& h, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw DimensionError("warp target must be >= 1x1");
  const Homography hinv = h.inverse();
  MaskedImage out;
  out.image = Image(out_w, out_h);
  out.valid.assign(static_cast<std::size_t>(out_w) * out_h, 0);
  const int w = img.width(), ht = img.height();
  for (int v = 0; v < out_h; ++v) {
    double* dst = out.image.row(v);
    std::uint8_t* mask = out.valid.data() + static_cast<std::size_t>(v) * out_w;
    for (int u = 0; u < out_w; ++u) {
      const Vec2 s = hinv.apply({static_cast<double>(u), static_cast<double>(v)});
      if (s.x < 0 || s.x > w - 1 || s.y < 0 || s.y > ht - 1) continue;
      dst[u] = sample_bilinear(img, s.x, s.y);
      mask[u] = 1;
    }
  }
  return out;
}

}  // namespace i3d
