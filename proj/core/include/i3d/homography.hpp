#pragma once

#include <array>
#include <vector>

#include "i3d/image.hpp"
#include "i3d/landmarks.hpp"
#include "i3d/vec.hpp"

namespace i3d {

// 3x3 projective transform, normalized so m[2][2] == 1.
class Homography {
 public:
  Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

  // Validates invertibility (|det| > 1e-12) and normalizes m22 to 1.
  static Homography from_matrix(const std::array<double, 9>& m);
  static Homography identity() { return Homography(); }
  static Homography translation(double du, double dv);

  double operator()(int r, int c) const { return m_[r * 3 + c]; }
  const std::array<double, 9>& data() const { return m_; }

  Vec2 apply(const Vec2& p) const;
  Homography inverse() const;
  double det() const;

 private:
  std::array<double, 9> m_;
};

// Direct linear transform with Hartley point normalization; least squares
// via the smallest singular vector of the stacked 2n x 9 system. The
// result maps src points onto dst points.
Homography estimate_homography(const std::vector<Vec2>& src, const std::vector<Vec2>& dst);

// Same, using the named correspondences of two landmark sets.
Homography estimate_homography(const LandmarkSet& src, const LandmarkSet& dst);

// Inverse-mapping warp with bilinear sampling: output lives in the
// destination frame of h, out(p) = img(h^-1(p)). Out-of-bounds samples
// are 0 and flagged invalid in the mask.
MaskedImage warp_homography(const Image& img, const Homography& h, int out_w, int out_h);

}  // namespace i3d
