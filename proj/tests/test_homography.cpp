#include <cmath>
#include <vector>

#include "doctest.h"
#include "i3d/error.hpp"
#include "i3d/homography.hpp"
#include "i3d/landmarks.hpp"
#include "i3d/rng.hpp"

using namespace i3d;

namespace {

LandmarkSet seven_points() {
  LandmarkSet lm;
  lm[LandmarkName::nose_tip] = {50, 40};
  lm[LandmarkName::left_eye_outer] = {30, 25};
  lm[LandmarkName::right_eye_outer] = {70, 26};
  lm[LandmarkName::mouth_left] = {38, 60};
  lm[LandmarkName::mouth_right] = {62, 61};
  lm[LandmarkName::face_box_tl] = {15, 10};
  lm[LandmarkName::face_box_br] = {85, 80};
  return lm;
}

// Well-conditioned random projective map near the identity.
Homography random_h(std::mt19937_64& rng) {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};
  m[0] = 1.0 + 0.2 * (uniform01(rng) - 0.5);
  m[1] = 0.2 * (uniform01(rng) - 0.5);
  m[2] = 20.0 * (uniform01(rng) - 0.5);
  m[3] = 0.2 * (uniform01(rng) - 0.5);
  m[4] = 1.0 + 0.2 * (uniform01(rng) - 0.5);
  m[5] = 20.0 * (uniform01(rng) - 0.5);
  m[6] = 2e-4 * (uniform01(rng) - 0.5);
  m[7] = 2e-4 * (uniform01(rng) - 0.5);
  return Homography::from_matrix(m);
}

std::vector<Vec2> random_points(std::mt19937_64& rng, int n) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back({uniform(rng, 5.0, 95.0), uniform(rng, 5.0, 95.0)});
  return pts;
}

double rel_frobenius(const Homography& a, const Homography& b) {
  double num = 0, den = 0;
  for (int k = 0; k < 9; ++k) {
    const double d = a.data()[k] - b.data()[k];
    num += d * d;
    den += b.data()[k] * b.data()[k];
  }
  return std::sqrt(num / den);
}

Image smooth_image(int w, int h) {
  Image img(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      img.at(u, v) = 0.5 + 0.3 * std::sin(u * 0.07) * std::cos(v * 0.05);
  return img;
}

}  // namespace

TEST_CASE("identity correspondences give the identity homography") {
  const LandmarkSet lm = seven_points();
  const Homography h = estimate_homography(lm, lm);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(h(r, c) - (r == c ? 1.0 : 0.0)) < 1e-8);
}

TEST_CASE("pure translation is recovered exactly") {
  const LandmarkSet src = seven_points();
  LandmarkSet dst = src;
  for (int i = 0; i < kNumLandmarks; ++i) {
    dst[static_cast<LandmarkName>(i)].x += 5.0;
    dst[static_cast<LandmarkName>(i)].y -= 3.0;
  }
  const Homography h = estimate_homography(src, dst);
  CHECK(std::abs(h(0, 2) - 5.0) < 1e-8);
  CHECK(std::abs(h(1, 2) + 3.0) < 1e-8);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c)
      CHECK(std::abs(h(r, c) - (r == c ? 1.0 : 0.0)) < 1e-8);
}

TEST_CASE("random ground-truth homography is recovered from exact points") {
  auto rng = make_rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Homography truth = random_h(rng);
    const auto src = random_points(rng, 8);
    std::vector<Vec2> dst;
    for (const auto& p : src) dst.push_back(truth.apply(p));
    const Homography est = estimate_homography(src, dst);
    CHECK(rel_frobenius(est, truth) < 1e-6);
  }
}

TEST_CASE("fewer than 4 correspondences is insufficient") {
  auto rng = make_rng(1);
  const auto src = random_points(rng, 3);
  CHECK_THROWS_AS(estimate_homography(src, src), InsufficientDataError);
}

TEST_CASE("collinear source points are degenerate") {
  std::vector<Vec2> src, dst;
  for (int i = 0; i < 5; ++i) {
    src.push_back({10.0 * i, 20.0 * i});  // all on one line
    dst.push_back({10.0 * i + 1, 20.0 * i + 2});
  }
  CHECK_THROWS_AS(estimate_homography(src, dst), RankError);
}

TEST_CASE("estimate is invariant to uniform coordinate scaling (conjugation)") {
  auto rng = make_rng(77);
  for (const double s : {0.1, 0.5, 2.0, 10.0}) {
    const Homography truth = random_h(rng);
    const auto src = random_points(rng, 10);
    std::vector<Vec2> dst, src_s, dst_s;
    for (const auto& p : src) {
      const Vec2 q = truth.apply(p);
      dst.push_back(q);
      src_s.push_back({s * p.x, s * p.y});
      dst_s.push_back({s * q.x, s * q.y});
    }
    const Homography base = estimate_homography(src, dst);
    const Homography scaled = estimate_homography(src_s, dst_s);
    // conjugate back: H = S^-1 * H_s * S with S = diag(s, s, 1)
    std::array<double, 9> m = scaled.data();
    m[2] /= s;
    m[5] /= s;
    m[6] *= s;
    m[7] *= s;
    const Homography back = Homography::from_matrix(m);
    CHECK(rel_frobenius(back, base) < 1e-6);
  }
}

TEST_CASE("from_matrix rejects singular matrices") {
  CHECK_THROWS_AS(Homography::from_matrix({1, 2, 3, 2, 4, 6, 0, 0, 1}), RankError);
}

TEST_CASE("inverse composes to the identity") {
  auto rng = make_rng(13);
  const Homography h = random_h(rng);
  const Homography inv = h.inverse();
  for (int i = 0; i < 10; ++i) {
    const Vec2 p{uniform(rng, 0.0, 100.0), uniform(rng, 0.0, 100.0)};
    const Vec2 q = inv.apply(h.apply(p));
    CHECK(std::abs(q.x - p.x) < 1e-9);
    CHECK(std::abs(q.y - p.y) < 1e-9);
  }
}

TEST_CASE("warp by the identity is the identity, bit for bit") {
  const Image img = smooth_image(40, 30);
  const MaskedImage out = warp_homography(img, Homography::identity(), 40, 30);
  for (size_t k = 0; k < img.size(); ++k) CHECK(out.image.pixels()[k] == img.pixels()[k]);
  for (int v = 0; v < 30; ++v)
    for (int u = 0; u < 40; ++u) CHECK(out.valid_at(u, v));
}

TEST_CASE("integer translation warp is pixel-exact inside the valid region") {
  const Image img = smooth_image(40, 30);
  const MaskedImage out = warp_homography(img, Homography::translation(3, 2), 40, 30);
  for (int v = 2; v < 30; ++v)
    for (int u = 3; u < 40; ++u) {
      CHECK(out.valid_at(u, v));
      CHECK(out.image.at(u, v) == doctest::Approx(img.at(u - 3, v - 2)).epsilon(1e-12));
    }
  CHECK_FALSE(out.valid_at(0, 0));
}

TEST_CASE("warp round trip H then H^-1 stays close on a smooth image") {
  const Image img = smooth_image(80, 60);
  const Homography h = Homography::from_matrix({1.01, 0.02, 2.5, -0.015, 0.99, -1.5, 1e-5, -1e-5, 1});
  const MaskedImage fwd = warp_homography(img, h, 80, 60);
  const MaskedImage back = warp_homography(fwd.image, h.inverse(), 80, 60);
  double max_diff = 0;
  for (int v = 8; v < 52; ++v)
    for (int u = 8; u < 72; ++u)
      if (back.valid_at(u, v))
        max_diff = std::max(max_diff, std::abs(back.image.at(u, v) - img.at(u, v)));
  CHECK(max_diff < 0.05);
}

TEST_CASE("landmark overload matches the point overload") {
  const LandmarkSet src = seven_points();
  LandmarkSet dst = src;
  for (int i = 0; i < kNumLandmarks; ++i) {
    auto& p = dst[static_cast<LandmarkName>(i)];
    p = {p.x * 1.1 + 2.0, p.y * 0.95 - 1.0};
  }
  std::vector<Vec2> sv, dv;
  for (int i = 0; i < kNumLandmarks; ++i) {
    sv.push_back(src[static_cast<LandmarkName>(i)]);
    dv.push_back(dst[static_cast<LandmarkName>(i)]);
  }
  CHECK(rel_frobenius(estimate_homography(src, dst), estimate_homography(sv, dv)) < 1e-12);
}
