#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "i3d/dataset.hpp"
#include "i3d/error.hpp"
#include "i3d/features.hpp"
#include "i3d/rng.hpp"
#include "i3d/sim.hpp"

using namespace i3d;

namespace {

LandmarkSet box_landmarks(double x0, double y0, double x1, double y1) {
  LandmarkSet lm;
  const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2, w = x1 - x0, h = y1 - y0;
  lm[LandmarkName::face_box_tl] = {x0, y0};
  lm[LandmarkName::face_box_br] = {x1, y1};
  lm[LandmarkName::nose_tip] = {cx, cy};
  lm[LandmarkName::left_eye_outer] = {cx - 0.3 * w, cy - 0.25 * h};
  lm[LandmarkName::right_eye_outer] = {cx + 0.3 * w, cy - 0.25 * h};
  lm[LandmarkName::mouth_left] = {cx - 0.2 * w, cy + 0.3 * h};
  lm[LandmarkName::mouth_right] = {cx + 0.2 * w, cy + 0.3 * h};
  return lm;
}

SceneSpec face_scene(uint64_t subject_seed = 7, int w = 192, int h = 108) {
  const SubjectParams sub = sample_subject(subject_seed, 0);
  SceneSpec sc;
  sc.surface.kind = SurfaceKind::face;
  sc.surface.bumps = sub.bumps;
  sc.surface.anchors = sub.anchors;
  sc.surface.albedo.base = 0.6;
  sc.surface.albedo.noise_amp = 0.0;
  sc.ambient = {light_from_angles(15, 30, 1.0)};
  sc.camera.width = w;
  sc.camera.height = h;
  sc.subject_id = sub.id;
  return sc;
}

Image smooth_texture(int w, int h) {
  Image img(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      img.at(u, v) = 0.5 + 0.25 * std::sin(u * 0.21) + 0.15 * std::cos((u + 2 * v) * 0.13);
  return img;
}

double median_of(std::vector<double> v) {
  REQUIRE_FALSE(v.empty());
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Straight per-pixel uniform-LBP(8,1), the independent oracle for lbp.cpp.
std::vector<double> naive_lbp531(const Image& img, const PatchRegion& face) {
  auto bin_of = [](int code) {
    int transitions = 0;
    for (int k = 0; k < 8; ++k) {
      const int a = (code >> k) & 1, b = (code >> ((k + 1) % 8)) & 1;
      transitions += a != b;
    }
    if (transitions > 2) return 58;
    int bin = 0;  // uniform codes take bins in ascending numeric order
    for (int p = 0; p < code; ++p) {
      int t = 0;
      for (int k = 0; k < 8; ++k) t += ((p >> k) & 1) != ((p >> ((k + 1) % 8)) & 1);
      bin += t <= 2;
    }
    return bin;
  };
  const int du[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  const int dv[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  std::vector<double> out(531, 0.0);
  for (int cy = 0; cy < 3; ++cy)
    for (int cx = 0; cx < 3; ++cx) {
      std::array<double, 59> hist{};
      double total = 0;
      for (int v = face.y0 + face.height() * cy / 3; v < face.y0 + face.height() * (cy + 1) / 3;
           ++v) {
        if (v < 1 || v >= img.height() - 1) continue;
        for (int u = face.x0 + face.width() * cx / 3;
             u < face.x0 + face.width() * (cx + 1) / 3; ++u) {
          if (u < 1 || u >= img.width() - 1) continue;
          int code = 0;
          for (int k = 0; k < 8; ++k)
            if (img.at(u + du[k], v + dv[k]) > img.at(u, v)) code |= 1 << k;
          hist[bin_of(code)] += 1.0;
          total += 1.0;
        }
      }
      for (int b = 0; b < 59; ++b) out[(cy * 3 + cx) * 59 + b] = hist[b] / total;
    }
  return out;
}

}  // namespace

TEST_CASE("face region insets the landmark box and stays inside the image") {
  const LandmarkSet lm = box_landmarks(20, 10, 80, 70);
  const PatchRegion r = make_face_region(lm, 100, 80);
  CHECK(r.x0 >= 20);
  CHECK(r.y0 >= 10);
  CHECK(r.x1 <= 81);
  CHECK(r.y1 <= 71);
  CHECK(r.width() > 40);
  CHECK(r.height() > 40);

  const PatchRegion clipped = make_face_region(box_landmarks(-30, -20, 50, 40), 100, 80);
  CHECK(clipped.x0 >= 0);
  CHECK(clipped.y0 >= 0);
}

TEST_CASE("nose region is a square quarter of the inter-ocular span") {
  const LandmarkSet lm = box_landmarks(20, 10, 80, 70);
  const PatchRegion r = make_nose_region(lm, 100, 80);
  const double side = 0.25 * lm.interocular();
  CHECK(std::abs(r.width() - side) <= 2.0);
  CHECK(std::abs(r.height() - side) <= 2.0);
  const Vec2 nose = lm[LandmarkName::nose_tip];
  CHECK(std::abs((r.x0 + r.x1 - 1) / 2.0 - nose.x) <= 1.0);
  CHECK(std::abs((r.y0 + r.y1 - 1) / 2.0 - nose.y) <= 1.0);
}

TEST_CASE("a region that clips away entirely is an error") {
  LandmarkSet lm = box_landmarks(2, 2, 8, 8);
  lm[LandmarkName::left_eye_outer] = {4.0, 3.0};
  lm[LandmarkName::right_eye_outer] = {4.4, 3.0};  // tiny inter-ocular span
  CHECK_THROWS_AS(make_nose_region(lm, 100, 80), RegionError);
}

TEST_CASE("register_flash_pair with identical landmarks skips the warp") {
  const Image a = smooth_texture(64, 48);
  Image f = smooth_texture(64, 48);
  for (double& p : f.pixels()) p *= 1.2;
  const LandmarkSet lm = box_landmarks(10, 8, 54, 40);
  const RegisteredPair rp = register_flash_pair(a, f, lm, lm, 64, 48);
  CHECK(rp.flash.pixels() == f.pixels());
  CHECK(rp.ambient.pixels() == a.pixels());
  CHECK(rp.landmarks == lm);
}

TEST_CASE("registration undoes a known flash-shot camera jitter") {
  SceneSpec sc = face_scene();
  sc.flash = light_from_angles(25, 0, 0.4);
  const Vec2 center{(sc.camera.width - 1) / 2.0, (sc.camera.height - 1) / 2.0};
  sc.flash_jitter = Similarity::from_parts(1.004, 0.006, 1.6, -1.1, center);
  const FlashPair fp = render_flash_pair(sc);

  SceneSpec steady = sc;
  steady.flash_jitter = Similarity{};
  const FlashPair truth = render_flash_pair(steady);

  const int ww = sc.camera.width, wh = sc.camera.height;
  const RegisteredPair rp =
      register_flash_pair(fp.ambient, fp.flash, fp.lm_ambient, fp.lm_flash, ww, wh);
  double sum = 0;
  int n = 0;
  for (int v = 4; v < wh - 4; ++v)
    for (int u = 4; u < ww - 4; ++u) {
      sum += std::abs(rp.flash.at(u, v) - truth.flash.at(u, v));
      ++n;
    }
  CHECK(sum / n < 0.01);
}

TEST_CASE("permuted landmarks cannot be registered") {
  const Image a = smooth_texture(64, 48);
  const LandmarkSet lm = box_landmarks(10, 8, 54, 40);
  LandmarkSet bad = lm;
  std::swap(bad[LandmarkName::nose_tip], bad[LandmarkName::face_box_tl]);
  CHECK_THROWS_AS(register_flash_pair(a, a, lm, bad, 64, 48), GeometryError);
}

TEST_CASE("i3d of an unchanged pair is all zero") {
  const Image a = smooth_texture(64, 48);
  const PatchRegion r{RegionKind::face, 8, 8, 56, 40};
  const FeatureVector fv = compute_i3d(a, a, r);
  CHECK(fv.dim() == 28 * 28);
  for (float v : fv.values) CHECK(v == 0.0f);
}

TEST_CASE("i3d of constant images is the hand ratio (0.6-0.4)/0.4") {
  const Image a(40, 40, 0.4), f(40, 40, 0.6);
  const PatchRegion r{RegionKind::face, 4, 4, 36, 36};
  const FeatureVector fv = compute_i3d(a, f, r);
  for (float v : fv.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("i3d matches the normals-based oracle away from grazing angles") {
  SceneSpec sc = face_scene(11, 160, 90);
  sc.flash = light_from_angles(28, 0, 0.45);
  RenderMaps maps;
  const FlashPair fp = render_flash_pair(sc, &maps);

  // square region so the patch resample is the identity
  const PatchRegion r{RegionKind::nose, 48, 16, 120, 88};
  const FeatureVector fv = compute_i3d(fp.ambient, fp.flash, r, kI3dEps, 72);
  double worst = 0;
  int checked = 0;
  for (int v = r.y0; v < r.y1; ++v)
    for (int u = r.x0; u < r.x1; ++u) {
      const double amb = maps.ambient_response.at(u, v);
      const double nz = maps.nz.at(u, v);
      if (amb < 0.15 || nz < 0.3) continue;  // grazing; clamp may bite
      const double oracle = maps.flash_response.at(u, v) / amb;
      const double got = fv.values[(v - r.y0) * 72 + (u - r.x0)];
      worst = std::max(worst, std::abs(got - oracle) / std::max(oracle, 1e-3));
      ++checked;
    }
  REQUIRE(checked > 1000);
  CHECK(worst < 0.01);
}

TEST_CASE("i3d is invariant to a global exposure change") {
  SceneSpec sc = face_scene(3, 96, 54);
  sc.flash = light_from_angles(30, 180, 0.35);
  const FlashPair fp = render_flash_pair(sc);
  const PatchRegion r{RegionKind::face, 10, 6, 86, 48};
  const FeatureVector base = compute_i3d(fp.ambient, fp.flash, r);
  for (const double k : {0.5, 2.0, 3.7}) {
    Image a = fp.ambient, f = fp.flash;
    for (double& p : a.pixels()) p *= k;
    for (double& p : f.pixels()) p *= k;
    const FeatureVector scaled = compute_i3d(a, f, r);
    for (int i = 0; i < base.dim(); ++i) {
      CHECK(std::abs(scaled.values[i] - base.values[i]) <=
            1e-9 * std::max(1.0f, std::abs(base.values[i])));
    }
  }
}

TEST_CASE("i3d does not see the albedo map") {
  SceneSpec s1 = face_scene(5, 128, 72);
  s1.flash = light_from_angles(24, 0, 0.4);
  SceneSpec s2 = s1;
  s1.surface.albedo = AlbedoSpec{0.45, 0.25, 0.0023, 101, nullptr, 1.0, 0, 0};
  s2.surface.albedo = AlbedoSpec{0.75, 0.25, 0.0023, 202, nullptr, 1.0, 0, 0};
  const FlashPair p1 = render_flash_pair(s1);
  const FlashPair p2 = render_flash_pair(s2);
  const PatchRegion r{RegionKind::face, 16, 8, 112, 64};
  const FeatureVector f1 = compute_i3d(p1.ambient, p1.flash, r);
  const FeatureVector f2 = compute_i3d(p2.ambient, p2.flash, r);
  double worst = 0;
  for (int i = 0; i < f1.dim(); ++i)
    worst = std::max(worst, std::abs(double(f1.values[i]) - f2.values[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("da3d of identical views is exactly zero") {
  const Image j = smooth_texture(96, 54);
  const LandmarkSet lm = box_landmarks(14, 8, 82, 46);
  const PatchRegion r = make_face_region(lm, 96, 54);
  const FeatureVector fv = compute_da3d(j, j, lm, lm, r, kDa3dGradEps, kDa3dClip, 96, 54);
  CHECK(fv.layout == FeatureLayout::da3d_patch);
  for (float v : fv.values) CHECK(v == 0.0f);
}

TEST_CASE("da3d recovers a synthetic sub-pixel shift to first order") {
  const Image j = smooth_texture(128, 64);
  const double s = 0.5;
  const Image left = translate(j, s, 0).image;  // left(u) = j(u - s)
  const LandmarkSet lm = box_landmarks(20, 10, 108, 54);
  const PatchRegion r = make_face_region(lm, 128, 64);
  const FeatureVector fv =
      compute_da3d(left, j, lm, lm, r, kDa3dGradEps, kDa3dClip, 128, 64);
  std::vector<double> strong;
  for (float v : fv.values)
    if (v != 0.0f) strong.push_back(v);
  const double med = median_of(strong);
  CHECK(med < -0.8 * s);
  CHECK(med > -1.2 * s);
}

TEST_CASE("swapping the stereo roles negates the recovered shift") {
  const Image j = smooth_texture(128, 64);
  const double s = 0.5;
  const Image left = translate(j, s, 0).image;
  const LandmarkSet lm = box_landmarks(20, 10, 108, 54);
  const PatchRegion r = make_face_region(lm, 128, 64);
  auto med_of = [&](const Image& a, const Image& b) {
    const FeatureVector fv = compute_da3d(a, b, lm, lm, r, kDa3dGradEps, kDa3dClip, 128, 64);
    std::vector<double> strong;
    for (float v : fv.values)
      if (v != 0.0f) strong.push_back(v);
    return median_of(strong);
  };
  const double fwd = med_of(left, j);
  const double rev = med_of(j, left);
  CHECK(std::abs(fwd + rev) < 0.25 * std::abs(fwd));
}

TEST_CASE("a flat print's constant parallax cancels after nose alignment") {
  SceneSpec live = face_scene(9, 128, 72);
  PrintParams pp;
  pp.bake_width = 128;
  pp.bake_height = 72;
  SceneSpec spoof = spoofify(live, SpoofKind::flat, pp);
  spoof.camera.focal_px = 300;
  spoof.camera.baseline = 0.03;  // disparity = 300*0.03/3 = 3 px exactly
  const StereoPair sp = render_stereo_pair(spoof);
  const PatchRegion r = make_face_region(sp.lm_left, 128, 72);
  const FeatureVector fv = compute_da3d(sp.left, sp.right, sp.lm_left, sp.lm_right, r,
                                        kDa3dGradEps, kDa3dClip, 128, 72);
  // integer disparity cancels exactly under the integer nose alignment, so
  // the residual field is (near) zero everywhere, weak gradients included
  double worst = 0.0;
  for (float v : fv.values) worst = std::max(worst, std::abs(static_cast<double>(v)));
  CHECK(worst < 0.05);
}

TEST_CASE("lbp of a constant image concentrates every cell in the zero bin") {
  const Image img(80, 80, 0.42);
  const LandmarkSet lm = box_landmarks(8, 8, 72, 72);
  const FeatureVector fv = lbp_descriptor(img, lm);
  REQUIRE(fv.dim() == 531);
  for (int cell = 0; cell < 9; ++cell) {
    CHECK(fv.values[cell * 59 + 0] == doctest::Approx(1.0));
    for (int b = 1; b < 59; ++b) CHECK(fv.values[cell * 59 + b] == 0.0f);
  }
}

TEST_CASE("lbp cell histograms are identical on a periodic vertical stripe") {
  // landmark box chosen so the inset face region splits into equal cells
  // whose widths are multiples of the stripe period and phase-aligned
  Image img(140, 140, 0.0);
  for (int v = 0; v < 140; ++v)
    for (int u = 0; u < 140; ++u) img.at(u, v) = (u / 2) % 2 ? 0.8 : 0.2;
  LandmarkSet lm = box_landmarks(10, 10, 129, 129);
  const PatchRegion face = make_face_region(lm, 140, 140);
  REQUIRE(face.width() == 108);  // cells of 36, boundaries at multiples of 4
  REQUIRE(face.x0 % 4 == 0);
  const FeatureVector fv = lbp_descriptor(img, lm);
  for (int cell = 1; cell < 9; ++cell)
    for (int b = 0; b < 59; ++b)
      CHECK(fv.values[cell * 59 + b] == doctest::Approx(fv.values[b]).epsilon(1e-9));
}

TEST_CASE("lbp matches a brute-force reimplementation on random input") {
  Image img(90, 90, 0.0);
  auto rng = make_rng(17);
  for (double& p : img.pixels()) p = uniform01(rng);
  const LandmarkSet lm = box_landmarks(10, 12, 80, 78);
  const FeatureVector fv = lbp_descriptor(img, lm);
  const std::vector<double> oracle = naive_lbp531(img, make_face_region(lm, 90, 90));
  // stored values are float32, so compare at float precision
  for (int i = 0; i < 531; ++i)
    CHECK(fv.values[i] == doctest::Approx(oracle[i]).epsilon(1e-6));
}

TEST_CASE("lbp refuses a face patch below the 3x3 grid minimum") {
  const Image img(30, 30, 0.5);
  const LandmarkSet lm = box_landmarks(12, 12, 18, 18);
  CHECK_THROWS_AS(lbp_descriptor(img, lm), RegionError);
}

TEST_CASE("chan features append the flash-difference deviation") {
  const Image img = smooth_texture(90, 90);
  const LandmarkSet lm = box_landmarks(10, 12, 80, 78);

  FeatureVector same = chan_features(img, img, lm);
  REQUIRE(same.dim() == 532);
  CHECK(same.layout == FeatureLayout::chan532);
  CHECK(same.values[531] == 0.0f);

  Image offset = img;
  for (double& p : offset.pixels()) p += 0.07;
  const FeatureVector off = chan_features(img, offset, lm);
  CHECK(off.values[531] == doctest::Approx(0.0).epsilon(1e-6));

  const FeatureVector lbp_only = lbp_descriptor(offset, lm);
  for (int i = 0; i < 531; ++i) CHECK(off.values[i] == lbp_only.values[i]);
}

TEST_CASE("feature validation rejects layout and length mismatches") {
  FeatureVector fv;
  fv.layout = FeatureLayout::lbp531;
  fv.values.assign(12, 0.0f);
  CHECK_THROWS_AS(fv.validate(), ShapeError);
  fv.values.assign(531, 0.0f);
  fv.validate();
  fv.values[5] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(fv.validate(), ShapeError);
}

TEST_CASE("landmark scaling follows the unit-aligned resize convention") {
  const LandmarkSet lm = box_landmarks(20, 10, 80, 70);
  const LandmarkSet half = scale_landmarks(lm, 100, 80, 50, 40);
  const Vec2 nose = lm[LandmarkName::nose_tip];
  const Vec2 got = half[LandmarkName::nose_tip];
  CHECK(got.x == doctest::Approx((nose.x + 0.5) * 0.5 - 0.5).epsilon(1e-12));
  CHECK(got.y == doctest::Approx((nose.y + 0.5) * 0.5 - 0.5).epsilon(1e-12));
  // round trip back
  const LandmarkSet back = scale_landmarks(half, 50, 40, 100, 80);
  CHECK(back[LandmarkName::nose_tip].x == doctest::Approx(nose.x).epsilon(1e-9));
}
