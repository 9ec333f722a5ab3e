#include <cmath>

#include "doctest.h"
#include "i3d/error.hpp"
#include "i3d/image.hpp"
#include "i3d/pgm.hpp"
#include "i3d/rng.hpp"
#include "test_util.hpp"

using namespace i3d;

namespace {

Image ramp_u(int w, int h) {
  Image img(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) img.at(u, v) = u;
  return img;
}

Image random_image(int w, int h, uint64_t seed) {
  Image img(w, h);
  auto rng = make_rng(seed);
  for (double& p : img.pixels()) p = uniform01(rng);
  return img;
}

}  // namespace

TEST_CASE("gradient_u of a constant image is zero") {
  const Image g = gradient_u(Image(9, 5, 3.25));
  for (double p : g.pixels()) CHECK(p == 0.0);
}

TEST_CASE("gradient_u of the ramp I=u is 1 at interior pixels") {
  const Image g = gradient_u(ramp_u(8, 4));
  for (int v = 0; v < 4; ++v)
    for (int u = 0; u < 8; ++u) CHECK(g.at(u, v) == doctest::Approx(1.0));
}

TEST_CASE("gradient_u of I=u^2 at u=3 is 6") {
  Image img(7, 3);
  for (int v = 0; v < 3; ++v)
    for (int u = 0; u < 7; ++u) img.at(u, v) = double(u) * u;
  CHECK(gradient_u(img).at(3, 1) == doctest::Approx(6.0));
}

TEST_CASE("gradient_u rejects images narrower than 3 columns") {
  CHECK_THROWS_AS(gradient_u(Image(2, 5, 0.0)), DimensionError);
}

TEST_CASE("gradient_u is linear in its input") {
  const Image i1 = random_image(12, 7, 1), i2 = random_image(12, 7, 2);
  const double a = 1.7, b = -0.4;
  Image combo(12, 7);
  for (size_t k = 0; k < combo.size(); ++k)
    combo.pixels()[k] = a * i1.pixels()[k] + b * i2.pixels()[k];
  const Image g = gradient_u(combo), g1 = gradient_u(i1), g2 = gradient_u(i2);
  for (size_t k = 0; k < g.size(); ++k)
    CHECK(g.pixels()[k] == doctest::Approx(a * g1.pixels()[k] + b * g2.pixels()[k])
                               .epsilon(1e-12));
}

TEST_CASE("resize_bilinear to the same dims is the identity") {
  const Image img = random_image(15, 9, 3);
  const Image out = resize_bilinear(img, 15, 9);
  for (size_t k = 0; k < img.size(); ++k)
    CHECK(std::abs(out.pixels()[k] - img.pixels()[k]) < 1e-9);
}

TEST_CASE("resize_bilinear 2x2 checkerboard column to 1x1 averages to 0.5") {
  const Image img = Image::from_data(2, 2, {0, 1, 0, 1});
  CHECK(resize_bilinear(img, 1, 1).at(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("resize_bilinear of a constant stays constant at any size") {
  const Image img(6, 4, 0.37);
  for (auto [w, h] : {std::pair{3, 2}, {12, 8}, {7, 5}, {1, 1}}) {
    const Image out = resize_bilinear(img, w, h);
    CHECK(out.width() == w);
    CHECK(out.height() == h);
    for (double p : out.pixels()) CHECK(p == doctest::Approx(0.37));
  }
}

TEST_CASE("resize_bilinear rejects zero output dims") {
  CHECK_THROWS_AS(resize_bilinear(Image(4, 4, 0.0), 0, 4), DimensionError);
  CHECK_THROWS_AS(resize_bilinear(Image(4, 4, 0.0), 4, 0), DimensionError);
}

TEST_CASE("resize keeps outputs inside the input min/max bracket") {
  const Image img = random_image(20, 13, 9);
  double lo = 1e300, hi = -1e300;
  for (double p : img.pixels()) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  for (auto [w, h] : {std::pair{7, 5}, {40, 26}, {20, 13}}) {
    for (const Image& out : {resize_bilinear(img, w, h), resize_area(img, w, h),
                             resize_auto(img, w, h)}) {
      for (double p : out.pixels()) {
        CHECK(p >= lo - 1e-12);
        CHECK(p <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("resize_area preserves the mean exactly on integer factors") {
  const Image img = random_image(16, 8, 4);
  const Image out = resize_area(img, 4, 2);
  double min = 0, mout = 0;
  for (double p : img.pixels()) min += p;
  for (double p : out.pixels()) mout += p;
  CHECK(min / img.size() == doctest::Approx(mout / out.size()).epsilon(1e-12));
}

TEST_CASE("translate by (0,0) is the identity with a full mask") {
  const Image img = random_image(10, 6, 5);
  const MaskedImage out = translate(img, 0, 0);
  for (size_t k = 0; k < img.size(); ++k) CHECK(out.image.pixels()[k] == img.pixels()[k]);
  for (int v = 0; v < 6; ++v)
    for (int u = 0; u < 10; ++u) CHECK(out.valid_at(u, v));
}

TEST_CASE("translate by integer (2,0) shifts the ramp exactly") {
  const MaskedImage out = translate(ramp_u(10, 4), 2, 0);
  for (int v = 0; v < 4; ++v)
    for (int u = 2; u < 10; ++u) {
      CHECK(out.valid_at(u, v));
      CHECK(out.image.at(u, v) == doctest::Approx(u - 2.0));
    }
  for (int v = 0; v < 4; ++v) {
    CHECK_FALSE(out.valid_at(0, v));
    CHECK(out.image.at(0, v) == 0.0);
  }
}

TEST_CASE("translate by half a pixel is exact on a linear ramp") {
  const MaskedImage out = translate(ramp_u(10, 4), 0.5, 0);
  for (int v = 0; v < 4; ++v)
    for (int u = 1; u < 10; ++u)
      CHECK(out.image.at(u, v) == doctest::Approx(u - 0.5).epsilon(1e-12));
}

TEST_CASE("check_finite flags NaN pixels") {
  Image img(3, 3, 0.5);
  img.check_finite();
  img.at(1, 2) = std::nan("");
  CHECK_THROWS_AS(img.check_finite(), DimensionError);
}

TEST_CASE("from_data validates the pixel count") {
  CHECK_THROWS_AS(Image::from_data(3, 2, {1, 2, 3}), DimensionError);
}

TEST_CASE("pgm round trip at 8 and 16 bit") {
  testutil::TempDir tmp("pgm");
  Image img = random_image(17, 11, 6);
  for (const int maxval : {255, 65535}) {
    const auto p = tmp.path() / ("t" + std::to_string(maxval) + ".pgm");
    write_pgm(img, p, maxval);
    const Image back = read_pgm(p);
    REQUIRE(back.width() == img.width());
    REQUIRE(back.height() == img.height());
    for (size_t k = 0; k < img.size(); ++k)
      CHECK(std::abs(back.pixels()[k] - img.pixels()[k]) <= 0.5 / maxval + 1e-12);
  }
}

TEST_CASE("pgm write clamps out-of-range values") {
  testutil::TempDir tmp("pgmclamp");
  const Image img = Image::from_data(2, 1, {-0.25, 1.75});
  const auto p = tmp.path() / "clamp.pgm";
  write_pgm(img, p);
  const Image back = read_pgm(p);
  CHECK(back.at(0, 0) == 0.0);
  CHECK(back.at(1, 0) == 1.0);
}

TEST_CASE("pfm round trip is bit-exact") {
  testutil::TempDir tmp("pfm");
  Image img = random_image(9, 14, 8);
  for (double& p : img.pixels()) p = p * 20.0 - 10.0;
  const auto path = tmp.path() / "t.pfm";
  write_pfm(img, path);
  const Image back = read_pfm(path);
  REQUIRE(back.width() == img.width());
  REQUIRE(back.height() == img.height());
  for (size_t k = 0; k < img.size(); ++k)
    CHECK(back.pixels()[k] == doctest::Approx(img.pixels()[k]).epsilon(1e-7));
}
