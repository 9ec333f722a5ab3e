#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

#include "i3d/error.hpp"

namespace i3d {

// Single-channel raster, row-major, pixel (u,v) = column u of row v.
// Pixel centers sit at integer coordinates with (0,0) the top-left pixel.
// Radiometric images live on a linear scale with nominal range [0,1];
// derived rasters (gradients, ratio fields) may hold any finite value.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0);
  static Image from_data(int width, int height, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  double& at(int u, int v) {
    assert(u >= 0 && u < width_ && v >= 0 && v < height_);
    return pixels_[static_cast<std::size_t>(v) * width_ + u];
  }
  double at(int u, int v) const {
    assert(u >= 0 && u < width_ && v >= 0 && v < height_);
    return pixels_[static_cast<std::size_t>(v) * width_ + u];
  }
  double* row(int v) { return pixels_.data() + static_cast<std::size_t>(v) * width_; }
  const double* row(int v) const {
    return pixels_.data() + static_cast<std::size_t>(v) * width_;
  }
  std::vector<double>& pixels() { return pixels_; }
  const std::vector<double>& pixels() const { return pixels_; }

  // Throws DimensionError if any pixel is NaN/Inf.
  void check_finite() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

// Image plus a per-pixel validity flag (1 = trustworthy sample, 0 = the
// value was filled with 0 because the source sample fell out of bounds).
struct MaskedImage {
  Image image;
  std::vector<std::uint8_t> valid;

  bool valid_at(int u, int v) const {
    return valid[static_cast<std::size_t>(v) * image.width() + u] != 0;
  }
};

// Bilinear sample with border clamp; (u,v) in pixel-center coordinates.
double sample_bilinear(const Image& img, double u, double v);

// Horizontal derivative: central differences inside, one-sided at the
// u-borders. Requires width >= 3.
Image gradient_u(const Image& img);

// Bilinear resample to (out_w, out_h) on the unit-aligned grid
// (output center c maps to input (c + 0.5) * in/out - 0.5).
Image resize_bilinear(const Image& img, int out_w, int out_h);

// Box-average resample; exact area weighting, intended for minification.
Image resize_area(const Image& img, int out_w, int out_h);

// resize_area when shrinking on both axes, resize_bilinear otherwise.
Image resize_auto(const Image& img, int out_w, int out_h);

// Sub-pixel translation by (+du,+dv): out(u,v) = in(u-du, v-dv).
// Out-of-bounds samples are 0 and flagged invalid.
MaskedImage translate(const Image& img, double du, double dv);

}  // namespace i3d
