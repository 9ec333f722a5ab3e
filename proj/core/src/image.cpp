#include "i3d/image.hpp"

#include <cmath>
#include <utility>

namespace i3d {

Image::Image(int width, int height, double fill) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("image dimensions must be positive");
  }
  width_ = width;
  height_ = height;
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image Image::from_data(int width, int height, std::vector<double> pixels) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("image dimensions must be positive");
  }
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("pixel count does not match width*height");
  }
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.pixels_ = std::move(pixels);
  img.check_finite();
  return img;
}

void Image::check_finite() const {
  for (double p : pixels_) {
    if (!std::isfinite(p)) throw DimensionError("image contains non-finite pixels");
  }
}

double sample_bilinear(const Image& img, double u, double v) {
  const int w = img.width(), h = img.height();
  if (u < 0) u = 0;
  if (v < 0) v = 0;
  if (u > w - 1) u = w - 1;
  if (v > h - 1) v = h - 1;
  const int u0 = static_cast<int>(u);
  const int v0 = static_cast<int>(v);
  const int u1 = (u0 + 1 < w) ? u0 + 1 : u0;
  const int v1 = (v0 + 1 < h) ? v0 + 1 : v0;
  const double fu = u - u0, fv = v - v0;
  const double top = img.at(u0, v0) + (img.at(u1, v0) - img.at(u0, v0)) * fu;
  const double bot = img.at(u0, v1) + (img.at(u1, v1) - img.at(u0, v1)) * fu;
  return top + (bot - top) * fv;
}

Image gradient_u(const Image& img) {
  if (img.width() < 3) throw DimensionError("gradient_u needs width >= 3");
  Image out(img.width(), img.height());
  const int w = img.width(), h = img.height();
  for (int v = 0; v < h; ++v) {
    const double* src = img.row(v);
    double* dst = out.row(v);
    dst[0] = src[1] - src[0];
    for (int u = 1; u < w - 1; ++u) {
      dst[u] = (src[u + 1] - src[u - 1]) * 0.5;
    }
    dst[w - 1] = src[w - 1] - src[w - 2];
  }
  return out;
}

Image resize_bilinear(const Image& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw DimensionError("resize target must be >= 1x1");
  if (img.empty()) throw DimensionError("resize of empty image");
  Image out(out_w, out_h);
  const double su = static_cast<double>(img.width()) / out_w;
  const double sv = static_cast<double>(img.height()) / out_h;
  for (int v = 0; v < out_h; ++v) {
    const double src_v = (v + 0.5) * sv - 0.5;
    double* dst = out.row(v);
    for (int u = 0; u < out_w; ++u) {
      const double src_u = (u + 0.5) * su - 0.5;
      dst[u] = sample_bilinear(img, src_u, src_v);
    }
  }
  return out;
}

namespace {

// Per-axis box weights: output cell i covers [i*scale, (i+1)*scale) in
// source corner coordinates.
struct AxisBox {
  int begin;
  std::vector<double> weights;  // normalized to sum 1
};

std::vector<AxisBox> axis_boxes(int in_n, int out_n) {
  std::vector<AxisBox> boxes(out_n);
  const double scale = static_cast<double>(in_n) / out_n;
  for (int i = 0; i < out_n; ++i) {
    double lo = i * scale, hi = (i + 1) * scale;
    if (hi > in_n) hi = in_n;
    int first = static_cast<int>(lo);
    int last = static_cast<int>(std::ceil(hi)) - 1;
    if (last >= in_n) last = in_n - 1;
    AxisBox box;
    box.begin = first;
    double total = 0.0;
    for (int s = first; s <= last; ++s) {
      const double cover = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      box.weights.push_back(cover > 0 ? cover : 0.0);
      total += box.weights.back();
    }
    for (double& wgt : box.weights) wgt /= total;
    boxes[i] = std::move(box);
  }
  return boxes;
}

}  // namespace

Image resize_area(const Image& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw DimensionError("resize target must be >= 1x1");
  if (img.empty()) throw DimensionError("resize of empty image");
  const auto ubox = axis_boxes(img.width(), out_w);
  const auto vbox = axis_boxes(img.height(), out_h);
  Image out(out_w, out_h);
  for (int v = 0; v < out_h; ++v) {
    const AxisBox& bv = vbox[v];
    double* dst = out.row(v);
    for (int u = 0; u < out_w; ++u) {
      const AxisBox& bu = ubox[u];
      double acc = 0.0;
      for (std::size_t j = 0; j < bv.weights.size(); ++j) {
        const double* src = img.row(bv.begin + static_cast<int>(j));
        double racc = 0.0;
        for (std::size_t i = 0; i < bu.weights.size(); ++i) {
          racc += bu.weights[i] * src[bu.begin + static_cast<int>(i)];
        }
        acc += bv.weights[j] * racc;
      }
      dst[u] = acc;
    }
  }
  return out;
}

Image resize_auto(const Image& img, int out_w, int out_h) {
  if (out_w <= img.width() && out_h <= img.height()) {
    return resize_area(img, out_w, out_h);
  }
  return resize_bilinear(img, out_w, out_h);
}

MaskedImage translate(const Image& img, double du, double dv) {
  const int w = img.width(), h = img.height();
  MaskedImage out;
  out.image = Image(w, h);
  out.valid.assign(static_cast<std::size_t>(w) * h, 0);
  for (int v = 0; v < h; ++v) {
    const double sv = v - dv;
    double* dst = out.image.row(v);
    std::uint8_t* mask = out.valid.data() + static_cast<std::size_t>(v) * w;
    if (sv < 0 || sv > h - 1) continue;
    for (int u = 0; u < w; ++u) {
      const double su = u - du;
      if (su < 0 || su > w - 1) continue;
      dst[u] = sample_bilinear(img, su, sv);
      mask[u] = 1;
    }
  }
  return out;
}

}  // namespace i3d
