#include "i3d/features.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>

#include "i3d/error.hpp"
#include "i3d/homography.hpp"

using nlohmann::json;

namespace i3d {

const char* to_string(RegionKind k) { return k == RegionKind::face ? "face" : "nose"; }

RegionKind region_kind_from_string(const std::string& s) {
  if (s == "face") return RegionKind::face;
  if (s == "nose") return RegionKind::nose;
  throw ArgumentError("unknown region kind: " + s);
}

const char* to_string(FeatureLayout l) {
  switch (l) {
    case FeatureLayout::i3d_patch: return "i3d_patch";
    case FeatureLayout::da3d_patch: return "da3d_patch";
    case FeatureLayout::lbp531: return "lbp531";
    case FeatureLayout::chan532: return "chan532";
  }
  return "?";
}

FeatureLayout feature_layout_from_string(const std::string& s) {
  if (s == "i3d_patch") return FeatureLayout::i3d_patch;
  if (s == "da3d_patch") return FeatureLayout::da3d_patch;
  if (s == "lbp531") return FeatureLayout::lbp531;
  if (s == "chan532") return FeatureLayout::chan532;
  throw ArgumentError("unknown feature layout: " + s);
}

void FeatureVector::validate() const {
  int expect;
  switch (layout) {
    case FeatureLayout::i3d_patch:
    case FeatureLayout::da3d_patch:
      if (patch_w < 1 || patch_h < 1) throw ShapeError("patch layout without patch dims");
      expect = patch_w * patch_h;
      break;
    case FeatureLayout::lbp531: expect = kLbpDim; break;
    case FeatureLayout::chan532: expect = kLbpDim + 1; break;
    default: throw ShapeError("bad layout tag");
  }
  if (dim() != expect) {
    throw ShapeError("feature length " + std::to_string(dim()) + " does not match layout " +
                     to_string(layout));
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw ShapeError("non-finite feature value");
  }
}

namespace {

PatchRegion clip_region(RegionKind kind, double x0, double y0, double x1, double y1,
                        int img_w, int img_h) {
  PatchRegion r;
  r.kind = kind;
  r.x0 = std::max(0, static_cast<int>(std::lround(x0)));
  r.y0 = std::max(0, static_cast<int>(std::lround(y0)));
  r.x1 = std::min(img_w, static_cast<int>(std::lround(x1)) + 1);
  r.y1 = std::min(img_h, static_cast<int>(std::lround(y1)) + 1);
  if (r.width() < 2 || r.height() < 2) {
    throw RegionError("patch region degenerate after clipping");
  }
  return r;
}

}  // namespace

PatchRegion make_face_region(const LandmarkSet& lm, int img_w, int img_h, double inset_frac) {
  const Vec2 tl = lm[LandmarkName::face_box_tl];
  const Vec2 br = lm[LandmarkName::face_box_br];
  const double w = br.x - tl.x, h = br.y - tl.y;
  if (w <= 0 || h <= 0) throw RegionError("face box landmarks are inverted");
  return clip_region(RegionKind::face, tl.x + inset_frac * w, tl.y + inset_frac * h,
                     br.x - inset_frac * w, br.y - inset_frac * h, img_w, img_h);
}

PatchRegion make_nose_region(const LandmarkSet& lm, int img_w, int img_h, double side_frac) {
  const Vec2 nose = lm[LandmarkName::nose_tip];
  const double side = side_frac * lm.interocular();
  if (!(side > 0)) throw RegionError("non-positive nose region side");
  return clip_region(RegionKind::nose, nose.x - side / 2, nose.y - side / 2,
                     nose.x + side / 2, nose.y + side / 2, img_w, img_h);
}

PatchRegion make_region(RegionKind kind, const LandmarkSet& lm, int img_w, int img_h) {
  return kind == RegionKind::face ? make_face_region(lm, img_w, img_h)
                                  : make_nose_region(lm, img_w, img_h);
}

LandmarkSet scale_landmarks(const LandmarkSet& lm, int from_w, int from_h, int to_w,
                            int to_h) {
  if (from_w == to_w && from_h == to_h) return lm;
  const double sx = static_cast<double>(to_w) / from_w;
  const double sy = static_cast<double>(to_h) / from_h;
  LandmarkSet out;
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Vec2 p = lm[static_cast<LandmarkName>(i)];
    out[static_cast<LandmarkName>(i)] = {(p.x + 0.5) * sx - 0.5, (p.y + 0.5) * sy - 0.5};
  }
  return out;
}

namespace {

Image crop(const Image& img, const PatchRegion& r) {
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > img.width() || r.y1 > img.height() || r.width() < 1 ||
      r.height() < 1) {
    throw RegionError("region outside image bounds");
  }
  Image out(r.width(), r.height());
  for (int v = 0; v < r.height(); ++v) {
    std::memcpy(out.row(v), img.row(r.y0 + v) + r.x0,
                sizeof(double) * static_cast<std::size_t>(r.width()));
  }
  return out;
}

std::vector<float> to_f32(const Image& img) {
  std::vector<float> out(img.size());
  const std::vector<double>& px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) out[i] = static_cast<float>(px[i]);
  return out;
}

}  // namespace

RegisteredPair register_flash_pair(const Image& i_a, const Image& i_f,
                                   const LandmarkSet& lm_a, const LandmarkSet& lm_f,
                                   int work_w, int work_h, double max_residual_px) {
  if (i_a.empty() || i_f.empty()) throw ShapeError("empty image in flash pair");
  if (work_w < 8 || work_h < 8) throw ArgumentError("working resolution too small");

  Image a = i_a.width() == work_w && i_a.height() == work_h ? i_a
                                                            : resize_auto(i_a, work_w, work_h);
  Image f = i_f.width() == work_w && i_f.height() == work_h ? i_f
                                                            : resize_auto(i_f, work_w, work_h);
  const LandmarkSet la = scale_landmarks(lm_a, i_a.width(), i_a.height(), work_w, work_h);
  const LandmarkSet lf = scale_landmarks(lm_f, i_f.width(), i_f.height(), work_w, work_h);

  if (la == lf) return {std::move(a), std::move(f), la};

  const Homography h = estimate_homography(lf, la);  // flash frame -> ambient frame
  double residual = 0;
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Vec2 mapped = h.apply(lf[static_cast<LandmarkName>(i)]);
    const Vec2 want = la[static_cast<LandmarkName>(i)];
    residual = std::max(residual, std::hypot(mapped.x - want.x, mapped.y - want.y));
  }
  if (residual > max_residual_px) {
    throw GeometryError("registration residual " + std::to_string(residual) +
                        " px exceeds bound; landmark sets are inconsistent");
  }

  MaskedImage warped = warp_homography(f, h, work_w, work_h);
  // Unseen border pixels take the ambient value: the ratio feature then
  // reads exactly zero there instead of inventing structure.
  for (int v = 0; v < work_h; ++v) {
    double* dst = warped.image.row(v);
    const double* src = a.row(v);
    const std::uint8_t* ok = warped.valid.data() + static_cast<std::size_t>(v) * work_w;
    for (int u = 0; u < work_w; ++u) {
      if (!ok[u]) dst[u] = src[u];
    }
  }
  return {std::move(a), std::move(warped.image), la};
}

FeatureVector compute_i3d(const Image& i_a, const Image& i_f, const PatchRegion& region,
                          double eps, int patch) {
  if (i_a.width() != i_f.width() || i_a.height() != i_f.height()) {
    throw ShapeError("flash pair must be registered to equal dims");
  }
  if (!(eps > 0)) throw ArgumentError("eps must be positive");
  if (patch < 1) throw ArgumentError("patch size must be positive");

  Image num = crop(i_f, region);
  const Image den = crop(i_a, region);
  for (int v = 0; v < num.height(); ++v) {
    double* nrow = num.row(v);
    const double* drow = den.row(v);
    for (int u = 0; u < num.width(); ++u) {
      nrow[u] = (nrow[u] - drow[u]) / std::max(drow[u], eps);
    }
  }
  const Image patch_img = resize_auto(num, patch, patch);

  FeatureVector fv;
  fv.layout = FeatureLayout::i3d_patch;
  fv.patch_w = patch;
  fv.patch_h = patch;
  fv.values = to_f32(patch_img);
  return fv;
}

FeatureVector compute_da3d(const Image& i_left, const Image& i_right,
                           const LandmarkSet& lm_left, const LandmarkSet& lm_right,
                           const PatchRegion& region, double grad_eps, double clip,
                           int work_w, int work_h, int patch) {
  if (!(grad_eps > 0)) throw ArgumentError("grad_eps must be positive");
  if (!(clip > 0)) throw ArgumentError("clip must be positive");

  Image l = i_left.width() == work_w && i_left.height() == work_h
                ? i_left
                : resize_auto(i_left, work_w, work_h);
  Image r = i_right.width() == work_w && i_right.height() == work_h
                ? i_right
                : resize_auto(i_right, work_w, work_h);
  const LandmarkSet ll =
      scale_landmarks(lm_left, i_left.width(), i_left.height(), work_w, work_h);
  const LandmarkSet lr =
      scale_landmarks(lm_right, i_right.width(), i_right.height(), work_w, work_h);

  const Vec2 nl = ll[LandmarkName::nose_tip], nr = lr[LandmarkName::nose_tip];
  const double du = std::round(nl.x - nr.x);
  const double dv = std::round(nl.y - nr.y);
  const MaskedImage aligned = translate(r, du, dv);

  const Image grad = gradient_u(aligned.image);

  Image field(l.width(), l.height());
  for (int v = 0; v < l.height(); ++v) {
    const double* lrow = l.row(v);
    const double* rrow = aligned.image.row(v);
    const double* grow = grad.row(v);
    const std::uint8_t* ok = aligned.valid.data() + static_cast<std::size_t>(v) * l.width();
    double* frow = field.row(v);
    for (int u = 0; u < l.width(); ++u) {
      const double g = grow[u];
      if (!ok[u] || std::abs(g) < grad_eps) {
        frow[u] = 0.0;
      } else {
        double d = (lrow[u] - rrow[u]) / g;
        if (d > clip) d = clip;
        if (d < -clip) d = -clip;
        frow[u] = d;
      }
    }
  }

  const Image patch_img = resize_auto(crop(field, region), patch, patch);

  FeatureVector fv;
  fv.layout = FeatureLayout::da3d_patch;
  fv.patch_w = patch;
  fv.patch_h = patch;
  fv.values = to_f32(patch_img);
  return fv;
}

void write_features_jsonl(const std::vector<FeatureVector>& rows,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write features: " + path.string());
  for (const FeatureVector& fv : rows) {
    json j;
    j["sample_id"] = fv.sample_id;
    j["label"] = fv.label;
    j["layout"] = to_string(fv.layout);
    j["patch_w"] = fv.patch_w;
    j["patch_h"] = fv.patch_h;
    j["values"] = fv.values;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("feature write failed: " + path.string());
}

std::vector<FeatureVector> read_features_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open features: " + path.string());
  std::vector<FeatureVector> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      FeatureVector fv;
      fv.sample_id = j.at("sample_id").get<std::string>();
      fv.label = j.at("label").get<std::string>();
      fv.layout = feature_layout_from_string(j.at("layout").get<std::string>());
      fv.patch_w = j.at("patch_w").get<int>();
      fv.patch_h = j.at("patch_h").get<int>();
      fv.values = j.at("values").get<std::vector<float>>();
      fv.validate();
      rows.push_back(std::move(fv));
    } catch (const json::exception& e) {
      throw IoError("features line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

void write_features_bin(const std::vector<FeatureVector>& rows,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write feature matrix: " + path.string());
  const std::uint32_t r = static_cast<std::uint32_t>(rows.size());
  const std::uint32_t c = rows.empty() ? 0 : static_cast<std::uint32_t>(rows[0].dim());
  for (const FeatureVector& fv : rows) {
    if (static_cast<std::uint32_t>(fv.dim()) != c) {
      throw ShapeError("feature rows have inconsistent widths");
    }
  }
  auto put32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
  };
  put32(r);
  put32(c);
  static_assert(sizeof(float) == 4);
  for (const FeatureVector& fv : rows) {
    for (float v : fv.values) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put32(bits);
    }
  }
  if (!out) throw IoError("feature matrix write failed: " + path.string());
}

void read_features_bin(const std::filesystem::path& path, std::uint32_t& rows,
                       std::uint32_t& cols, std::vector<float>& data) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature matrix: " + path.string());
  auto get32 = [&]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IoError("truncated feature matrix: " + path.string());
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
  };
  rows = get32();
  cols = get32();
  data.resize(static_cast<std::size_t>(rows) * cols);
  for (float& v : data) {
    const std::uint32_t bits = get32();
    std::memcpy(&v, &bits, 4);
  }
}

}  // namespace i3d
