#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "i3d/image.hpp"
#include "i3d/landmarks.hpp"

namespace i3d {

inline constexpr double kI3dEps = 1.0 / 255.0;       // ratio denominator guard
inline constexpr double kDa3dGradEps = 2.0 / 255.0;  // near-zero gradient cutoff
inline constexpr double kDa3dClip = 32.0;            // disparity clip, pixels
inline constexpr int kPatchSize = 28;                // canonical feature patch
inline constexpr int kWorkWidth = 480;
inline constexpr int kWorkHeight = 270;
inline constexpr int kLbpDim = 531;  // 9 cells x 59 uniform-pattern bins

enum class RegionKind : int { face = 0, nose };
const char* to_string(RegionKind k);
RegionKind region_kind_from_string(const std::string& s);

// Half-open pixel rectangle [x0,x1) x [y0,y1) in the frame it was built
// for; construction clips to the image and rejects empty results.
struct PatchRegion {
  RegionKind kind = RegionKind::face;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};

// Landmark bounding box inset by inset_frac on every side.
PatchRegion make_face_region(const LandmarkSet& lm, int img_w, int img_h,
                             double inset_frac = 0.05);
// Square centered on the nose tip, side = side_frac * inter-ocular span.
PatchRegion make_nose_region(const LandmarkSet& lm, int img_w, int img_h,
                             double side_frac = 0.25);
PatchRegion make_region(RegionKind kind, const LandmarkSet& lm, int img_w, int img_h);

enum class FeatureLayout : int { i3d_patch = 0, da3d_patch, lbp531, chan532 };
const char* to_string(FeatureLayout l);
FeatureLayout feature_layout_from_string(const std::string& s);

struct FeatureVector {
  FeatureLayout layout = FeatureLayout::i3d_patch;
  int patch_w = 0, patch_h = 0;  // patch layouts only
  std::vector<float> values;
  std::string sample_id;
  std::string label;

  int dim() const { return static_cast<int>(values.size()); }
  // Length must match the layout, values must be finite.
  void validate() const;
};

// Landmark coordinates mapped through the unit-aligned resize convention.
LandmarkSet scale_landmarks(const LandmarkSet& lm, int from_w, int from_h, int to_w,
                            int to_h);

struct RegisteredPair {
  Image ambient, flash;
  LandmarkSet landmarks;  // in the registered (working) frame
};

// Downsamples both shots to the working frame, estimates the homography
// taking the flash landmarks onto the ambient ones, and warps the flash
// shot into the ambient frame. Identical landmark sets skip the warp
// entirely. A registration residual above max_residual_px (after the
// warp) raises GeometryError.
RegisteredPair register_flash_pair(const Image& i_a, const Image& i_f,
                                   const LandmarkSet& lm_a, const LandmarkSet& lm_f,
                                   int work_w = kWorkWidth, int work_h = kWorkHeight,
                                   double max_residual_px = 3.0);

// Pixelwise (I_f - I_a) / max(I_a, eps) over the region, box-resampled to
// patch x patch. Inputs must already be registered and equal size.
FeatureVector compute_i3d(const Image& i_a, const Image& i_f, const PatchRegion& region,
                          double eps = kI3dEps, int patch = kPatchSize);

// Approximated disparity: downsample to the working frame, integer-align
// the nose tips, then (I_left - I_right) / dI_right/du where the gradient
// magnitude clears grad_eps (0 elsewhere), clipped to [-clip, clip]. The
// region is expressed in the working frame.
FeatureVector compute_da3d(const Image& i_left, const Image& i_right,
                           const LandmarkSet& lm_left, const LandmarkSet& lm_right,
                           const PatchRegion& region, double grad_eps = kDa3dGradEps,
                           double clip = kDa3dClip, int work_w = kWorkWidth,
                           int work_h = kWorkHeight, int patch = kPatchSize);

// Uniform LBP(8,1) histograms over a 3x3 grid of the face patch, each
// cell's 59 bins L1-normalized; 531 values.
FeatureVector lbp_descriptor(const Image& i_f, const LandmarkSet& lm);

// lbp_descriptor(I_f) plus the standard deviation of I_f - I_a over the
// face patch; 532 values.
FeatureVector chan_features(const Image& i_a, const Image& i_f, const LandmarkSet& lm);

// One JSON object per line: {sample_id, label, layout, patch_w, patch_h,
// values}.
void write_features_jsonl(const std::vector<FeatureVector>& rows,
                          const std::filesystem::path& path);
std::vector<FeatureVector> read_features_jsonl(const std::filesystem::path& path);

// Flat matrix: u32 rows, u32 cols, then rows*cols little-endian f32.
void write_features_bin(const std::vector<FeatureVector>& rows,
                        const std::filesystem::path& path);
void read_features_bin(const std::filesystem::path& path, std::uint32_t& rows,
                       std::uint32_t& cols, std::vector<float>& data);

}  // namespace i3d
