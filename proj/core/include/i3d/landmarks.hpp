#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "i3d/error.hpp"
#include "i3d/vec.hpp"

namespace i3d {

enum class LandmarkName : int {
  nose_tip = 0,
  left_eye_outer,
  right_eye_outer,
  mouth_left,
  mouth_right,
  face_box_tl,
  face_box_br,
};
inline constexpr int kNumLandmarks = 7;

const char* to_string(LandmarkName name);
LandmarkName landmark_from_string(const std::string& s);

// The seven named facial keypoints, sub-pixel image coordinates.
// Construction guarantees every name is present exactly once.
class LandmarkSet {
 public:
  LandmarkSet() = default;

  Vec2& operator[](LandmarkName n) { return pts_[static_cast<int>(n)]; }
  const Vec2& operator[](LandmarkName n) const { return pts_[static_cast<int>(n)]; }

  // Throws RegionError if any point lies outside [0,w-1]x[0,h-1].
  void check_inside(int width, int height) const;

  double interocular() const;

  bool operator==(const LandmarkSet& o) const;

 private:
  std::array<Vec2, kNumLandmarks> pts_{};
};

// CSV with header "name,u,v", one row per landmark.
void write_landmarks_csv(const LandmarkSet& lm, const std::filesystem::path& path);
LandmarkSet read_landmarks_csv(const std::filesystem::path& path);

}  // namespace i3d
