#include "i3d/landmarks.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace i3d {

namespace {
constexpr std::array<const char*, kNumLandmarks> kNames = {
    "nose_tip",   "left_eye_outer", "right_eye_outer", "mouth_left",
    "mouth_right", "face_box_tl",    "face_box_br",
};
}  // namespace

const char* to_string(LandmarkName name) { return kNames[static_cast<int>(name)]; }

LandmarkName landmark_from_string(const std::string& s) {
  for (int i = 0; i < kNumLandmarks; ++i) {
    if (s == kNames[i]) return static_cast<LandmarkName>(i);
  }
  throw IoError("unknown landmark name: " + s);
}

void LandmarkSet::check_inside(int width, int height) const {
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Vec2& p = pts_[i];
    if (!(p.x >= 0 && p.x <= width - 1 && p.y >= 0 && p.y <= height - 1)) {
      throw RegionError(std::string("landmark outside image: ") + kNames[i]);
    }
  }
}

double LandmarkSet::interocular() const {
  const Vec2& l = (*this)[LandmarkName::left_eye_outer];
  const Vec2& r = (*this)[LandmarkName::right_eye_outer];
  return std::hypot(r.x - l.x, r.y - l.y);
}

bool LandmarkSet::operator==(const LandmarkSet& o) const {
  for (int i = 0; i < kNumLandmarks; ++i) {
    if (pts_[i].x != o.pts_[i].x || pts_[i].y != o.pts_[i].y) return false;
  }
  return true;
}

void write_landmarks_csv(const LandmarkSet& lm, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "name,u,v\n";
  out.precision(17);
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Vec2& p = lm[static_cast<LandmarkName>(i)];
    out << kNames[i] << "," << p.x << "," << p.y << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

LandmarkSet read_landmarks_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("name,u,v", 0) != 0) {
    throw IoError("landmark CSV missing header: " + path.string());
  }
  LandmarkSet lm;
  std::array<int, kNumLandmarks> seen{};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string name, su, sv;
    if (!std::getline(row, name, ',') || !std::getline(row, su, ',') ||
        !std::getline(row, sv)) {
      throw IoError("malformed landmark row: " + line);
    }
    const LandmarkName n = landmark_from_string(name);
    lm[n] = Vec2{std::stod(su), std::stod(sv)};
    seen[static_cast<int>(n)]++;
  }
  for (int i = 0; i < kNumLandmarks; ++i) {
    if (seen[i] != 1) {
      throw IoError(std::string("landmark missing or duplicated: ") + kNames[i]);
    }
  }
  return lm;
}

}  // namespace i3d
