#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "i3d/image.hpp"
#include "i3d/landmarks.hpp"
#include "i3d/vec.hpp"

namespace i3d {

// Directional light: unit direction pointing from the surface toward the
// light, plus a scalar intensity folded into the shading term.
struct LightSpec {
  Vec3 direction{0, 0, 1};
  double intensity = 1.0;

  Vec3 scaled() const { return direction * intensity; }
  void validate() const;
};

// Normalizes the direction; throws ConfigError on zero direction or
// negative intensity.
LightSpec make_light(const Vec3& direction, double intensity);

// Light at the given polar angle from the camera axis (+z). Azimuth 0
// points toward +x (image right), 90 toward +y (image down).
LightSpec light_from_angles(double polar_deg, double azimuth_deg, double intensity);

enum class SurfaceKind : int { face = 0, plane, cylinder };

const char* to_string(SurfaceKind k);
SurfaceKind surface_kind_from_string(const std::string& s);

// One term of the face height field (axis-aligned Gaussian, world units).
struct GaussianBump {
  double cx = 0, cy = 0;
  double sx = 0.1, sy = 0.1;
  double amp = 0.0;
};

// In-plane pixel-space similarity p' = s*R(theta)*(p-c) + c + t, used for
// the small camera pose change between the two shots of a flash pair.
struct Similarity {
  double a = 1.0, b = 0.0;  // s*cos(theta), s*sin(theta)
  double tx = 0.0, ty = 0.0;

  static Similarity from_parts(double scale, double rot_rad, double du, double dv,
                               const Vec2& center);
  Vec2 apply(const Vec2& p) const {
    return {a * p.x - b * p.y + tx, b * p.x + a * p.y + ty};
  }
  Similarity inverse() const;
  bool is_identity() const { return a == 1.0 && b == 0.0 && tx == 0.0 && ty == 0.0; }
};

// Procedural albedo: base * (1 + noise_amp * (2*noise - 1)), optionally
// replaced by a baked texture (spoof prints carry the frontal render).
struct AlbedoSpec {
  double base = 0.6;
  double noise_amp = 0.0;
  double noise_cell = 0.0023;  // world units; ~2.5 px at 1080 rows
  std::uint64_t noise_seed = 0;

  std::shared_ptr<const Image> baked;  // sampled over the bake window
  double bake_win_h = 1.0;             // world height covered by the bake
  double bake_dx = 0.0, bake_dy = 0.0; // print placement shift, world units
};

// Graph surface z = f(x, y) over the camera window, z toward the camera.
// Face: sum of Gaussian bumps on a z = 0 backdrop. Plane: tilted flat
// sheet. Cylinder: vertical-axis arc bulging toward the camera, with the
// albedo looked up by unwrapped arc length (a bent print).
struct SurfaceModel {
  SurfaceKind kind = SurfaceKind::face;

  std::vector<GaussianBump> bumps;  // face only

  double plane_z = 0.0;  // plane / cylinder base depth offset
  double tilt_x = 0.0;   // plane: z += tilt_x*x + tilt_y*y
  double tilt_y = 0.0;

  double cyl_radius = 2.0;  // world units; must exceed the window half-width
  double cyl_axis_x = 0.0;

  AlbedoSpec albedo;
  double emissive = 0.0;  // screens add a constant self-emission term

  // Anchor points of the seven landmarks in surface parameter coordinates
  // (world xy for faces and planes, print coordinates for cylinders).
  std::array<Vec2, kNumLandmarks> anchors{};
};

// Orthographic camera looking along -z: world x maps to u (right), world
// y to v (down), the window is centered on the origin with height win_h.
// Stereo adds a perspective parallax term: disparity = focal_px * baseline
// / depth, with depth measured from the camera plane at z = standoff.
struct Camera {
  int width = 480, height = 270;
  double win_h = 1.0;
  double standoff = 3.0;
  double focal_px = 500.0;
  double baseline = 0.0;

  double win_w() const { return win_h * width / height; }
  double px_per_wu() const { return height / win_h; }
  Vec2 pixel_to_world(double u, double v) const;
  Vec2 world_to_pixel(double x, double y) const;
};

struct SceneSpec {
  SurfaceModel surface;
  std::vector<LightSpec> ambient;
  std::optional<LightSpec> flash;
  Camera camera;
  Similarity flash_jitter;  // camera pose delta of the flash shot
  std::string subject_id;
  std::uint64_t seed = 0;

  void validate() const;
};

// Point sample of a surface: height, unit normal (toward camera), albedo.
struct SurfacePoint {
  double z = 0.0;
  Vec3 normal{0, 0, 1};
  double albedo = 1.0;
};

SurfacePoint eval_surface(const SurfaceModel& s, double x, double y);

// Optional ground-truth side products of a render, on the pixel grid of
// the primary (ambient / left) shot.
struct RenderMaps {
  Image depth;                 // camera-space depth
  Image nx, ny, nz;            // unit normals
  Image ambient_response;      // sum_i max(n.l_i, 0), albedo excluded
  Image flash_response;        // max(n.l_f, 0), zero image if no flash
};

// Lambertian shading I = albedo * sum_i max(n.l_i, 0) + emissive under the
// scene camera (identity jitter). Linear radiometry, no tone mapping.
Image render_lambertian(const SceneSpec& scene, const std::vector<LightSpec>& lights);

struct FlashPair {
  Image ambient, flash;
  LandmarkSet lm_ambient, lm_flash;
};

// Ambient-only shot plus ambient+flash shot; the flash shot sees the scene
// through flash_jitter. Landmarks are exact projections for each shot.
FlashPair render_flash_pair(const SceneSpec& scene, RenderMaps* maps = nullptr);

struct StereoPair {
  Image left, right;
  LandmarkSet lm_left, lm_right;
  Image disparity;  // ground truth on the left pixel grid
};

// Identical lighting in both views; the right view is the left radiance
// forward-warped by disparity = focal_px * baseline / depth per pixel.
StereoPair render_stereo_pair(const SceneSpec& scene, RenderMaps* maps = nullptr);

// Projects the surface anchor points through the scene camera (no jitter).
LandmarkSet landmarks_for_scene(const SceneSpec& scene);

enum class SpoofKind : int { flat = 0, curved, screen };

const char* to_string(SpoofKind k);

struct PrintParams {
  int bake_width = 480, bake_height = 270;  // print resolution
  int bake_supersample = 2;                 // rendered finer, box-reduced
  double cyl_radius = 1.5;                  // curved prints
  double tilt_x = 0.0, tilt_y = 0.0;        // flat/screen pose
  double plane_z = 0.0;
  double emissive = 0.12;                   // screens only
  Vec2 offset{0, 0};                        // print placement shift
};

// Replaces the live face by a presentation of its frontal render: the face
// is rendered under a single head-on light, the result becomes the albedo
// of a plane (flat print / screen) or cylinder (bent print). Lights,
// camera and ids carry over; the caller re-samples capture lighting.
SceneSpec spoofify(const SceneSpec& live_scene, SpoofKind kind, const PrintParams& p);

// Additive Gaussian sensor noise, seeded; clamps the result at 0.
void add_sensor_noise(Image& img, double sigma, std::uint64_t seed);

// Round to the nearest of 2^bits - 1 uniform levels in [0,1]; values above
// 1 saturate (8-bit capture by default elsewhere).
void quantize(Image& img, int bits);

}  // namespace i3d
