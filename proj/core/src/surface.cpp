#include "i3d/sim.hpp"

#include <cmath>

#include "i3d/error.hpp"
#include "i3d/rng.hpp"

namespace i3d {

void LightSpec::validate() const {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw ConfigError("light direction must be unit length");
  }
  if (!(intensity >= 0.0)) throw ConfigError("light intensity must be >= 0");
}

LightSpec make_light(const Vec3& direction, double intensity) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("light direction is degenerate");
  if (!(intensity >= 0.0)) throw ConfigError("light intensity must be >= 0");
  return LightSpec{direction * (1.0 / n), intensity};
}

LightSpec light_from_angles(double polar_deg, double azimuth_deg, double intensity) {
  const double th = polar_deg * M_PI / 180.0;
  const double ph = azimuth_deg * M_PI / 180.0;
  return make_light({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)},
                    intensity);
}

const char* to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::face: return "face";
    case SurfaceKind::plane: return "plane";
    case SurfaceKind::cylinder: return "cylinder";
  }
  return "?";
}

SurfaceKind surface_kind_from_string(const std::string& s) {
  if (s == "face") return SurfaceKind::face;
  if (s == "plane") return SurfaceKind::plane;
  if (s == "cylinder") return SurfaceKind::cylinder;
  throw ConfigError("unknown surface kind: " + s);
}

const char* to_string(SpoofKind k) {
  switch (k) {
    case SpoofKind::flat: return "flat";
    case SpoofKind::curved: return "curved";
    case SpoofKind::screen: return "screen";
  }
  return "?";
}

Similarity Similarity::from_parts(double scale, double rot_rad, double du, double dv,
                                  const Vec2& center) {
  Similarity s;
  s.a = scale * std::cos(rot_rad);
  s.b = scale * std::sin(rot_rad);
  // p' = sR(p - c) + c + t  ==>  linear part sR, offset c + t - sR*c.
  s.tx = center.x + du - (s.a * center.x - s.b * center.y);
  s.ty = center.y + dv - (s.b * center.x + s.a * center.y);
  return s;
}

Similarity Similarity::inverse() const {
  const double d = a * a + b * b;
  if (!(d > 1e-18)) throw ConfigError("similarity is degenerate");
  Similarity inv;
  inv.a = a / d;
  inv.b = -b / d;
  inv.tx = -(inv.a * tx - inv.b * ty);
  inv.ty = -(inv.b * tx + inv.a * ty);
  return inv;
}

Vec2 Camera::pixel_to_world(double u, double v) const {
  const double s = 1.0 / px_per_wu();
  return {(u + 0.5) * s - win_w() / 2.0, (v + 0.5) * s - win_h / 2.0};
}

Vec2 Camera::world_to_pixel(double x, double y) const {
  const double s = px_per_wu();
  return {(x + win_w() / 2.0) * s - 0.5, (y + win_h / 2.0) * s - 0.5};
}

void SceneSpec::validate() const {
  if (ambient.empty()) throw ConfigError("scene needs at least one ambient light");
  for (const LightSpec& l : ambient) l.validate();
  if (flash) flash->validate();
  if (camera.width < 2 || camera.height < 2) throw ConfigError("camera too small");
  if (!(camera.win_h > 0) || !(camera.standoff > 0)) throw ConfigError("bad camera geometry");
  if (surface.kind == SurfaceKind::cylinder &&
      !(surface.cyl_radius > camera.win_w() / 2.0 + std::abs(surface.cyl_axis_x))) {
    throw GeometryError("cylinder radius must cover the camera window");
  }
}

namespace {

double albedo_at(const AlbedoSpec& a, double x, double y) {
  if (a.baked) {
    const Image& img = *a.baked;
    // The bake covers a window of height bake_win_h centered on the origin,
    // same pixel convention as Camera.
    const double xs = x - a.bake_dx, ys = y - a.bake_dy;
    const double ppw = img.height() / a.bake_win_h;
    const double u = (xs + a.bake_win_h * img.width() / img.height() / 2.0) * ppw - 0.5;
    const double v = (ys + a.bake_win_h / 2.0) * ppw - 0.5;
    return sample_bilinear(img, u, v);
  }
  double val = a.base;
  if (a.noise_amp != 0.0) {
    const double n = value_noise(a.noise_seed, x / a.noise_cell, y / a.noise_cell);
    val *= 1.0 + a.noise_amp * (2.0 * n - 1.0);
  }
  return val < 1e-4 ? 1e-4 : (val > 1.0 ? 1.0 : val);
}

}  // namespace

SurfacePoint eval_surface(const SurfaceModel& s, double x, double y) {
  SurfacePoint p;
  switch (s.kind) {
    case SurfaceKind::face: {
      double z = 0.0, dzdx = 0.0, dzdy = 0.0;
      for (const GaussianBump& g : s.bumps) {
        const double dx = (x - g.cx) / g.sx;
        const double dy = (y - g.cy) / g.sy;
        const double e = g.amp * std::exp(-0.5 * (dx * dx + dy * dy));
        z += e;
        dzdx += e * -dx / g.sx;
        dzdy += e * -dy / g.sy;
      }
      p.z = z;
      p.normal = Vec3{-dzdx, -dzdy, 1.0}.normalized();
      p.albedo = albedo_at(s.albedo, x, y);
      return p;
    }
    case SurfaceKind::plane: {
      p.z = s.plane_z + s.tilt_x * x + s.tilt_y * y;
      p.normal = Vec3{-s.tilt_x, -s.tilt_y, 1.0}.normalized();
      p.albedo = albedo_at(s.albedo, x, y);
      return p;
    }
    case SurfaceKind::cylinder: {
      const double dx = x - s.cyl_axis_x;
      const double r = s.cyl_radius;
      const double under = r * r - dx * dx;
      if (!(under > 0.0)) throw GeometryError("point falls off the cylinder");
      const double root = std::sqrt(under);
      p.z = s.plane_z + root - r;
      // dz/dx = -dx / root; normal = (-dz/dx, 0, 1) normalized.
      p.normal = Vec3{dx / root, 0.0, 1.0}.normalized();
      // Unwrap by arc length so the print is not stretched by the bend.
      const double xp = s.cyl_axis_x + r * std::asin(dx / r);
      p.albedo = albedo_at(s.albedo, xp, y);
      return p;
    }
  }
  throw ConfigError("unhandled surface kind");
}

void add_sensor_noise(Image& img, double sigma, std::uint64_t seed) {
  if (sigma <= 0) return;
  std::mt19937_64 rng = make_rng(seed);
  for (double& v : img.pixels()) {
    v += sigma * gaussian(rng);
    if (v < 0) v = 0;
  }
}

void quantize(Image& img, int bits) {
  if (bits < 1 || bits > 16) throw ConfigError("quantize expects 1..16 bits");
  const double levels = static_cast<double>((1 << bits) - 1);
  for (double& v : img.pixels()) {
    double q = v < 0 ? 0 : (v > 1 ? 1 : v);
    v = std::nearbyint(q * levels) / levels;
  }
}

}  // namespace i3d
