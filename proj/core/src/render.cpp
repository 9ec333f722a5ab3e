#include "i3d/sim.hpp"

#include <cmath>

#include "i3d/error.hpp"

namespace i3d {

namespace {

double shade(const Vec3& n, const std::vector<LightSpec>& lights) {
  double s = 0.0;
  for (const LightSpec& l : lights) {
    const double d = n.dot(l.scaled());
    if (d > 0) s += d;
  }
  return s;
}

// World position of a landmark anchor (cylinders store print coordinates
// that wrap onto the arc).
Vec2 anchor_world(const SurfaceModel& s, const Vec2& anchor) {
  if (s.kind != SurfaceKind::cylinder) return anchor;
  const double dxp = anchor.x - s.cyl_axis_x;
  return {s.cyl_axis_x + s.cyl_radius * std::sin(dxp / s.cyl_radius), anchor.y};
}

LandmarkSet project_anchors(const SceneSpec& scene, const Similarity& jit) {
  LandmarkSet lm;
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Vec2 w = anchor_world(scene.surface, scene.surface.anchors[i]);
    Vec2 p = scene.camera.world_to_pixel(w.x, w.y);
    if (!jit.is_identity()) p = jit.apply(p);
    lm[static_cast<LandmarkName>(i)] = p;
  }
  return lm;
}

}  // namespace

Image render_lambertian(const SceneSpec& scene, const std::vector<LightSpec>& lights) {
  scene.validate();
  if (lights.empty()) throw ConfigError("render needs at least one light");
  for (const LightSpec& l : lights) l.validate();
  const Camera& cam = scene.camera;
  Image out(cam.width, cam.height);
  for (int v = 0; v < cam.height; ++v) {
    double* row = out.row(v);
    for (int u = 0; u < cam.width; ++u) {
      const Vec2 w = cam.pixel_to_world(u, v);
      const SurfacePoint p = eval_surface(scene.surface, w.x, w.y);
      row[u] = p.albedo * shade(p.normal, lights) + scene.surface.emissive;
    }
  }
  out.check_finite();
  return out;
}

FlashPair render_flash_pair(const SceneSpec& scene, RenderMaps* maps) {
  scene.validate();
  if (!scene.flash) throw ConfigError("flash pair requires a flash light");
  const Camera& cam = scene.camera;
  const Vec3 lf = scene.flash->scaled();
  const bool steady = scene.flash_jitter.is_identity();

  FlashPair out;
  out.ambient = Image(cam.width, cam.height);
  out.flash = Image(cam.width, cam.height);
  if (maps) {
    maps->depth = Image(cam.width, cam.height);
    maps->nx = Image(cam.width, cam.height);
    maps->ny = Image(cam.width, cam.height);
    maps->nz = Image(cam.width, cam.height);
    maps->ambient_response = Image(cam.width, cam.height);
    maps->flash_response = Image(cam.width, cam.height);
  }

  for (int v = 0; v < cam.height; ++v) {
    double* ra = out.ambient.row(v);
    double* rf = steady ? out.flash.row(v) : nullptr;
    for (int u = 0; u < cam.width; ++u) {
      const Vec2 w = cam.pixel_to_world(u, v);
      const SurfacePoint p = eval_surface(scene.surface, w.x, w.y);
      const double amb = shade(p.normal, scene.ambient);
      const double fl = std::max(p.normal.dot(lf), 0.0);
      ra[u] = p.albedo * amb + scene.surface.emissive;
      if (steady) rf[u] = p.albedo * (amb + fl) + scene.surface.emissive;
      if (maps) {
        maps->depth.at(u, v) = cam.standoff - p.z;
        maps->nx.at(u, v) = p.normal.x;
        maps->ny.at(u, v) = p.normal.y;
        maps->nz.at(u, v) = p.normal.z;
        maps->ambient_response.at(u, v) = amb;
        maps->flash_response.at(u, v) = fl;
      }
    }
  }
  if (!steady) {
    // The flash shot looks through a slightly moved camera: flash-image
    // pixel q sees the world point of base pixel S^-1(q).
    const Similarity inv = scene.flash_jitter.inverse();
    for (int v = 0; v < cam.height; ++v) {
      double* rf = out.flash.row(v);
      for (int u = 0; u < cam.width; ++u) {
        const Vec2 base = inv.apply({static_cast<double>(u), static_cast<double>(v)});
        const Vec2 w = cam.pixel_to_world(base.x, base.y);
        const SurfacePoint p = eval_surface(scene.surface, w.x, w.y);
        const double amb = shade(p.normal, scene.ambient);
        const double fl = std::max(p.normal.dot(lf), 0.0);
        rf[u] = p.albedo * (amb + fl) + scene.surface.emissive;
      }
    }
  }
  out.ambient.check_finite();
  out.flash.check_finite();
  out.lm_ambient = project_anchors(scene, Similarity{});
  out.lm_flash = project_anchors(scene, scene.flash_jitter);
  return out;
}

StereoPair render_stereo_pair(const SceneSpec& scene, RenderMaps* maps) {
  scene.validate();
  const Camera& cam = scene.camera;
  if (!(cam.focal_px > 0)) throw GeometryError("stereo requires a positive focal");
  if (cam.baseline < 0) throw GeometryError("stereo baseline must be >= 0");

  StereoPair out;
  out.left = Image(cam.width, cam.height);
  out.right = Image(cam.width, cam.height);
  out.disparity = Image(cam.width, cam.height);
  if (maps) {
    maps->depth = Image(cam.width, cam.height);
    maps->nx = Image(cam.width, cam.height);
    maps->ny = Image(cam.width, cam.height);
    maps->nz = Image(cam.width, cam.height);
    maps->ambient_response = Image(cam.width, cam.height);
    maps->flash_response = Image(cam.width, cam.height);
  }

  std::vector<double> target(cam.width);  // column each left pixel lands on
  for (int v = 0; v < cam.height; ++v) {
    double* rl = out.left.row(v);
    double* rd = out.disparity.row(v);
    for (int u = 0; u < cam.width; ++u) {
      const Vec2 w = cam.pixel_to_world(u, v);
      const SurfacePoint p = eval_surface(scene.surface, w.x, w.y);
      const double depth = cam.standoff - p.z;
      if (!(depth > 0)) throw GeometryError("surface reaches behind the camera");
      const double amb = shade(p.normal, scene.ambient);
      rl[u] = p.albedo * amb + scene.surface.emissive;
      rd[u] = cam.focal_px * cam.baseline / depth;
      target[u] = u - rd[u];
      if (maps) {
        maps->depth.at(u, v) = depth;
        maps->nx.at(u, v) = p.normal.x;
        maps->ny.at(u, v) = p.normal.y;
        maps->nz.at(u, v) = p.normal.z;
        maps->ambient_response.at(u, v) = amb;
      }
    }
    // Lambertian radiance is view independent, so the right view is the
    // left scanline re-sampled at the shifted positions. target is
    // monotone for our gentle depth fields; interpolate between the two
    // source pixels bracketing each output column.
    double* rr = out.right.row(v);
    int j = 0;
    for (int x = 0; x < cam.width; ++x) {
      if (x <= target[0]) {
        rr[x] = rl[0];
        continue;
      }
      if (x >= target[cam.width - 1]) {
        rr[x] = rl[cam.width - 1];
        continue;
      }
      while (j + 1 < cam.width && target[j + 1] < x) ++j;
      const double span = target[j + 1] - target[j];
      const double t = span > 1e-9 ? (x - target[j]) / span : 0.0;
      rr[x] = rl[j] + (rl[j + 1] - rl[j]) * t;
    }
  }
  out.left.check_finite();
  out.right.check_finite();

  out.lm_left = project_anchors(scene, Similarity{});
  for (int i = 0; i < kNumLandmarks; ++i) {
    const Vec2 w = anchor_world(scene.surface, scene.surface.anchors[i]);
    const SurfacePoint p = eval_surface(scene.surface, w.x, w.y);
    const double d = cam.focal_px * cam.baseline / (cam.standoff - p.z);
    Vec2 q = out.lm_left[static_cast<LandmarkName>(i)];
    q.x -= d;
    out.lm_right[static_cast<LandmarkName>(i)] = q;
  }
  return out;
}

LandmarkSet landmarks_for_scene(const SceneSpec& scene) {
  return project_anchors(scene, Similarity{});
}

}  // namespace i3d
