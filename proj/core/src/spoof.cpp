#include <algorithm>
#include <memory>

#include "i3d/error.hpp"
#include "i3d/sim.hpp"

namespace i3d {

SceneSpec spoofify(const SceneSpec& live_scene, SpoofKind kind, const PrintParams& p) {
  if (live_scene.surface.kind != SurfaceKind::face) {
    throw ConfigError("spoofify expects a live face scene");
  }
  if (p.bake_width < 8 || p.bake_height < 8 || p.bake_supersample < 1) {
    throw ConfigError("bad print bake resolution");
  }

  // Frontal reference shot: head-on unit light, no flash. Rendered above
  // the print resolution and box-reduced, which bakes in the printer's
  // low-pass: fine skin texture does not survive onto the print.
  SceneSpec bake_scene = live_scene;
  bake_scene.flash.reset();
  bake_scene.ambient = {make_light({0, 0, 1}, 1.0)};
  bake_scene.flash_jitter = Similarity{};
  bake_scene.camera.width = p.bake_width * p.bake_supersample;
  bake_scene.camera.height = p.bake_height * p.bake_supersample;
  Image bake = render_lambertian(bake_scene, bake_scene.ambient);
  if (p.bake_supersample > 1) bake = resize_area(bake, p.bake_width, p.bake_height);
  for (double& v : bake.pixels()) v = std::clamp(v, 0.02, 1.0);

  SceneSpec spoof = live_scene;
  SurfaceModel& s = spoof.surface;
  s = SurfaceModel{};
  s.kind = kind == SpoofKind::curved ? SurfaceKind::cylinder : SurfaceKind::plane;
  s.plane_z = p.plane_z;
  s.tilt_x = kind == SpoofKind::curved ? 0.0 : p.tilt_x;
  s.tilt_y = kind == SpoofKind::curved ? 0.0 : p.tilt_y;
  s.cyl_radius = p.cyl_radius;
  s.cyl_axis_x = p.offset.x;
  s.emissive = kind == SpoofKind::screen ? p.emissive : 0.0;

  s.albedo = AlbedoSpec{};
  s.albedo.baked = std::make_shared<Image>(std::move(bake));
  s.albedo.bake_win_h = live_scene.camera.win_h;
  s.albedo.bake_dx = p.offset.x;
  s.albedo.bake_dy = p.offset.y;

  // The print reproduces the frontal view at world scale, so the anchor
  // layout carries over, moved with the sheet (cylinder anchors stay in
  // print coordinates and wrap at projection time).
  for (int i = 0; i < kNumLandmarks; ++i) {
    s.anchors[i] = {live_scene.surface.anchors[i].x + p.offset.x,
                    live_scene.surface.anchors[i].y + p.offset.y};
  }
  return spoof;
}

}  // namespace i3d
