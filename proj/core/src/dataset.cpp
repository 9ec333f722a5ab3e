#include "i3d/dataset.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "i3d/error.hpp"
#include "i3d/pgm.hpp"
#include "i3d/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace i3d {

const char* to_string(Modality m) {
  return m == Modality::flash_pair ? "flash_pair" : "stereo_pair";
}

const char* to_string(Label l) {
  switch (l) {
    case Label::live: return "live";
    case Label::spoof_flat: return "spoof_flat";
    case Label::spoof_curved: return "spoof_curved";
    case Label::spoof_screen: return "spoof_screen";
  }
  return "?";
}

const char* to_string(FlashSide s) { return s == FlashSide::left ? "left" : "right"; }

Modality modality_from_string(const std::string& s) {
  if (s == "flash_pair") return Modality::flash_pair;
  if (s == "stereo_pair") return Modality::stereo_pair;
  throw ArgumentError("unknown modality: " + s);
}

Label label_from_string(const std::string& s) {
  if (s == "live") return Label::live;
  if (s == "spoof_flat") return Label::spoof_flat;
  if (s == "spoof_curved") return Label::spoof_curved;
  if (s == "spoof_screen") return Label::spoof_screen;
  throw ArgumentError("unknown label: " + s);
}

FlashSide flash_side_from_string(const std::string& s) {
  if (s == "left") return FlashSide::left;
  if (s == "right") return FlashSide::right;
  throw ArgumentError("unknown flash side: " + s);
}

void write_manifest(const DatasetManifest& m, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + file.string());
  for (const ManifestRecord& r : m.records) {
    json j;
    j["sample_id"] = r.sample_id;
    j["subject_id"] = r.subject_id;
    j["modality"] = to_string(r.modality);
    j["label"] = to_string(r.label);
    if (r.flash_side) {
      j["flash_side"] = to_string(*r.flash_side);
    } else {
      j["flash_side"] = nullptr;
    }
    j["image_a"] = r.image_a;
    j["image_b"] = r.image_b;
    j["landmarks_a"] = r.landmarks_a;
    j["landmarks_b"] = r.landmarks_b;
    j["scene"] = r.scene;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("manifest write failed: " + file.string());
}

DatasetManifest read_manifest(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open manifest: " + file.string());
  DatasetManifest m;
  m.root = file.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
    ManifestRecord r;
    try {
      r.sample_id = j.at("sample_id").get<std::string>();
      r.subject_id = j.at("subject_id").get<std::string>();
      r.modality = modality_from_string(j.at("modality").get<std::string>());
      r.label = label_from_string(j.at("label").get<std::string>());
      if (!j.at("flash_side").is_null()) {
        r.flash_side = flash_side_from_string(j.at("flash_side").get<std::string>());
      }
      r.image_a = j.at("image_a").get<std::string>();
      r.image_b = j.at("image_b").get<std::string>();
      r.landmarks_a = j.at("landmarks_a").get<std::string>();
      r.landmarks_b = j.at("landmarks_b").get<std::string>();
      r.scene = j.at("scene").get<std::string>();
    } catch (const json::exception& e) {
      throw IoError("manifest line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ArgumentError& e) {
      throw DataError("manifest line " + std::to_string(lineno) + ": " + e.what());
    }
    if (r.flash_side && r.modality != Modality::flash_pair) {
      throw DataError("flash_side on a non flash-pair record: " + r.sample_id);
    }
    for (const std::string* p : {&r.image_a, &r.image_b, &r.landmarks_a, &r.landmarks_b, &r.scene}) {
      if (!fs::exists(m.root / *p)) {
        throw IoError("manifest references a missing file: " + (m.root / *p).string());
      }
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

FlashSample load_flash_sample(const DatasetManifest& m, const ManifestRecord& r) {
  if (r.modality != Modality::flash_pair) {
    throw DataError("record is not a flash pair: " + r.sample_id);
  }
  FlashSample s;
  s.ambient = read_pgm(m.root / r.image_a);
  s.flash = read_pgm(m.root / r.image_b);
  s.lm_ambient = read_landmarks_csv(m.root / r.landmarks_a);
  s.lm_flash = read_landmarks_csv(m.root / r.landmarks_b);
  return s;
}

StereoSample load_stereo_sample(const DatasetManifest& m, const ManifestRecord& r) {
  if (r.modality != Modality::stereo_pair) {
    throw DataError("record is not a stereo pair: " + r.sample_id);
  }
  StereoSample s;
  s.left = read_pgm(m.root / r.image_a);
  s.right = read_pgm(m.root / r.image_b);
  s.lm_left = read_landmarks_csv(m.root / r.landmarks_a);
  s.lm_right = read_landmarks_csv(m.root / r.landmarks_b);
  return s;
}

namespace {

json light_to_json(const LightSpec& l) {
  return json{{"dir", {l.direction.x, l.direction.y, l.direction.z}},
              {"intensity", l.intensity}};
}

LightSpec light_from_json(const json& j) {
  const auto& d = j.at("dir");
  return make_light({d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()},
                    j.at("intensity").get<double>());
}

}  // namespace

SceneTruth read_scene_truth(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open scene truth: " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("scene truth parse error: " + std::string(e.what()));
  }
  SceneTruth t;
  for (const auto& lj : j.at("ambient")) t.ambient.push_back(light_from_json(lj));
  if (!j.at("flash").is_null()) t.flash = light_from_json(j.at("flash"));
  const auto& c = j.at("camera");
  t.camera.width = c.at("width").get<int>();
  t.camera.height = c.at("height").get<int>();
  t.camera.win_h = c.at("win_h").get<double>();
  t.camera.standoff = c.at("standoff").get<double>();
  t.camera.focal_px = c.at("focal_px").get<double>();
  t.camera.baseline = c.at("baseline").get<double>();
  t.emissive = j.at("emissive").get<double>();
  t.exposure = j.at("exposure").get<double>();
  const auto& s = j.at("jitter");
  t.flash_jitter.a = s.at(0).get<double>();
  t.flash_jitter.b = s.at(1).get<double>();
  t.flash_jitter.tx = s.at(2).get<double>();
  t.flash_jitter.ty = s.at(3).get<double>();
  t.surface_kind = j.at("surface_kind").get<std::string>();
  const auto& maps = j.at("maps");
  auto get = [&](const char* k) {
    return maps.contains(k) ? maps.at(k).get<std::string>() : std::string();
  };
  t.depth = get("depth");
  t.nx = get("nx");
  t.ny = get("ny");
  t.nz = get("nz");
  t.ambient_response = get("ambient_response");
  t.flash_response = get("flash_response");
  t.disparity = get("disparity");
  return t;
}

SubjectParams sample_subject(std::uint64_t master_seed, int subject_idx) {
  std::mt19937_64 rng = make_rng(mix64(master_seed, 0x5b6a, static_cast<std::uint64_t>(subject_idx)));
  SubjectParams s;
  char id[16];
  std::snprintf(id, sizeof(id), "subj%02d", subject_idx);
  s.id = id;

  struct Tpl {
    double cx, cy, sx, sy, amp;
  };
  // Dome, nose ridge, brow, cheeks, chin.
  const Tpl tpl[] = {
      {0.00, 0.03, 0.26, 0.33, 0.110},
      {0.00, 0.00, 0.045, 0.11, 0.055},
      {0.00, -0.14, 0.17, 0.05, 0.022},
      {-0.15, 0.07, 0.085, 0.10, 0.028},
      {0.15, 0.07, 0.085, 0.10, 0.028},
      {0.00, 0.27, 0.09, 0.055, 0.030},
  };
  for (const Tpl& t : tpl) {
    GaussianBump b;
    b.cx = t.cx + uniform(rng, -0.012, 0.012);
    b.cy = t.cy + uniform(rng, -0.012, 0.012);
    b.sx = t.sx * uniform(rng, 0.85, 1.15);
    b.sy = t.sy * uniform(rng, 0.85, 1.15);
    b.amp = t.amp * uniform(rng, 0.80, 1.20);
    s.bumps.push_back(b);
  }

  const double prop = uniform(rng, 0.92, 1.08);  // facial proportions scale
  auto at = [&](double x, double y) { return Vec2{x * prop, y * prop}; };
  s.anchors[static_cast<int>(LandmarkName::nose_tip)] = {0, 0};
  s.anchors[static_cast<int>(LandmarkName::left_eye_outer)] = at(-0.21, -0.12);
  s.anchors[static_cast<int>(LandmarkName::right_eye_outer)] = at(0.21, -0.12);
  s.anchors[static_cast<int>(LandmarkName::mouth_left)] = at(-0.09, 0.18);
  s.anchors[static_cast<int>(LandmarkName::mouth_right)] = at(0.09, 0.18);
  s.anchors[static_cast<int>(LandmarkName::face_box_tl)] = at(-0.31, -0.39);
  s.anchors[static_cast<int>(LandmarkName::face_box_br)] = at(0.31, 0.39);

  s.albedo_base = uniform(rng, 0.45, 0.80);
  s.albedo_noise_amp = uniform(rng, 0.06, 0.10);
  s.albedo_seed = rng();
  return s;
}

namespace {

Camera camera_for(const SynthConfig& cfg) {
  Camera c;
  c.width = cfg.width;
  c.height = cfg.height;
  c.win_h = 1.0;
  c.standoff = 3.0;
  c.focal_px = 500.0 * cfg.height / 270.0;
  c.baseline = 0.15;
  return c;
}

void draw_capture_conditions(SceneSpec& scene, const SynthConfig& cfg,
                             std::uint64_t sample_seed, std::optional<FlashSide> side) {
  std::mt19937_64 lrng = make_rng(mix64(sample_seed, 2));
  scene.ambient.clear();
  for (int i = 0; i < 2; ++i) {
    const double polar = uniform(lrng, 5.0, 25.0);
    const double azim = uniform(lrng, 0.0, 360.0);
    const double inten = uniform(lrng, 0.35, 0.65);
    scene.ambient.push_back(light_from_angles(polar, azim, inten));
  }
  double ambient_total = 0;
  for (const LightSpec& l : scene.ambient) ambient_total += l.intensity;

  // The default flash is the device LED next to the lens: a tight cone
  // around the camera axis, so the live ratio pattern is stable across
  // captures. Side-sampled flashes model the offset challenge emitters.
  double polar, azim;
  if (side) {
    polar = uniform(lrng, 20.0, 50.0);
    // Image-left means the light sits at negative x.
    const double center = *side == FlashSide::left ? 180.0 : 0.0;
    azim = center + uniform(lrng, -25.0, 25.0);
  } else {
    polar = uniform(lrng, 2.0, 14.0);
    azim = uniform(lrng, 0.0, 360.0);
  }
  const double boost = uniform(lrng, cfg.flash_boost_min, cfg.flash_boost_max);
  scene.flash = light_from_angles(polar, azim, boost * ambient_total);

  scene.flash_jitter = Similarity{};
  if (cfg.jitter_px > 0) {
    std::mt19937_64 jrng = make_rng(mix64(sample_seed, 4));
    const double px_scale = cfg.height / 270.0;
    const double rot = uniform(jrng, -1.5, 1.5) * M_PI / 180.0;
    const double sc = uniform(jrng, 0.99, 1.01);
    const double du = uniform(jrng, -cfg.jitter_px, cfg.jitter_px) * px_scale;
    const double dv = uniform(jrng, -cfg.jitter_px, cfg.jitter_px) * px_scale;
    scene.flash_jitter = Similarity::from_parts(
        sc, rot, du, dv, {(cfg.width - 1) / 2.0, (cfg.height - 1) / 2.0});
  }
}

}  // namespace

SceneSpec make_live_scene(const SubjectParams& subject, const SynthConfig& cfg,
                          std::uint64_t sample_seed, std::optional<FlashSide> side) {
  SceneSpec scene;
  scene.seed = sample_seed;
  scene.subject_id = subject.id;
  scene.camera = camera_for(cfg);

  std::mt19937_64 prng = make_rng(mix64(sample_seed, 1));
  const double ox = uniform(prng, -0.03, 0.03);
  const double oy = uniform(prng, -0.03, 0.03);

  SurfaceModel& s = scene.surface;
  s.kind = SurfaceKind::face;
  s.bumps = subject.bumps;
  for (GaussianBump& b : s.bumps) {
    b.cx += ox;
    b.cy += oy;
  }
  for (int i = 0; i < kNumLandmarks; ++i) {
    s.anchors[i] = {subject.anchors[i].x + ox, subject.anchors[i].y + oy};
  }
  s.albedo.base = subject.albedo_base;
  s.albedo.noise_amp = subject.albedo_noise_amp;
  s.albedo.noise_seed = subject.albedo_seed;

  draw_capture_conditions(scene, cfg, sample_seed, side);
  return scene;
}

SceneSpec make_spoof_scene(const SubjectParams& subject, const SynthConfig& cfg,
                           std::uint64_t sample_seed, Label label,
                           std::optional<FlashSide> side) {
  if (label == Label::live) throw ConfigError("make_spoof_scene needs a spoof label");

  // Canonical-pose face that was photographed for the print.
  SceneSpec base;
  base.camera = camera_for(cfg);
  base.ambient = {make_light({0, 0, 1}, 1.0)};
  SurfaceModel& f = base.surface;
  f.kind = SurfaceKind::face;
  f.bumps = subject.bumps;
  f.albedo.base = subject.albedo_base;
  f.albedo.noise_amp = subject.albedo_noise_amp;
  f.albedo.noise_seed = subject.albedo_seed;
  for (int i = 0; i < kNumLandmarks; ++i) f.anchors[i] = subject.anchors[i];

  std::mt19937_64 srng = make_rng(mix64(sample_seed, 3));
  PrintParams p;
  p.bake_width = cfg.print_width;
  p.bake_height = cfg.print_height;
  p.bake_supersample = 2;
  p.offset = {uniform(srng, -0.02, 0.02), uniform(srng, -0.02, 0.02)};
  p.plane_z = uniform(srng, -0.05, 0.05);
  SpoofKind kind = SpoofKind::flat;
  switch (label) {
    case Label::spoof_flat:
      p.tilt_x = uniform(srng, -0.06, 0.06);
      p.tilt_y = uniform(srng, -0.06, 0.06);
      break;
    case Label::spoof_curved:
      kind = SpoofKind::curved;
      p.cyl_radius = uniform(srng, 1.2, 2.2);
      p.offset.x = uniform(srng, -0.05, 0.05);
      break;
    case Label::spoof_screen:
      kind = SpoofKind::screen;
      p.tilt_x = uniform(srng, -0.06, 0.06);
      p.tilt_y = uniform(srng, -0.06, 0.06);
      p.emissive = uniform(srng, 0.06, 0.18);
      break;
    default:
      break;
  }

  SceneSpec scene = spoofify(base, kind, p);
  scene.seed = sample_seed;
  scene.subject_id = subject.id;
  draw_capture_conditions(scene, cfg, sample_seed, side);
  return scene;
}

void apply_capture_chain(Image& img, const SynthConfig& cfg, std::uint64_t noise_seed) {
  if (cfg.exposure != 1.0) {
    for (double& v : img.pixels()) v *= cfg.exposure;
  }
  add_sensor_noise(img, cfg.noise_sigma, noise_seed);
  if (cfg.bit_depth > 0) quantize(img, cfg.bit_depth);
}

namespace {

struct SampleOutput {
  std::vector<ManifestRecord> records;
};

json scene_truth_json(const SceneSpec& scene, const SynthConfig& cfg, const json& maps) {
  json j;
  json amb = json::array();
  for (const LightSpec& l : scene.ambient) amb.push_back(light_to_json(l));
  j["ambient"] = amb;
  j["flash"] = scene.flash ? light_to_json(*scene.flash) : json(nullptr);
  j["camera"] = {{"width", scene.camera.width},   {"height", scene.camera.height},
                 {"win_h", scene.camera.win_h},   {"standoff", scene.camera.standoff},
                 {"focal_px", scene.camera.focal_px}, {"baseline", scene.camera.baseline}};
  j["emissive"] = scene.surface.emissive;
  j["exposure"] = cfg.exposure;
  j["jitter"] = {scene.flash_jitter.a, scene.flash_jitter.b, scene.flash_jitter.tx,
                 scene.flash_jitter.ty};
  j["surface_kind"] = to_string(scene.surface.kind);
  j["maps"] = maps;
  return j;
}

SampleOutput synth_one(const SynthConfig& cfg, const std::vector<SubjectParams>& subjects,
                       int index, Label label) {
  const std::uint64_t sample_seed = mix64(cfg.seed, static_cast<std::uint64_t>(index) + 1);
  const SubjectParams& subject = subjects[index % subjects.size()];

  std::optional<FlashSide> side;
  if (cfg.flash_pairs && cfg.sample_flash_side) {
    std::mt19937_64 rng = make_rng(mix64(sample_seed, 5));
    side = uniform01(rng) < 0.5 ? FlashSide::left : FlashSide::right;
  }

  SceneSpec scene = label == Label::live
                        ? make_live_scene(subject, cfg, sample_seed, side)
                        : make_spoof_scene(subject, cfg, sample_seed, label, side);

  char name[32];
  std::snprintf(name, sizeof(name), "s%05d", index);
  const std::string rel = std::string("samples/") + name;
  const fs::path dir = cfg.out_dir / rel;
  fs::create_directories(dir);

  json maps = json::object();
  SampleOutput out;

  RenderMaps rm;
  RenderMaps* rmp = cfg.write_maps ? &rm : nullptr;

  if (cfg.flash_pairs) {
    FlashPair fp = render_flash_pair(scene, rmp);
    apply_capture_chain(fp.ambient, cfg, mix64(sample_seed, 11));
    apply_capture_chain(fp.flash, cfg, mix64(sample_seed, 12));
    write_pgm(fp.ambient, dir / "ia.pgm");
    write_pgm(fp.flash, dir / "if.pgm");
    write_landmarks_csv(fp.lm_ambient, dir / "lm_a.csv");
    write_landmarks_csv(fp.lm_flash, dir / "lm_f.csv");
    if (rmp) {
      write_pfm(rm.depth, dir / "depth.pfm");
      write_pfm(rm.nx, dir / "nx.pfm");
      write_pfm(rm.ny, dir / "ny.pfm");
      write_pfm(rm.nz, dir / "nz.pfm");
      write_pfm(rm.ambient_response, dir / "amb_resp.pfm");
      write_pfm(rm.flash_response, dir / "flash_resp.pfm");
      for (const char* k : {"depth", "nx", "ny", "nz"}) maps[k] = rel + "/" + k + std::string(".pfm");
      maps["ambient_response"] = rel + "/amb_resp.pfm";
      maps["flash_response"] = rel + "/flash_resp.pfm";
    }
    ManifestRecord r;
    r.sample_id = std::string(name) + "-flash";
    r.subject_id = scene.subject_id;
    r.modality = Modality::flash_pair;
    r.label = label;
    r.flash_side = side;
    r.image_a = rel + "/ia.pgm";
    r.image_b = rel + "/if.pgm";
    r.landmarks_a = rel + "/lm_a.csv";
    r.landmarks_b = rel + "/lm_f.csv";
    r.scene = rel + "/scene.json";
    out.records.push_back(std::move(r));
  }

  if (cfg.stereo_pairs) {
    StereoPair sp = render_stereo_pair(scene, nullptr);
    apply_capture_chain(sp.left, cfg, mix64(sample_seed, 13));
    apply_capture_chain(sp.right, cfg, mix64(sample_seed, 14));
    write_pgm(sp.left, dir / "il.pgm");
    write_pgm(sp.right, dir / "ir.pgm");
    write_landmarks_csv(sp.lm_left, dir / "lm_l.csv");
    write_landmarks_csv(sp.lm_right, dir / "lm_r.csv");
    if (cfg.write_maps) {
      write_pfm(sp.disparity, dir / "disparity.pfm");
      maps["disparity"] = rel + "/disparity.pfm";
    }
    ManifestRecord r;
    r.sample_id = std::string(name) + "-stereo";
    r.subject_id = scene.subject_id;
    r.modality = Modality::stereo_pair;
    r.label = label;
    r.image_a = rel + "/il.pgm";
    r.image_b = rel + "/ir.pgm";
    r.landmarks_a = rel + "/lm_l.csv";
    r.landmarks_b = rel + "/lm_r.csv";
    r.scene = rel + "/scene.json";
    out.records.push_back(std::move(r));
  }

  {
    std::ofstream js(dir / "scene.json", std::ios::binary);
    if (!js) throw IoError("cannot write scene truth in " + dir.string());
    js << scene_truth_json(scene, cfg, maps).dump(2) << "\n";
  }
  return out;
}

}  // namespace

DatasetManifest synth_dataset(const SynthConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("synth needs an output directory");
  if (cfg.subjects < 1) throw ConfigError("synth needs at least one subject");
  if (cfg.total_samples() < 1) throw ConfigError("synth needs a positive sample count");
  if (!cfg.flash_pairs && !cfg.stereo_pairs) {
    throw ConfigError("select at least one of flash/stereo modalities");
  }
  if (cfg.flash_boost_min > cfg.flash_boost_max || cfg.flash_boost_min < 0) {
    throw ConfigError("bad flash boost range");
  }

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.out_dir.string());

  std::vector<SubjectParams> subjects;
  subjects.reserve(cfg.subjects);
  for (int i = 0; i < cfg.subjects; ++i) subjects.push_back(sample_subject(cfg.seed, i));

  std::vector<Label> labels;
  labels.reserve(cfg.total_samples());
  for (int i = 0; i < cfg.live; ++i) labels.push_back(Label::live);
  for (int i = 0; i < cfg.spoof_flat; ++i) labels.push_back(Label::spoof_flat);
  for (int i = 0; i < cfg.spoof_curved; ++i) labels.push_back(Label::spoof_curved);
  for (int i = 0; i < cfg.spoof_screen; ++i) labels.push_back(Label::spoof_screen);

  const int n = static_cast<int>(labels.size());
  std::vector<SampleOutput> outputs(n);
  const int jobs = std::max(1, cfg.jobs);

  auto worker = [&](int first, int step) {
    for (int i = first; i < n; i += step) outputs[i] = synth_one(cfg, subjects, i, labels[i]);
  };
  if (jobs == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t] {
        try {
          worker(t, jobs);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      });
    }
    for (std::thread& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }

  DatasetManifest m;
  m.root = cfg.out_dir;
  for (int i = 0; i < n; ++i) {
    for (ManifestRecord& r : outputs[i].records) m.records.push_back(std::move(r));
  }
  write_manifest(m, cfg.out_dir / "manifest.jsonl");
  return m;
}

}  // namespace i3d
