#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "i3d/landmarks.hpp"
#include "i3d/sim.hpp"

namespace i3d {

enum class Modality : int { flash_pair = 0, stereo_pair };
enum class Label : int { live = 0, spoof_flat, spoof_curved, spoof_screen };
enum class FlashSide : int { left = 0, right };

const char* to_string(Modality m);
const char* to_string(Label l);
const char* to_string(FlashSide s);
Modality modality_from_string(const std::string& s);
Label label_from_string(const std::string& s);
FlashSide flash_side_from_string(const std::string& s);

inline bool is_live(Label l) { return l == Label::live; }

// One captured sample; paths are relative to the manifest directory.
// image/landmarks a = ambient or left shot, b = flash or right shot.
struct ManifestRecord {
  std::string sample_id;
  std::string subject_id;
  Modality modality = Modality::flash_pair;
  Label label = Label::live;
  std::optional<FlashSide> flash_side;
  std::string image_a, image_b;
  std::string landmarks_a, landmarks_b;
  std::string scene;  // ground-truth sidecar (lights, camera, map paths)
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestRecord> records;
};

// JSON-lines, one record per line, stable key order.
void write_manifest(const DatasetManifest& m, const std::filesystem::path& file);
// Reads and validates: every referenced file must exist, flash_side only
// on flash pairs. Throws IoError / DataError.
DatasetManifest read_manifest(const std::filesystem::path& file);

struct FlashSample {
  Image ambient, flash;
  LandmarkSet lm_ambient, lm_flash;
};
struct StereoSample {
  Image left, right;
  LandmarkSet lm_left, lm_right;
};
FlashSample load_flash_sample(const DatasetManifest& m, const ManifestRecord& r);
StereoSample load_stereo_sample(const DatasetManifest& m, const ManifestRecord& r);

// Capture-time truths stored per sample, enough to rebuild analytic
// oracles without re-running the renderer.
struct SceneTruth {
  std::vector<LightSpec> ambient;
  std::optional<LightSpec> flash;
  Camera camera;
  double emissive = 0.0;
  double exposure = 1.0;
  Similarity flash_jitter;
  std::string surface_kind;
  // Optional raster companions (empty strings when not written).
  std::string depth, nx, ny, nz, ambient_response, flash_response, disparity;
};
SceneTruth read_scene_truth(const std::filesystem::path& file);

struct SynthConfig {
  std::filesystem::path out_dir;
  int subjects = 2;
  int live = 0, spoof_flat = 0, spoof_curved = 0, spoof_screen = 0;
  bool flash_pairs = true;
  bool stereo_pairs = false;
  bool sample_flash_side = false;  // draw flash azimuth from left/right cones
  int width = 480, height = 270;
  int print_width = 480, print_height = 270;
  double flash_boost_min = 0.2, flash_boost_max = 0.5;  // relative to ambient
  double noise_sigma = 0.005;
  int bit_depth = 8;        // 0 disables quantization
  double exposure = 0.55;   // headroom so flash shots stay below sensor full
  double jitter_px = 2.0;   // flash shot pose jitter; 0 disables
  bool write_maps = false;  // depth/normal/disparity PFM companions
  int jobs = 1;
  std::uint64_t seed = 0;

  int total_samples() const { return live + spoof_flat + spoof_curved + spoof_screen; }
};

// Renders and writes the corpus; deterministic in (config, seed), byte
// identical across runs. Returns the manifest it wrote.
DatasetManifest synth_dataset(const SynthConfig& cfg);

// Scene construction shared with tests and fixtures.
struct SubjectParams {
  std::string id;
  std::vector<GaussianBump> bumps;
  std::array<Vec2, kNumLandmarks> anchors;
  double albedo_base = 0.6;
  double albedo_noise_amp = 0.08;
  std::uint64_t albedo_seed = 0;
};
SubjectParams sample_subject(std::uint64_t master_seed, int subject_idx);

// Live capture scene: subject geometry plus per-sample pose, lighting and
// flash draw. side, when set, confines the flash azimuth to that side's
// cone. Stereo parameters are filled from the config resolution.
SceneSpec make_live_scene(const SubjectParams& subject, const SynthConfig& cfg,
                          std::uint64_t sample_seed, std::optional<FlashSide> side);

// Spoof capture scene for the same subject: bakes the print, then applies
// fresh capture lighting and pose from the sample stream.
SceneSpec make_spoof_scene(const SubjectParams& subject, const SynthConfig& cfg,
                           std::uint64_t sample_seed, Label label,
                           std::optional<FlashSide> side);

// Exposure scale, sensor noise, quantization: the capture chain applied to
// a pure render before anything is written or measured.
void apply_capture_chain(Image& img, const SynthConfig& cfg, std::uint64_t noise_seed);

}  // namespace i3d
