// Microbenchmarks over pre-rendered in-memory inputs; no I/O in the timed
// region. Run with --benchmark_filter=... to narrow.

#include <benchmark/benchmark.h>

#include <optional>

#include "i3d/cnn.hpp"
#include "i3d/dataset.hpp"
#include "i3d/features.hpp"
#include "i3d/homography.hpp"
#include "i3d/rng.hpp"
#include "i3d/sim.hpp"
#include "i3d/svm.hpp"

namespace {

using namespace i3d;

struct Fixture {
  SceneSpec scene;
  FlashPair flash;
  StereoPair stereo;
  FeatureVector patch;
  LinearModel svm;
  CnnModel cnn;

  Fixture() {
    SynthConfig cfg;
    const SubjectParams subject = sample_subject(42, 0);
    scene = make_live_scene(subject, cfg, 7, std::nullopt);
    flash = render_flash_pair(scene);
    stereo = render_stereo_pair(scene);

    const RegisteredPair reg = register_flash_pair(flash.ambient, flash.flash,
                                                   flash.lm_ambient, flash.lm_flash);
    patch = compute_i3d(reg.ambient, reg.flash, make_face_region(reg.landmarks,
                                                                 kWorkWidth, kWorkHeight));
    svm.layout = patch.layout;
    svm.weights.assign(patch.values.size(), 0.01f);
    svm.mean.assign(patch.values.size(), 0.0f);
    svm.sigma.assign(patch.values.size(), 1.0f);
    cnn = make_cnn(1);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_RenderFlashPair(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(render_flash_pair(f.scene));
}
BENCHMARK(BM_RenderFlashPair)->Unit(benchmark::kMillisecond);

void BM_ExtractI3d(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    const RegisteredPair reg = register_flash_pair(f.flash.ambient, f.flash.flash,
                                                   f.flash.lm_ambient, f.flash.lm_flash);
    benchmark::DoNotOptimize(compute_i3d(
        reg.ambient, reg.flash, make_face_region(reg.landmarks, kWorkWidth, kWorkHeight)));
  }
}
BENCHMARK(BM_ExtractI3d)->Unit(benchmark::kMillisecond);

void BM_ExtractDa3d(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    const PatchRegion region =
        make_face_region(f.stereo.lm_right, kWorkWidth, kWorkHeight);
    benchmark::DoNotOptimize(compute_da3d(f.stereo.left, f.stereo.right, f.stereo.lm_left,
                                          f.stereo.lm_right, region));
  }
}
BENCHMARK(BM_ExtractDa3d)->Unit(benchmark::kMillisecond);

void BM_Lbp(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(lbp_descriptor(f.flash.flash, f.flash.lm_flash));
}
BENCHMARK(BM_Lbp)->Unit(benchmark::kMillisecond);

void BM_SvmPredict(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(svm_predict(f.svm, f.patch));
}
BENCHMARK(BM_SvmPredict);

void BM_CnnInfer(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(cnn_predict_one(f.cnn, f.patch));
}
BENCHMARK(BM_CnnInfer)->Unit(benchmark::kMicrosecond);

void BM_EstimateHomography(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_homography(f.flash.lm_flash, f.flash.lm_ambient));
}
BENCHMARK(BM_EstimateHomography);

}  // namespace

BENCHMARK_MAIN();
