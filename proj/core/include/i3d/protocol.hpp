#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "i3d/dataset.hpp"
#include "i3d/svm.hpp"

namespace i3d {

// Multi-flash challenge: the verifier scripts which flash fires at each step
// and checks that the captured pair photometrically agrees with that side.

struct ChallengeScript {
  std::vector<FlashSide> steps;
  std::string nonce;
  std::uint64_t seed = 0;
};

// Uniform i.i.d. Left/Right steps, reproducible from seed.
ChallengeScript generate_challenge(int n, std::uint64_t seed);

// Linear SVM over I3D face patches from live flash pairs in the manifest,
// labeled Left=-1 / Right=+1. Requires both sides present.
LinearModel train_direction_model(const DatasetManifest& manifest,
                                  const SvmTrainParams& params = {},
                                  int work_w = kWorkWidth, int work_h = kWorkHeight);

struct StepCapture {
  Image ambient, flash;
  LandmarkSet lm_ambient, lm_flash;
};

enum class FailureReason { liveness_fail, direction_mismatch, incomplete };
const char* to_string(FailureReason r);

struct StepResult {
  FlashSide expected = FlashSide::left;
  FlashSide predicted = FlashSide::left;
  double direction_margin = 0.0;
  double liveness_margin = 0.0;
  bool live = false;
  bool pass = false;
};

struct SessionVerdict {
  bool accepted = false;
  std::vector<StepResult> per_step;
  std::optional<FailureReason> failure_reason;  // first failure in step order
};

// Evaluates each step: liveness sign, predicted side == scripted side, and
// |direction margin| >= margin_floor. Always returns a verdict: a capture
// count that differs from the script length (or a step whose features cannot
// be extracted) rejects rather than throwing.
SessionVerdict verify_challenge(const ChallengeScript& script,
                                const std::vector<StepCapture>& captures,
                                const LinearModel& liveness_model,
                                const LinearModel& direction_model,
                                double margin_floor = 0.0,
                                int work_w = kWorkWidth, int work_h = kWorkHeight);

// Audit record: JSON with nonce, script, optional per-step image paths, and
// the verdict fields.
void write_session_transcript(const std::filesystem::path& path, const ChallengeScript& script,
                              const SessionVerdict& verdict,
                              const std::vector<std::pair<std::string, std::string>>& image_paths = {});

}  // namespace i3d
