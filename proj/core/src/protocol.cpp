#include "i3d/protocol.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "i3d/error.hpp"
#include "i3d/rng.hpp"
#include "nlohmann/json.hpp"

namespace i3d {

ChallengeScript generate_challenge(int n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("generate_challenge: need at least one step");
  ChallengeScript script;
  script.seed = seed;
  auto rng = make_rng(mix64(seed, 0xCA11u));
  script.steps.reserve(n);
  for (int i = 0; i < n; ++i)
    script.steps.push_back((rng() & 1u) ? FlashSide::right : FlashSide::left);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ch-%016" PRIx64, mix64(seed, 0x90ceu));
  script.nonce = buf;
  return script;
}

namespace {

FeatureVector direction_feature(const Image& ia, const Image& iflash, const LandmarkSet& la,
                                const LandmarkSet& lf, int work_w, int work_h) {
  const RegisteredPair reg = register_flash_pair(ia, iflash, la, lf, work_w, work_h);
  const PatchRegion region = make_face_region(reg.landmarks, work_w, work_h);
  return compute_i3d(reg.ambient, reg.flash, region);
}

}  // namespace

LinearModel train_direction_model(const DatasetManifest& manifest, const SvmTrainParams& params,
                                  int work_w, int work_h) {
  std::vector<FeatureVector> feats;
  std::vector<int> labels;
  for (const auto& rec : manifest.records) {
    if (rec.modality != Modality::flash_pair || rec.label != Label::live || !rec.flash_side)
      continue;
    const FlashSample s = load_flash_sample(manifest, rec);
    FeatureVector fv =
        direction_feature(s.ambient, s.flash, s.lm_ambient, s.lm_flash, work_w, work_h);
    fv.sample_id = rec.sample_id;
    fv.label = to_string(*rec.flash_side);
    feats.push_back(std::move(fv));
    labels.push_back(*rec.flash_side == FlashSide::right ? 1 : -1);
  }
  if (feats.empty())
    throw DataError("train_direction_model: no live flash pairs with side labels");
  return svm_train(feats, labels, params);  // single side present -> DataError from svm_train
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::liveness_fail: return "liveness_fail";
    case FailureReason::direction_mismatch: return "direction_mismatch";
    case FailureReason::incomplete: return "incomplete";
  }
  return "?";
}

SessionVerdict verify_challenge(const ChallengeScript& script,
                                const std::vector<StepCapture>& captures,
                                const LinearModel& liveness_model,
                                const LinearModel& direction_model, double margin_floor,
                                int work_w, int work_h) {
  SessionVerdict verdict;
  const bool lengths_match = !script.steps.empty() && script.steps.size() == captures.size();
  const std::size_t n = std::min(script.steps.size(), captures.size());
  bool all_pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    StepResult step;
    step.expected = script.steps[i];
    try {
      const FeatureVector fv =
          direction_feature(captures[i].ambient, captures[i].flash, captures[i].lm_ambient,
                            captures[i].lm_flash, work_w, work_h);
      const Prediction lv = svm_predict(liveness_model, fv);
      const Prediction dir = svm_predict(direction_model, fv);
      step.liveness_margin = lv.margin;
      step.live = lv.label == 1;
      step.direction_margin = dir.margin;
      step.predicted = dir.label == 1 ? FlashSide::right : FlashSide::left;
      const bool dir_ok =
          step.predicted == step.expected && std::abs(dir.margin) >= margin_floor;
      step.pass = step.live && dir_ok;
      if (!step.pass && !verdict.failure_reason)
        verdict.failure_reason =
            step.live ? FailureReason::direction_mismatch : FailureReason::liveness_fail;
    } catch (const Error&) {
      // unextractable capture (bad registration, degenerate landmarks): the
      // step cannot attest liveness, so it fails closed
      step.pass = false;
      step.live = false;
      if (!verdict.failure_reason) verdict.failure_reason = FailureReason::liveness_fail;
    }
    all_pass = all_pass && step.pass;
    verdict.per_step.push_back(step);
  }
  if (!lengths_match) {
    verdict.accepted = false;
    verdict.failure_reason = FailureReason::incomplete;
  } else {
    verdict.accepted = all_pass;
  }
  return verdict;
}

void write_session_transcript(const std::filesystem::path& path, const ChallengeScript& script,
                              const SessionVerdict& verdict,
                              const std::vector<std::pair<std::string, std::string>>& image_paths) {
  nlohmann::json j;
  j["nonce"] = script.nonce;
  j["seed"] = script.seed;
  nlohmann::json steps = nlohmann::json::array();
  for (FlashSide s : script.steps) steps.push_back(to_string(s));
  j["script"] = steps;
  nlohmann::json per = nlohmann::json::array();
  for (std::size_t i = 0; i < verdict.per_step.size(); ++i) {
    const StepResult& s = verdict.per_step[i];
    nlohmann::json e = {{"expected", to_string(s.expected)},
                        {"predicted", to_string(s.predicted)},
                        {"direction_margin", s.direction_margin},
                        {"liveness_margin", s.liveness_margin},
                        {"live", s.live},
                        {"pass", s.pass}};
    if (i < image_paths.size()) {
      e["image_a"] = image_paths[i].first;
      e["image_b"] = image_paths[i].second;
    }
    per.push_back(e);
  }
  j["steps"] = per;
  j["accepted"] = verdict.accepted;
  if (verdict.failure_reason)
    j["failure_reason"] = to_string(*verdict.failure_reason);
  else
    j["failure_reason"] = nullptr;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write transcript: " + path.string());
  out << j.dump(2) << "\n";
  if (!out.good()) throw IoError("short write: " + path.string());
}

}  // namespace i3d
