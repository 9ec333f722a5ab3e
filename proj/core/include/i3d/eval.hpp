#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "i3d/cnn.hpp"
#include "i3d/dataset.hpp"
#include "i3d/svm.hpp"

namespace i3d {

enum class FeatureKind { i3d, da3d, lbp, chan };
enum class ClassifierKind { svm, cnn };
// Which manifest field becomes the +1/-1 label: liveness (live = +1) or
// flash side (right = +1).
enum class TaskKind { liveness, flash_side };

const char* to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);
const char* to_string(ClassifierKind k);
ClassifierKind classifier_kind_from_string(const std::string& s);
const char* to_string(TaskKind k);
TaskKind task_kind_from_string(const std::string& s);

struct ExtractOptions {
  FeatureKind feature = FeatureKind::i3d;
  RegionKind region = RegionKind::face;
  TaskKind task = TaskKind::liveness;
  int work_w = kWorkWidth;
  int work_h = kWorkHeight;
  int jobs = 1;
  bool skip_failures = false;  // log to stderr and drop, instead of throwing
};

struct Extracted {
  std::vector<FeatureVector> features;
  std::vector<int> labels;  // +1 / -1 per task
  std::vector<std::string> subjects;
  std::size_t skipped = 0;
};

// Pulls every manifest record of the feature's modality through the feature
// pipeline. Records of other modalities (or without a side label under the
// flash_side task) are ignored. Empty result -> DataError.
Extracted extract_features(const DatasetManifest& manifest, const ExtractOptions& opts = {});

struct Metrics {
  double accuracy = 0.0;
  std::optional<double> far, frr, hter;  // absent when a class is missing
};

// Exact counts; +1 is the positive (live/accept) class.
Metrics metrics(const std::vector<int>& predictions, const std::vector<int>& labels);

struct TrainOptions {
  ClassifierKind classifier = ClassifierKind::svm;
  SvmTrainParams svm;
  CnnTrainParams cnn;
};

struct RunMetrics {
  std::uint64_t seed = 0;
  int train_n = 0, test_n = 0;
  Metrics m;
};

struct EvalReport {
  std::vector<RunMetrics> runs;
  double mean_acc = 0.0, std_acc = 0.0;
  std::optional<double> mean_hter, std_hter;
  std::string config_echo;  // JSON text of the options that produced it
};

struct HoldoutOptions {
  double frac_train = 0.8;
  int repeats = 10;
  std::uint64_t seed = 0;
  int min_per_class = 20;
  TrainOptions train;
};

// Stratified random split per repeat, fresh classifier each time.
// Deterministic in (data multiset, options).
EvalReport repeated_holdout(const Extracted& data, const HoldoutOptions& opts);
EvalReport repeated_holdout(const DatasetManifest& manifest, const ExtractOptions& ex,
                            const HoldoutOptions& opts);

struct SubjectFold {
  std::string subject;
  int test_n = 0;
  Metrics m;
};
struct LosoResult {
  double mean_accuracy = 0.0;
  std::vector<SubjectFold> folds;
};

// One fold per subject id: train on the rest, test on the held-out subject.
LosoResult leave_one_subject_out(const Extracted& data, const TrainOptions& train = {});
LosoResult leave_one_subject_out(const DatasetManifest& manifest, const ExtractOptions& ex,
                                 const TrainOptions& train = {});

struct SweepRow {
  int width = 0, height = 0;
  FeatureKind feature = FeatureKind::i3d;
  EvalReport report;
};

// Re-extracts at each working resolution and repeats the holdout protocol.
std::vector<SweepRow> resolution_sweep(const DatasetManifest& manifest,
                                       const std::vector<std::pair<int, int>>& resolutions,
                                       const std::vector<FeatureKind>& features,
                                       const ExtractOptions& base, const HoldoutOptions& opts);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

enum class BenchStage { landmarks_stub, extract_i3d, extract_da3d, extract_chan, svm_infer, cnn_infer };
const char* to_string(BenchStage s);
BenchStage bench_stage_from_string(const std::string& s);

struct BenchResult {
  double median_ms = 0.0, p95_ms = 0.0;
  int iters = 0;
};

// Wall clock over pre-rendered in-memory inputs at 480x270; excludes I/O.
BenchResult bench_latency(BenchStage stage, int iters);

std::string eval_report_to_json(const EvalReport& r);
EvalReport eval_report_from_json(const std::string& text);
void write_eval_report(const EvalReport& r, const std::filesystem::path& path);
std::string loso_to_json(const LosoResult& r);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

}  // namespace i3d
