// Command-line front end: dataset synthesis, feature extraction, training,
// evaluation, challenge sessions, latency benchmarks.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Logs go to
// stderr; data goes to files only. Every invocation echoes its resolved
// configuration as JSON next to its output (run.json inside output
// directories, <name>.run.json beside output files). Relative output paths
// resolve under $I3DLIVE_OUT_ROOT when that variable is set.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "i3d/dataset.hpp"
#include "i3d/error.hpp"
#include "i3d/eval.hpp"
#include "i3d/pgm.hpp"
#include "i3d/protocol.hpp"
#include "i3d/rng.hpp"
#include "i3d/sim.hpp"
#include "nlohmann/json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve_out(const fs::path& p) {
  const char* root = std::getenv("I3DLIVE_OUT_ROOT");
  if (root && *root && p.is_relative()) return fs::path(root) / p;
  return p;
}

void write_json_file(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw i3d::IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out.good()) throw i3d::IoError("short write: " + path.string());
}

// dir outputs get DIR/run.json, file outputs get FILE.run.json alongside
void echo_run_config(const json& cfg, const fs::path& out, bool out_is_dir) {
  const fs::path where =
      out_is_dir ? out / "run.json" : fs::path(out.string() + ".run.json");
  write_json_file(cfg, where);
}

int label_from_string(const std::string& s) {
  if (s == "live" || s == "right") return 1;
  if (s == "left" || s.rfind("spoof", 0) == 0) return -1;
  throw i3d::DataError("cannot map label '" + s + "' to a binary class");
}

struct TrainFlags {
  double lambda = 1e-4;
  int epochs = 0;  // 0 = classifier default
  double lr = 0.02;
  int batch = 32;
  std::uint64_t seed = 0;
};

void add_train_flags(CLI::App* app, TrainFlags& f, bool with_seed = true) {
  app->add_option("--lambda", f.lambda, "SVM regularization strength");
  app->add_option("--epochs", f.epochs, "training epochs (0 = default)");
  app->add_option("--lr", f.lr, "CNN learning rate");
  app->add_option("--batch", f.batch, "CNN minibatch size");
  if (with_seed) app->add_option("--seed", f.seed, "RNG seed");
}

i3d::TrainOptions to_train_options(const TrainFlags& f, i3d::ClassifierKind kind) {
  i3d::TrainOptions t;
  t.classifier = kind;
  t.svm.lambda = f.lambda;
  if (f.epochs > 0) t.svm.epochs = f.epochs;
  t.svm.seed = f.seed;
  t.cnn.lr = f.lr;
  if (f.epochs > 0) t.cnn.epochs = f.epochs;
  t.cnn.batch = f.batch;
  t.cnn.seed = f.seed;
  return t;
}

json train_flags_json(const TrainFlags& f) {
  return {{"lambda", f.lambda},
          {"epochs", f.epochs},
          {"lr", f.lr},
          {"batch", f.batch},
          {"seed", f.seed}};
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const i3d::SynthConfig& cfg_in) {
  i3d::SynthConfig cfg = cfg_in;
  cfg.out_dir = resolve_out(cfg.out_dir);
  const i3d::DatasetManifest manifest = i3d::synth_dataset(cfg);
  json echo = {{"command", "synth"},
               {"out", cfg.out_dir.string()},
               {"subjects", cfg.subjects},
               {"live", cfg.live},
               {"spoof_flat", cfg.spoof_flat},
               {"spoof_curved", cfg.spoof_curved},
               {"spoof_screen", cfg.spoof_screen},
               {"flash_pairs", cfg.flash_pairs},
               {"stereo_pairs", cfg.stereo_pairs},
               {"sample_flash_side", cfg.sample_flash_side},
               {"width", cfg.width},
               {"height", cfg.height},
               {"print_width", cfg.print_width},
               {"print_height", cfg.print_height},
               {"noise_sigma", cfg.noise_sigma},
               {"bit_depth", cfg.bit_depth},
               {"exposure", cfg.exposure},
               {"jitter_px", cfg.jitter_px},
               {"write_maps", cfg.write_maps},
               {"jobs", cfg.jobs},
               {"seed", cfg.seed}};
  echo_run_config(echo, cfg.out_dir, true);
  std::cerr << "synth: wrote " << manifest.records.size() << " records to "
            << (cfg.out_dir / "manifest.jsonl").string() << "\n";
  return 0;
}

// ---- extract ----------------------------------------------------------------

int cmd_extract(const std::string& manifest_path, i3d::ExtractOptions opts,
                const fs::path& out_in, bool binary) {
  const fs::path out = resolve_out(out_in);
  const i3d::DatasetManifest manifest = i3d::read_manifest(manifest_path);
  const i3d::Modality want =
      opts.feature == i3d::FeatureKind::da3d ? i3d::Modality::stereo_pair
                                             : i3d::Modality::flash_pair;
  bool any = false;
  for (const auto& rec : manifest.records) any = any || rec.modality == want;
  if (!any) {
    std::cerr << "extract: manifest has no " << (want == i3d::Modality::stereo_pair ? "stereo" : "flash")
              << "-pair records for feature " << to_string(opts.feature) << "\n";
    return 2;  // modality mismatch is a usage error
  }
  opts.skip_failures = true;
  const i3d::Extracted data = i3d::extract_features(manifest, opts);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  if (binary)
    i3d::write_features_bin(data.features, out);
  else
    i3d::write_features_jsonl(data.features, out);
  json echo = {{"command", "extract"},
               {"manifest", manifest_path},
               {"feature", to_string(opts.feature)},
               {"region", to_string(opts.region)},
               {"task", to_string(opts.task)},
               {"work_w", opts.work_w},
               {"work_h", opts.work_h},
               {"jobs", opts.jobs},
               {"out", out.string()},
               {"binary", binary},
               {"extracted", data.features.size()},
               {"skipped", data.skipped}};
  echo_run_config(echo, out, false);
  std::cerr << "extract: wrote " << data.features.size() << " features ("
            << data.skipped << " skipped) to " << out.string() << "\n";
  return 0;
}

// ---- train ----------------------------------------------------------------

int cmd_train(const std::string& features_path, const std::string& model_kind,
              const fs::path& out_in, const TrainFlags& flags) {
  const fs::path out = resolve_out(out_in);
  const std::vector<i3d::FeatureVector> feats = i3d::read_features_jsonl(features_path);
  std::vector<int> labels;
  labels.reserve(feats.size());
  for (const auto& fv : feats) labels.push_back(label_from_string(fv.label));
  const i3d::ClassifierKind kind = i3d::classifier_kind_from_string(model_kind);
  const i3d::TrainOptions t = to_train_options(flags, kind);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  if (kind == i3d::ClassifierKind::svm) {
    const i3d::LinearModel model = i3d::svm_train(feats, labels, t.svm);
    i3d::save_linear_model(model, out);
  } else {
    const i3d::CnnModel model = i3d::cnn_train(feats, labels, t.cnn);
    i3d::save_cnn_model(model, out);
  }
  json echo = {{"command", "train"},
               {"features", features_path},
               {"model", model_kind},
               {"out", out.string()},
               {"samples", feats.size()},
               {"params", train_flags_json(flags)}};
  echo_run_config(echo, out, false);
  std::cerr << "train: wrote " << model_kind << " model (" << feats.size() << " samples) to "
            << out.string() << "\n";
  return 0;
}

// ---- eval ----------------------------------------------------------------

struct EvalFlags {
  std::string mode;  // holdout | loso | resolution | test
  std::string manifest;
  std::string feature = "i3d";
  std::string region = "face";
  std::string task = "liveness";
  std::string classifier = "svm";
  int work_w = i3d::kWorkWidth, work_h = i3d::kWorkHeight;
  double frac = 0.8;
  int repeats = 10;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> resolutions;  // WxH strings
  std::vector<std::string> sweep_features;
  std::string model_path;     // test mode
  std::string features_path;  // test mode
  std::string report;
  TrainFlags train;
};

std::pair<int, int> parse_resolution(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw i3d::ArgumentError("resolution must be WxH: " + s);
  const int w = std::stoi(s.substr(0, x));
  const int h = std::stoi(s.substr(x + 1));
  if (w < 2 || h < 2) throw i3d::ArgumentError("bad resolution: " + s);
  return {w, h};
}

int cmd_eval(const EvalFlags& f) {
  const fs::path report = resolve_out(f.report);
  json echo = {{"command", "eval"}, {"mode", f.mode}, {"report", report.string()}};

  if (f.mode == "test") {
    const std::vector<i3d::FeatureVector> feats = i3d::read_features_jsonl(f.features_path);
    std::vector<int> labels, preds;
    for (const auto& fv : feats) labels.push_back(label_from_string(fv.label));
    // model kind is discovered from the file header
    std::ifstream probe(f.model_path);
    if (!probe) throw i3d::IoError("cannot read model: " + f.model_path);
    json header;
    probe >> header;
    const std::string kind = header.at("kind").get<std::string>();
    if (kind == "linear_svm") {
      const i3d::LinearModel model = i3d::load_linear_model(f.model_path);
      for (const auto& fv : feats) preds.push_back(i3d::svm_predict(model, fv).label);
    } else {
      const i3d::CnnModel model = i3d::load_cnn_model(f.model_path);
      preds = i3d::cnn_predict(model, feats);
    }
    const i3d::Metrics m = i3d::metrics(preds, labels);
    i3d::EvalReport rep;
    i3d::RunMetrics run;
    run.test_n = static_cast<int>(labels.size());
    run.m = m;
    rep.runs.push_back(run);
    rep.mean_acc = m.accuracy;
    if (m.hter) rep.mean_hter = *m.hter;
    echo["model"] = f.model_path;
    echo["features"] = f.features_path;
    rep.config_echo = echo.dump();
    i3d::write_eval_report(rep, report);
    echo_run_config(echo, report, false);
    std::cerr << "eval test: accuracy " << m.accuracy << " on " << labels.size() << " samples\n";
    return 0;
  }

  const i3d::DatasetManifest manifest = i3d::read_manifest(f.manifest);
  i3d::ExtractOptions ex;
  ex.feature = i3d::feature_kind_from_string(f.feature);
  ex.region = i3d::region_kind_from_string(f.region);
  ex.task = i3d::task_kind_from_string(f.task);
  ex.work_w = f.work_w;
  ex.work_h = f.work_h;
  ex.jobs = f.jobs;
  const i3d::ClassifierKind ck = i3d::classifier_kind_from_string(f.classifier);
  const i3d::TrainOptions train = to_train_options(f.train, ck);
  echo["manifest"] = f.manifest;
  echo["feature"] = f.feature;
  echo["region"] = f.region;
  echo["task"] = f.task;
  echo["classifier"] = f.classifier;
  echo["work_w"] = f.work_w;
  echo["work_h"] = f.work_h;
  echo["seed"] = f.seed;
  echo["params"] = train_flags_json(f.train);

  if (f.mode == "holdout") {
    i3d::HoldoutOptions opts;
    opts.frac_train = f.frac;
    opts.repeats = f.repeats;
    opts.seed = f.seed;
    opts.train = train;
    echo["frac_train"] = f.frac;
    echo["repeats"] = f.repeats;
    const i3d::EvalReport rep = i3d::repeated_holdout(manifest, ex, opts);
    i3d::write_eval_report(rep, report);
    echo_run_config(echo, report, false);
    std::cerr << "eval holdout: mean accuracy " << rep.mean_acc << " +/- " << rep.std_acc << "\n";
    return 0;
  }
  if (f.mode == "loso") {
    const i3d::LosoResult res = i3d::leave_one_subject_out(manifest, ex, train);
    write_json_file(json::parse(i3d::loso_to_json(res)), report);
    echo_run_config(echo, report, false);
    std::cerr << "eval loso: mean fold accuracy " << res.mean_accuracy << " over "
              << res.folds.size() << " subjects\n";
    return 0;
  }
  if (f.mode == "resolution") {
    if (f.resolutions.empty()) throw i3d::ArgumentError("resolution mode needs --resolution WxH");
    std::vector<std::pair<int, int>> res;
    for (const auto& s : f.resolutions) res.push_back(parse_resolution(s));
    std::vector<i3d::FeatureKind> fks;
    for (const auto& s : (f.sweep_features.empty() ? std::vector<std::string>{f.feature}
                                                   : f.sweep_features))
      fks.push_back(i3d::feature_kind_from_string(s));
    i3d::HoldoutOptions opts;
    opts.frac_train = f.frac;
    opts.repeats = f.repeats;
    opts.seed = f.seed;
    opts.train = train;
    const std::vector<i3d::SweepRow> rows = i3d::resolution_sweep(manifest, res, fks, ex, opts);
    write_json_file(json::parse(i3d::sweep_to_json(rows)), report);
    const fs::path csv = fs::path(report).replace_extension(".csv");
    std::ofstream cs(csv);
    if (!cs) throw i3d::IoError("cannot write " + csv.string());
    cs << i3d::sweep_to_csv(rows);
    echo["csv"] = csv.string();
    echo_run_config(echo, report, false);
    std::cerr << "eval resolution: " << rows.size() << " sweep rows -> " << report.string()
              << "\n";
    return 0;
  }
  throw i3d::ArgumentError("unknown eval mode: " + f.mode);
}

// ---- challenge ----------------------------------------------------------------

struct ChallengeFlags {
  int script_len = 4;
  std::string session_dir;
  std::string liveness_model;
  std::string direction_model;
  std::string attack = "none";  // none | replay | spoof-flat
  double margin_floor = 0.0;
  std::uint64_t seed = 0;
};

int cmd_challenge(const ChallengeFlags& f) {
  const fs::path dir = resolve_out(f.session_dir);
  fs::create_directories(dir);
  const i3d::LinearModel liveness = i3d::load_linear_model(f.liveness_model);
  const i3d::LinearModel direction = i3d::load_linear_model(f.direction_model);
  const i3d::ChallengeScript script = i3d::generate_challenge(f.script_len, f.seed);

  i3d::SynthConfig cfg;
  cfg.seed = f.seed;
  const i3d::SubjectParams subject = i3d::sample_subject(i3d::mix64(f.seed, 0x5e55u), 0);

  auto capture_for = [&](std::uint64_t step_seed, std::optional<i3d::FlashSide> side,
                         bool spoof) {
    const i3d::SceneSpec scene =
        spoof ? i3d::make_spoof_scene(subject, cfg, step_seed, i3d::Label::spoof_flat, side)
              : i3d::make_live_scene(subject, cfg, step_seed, side);
    i3d::FlashPair fp = i3d::render_flash_pair(scene);
    i3d::apply_capture_chain(fp.ambient, cfg, i3d::mix64(step_seed, 21));
    i3d::apply_capture_chain(fp.flash, cfg, i3d::mix64(step_seed, 22));
    return fp;
  };

  std::vector<i3d::StepCapture> captures;
  std::vector<std::pair<std::string, std::string>> paths;
  if (f.attack == "replay") {
    // fixed pre-recorded pair replayed at every step, scripted side unknown
    auto rng = i3d::make_rng(i3d::mix64(f.seed, 0xeef1u));
    const i3d::FlashSide recorded =
        (rng() & 1u) ? i3d::FlashSide::right : i3d::FlashSide::left;
    const i3d::FlashPair fp = capture_for(i3d::mix64(f.seed, 1), recorded, false);
    for (std::size_t i = 0; i < script.steps.size(); ++i)
      captures.push_back({fp.ambient, fp.flash, fp.lm_ambient, fp.lm_flash});
  } else {
    const bool spoof = f.attack == "spoof-flat";
    if (!spoof && f.attack != "none")
      throw i3d::ArgumentError("unknown attack kind: " + f.attack);
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
      const i3d::FlashPair fp = capture_for(i3d::mix64(f.seed, 100 + i), script.steps[i], spoof);
      captures.push_back({fp.ambient, fp.flash, fp.lm_ambient, fp.lm_flash});
    }
  }
  for (std::size_t i = 0; i < captures.size(); ++i) {
    char a[32], b[32];
    std::snprintf(a, sizeof(a), "step%02zu_ia.pgm", i);
    std::snprintf(b, sizeof(b), "step%02zu_if.pgm", i);
    i3d::write_pgm(captures[i].ambient, dir / a);
    i3d::write_pgm(captures[i].flash, dir / b);
    paths.emplace_back(a, b);
  }

  const i3d::SessionVerdict verdict =
      i3d::verify_challenge(script, captures, liveness, direction, f.margin_floor);
  i3d::write_session_transcript(dir / "transcript.json", script, verdict, paths);
  json echo = {{"command", "challenge"},
               {"script_len", f.script_len},
               {"session", dir.string()},
               {"liveness_model", f.liveness_model},
               {"direction_model", f.direction_model},
               {"attack", f.attack},
               {"margin_floor", f.margin_floor},
               {"seed", f.seed}};
  echo_run_config(echo, dir, true);
  std::cerr << "challenge: session " << (verdict.accepted ? "ACCEPTED" : "REJECTED");
  if (verdict.failure_reason) std::cerr << " (" << to_string(*verdict.failure_reason) << ")";
  std::cerr << ", transcript " << (dir / "transcript.json").string() << "\n";
  return 0;
}

// ---- bench ----------------------------------------------------------------

int cmd_bench(const std::string& stage_name, int iters, const fs::path& out_in) {
  const fs::path out = resolve_out(out_in);
  const i3d::BenchStage stage = i3d::bench_stage_from_string(stage_name);
  const i3d::BenchResult r = i3d::bench_latency(stage, iters);
  json j = {{"stage", stage_name},
            {"iters", r.iters},
            {"median_ms", r.median_ms},
            {"p95_ms", r.p95_ms}};
  write_json_file(j, out);
  echo_run_config(json{{"command", "bench"}, {"stage", stage_name}, {"iters", iters},
                       {"out", out.string()}},
                  out, false);
  std::cerr << "bench " << stage_name << ": median " << r.median_ms << " ms, p95 " << r.p95_ms
            << " ms -> " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"implicit-3D liveness toolkit"};
  app.require_subcommand(1);

  // synth
  i3d::SynthConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "render a synthetic flash/stereo face corpus");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--subjects", synth_cfg.subjects, "number of distinct subjects");
  synth->add_option("--live", synth_cfg.live, "live samples");
  synth->add_option("--spoof-flat", synth_cfg.spoof_flat, "flat print spoof samples");
  synth->add_option("--spoof-curved", synth_cfg.spoof_curved, "curved print spoof samples");
  synth->add_option("--spoof-screen", synth_cfg.spoof_screen, "screen replay spoof samples");
  synth->add_flag("--flash,!--no-flash", synth_cfg.flash_pairs, "render flash pairs");
  synth->add_flag("--stereo", synth_cfg.stereo_pairs, "render stereo pairs");
  synth->add_flag("--flash-sides", synth_cfg.sample_flash_side,
                  "draw each flash from the left/right cones and record the side");
  synth->add_option("--width", synth_cfg.width, "sensor width, px");
  synth->add_option("--height", synth_cfg.height, "sensor height, px");
  synth->add_option("--print-width", synth_cfg.print_width, "spoof print bake width");
  synth->add_option("--print-height", synth_cfg.print_height, "spoof print bake height");
  synth->add_option("--noise-sigma", synth_cfg.noise_sigma, "sensor noise stddev");
  synth->add_option("--bit-depth", synth_cfg.bit_depth, "quantization bits, 0 = off");
  synth->add_option("--exposure", synth_cfg.exposure, "exposure scale");
  synth->add_option("--jitter-px", synth_cfg.jitter_px, "flash-shot pose jitter, px");
  synth->add_flag("--write-maps", synth_cfg.write_maps, "write depth/normal/disparity maps");
  synth->add_option("--jobs", synth_cfg.jobs, "worker threads");
  synth->add_option("--seed", synth_cfg.seed, "master seed");

  // extract
  std::string ex_manifest, ex_feature, ex_region = "face", ex_task = "liveness", ex_out;
  i3d::ExtractOptions ex_opts;
  bool ex_bin = false;
  auto* extract = app.add_subcommand("extract", "compute features from a corpus manifest");
  extract->add_option("--manifest", ex_manifest, "manifest.jsonl path")->required();
  extract->add_option("--feature", ex_feature, "i3d | da3d | lbp | chan")->required();
  extract->add_option("--region", ex_region, "face | nose");
  extract->add_option("--task", ex_task, "liveness | flash_side label mapping");
  extract->add_option("--width", ex_opts.work_w, "working width");
  extract->add_option("--height", ex_opts.work_h, "working height");
  extract->add_option("--jobs", ex_opts.jobs, "worker threads");
  extract->add_option("--out", ex_out, "output features file")->required();
  extract->add_flag("--bin", ex_bin, "write the flat binary matrix format");

  // train
  std::string tr_features, tr_model, tr_out;
  TrainFlags tr_flags;
  auto* train = app.add_subcommand("train", "fit a classifier on extracted features");
  train->add_option("--features", tr_features, "features.jsonl path")->required();
  train->add_option("--model", tr_model, "svm | cnn")->required();
  train->add_option("--out", tr_out, "output model file")->required();
  add_train_flags(train, tr_flags);

  // eval
  EvalFlags ev;
  auto* eval = app.add_subcommand("eval", "run an evaluation protocol");
  eval->add_option("--mode", ev.mode, "holdout | loso | resolution | test")->required();
  eval->add_option("--manifest", ev.manifest, "corpus manifest");
  eval->add_option("--feature", ev.feature, "feature kind");
  eval->add_option("--region", ev.region, "face | nose");
  eval->add_option("--task", ev.task, "liveness | flash_side");
  eval->add_option("--classifier", ev.classifier, "svm | cnn");
  eval->add_option("--width", ev.work_w, "working width");
  eval->add_option("--height", ev.work_h, "working height");
  eval->add_option("--frac", ev.frac, "training fraction");
  eval->add_option("--repeats", ev.repeats, "holdout repeats");
  eval->add_option("--jobs", ev.jobs, "extraction threads");
  eval->add_option("--seed", ev.seed, "evaluation seed");
  eval->add_option("--resolution", ev.resolutions, "WxH, repeatable (resolution mode)");
  eval->add_option("--sweep-feature", ev.sweep_features, "feature kind, repeatable");
  eval->add_option("--model", ev.model_path, "trained model file (test mode)");
  eval->add_option("--features", ev.features_path, "features file (test mode)");
  eval->add_option("--report", ev.report, "output report JSON")->required();
  add_train_flags(eval, ev.train, false);  // eval derives training seeds from --seed

  // challenge
  ChallengeFlags ch;
  auto* challenge = app.add_subcommand("challenge", "simulate a multi-flash session");
  challenge->add_option("--script-len", ch.script_len, "number of scripted steps");
  challenge->add_option("--session", ch.session_dir, "session output directory")->required();
  challenge->add_option("--liveness-model", ch.liveness_model, "liveness SVM file")->required();
  challenge->add_option("--direction-model", ch.direction_model, "direction SVM file")
      ->required();
  challenge->add_option("--attack", ch.attack, "none | replay | spoof-flat");
  challenge->add_option("--margin-floor", ch.margin_floor, "minimum |direction margin|");
  challenge->add_option("--seed", ch.seed, "session seed");

  // bench
  std::string bench_stage;
  int bench_iters = 101;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "latency benchmark for one stage");
  bench->add_option("--stage", bench_stage,
                    "landmarks_stub | extract_i3d | extract_da3d | extract_chan | svm_infer | "
                    "cnn_infer")
      ->required();
  bench->add_option("--iters", bench_iters, "timed iterations (>= 30)");
  bench->add_option("--out", bench_out, "output JSON (default bench-<stage>.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      synth_cfg.out_dir = synth_out;
      return cmd_synth(synth_cfg);
    }
    if (extract->parsed()) {
      ex_opts.feature = i3d::feature_kind_from_string(ex_feature);
      ex_opts.region = i3d::region_kind_from_string(ex_region);
      ex_opts.task = i3d::task_kind_from_string(ex_task);
      return cmd_extract(ex_manifest, ex_opts, ex_out, ex_bin);
    }
    if (train->parsed()) return cmd_train(tr_features, tr_model, tr_out, tr_flags);
    if (eval->parsed()) return cmd_eval(ev);
    if (challenge->parsed()) return cmd_challenge(ch);
    if (bench->parsed()) {
      if (bench_out.empty()) bench_out = "bench-" + bench_stage + ".json";
      return cmd_bench(bench_stage, bench_iters, bench_out);
    }
  } catch (const i3d::ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const i3d::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
