#include "i3d/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "b64.hpp"
#include "i3d/error.hpp"
#include "nlohmann/json.hpp"

namespace i3d {

namespace {

constexpr double kSigmaFloor = 1e-12;

void check_training_set(const std::vector<FeatureVector>& x, const std::vector<int>& y) {
  if (x.empty()) throw InsufficientDataError("svm_train: empty training set");
  if (x.size() != y.size()) throw ShapeError("svm_train: feature/label count mismatch");
  const int dim = x[0].dim();
  for (const auto& fv : x) {
    if (fv.layout != x[0].layout || fv.dim() != dim)
      throw ShapeError("svm_train: inconsistent feature layout");
  }
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1)
      pos = true;
    else if (label == -1)
      neg = true;
    else
      throw ArgumentError("svm_train: labels must be -1 or +1");
  }
  if (!pos || !neg) throw DataError("svm_train: training set contains a single class");
}

// Sort order on (label, feature values); makes the optimization path a pure
// function of the multiset of samples, not of caller ordering.
std::vector<std::size_t> canonical_order(const std::vector<FeatureVector>& x,
                                         const std::vector<int>& y) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (y[a] != y[b]) return y[a] < y[b];
    return std::lexicographical_compare(x[a].values.begin(), x[a].values.end(),
                                        x[b].values.begin(), x[b].values.end());
  });
  return idx;
}

struct Standardized {
  std::size_t n = 0;
  int dim = 0;
  std::vector<double> data;  // n x dim, canonical order
  std::vector<int> labels;
  std::vector<double> mu, sd;
};

Standardized standardize(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                         const std::vector<std::size_t>& order) {
  Standardized s;
  s.n = x.size();
  s.dim = x[0].dim();
  s.mu.assign(s.dim, 0.0);
  s.sd.assign(s.dim, 0.0);
  for (std::size_t i : order)
    for (int j = 0; j < s.dim; ++j) s.mu[j] += x[i].values[j];
  for (int j = 0; j < s.dim; ++j) s.mu[j] /= static_cast<double>(s.n);
  for (std::size_t i : order)
    for (int j = 0; j < s.dim; ++j) {
      const double d = x[i].values[j] - s.mu[j];
      s.sd[j] += d * d;
    }
  for (int j = 0; j < s.dim; ++j)
    s.sd[j] = std::max(std::sqrt(s.sd[j] / static_cast<double>(s.n)), kSigmaFloor);
  s.data.resize(s.n * static_cast<std::size_t>(s.dim));
  s.labels.resize(s.n);
  std::size_t row = 0;
  for (std::size_t i : order) {
    for (int j = 0; j < s.dim; ++j)
      s.data[row * s.dim + j] = (x[i].values[j] - s.mu[j]) / s.sd[j];
    s.labels[row] = y[i];
    ++row;
  }
  return s;
}

double objective(const Standardized& s, const std::vector<double>& w, double b, double lambda) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double* row = &s.data[i * s.dim];
    double m = b;
    for (int j = 0; j < s.dim; ++j) m += w[j] * row[j];
    hinge += std::max(0.0, 1.0 - s.labels[i] * m);
  }
  return 0.5 * lambda * reg + hinge / static_cast<double>(s.n);
}

// Objective and sub-gradient in one pass over the data.
double obj_grad(const Standardized& s, const std::vector<double>& w, double b, double lambda,
                std::vector<double>& gw, double& gb) {
  gw.assign(w.size(), 0.0);
  gb = 0.0;
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double* row = &s.data[i * s.dim];
    double m = b;
    for (int j = 0; j < s.dim; ++j) m += w[j] * row[j];
    const double viol = 1.0 - s.labels[i] * m;
    if (viol > 0.0) {
      hinge += viol;
      const double yi = s.labels[i];
      for (int j = 0; j < s.dim; ++j) gw[j] -= yi * row[j];
      gb -= yi;
    }
  }
  const double inv = 1.0 / static_cast<double>(s.n);
  for (std::size_t j = 0; j < w.size(); ++j) gw[j] = lambda * w[j] + gw[j] * inv;
  gb *= inv;
  return 0.5 * lambda * reg + hinge * inv;
}

}  // namespace

void LinearModel::validate() const {
  if (weights.empty()) throw ShapeError("LinearModel: empty weights");
  if (mean.size() != weights.size() || sigma.size() != weights.size())
    throw ShapeError("LinearModel: standardization size mismatch");
  for (float v : weights)
    if (!std::isfinite(v)) throw DataError("LinearModel: non-finite weight");
  if (!std::isfinite(bias)) throw DataError("LinearModel: non-finite bias");
  for (float v : sigma)
    if (!(v > 0.0f)) throw DataError("LinearModel: non-positive sigma");
}

LinearModel svm_train(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                      const SvmTrainParams& params) {
  check_training_set(x, y);
  if (params.lambda < 0.0 || !std::isfinite(params.lambda))
    throw ConfigError("svm_train: lambda must be finite and non-negative");
  if (params.epochs < 1) throw ConfigError("svm_train: epochs must be >= 1");

  const Standardized s = standardize(x, y, canonical_order(x, y));
  std::vector<double> w(s.dim, 0.0), gw;
  double b = 0.0, gb = 0.0;

  // Sub-gradient descent with the Polyak step rule. The objective is
  // non-negative, so eta = f / |g|^2 targets the f* = 0 floor and adapts
  // from long steps far out to short ones near the optimum; fixed or
  // backtracking-guarded steps stall at hinge kinks where no step length
  // descends locally. The 1/lambda cap keeps the quadratic term from
  // oscillating when regularization dominates. Returning the best iterate
  // visited makes the objective at epoch checkpoints non-increasing by
  // construction.
  const double cap =
      params.lambda > 0.0 ? 1.0 / params.lambda : std::numeric_limits<double>::infinity();
  double f = obj_grad(s, w, b, params.lambda, gw, gb);
  std::vector<double> best_w = w;
  double best_b = b, best_obj = f;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double gnorm2 = gb * gb;
    for (double v : gw) gnorm2 += v * v;
    if (gnorm2 < 1e-24) break;  // stationary
    const double eta = std::min(f / gnorm2, cap);
    for (int j = 0; j < s.dim; ++j) w[j] -= eta * gw[j];
    b -= eta * gb;
    f = obj_grad(s, w, b, params.lambda, gw, gb);
    if (f < best_obj) {
      best_obj = f;
      best_w = w;
      best_b = b;
    }
  }
  if (!std::isfinite(best_obj)) throw TrainingError("svm_train: objective diverged");

  LinearModel model;
  model.layout = x[0].layout;
  model.weights.resize(s.dim);
  model.mean.resize(s.dim);
  model.sigma.resize(s.dim);
  for (int j = 0; j < s.dim; ++j) {
    model.weights[j] = static_cast<float>(best_w[j]);
    model.mean[j] = static_cast<float>(s.mu[j]);
    model.sigma[j] = static_cast<float>(s.sd[j]);
  }
  model.bias = static_cast<float>(best_b);
  model.trained_with = params;
  return model;
}

Prediction svm_predict(const LinearModel& model, const FeatureVector& x) {
  model.validate();
  if (x.layout != model.layout || x.dim() != model.dim())
    throw ShapeError("svm_predict: feature layout does not match model");
  double m = model.bias;
  for (int j = 0; j < model.dim(); ++j) {
    const double xh = (static_cast<double>(x.values[j]) - model.mean[j]) / model.sigma[j];
    m += model.weights[j] * xh;
  }
  return {m >= 0.0 ? 1 : -1, m};
}

double svm_objective(const LinearModel& model, const std::vector<FeatureVector>& x,
                     const std::vector<int>& y) {
  if (x.empty() || x.size() != y.size()) throw ShapeError("svm_objective: bad inputs");
  double reg = 0.0;
  for (float v : model.weights) reg += static_cast<double>(v) * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    hinge += std::max(0.0, 1.0 - y[i] * svm_predict(model, x[i]).margin);
  return 0.5 * model.trained_with.lambda * reg + hinge / static_cast<double>(x.size());
}

void save_linear_model(const LinearModel& model, const std::filesystem::path& path) {
  model.validate();
  nlohmann::json j;
  j["kind"] = "linear_svm";
  j["layout"] = to_string(model.layout);
  j["dim"] = model.dim();
  j["bias"] = detail::b64_encode_f32({model.bias});
  j["weights"] = detail::b64_encode_f32(model.weights);
  j["mean"] = detail::b64_encode_f32(model.mean);
  j["sigma"] = detail::b64_encode_f32(model.sigma);
  j["train"] = {{"lambda", model.trained_with.lambda},
                {"epochs", model.trained_with.epochs},
                {"seed", model.trained_with.seed}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model: " + path.string());
  out << j.dump(2) << "\n";
  if (!out.good()) throw IoError("short write: " + path.string());
}

LinearModel load_linear_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad model file " + path.string() + ": " + e.what());
  }
  try {
    if (j.at("kind").get<std::string>() != "linear_svm")
      throw IoError("not a linear model: " + path.string());
    LinearModel m;
    m.layout = feature_layout_from_string(j.at("layout").get<std::string>());
    const auto dim = j.at("dim").get<std::size_t>();
    m.weights = detail::b64_decode_f32(j.at("weights").get<std::string>(), dim);
    m.mean = detail::b64_decode_f32(j.at("mean").get<std::string>(), dim);
    m.sigma = detail::b64_decode_f32(j.at("sigma").get<std::string>(), dim);
    m.bias = detail::b64_decode_f32(j.at("bias").get<std::string>(), 1)[0];
    m.trained_with.lambda = j.at("train").at("lambda").get<double>();
    m.trained_with.epochs = j.at("train").at("epochs").get<int>();
    m.trained_with.seed = j.at("train").at("seed").get<std::uint64_t>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad model file " + path.string() + ": " + e.what());
  }
}

}  // namespace i3d
