#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "i3d/features.hpp"

namespace i3d {

struct SvmTrainParams {
  double lambda = 1e-4;
  int epochs = 2000;
  std::uint64_t seed = 0;
};

// Linear decision rule over z-scored features: sign(w . (x-mu)/sigma + b).
struct LinearModel {
  FeatureLayout layout = FeatureLayout::i3d_patch;
  std::vector<float> weights;
  float bias = 0.0f;
  std::vector<float> mean, sigma;  // training-set standardization
  SvmTrainParams trained_with;

  int dim() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

// Primal L2-regularized hinge loss, full-batch sub-gradient descent under
// the Polyak step rule, returning the best iterate visited (the objective
// never increases between epoch checkpoints). Samples are consumed in a
// canonical order independent of the caller's ordering. Labels are
// strictly -1/+1, both classes required.
LinearModel svm_train(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                      const SvmTrainParams& params = {});

struct Prediction {
  int label;      // -1 or +1; ties (margin exactly 0) resolve to +1
  double margin;  // w . x_hat + b
};
Prediction svm_predict(const LinearModel& model, const FeatureVector& x);

// lambda/2 ||w||^2 + mean hinge, on the model's own standardization.
double svm_objective(const LinearModel& model, const std::vector<FeatureVector>& x,
                     const std::vector<int>& y);

// JSON header plus base64 float32 payload; round-trips bit exactly.
void save_linear_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_linear_model(const std::filesystem::path& path);

}  // namespace i3d
