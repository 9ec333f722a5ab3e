#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "i3d/cnn_core.hpp"
#include "i3d/features.hpp"

namespace i3d {

struct CnnTrainParams {
  double lr = 0.02;
  int epochs = 10;
  int batch = 32;
  std::uint64_t seed = 0;
};

// Two-class patch classifier; class 1 maps to label +1, class 0 to -1.
struct CnnModel {
  cnncore::Params<float> params;
  FeatureLayout layout = FeatureLayout::i3d_patch;
  CnnTrainParams trained_with;
  std::vector<double> epoch_loss;  // mean training loss per epoch
};

// He-normal weights, zero biases, deterministic in seed.
CnnModel make_cnn(std::uint64_t seed);

// Minibatch SGD on softmax cross-entropy. Labels are -1/+1, both classes
// required. A non-finite batch loss aborts with TrainingError naming the
// epoch. lr == 0 returns the initial model bit for bit.
CnnModel cnn_train(const std::vector<FeatureVector>& x, const std::vector<int>& y,
                   const CnnTrainParams& params = {});

struct CnnOutput {
  std::array<double, 2> logits;
  std::array<double, 2> prob;
};
CnnOutput cnn_forward(const CnnModel& model, const FeatureVector& x);
int cnn_predict_one(const CnnModel& model, const FeatureVector& x);
std::vector<int> cnn_predict(const CnnModel& model, const std::vector<FeatureVector>& x);

// Central-difference check of every analytic parameter gradient on a fixed
// random subsample of coordinates per tensor (internal seed, reproducible).
// Coordinates whose +/-eps forward passes disagree on any relu sign or pool
// argmax sit on a kink where the two-sided difference is meaningless; they
// are resampled. Returns the max relative error over accepted coordinates.
double grad_check(const CnnModel& model, const FeatureVector& x, int label,
                  double epsilon = 1e-5);

namespace debug {
// Same check with the second conv layer's weight gradient sign-flipped;
// exercises the detector itself.
double grad_check_corrupted(const CnnModel& model, const FeatureVector& x, int label,
                            double epsilon = 1e-5);
}  // namespace debug

void save_cnn_model(const CnnModel& model, const std::filesystem::path& path);
CnnModel load_cnn_model(const std::filesystem::path& path);

}  // namespace i3d
