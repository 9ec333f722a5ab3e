#pragma once

#include <vector>

#include "i3d/features.hpp"

namespace i3d {

struct PcaResult {
  int dim = 0;
  int k = 0;
  std::vector<double> mean;         // dim
  std::vector<double> components;   // k x dim, orthonormal rows
  std::vector<double> eigenvalues;  // k, non-increasing
  std::vector<double> projected;    // n x k, input order
};

// Top-k principal axes of the population covariance (1/n normalization),
// found by power iteration with deflation against already-found axes.
// Directions inside a zero-variance tail are an arbitrary orthonormal
// completion with eigenvalue 0.
PcaResult pca_embed(const std::vector<FeatureVector>& x, int k);

std::vector<double> pca_project(const PcaResult& pca, const std::vector<float>& values);
std::vector<double> pca_reconstruct(const PcaResult& pca, const std::vector<double>& coords);

}  // namespace i3d
