#include "i3d/pca.hpp"

#include <algorithm>
#include <cmath>

#include "i3d/error.hpp"
#include "i3d/rng.hpp"

namespace i3d {

namespace {

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// remove projections onto the first k rows of basis
void orthogonalize(std::vector<double>& v, const std::vector<double>& basis, int k, int dim) {
  for (int j = 0; j < k; ++j) {
    const double* u = &basis[static_cast<std::size_t>(j) * dim];
    const double c = dot(v.data(), u, dim);
    for (int i = 0; i < dim; ++i) v[i] -= c * u[i];
  }
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v.data(), v.data(), static_cast<int>(v.size()))); }

}  // namespace

PcaResult pca_embed(const std::vector<FeatureVector>& x, int k) {
  if (k < 1) throw ArgumentError("pca_embed: k must be >= 1");
  if (x.size() < 2) throw InsufficientDataError("pca_embed: need at least 2 samples");
  const int dim = x[0].dim();
  if (k > dim) throw ShapeError("pca_embed: k exceeds feature dimension");
  for (const auto& fv : x)
    if (fv.dim() != dim || fv.layout != x[0].layout)
      throw ShapeError("pca_embed: inconsistent feature dimensions");

  const std::size_t n = x.size();
  PcaResult r;
  r.dim = dim;
  r.k = k;
  r.mean.assign(dim, 0.0);
  for (const auto& fv : x)
    for (int i = 0; i < dim; ++i) r.mean[i] += fv.values[i];
  for (int i = 0; i < dim; ++i) r.mean[i] /= static_cast<double>(n);

  std::vector<double> cov(static_cast<std::size_t>(dim) * dim, 0.0);
  std::vector<double> d(dim);
  for (const auto& fv : x) {
    for (int i = 0; i < dim; ++i) d[i] = fv.values[i] - r.mean[i];
    for (int i = 0; i < dim; ++i) {
      const double di = d[i];
      double* row = &cov[static_cast<std::size_t>(i) * dim];
      for (int j = i; j < dim; ++j) row[j] += di * d[j];
    }
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const double v = cov[static_cast<std::size_t>(i) * dim + j] / static_cast<double>(n);
      cov[static_cast<std::size_t>(i) * dim + j] = v;
      cov[static_cast<std::size_t>(j) * dim + i] = v;
    }

  r.components.assign(static_cast<std::size_t>(k) * dim, 0.0);
  r.eigenvalues.assign(k, 0.0);
  std::vector<double> v(dim), w(dim);
  double lambda1 = 0.0;
  for (int comp = 0; comp < k; ++comp) {
    auto rng = make_rng(mix64(0x9cafe11dULL, static_cast<std::uint64_t>(comp)));
    for (int i = 0; i < dim; ++i) v[i] = gaussian(rng);
    orthogonalize(v, r.components, comp, dim);
    double nv = norm(v);
    if (nv < 1e-12) {
      // pathological draw; retry from a shifted stream
      auto rng2 = make_rng(mix64(0x9cafe11dULL, 1000 + comp));
      for (int i = 0; i < dim; ++i) v[i] = gaussian(rng2);
      orthogonalize(v, r.components, comp, dim);
      nv = norm(v);
    }
    for (int i = 0; i < dim; ++i) v[i] /= nv;

    double lambda = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
      for (int i = 0; i < dim; ++i)
        w[i] = dot(&cov[static_cast<std::size_t>(i) * dim], v.data(), dim);
      orthogonalize(w, r.components, comp, dim);
      const double nw = norm(w);
      if (nw < 1e-14 * std::max(1.0, lambda1)) {
        lambda = 0.0;  // exhausted the variance; keep v as an orthonormal filler
        break;
      }
      for (int i = 0; i < dim; ++i) v[i] = w[i] / nw;
      if (std::abs(nw - lambda) <= 1e-13 * std::max(lambda1, 1e-300)) {
        lambda = nw;
        break;
      }
      lambda = nw;
    }
    if (comp == 0) lambda1 = lambda;
    r.eigenvalues[comp] = lambda;
    std::copy(v.begin(), v.end(), r.components.begin() + static_cast<std::size_t>(comp) * dim);
  }

  r.projected.resize(n * static_cast<std::size_t>(k));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> p = pca_project(r, x[s].values);
    std::copy(p.begin(), p.end(), r.projected.begin() + s * k);
  }
  return r;
}

std::vector<double> pca_project(const PcaResult& pca, const std::vector<float>& values) {
  if (static_cast<int>(values.size()) != pca.dim)
    throw ShapeError("pca_project: dimension mismatch");
  std::vector<double> d(pca.dim);
  for (int i = 0; i < pca.dim; ++i) d[i] = values[i] - pca.mean[i];
  std::vector<double> out(pca.k);
  for (int j = 0; j < pca.k; ++j)
    out[j] = dot(d.data(), &pca.components[static_cast<std::size_t>(j) * pca.dim], pca.dim);
  return out;
}

std::vector<double> pca_reconstruct(const PcaResult& pca, const std::vector<double>& coords) {
  if (static_cast<int>(coords.size()) != pca.k)
    throw ShapeError("pca_reconstruct: coordinate count mismatch");
  std::vector<double> out(pca.mean);
  for (int j = 0; j < pca.k; ++j) {
    const double c = coords[j];
    const double* u = &pca.components[static_cast<std::size_t>(j) * pca.dim];
    for (int i = 0; i < pca.dim; ++i) out[i] += c * u[i];
  }
  return out;
}

}  // namespace i3d
