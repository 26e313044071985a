#include "skipdisk/pca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skipdisk {

PcaModel fit_pca(const VectorDataset& data, std::size_t sample_cap,
                 std::uint64_t seed) {
  const std::size_t n = data.size();
  const std::uint32_t d = data.dim;
  if (n < 2) throw DataError("fit_pca: need at least two points");
  if (sample_cap < 2) throw ConfigError("fit_pca: sample_cap must be >= 2");

  // Seeded sample without replacement (partial Fisher-Yates over ids).
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);
  std::size_t s = std::min(n, sample_cap);
  if (s < n) {
    Rng rng(derive_seed(seed, seed_tag::kPcaSample));
    for (std::size_t i = 0; i < s; ++i) {
      std::size_t j = i + rng.bounded(n - i);
      std::swap(ids[i], ids[j]);
    }
    std::sort(ids.begin(), ids.begin() + s);
  }

  Eigen::MatrixXd x(s, d);
  for (std::size_t i = 0; i < s; ++i) {
    auto v = data.vec(ids[i]);
    for (std::uint32_t j = 0; j < d; ++j) x(i, j) = v[j];
  }
  Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::MatrixXd cov = (x.adjoint() * x) / static_cast<double>(s - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw DataError("fit_pca: eigendecomposition failed");
  }

  PcaModel model;
  model.dim = d;
  model.mean.resize(d);
  model.rotation.resize(static_cast<std::size_t>(d) * d);
  model.eigenvalues.resize(d);
  for (std::uint32_t j = 0; j < d; ++j) {
    model.mean[j] = static_cast<float>(mean(j));
  }
  // Solver returns ascending eigenvalues; emit rows in descending order
  // with a deterministic sign (largest-magnitude coefficient positive,
  // earliest index on ties).
  for (std::uint32_t row = 0; row < d; ++row) {
    std::uint32_t src = d - 1 - row;
    Eigen::VectorXd comp = solver.eigenvectors().col(src);
    std::uint32_t arg = 0;
    double best = -1.0;
    for (std::uint32_t j = 0; j < d; ++j) {
      double a = std::abs(comp(j));
      if (a > best) {
        best = a;
        arg = j;
      }
    }
    if (comp(arg) < 0.0) comp = -comp;
    for (std::uint32_t j = 0; j < d; ++j) {
      model.rotation[static_cast<std::size_t>(row) * d + j] =
          static_cast<float>(comp(j));
    }
    double ev = solver.eigenvalues()(src);
    model.eigenvalues[row] = static_cast<float>(ev < 0.0 ? 0.0 : ev);
  }
  return model;
}

void pca_apply(const PcaModel& model, std::span<const float> x,
               std::span<float> out) {
  if (x.size() != model.dim) throw DataError("pca_apply: dimension mismatch");
  if (out.size() > model.dim) {
    throw ConfigError("pca_apply: prefix longer than model dimension");
  }
  const std::uint32_t d = model.dim;
  std::vector<float> centered(d);
  for (std::uint32_t j = 0; j < d; ++j) centered[j] = x[j] - model.mean[j];
  for (std::size_t row = 0; row < out.size(); ++row) {
    const float* r = model.rotation.data() + row * d;
    float acc[8] = {0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f};
    std::uint32_t i = 0;
    for (; i + 8 <= d; i += 8) {
      for (int j = 0; j < 8; ++j) acc[j] += r[i + j] * centered[i + j];
    }
    float tail = 0.f;
    for (; i < d; ++i) tail += r[i] * centered[i];
    out[row] = ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
               ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
  }
}

VectorDataset pca_apply_batch(const PcaModel& model, const VectorDataset& data,
                              std::uint32_t d_prefix) {
  if (data.dim != model.dim) {
    throw DataError("pca_apply_batch: dimension mismatch");
  }
  if (d_prefix == 0 || d_prefix > model.dim) {
    throw ConfigError("pca_apply_batch: prefix out of range");
  }
  VectorDataset out;
  out.dim = d_prefix;
  out.data.resize(data.size() * static_cast<std::size_t>(d_prefix));
  for (std::size_t i = 0; i < data.size(); ++i) {
    pca_apply(model, data.vec(i),
              {out.data.data() + i * d_prefix, d_prefix});
  }
  return out;
}

}  // namespace skipdisk
