#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gcsl/rng.hpp"

namespace gcsl {

// Fully-connected ReLU net with a softmax head. All parameters live in one
// flat buffer; per layer: row-major W (in x out), then bias (out).
struct MlpParams {
  std::vector<int> dims;  // [input, hidden..., actions]
  std::vector<double> flat;
  std::vector<std::size_t> w_off, b_off;

  int layers() const { return static_cast<int>(dims.size()) - 1; }
  double* w(int l) { return flat.data() + w_off[l]; }
  const double* w(int l) const { return flat.data() + w_off[l]; }
  double* b(int l) { return flat.data() + b_off[l]; }
  const double* b(int l) const { return flat.data() + b_off[l]; }

  static MlpParams zeros(std::vector<int> dims);
  // He-uniform fan-in init (U(-sqrt(6/fan_in), +sqrt(6/fan_in))), biases zero
  static MlpParams he_uniform(std::vector<int> dims, Rng& rng);
};

// Reusable scratch for one batch pass.
struct MlpBatchWork {
  int batch = 0;
  std::vector<std::vector<double>> acts;    // acts[0]=input row block, acts[l+1]=layer output
  std::vector<std::vector<double>> deltas;  // d(loss)/d(pre-activation) per layer
  std::vector<double> probs;                // batch x actions
  std::vector<double> row_loss;             // batch

  void resize(const MlpParams& p, int batch);
};

// Mean negative log-likelihood of `actions` given inputs X (batch rows of
// width dims[0]); exact analytic gradient written to `grad` (layout of
// MlpParams::flat). Eigen matrix products + OpenMP elementwise kernels; the
// result does not depend on the number of threads.
double mlp_loss_grad(const MlpParams& p, const double* X, const int* actions, int batch,
                     std::span<double> grad, MlpBatchWork& work);

// The same computation as plain single-threaded loops (naive matmuls). Kept
// as the reference for differential tests and the kernel benchmark.
double mlp_loss_grad_ref(const MlpParams& p, const double* X, const int* actions, int batch,
                         std::span<double> grad, MlpBatchWork& work);

// single-row forward to logits (rollout path)
void mlp_logits(const MlpParams& p, const double* x, double* out);

void softmax_inplace(std::span<double> z);  // stable log-sum-exp softmax

}  // namespace gcsl
