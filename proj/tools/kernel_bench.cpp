// Benchmark of the batched loss/gradient kernel: optimized (Eigen + OpenMP)
// vs the single-threaded reference loops. Prints ms/iteration and GFLOP/s
// and checks the two implementations agree on every run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "gcsl/kernels.hpp"

using namespace gcsl;
using clk = std::chrono::steady_clock;

namespace {

double flops_per_pass(const MlpParams& p, int batch) {
  // forward + backward matmuls dominate: ~6 * batch * in * out per layer
  double f = 0.0;
  for (int l = 0; l < p.layers(); ++l) f += 6.0 * batch * p.dims[l] * p.dims[l + 1];
  return f;
}

template <typename F>
double time_ms(F&& fn, int iters) {
  const auto t0 = clk::now();
  for (int i = 0; i < iters; ++i) fn();
  const auto t1 = clk::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / iters;
}

}  // namespace

int main(int argc, char** argv) {
  int batch = argc > 1 ? std::atoi(argv[1]) : 256;
  int iters = argc > 2 ? std::atoi(argv[2]) : 50;
  const std::vector<int> dims = {160, 400, 300, 9};

  Rng rng(7);
  MlpParams p = MlpParams::he_uniform(dims, rng);
  std::vector<double> X((std::size_t)batch * dims[0]);
  std::vector<int> actions(batch);
  for (auto& v : X) v = rng.uniform01();
  for (auto& a : actions) a = rng.uniform_int(dims.back());

  MlpBatchWork w_opt, w_ref;
  std::vector<double> g_opt(p.flat.size()), g_ref(p.flat.size());

  // warm up + agreement check
  const double l_opt = mlp_loss_grad(p, X.data(), actions.data(), batch, g_opt, w_opt);
  const double l_ref = mlp_loss_grad_ref(p, X.data(), actions.data(), batch, g_ref, w_ref);
  double max_diff = std::fabs(l_opt - l_ref);
  for (std::size_t i = 0; i < g_opt.size(); ++i)
    max_diff = std::max(max_diff, std::fabs(g_opt[i] - g_ref[i]));
  std::printf("dims [%d", dims[0]);
  for (std::size_t i = 1; i < dims.size(); ++i) std::printf(", %d", dims[i]);
  std::printf("], batch %d, %d iters\n", batch, iters);
  std::printf("max |optimized - reference| = %.3e\n", max_diff);
  if (max_diff > 1e-9) {
    std::printf("MISMATCH above 1e-9, failing\n");
    return 1;
  }

  const double gflop = flops_per_pass(p, batch) * 1e-9;
  const double ms_opt =
      time_ms([&] { mlp_loss_grad(p, X.data(), actions.data(), batch, g_opt, w_opt); }, iters);
  const double ms_ref = time_ms(
      [&] { mlp_loss_grad_ref(p, X.data(), actions.data(), batch, g_ref, w_ref); },
      std::max(1, iters / 10));

  std::printf("optimized: %8.3f ms  (%6.2f GFLOP/s)\n", ms_opt, gflop / (ms_opt * 1e-3));
  std::printf("reference: %8.3f ms  (%6.2f GFLOP/s)\n", ms_ref, gflop / (ms_ref * 1e-3));
  std::printf("speedup:   %8.2fx\n", ms_ref / ms_opt);
  return 0;
}
