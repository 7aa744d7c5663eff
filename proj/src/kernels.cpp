#include "gcsl/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace gcsl {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<RowMat>;
using CMap = Eigen::Map<const RowMat>;

}  // namespace

MlpParams MlpParams::zeros(std::vector<int> dims) {
  if (dims.size() < 2) throw std::invalid_argument("MlpParams: need at least one layer");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("MlpParams: non-positive layer width");
  MlpParams p;
  p.dims = std::move(dims);
  std::size_t total = 0;
  for (int l = 0; l < p.layers(); ++l) {
    p.w_off.push_back(total);
    total += static_cast<std::size_t>(p.dims[l]) * p.dims[l + 1];
    p.b_off.push_back(total);
    total += p.dims[l + 1];
  }
  p.flat.assign(total, 0.0);
  return p;
}

MlpParams MlpParams::he_uniform(std::vector<int> dims, Rng& rng) {
  MlpParams p = zeros(std::move(dims));
  for (int l = 0; l < p.layers(); ++l) {
    const double limit = std::sqrt(6.0 / p.dims[l]);
    double* w = p.w(l);
    const std::size_t n = static_cast<std::size_t>(p.dims[l]) * p.dims[l + 1];
    for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(-limit, limit);
  }
  return p;
}

void MlpBatchWork::resize(const MlpParams& p, int b) {
  batch = b;
  const int L = p.layers();
  acts.resize(L + 1);
  deltas.resize(L);
  for (int l = 0; l <= L; ++l) acts[l].resize(static_cast<std::size_t>(b) * p.dims[l]);
  for (int l = 0; l < L; ++l) deltas[l].resize(static_cast<std::size_t>(b) * p.dims[l + 1]);
  probs.resize(static_cast<std::size_t>(b) * p.dims.back());
  row_loss.resize(b);
}

void softmax_inplace(std::span<double> z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double denom = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    denom += v;
  }
  for (double& v : z) v /= denom;
}

double mlp_loss_grad(const MlpParams& p, const double* X, const int* actions, int batch,
                     std::span<double> grad, MlpBatchWork& work) {
  if (batch < 1) throw std::invalid_argument("mlp_loss_grad: empty batch");
  if (grad.size() != p.flat.size()) throw std::invalid_argument("mlp_loss_grad: grad size");
  const int L = p.layers();
  const int A = p.dims.back();
  work.resize(p, batch);
  std::copy(X, X + static_cast<std::size_t>(batch) * p.dims[0], work.acts[0].begin());

  // forward
  for (int l = 0; l < L; ++l) {
    const int in = p.dims[l], out = p.dims[l + 1];
    Map Z(work.acts[l + 1].data(), batch, out);
    Z.noalias() = CMap(work.acts[l].data(), batch, in) * CMap(p.w(l), in, out);
    const double* bias = p.b(l);
    const bool relu = l + 1 < L;
    double* rows = work.acts[l + 1].data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < batch; ++i) {
      double* r = rows + static_cast<std::size_t>(i) * out;
      for (int j = 0; j < out; ++j) {
        r[j] += bias[j];
        if (relu && r[j] < 0.0) r[j] = 0.0;
      }
    }
  }

  // softmax rows, per-row loss, and d(loss)/d(logits)
  const double inv_b = 1.0 / batch;
  {
    const double* logits = work.acts[L].data();
    double* probs = work.probs.data();
    double* dz = work.deltas[L - 1].data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < batch; ++i) {
      const double* z = logits + static_cast<std::size_t>(i) * A;
      double* pr = probs + static_cast<std::size_t>(i) * A;
      double* d = dz + static_cast<std::size_t>(i) * A;
      double m = z[0];
      for (int j = 1; j < A; ++j) m = std::max(m, z[j]);
      double denom = 0.0;
      for (int j = 0; j < A; ++j) denom += std::exp(z[j] - m);
      const double lse = m + std::log(denom);
      const int a = actions[i];
      work.row_loss[i] = lse - z[a];
      for (int j = 0; j < A; ++j) {
        pr[j] = std::exp(z[j] - lse);
        d[j] = (pr[j] - (j == a ? 1.0 : 0.0)) * inv_b;
      }
    }
  }
  double loss = 0.0;  // fixed-order reduction
  for (int i = 0; i < batch; ++i) loss += work.row_loss[i];
  loss *= inv_b;

  // backward
  for (int l = L - 1; l >= 0; --l) {
    const int in = p.dims[l], out = p.dims[l + 1];
    const double* dz = work.deltas[l].data();
    Map dW(grad.data() + p.w_off[l], in, out);
    dW.noalias() = CMap(work.acts[l].data(), batch, in).transpose() * CMap(dz, batch, out);
    double* db = grad.data() + p.b_off[l];
#pragma omp parallel for schedule(static)
    for (int j = 0; j < out; ++j) {  // one column per thread: deterministic sums
      double acc = 0.0;
      for (int i = 0; i < batch; ++i) acc += dz[static_cast<std::size_t>(i) * out + j];
      db[j] = acc;
    }
    if (l > 0) {
      Map dX(work.deltas[l - 1].data(), batch, in);
      dX.noalias() = CMap(dz, batch, out) * CMap(p.w(l), in, out).transpose();
      const double* act = work.acts[l].data();
      double* dx = work.deltas[l - 1].data();
      const std::size_t n = static_cast<std::size_t>(batch) * in;
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        if (act[i] <= 0.0) dx[i] = 0.0;  // ReLU mask
    }
  }
  return loss;
}

double mlp_loss_grad_ref(const MlpParams& p, const double* X, const int* actions, int batch,
                         std::span<double> grad, MlpBatchWork& work) {
  if (batch < 1) throw std::invalid_argument("mlp_loss_grad_ref: empty batch");
  if (grad.size() != p.flat.size()) throw std::invalid_argument("mlp_loss_grad_ref: grad size");
  const int L = p.layers();
  const int A = p.dims.back();
  work.resize(p, batch);
  std::copy(X, X + static_cast<std::size_t>(batch) * p.dims[0], work.acts[0].begin());

  for (int l = 0; l < L; ++l) {
    const int in = p.dims[l], out = p.dims[l + 1];
    const bool relu = l + 1 < L;
    for (int i = 0; i < batch; ++i) {
      const double* x = work.acts[l].data() + static_cast<std::size_t>(i) * in;
      double* y = work.acts[l + 1].data() + static_cast<std::size_t>(i) * out;
      for (int j = 0; j < out; ++j) y[j] = p.b(l)[j];
      for (int k = 0; k < in; ++k) {
        const double xv = x[k];
        const double* wr = p.w(l) + static_cast<std::size_t>(k) * out;
        for (int j = 0; j < out; ++j) y[j] += xv * wr[j];
      }
      if (relu)
        for (int j = 0; j < out; ++j)
          if (y[j] < 0.0) y[j] = 0.0;
    }
  }

  const double inv_b = 1.0 / batch;
  double loss = 0.0;
  for (int i = 0; i < batch; ++i) {
    const double* z = work.acts[L].data() + static_cast<std::size_t>(i) * A;
    double* pr = work.probs.data() + static_cast<std::size_t>(i) * A;
    double* d = work.deltas[L - 1].data() + static_cast<std::size_t>(i) * A;
    double m = z[0];
    for (int j = 1; j < A; ++j) m = std::max(m, z[j]);
    double denom = 0.0;
    for (int j = 0; j < A; ++j) denom += std::exp(z[j] - m);
    const double lse = m + std::log(denom);
    loss += lse - z[actions[i]];
    for (int j = 0; j < A; ++j) {
      pr[j] = std::exp(z[j] - lse);
      d[j] = (pr[j] - (j == actions[i] ? 1.0 : 0.0)) * inv_b;
    }
  }
  loss *= inv_b;

  for (int l = L - 1; l >= 0; --l) {
    const int in = p.dims[l], out = p.dims[l + 1];
    const double* dz = work.deltas[l].data();
    double* dW = grad.data() + p.w_off[l];
    double* db = grad.data() + p.b_off[l];
    std::fill(dW, dW + static_cast<std::size_t>(in) * out, 0.0);
    std::fill(db, db + out, 0.0);
    for (int i = 0; i < batch; ++i) {
      const double* x = work.acts[l].data() + static_cast<std::size_t>(i) * in;
      const double* d = dz + static_cast<std::size_t>(i) * out;
      for (int k = 0; k < in; ++k) {
        double* wr = dW + static_cast<std::size_t>(k) * out;
        const double xv = x[k];
        for (int j = 0; j < out; ++j) wr[j] += xv * d[j];
      }
      for (int j = 0; j < out; ++j) db[j] += d[j];
    }
    if (l > 0) {
      double* dx = work.deltas[l - 1].data();
      std::fill(dx, dx + static_cast<std::size_t>(batch) * in, 0.0);
      for (int i = 0; i < batch; ++i) {
        const double* d = dz + static_cast<std::size_t>(i) * out;
        const double* act = work.acts[l].data() + static_cast<std::size_t>(i) * in;
        double* dxi = dx + static_cast<std::size_t>(i) * in;
        for (int k = 0; k < in; ++k) {
          if (act[k] <= 0.0) continue;  // ReLU mask
          const double* wr = p.w(l) + static_cast<std::size_t>(k) * out;
          double acc = 0.0;
          for (int j = 0; j < out; ++j) acc += wr[j] * d[j];
          dxi[k] = acc;
        }
      }
    }
  }
  return loss;
}

void mlp_logits(const MlpParams& p, const double* x, double* out) {
  thread_local std::vector<double> buf_a, buf_b;
  const int L = p.layers();
  buf_a.assign(x, x + p.dims[0]);
  for (int l = 0; l < L; ++l) {
    const int in = p.dims[l], o = p.dims[l + 1];
    double* dst = (l + 1 == L) ? out : (buf_b.resize(o), buf_b.data());
    Eigen::Map<Eigen::VectorXd> y(dst, o);
    y.noalias() = CMap(p.w(l), in, o).transpose() *
                  Eigen::Map<const Eigen::VectorXd>(buf_a.data(), in);
    const double* bias = p.b(l);
    for (int j = 0; j < o; ++j) {
      dst[j] += bias[j];
      if (l + 1 < L && dst[j] < 0.0) dst[j] = 0.0;
    }
    if (l + 1 < L) buf_a.swap(buf_b);
  }
}

}  // namespace gcsl
