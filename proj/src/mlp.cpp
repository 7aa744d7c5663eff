#include "gcsl/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace gcsl {

void adam_step(AdamState& st, std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size() || params.size() != st.m.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  st.step += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(params.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double g = grad[i];
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
    params[i] -= st.lr * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + st.eps);
  }
}

namespace {

std::vector<int> full_dims(const FeatureCodec& codec, const std::vector<int>& hidden,
                           int actions) {
  std::vector<int> dims;
  dims.push_back(codec.dim());
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(actions);
  return dims;
}

}  // namespace

MlpPolicy::MlpPolicy(FeatureCodec codec, const std::vector<int>& hidden, int actions, Rng& rng)
    : codec_(codec), params_(MlpParams::he_uniform(full_dims(codec, hidden, actions), rng)) {}

MlpPolicy::MlpPolicy(FeatureCodec codec, MlpParams params)
    : codec_(codec), params_(std::move(params)) {
  if (params_.dims.front() != codec_.dim())
    throw std::invalid_argument("MlpPolicy: parameter input width does not match the codec");
}

std::vector<double> MlpPolicy::action_probabilities(const StateVec& s, const Goal& g,
                                                    int horizon) const {
  thread_local std::vector<double> x;
  x.resize(codec_.dim());
  codec_.encode(s, g, horizon, x.data());
  std::vector<double> z(params_.dims.back());
  mlp_logits(params_, x.data(), z.data());
  softmax_inplace(z);
  return z;
}

MlpLearner::MlpLearner(MlpPolicy policy, double lr)
    : policy_(std::move(policy)), adam_(policy_.params().flat.size(), lr) {
  grad_.resize(policy_.params().flat.size());
}

void MlpLearner::encode_batch(std::span<const RelabeledExample> batch) {
  const FeatureCodec& codec = policy_.codec();
  const int d = codec.dim();
  const int n = static_cast<int>(batch.size());
  X_.resize(static_cast<std::size_t>(n) * d);
  actions_.resize(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    codec.encode(batch[i].state, batch[i].goal, batch[i].horizon,
                 X_.data() + static_cast<std::size_t>(i) * d);
    actions_[i] = batch[i].action;
  }
}

double MlpLearner::loss_grad(std::span<const RelabeledExample> batch, std::span<double> grad) {
  if (batch.empty()) throw std::invalid_argument("MlpLearner: empty batch");
  encode_batch(batch);
  return mlp_loss_grad(policy_.params(), X_.data(), actions_.data(),
                       static_cast<int>(batch.size()), grad, work_);
}

double MlpLearner::update(std::span<const RelabeledExample> batch) {
  const double loss = loss_grad(batch, grad_);
  adam_step(adam_, policy_.params().flat, grad_);
  return loss;
}

}  // namespace gcsl
