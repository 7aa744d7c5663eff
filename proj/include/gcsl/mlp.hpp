#pragma once

#include <span>
#include <vector>

#include "gcsl/kernels.hpp"
#include "gcsl/policy.hpp"

namespace gcsl {

struct AdamState {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<double> m, v;

  explicit AdamState(std::size_t n, double lr_ = 5e-4) : lr(lr_), m(n, 0.0), v(n, 0.0) {}
};

// standard bias-corrected Adam update, in place
void adam_step(AdamState& st, std::span<double> params, std::span<const double> grad);

// Goal-conditioned categorical MLP policy: input = encoded (state, goal[,
// horizon]) features, output = softmax over actions.
class MlpPolicy : public Policy {
 public:
  MlpPolicy(FeatureCodec codec, const std::vector<int>& hidden, int actions, Rng& rng);
  MlpPolicy(FeatureCodec codec, MlpParams params);

  int action_count() const override { return params_.dims.back(); }
  std::vector<double> action_probabilities(const StateVec& s, const Goal& g,
                                           int horizon) const override;

  const FeatureCodec& codec() const { return codec_; }
  const MlpParams& params() const { return params_; }
  MlpParams& params() { return params_; }

 private:
  FeatureCodec codec_;
  MlpParams params_;
};

// Owns a policy plus its optimizer state; one update = encode batch, compute
// loss/gradient, Adam step. Returns the pre-update batch loss.
class MlpLearner {
 public:
  explicit MlpLearner(MlpPolicy policy, double lr = 5e-4);

  double update(std::span<const RelabeledExample> batch);
  // loss+gradient without the optimizer step (finite-difference tests)
  double loss_grad(std::span<const RelabeledExample> batch, std::span<double> grad);

  MlpPolicy& policy() { return policy_; }
  const MlpPolicy& policy() const { return policy_; }
  AdamState& adam() { return adam_; }

 private:
  void encode_batch(std::span<const RelabeledExample> batch);

  MlpPolicy policy_;
  AdamState adam_;
  MlpBatchWork work_;
  std::vector<double> grad_, X_;
  std::vector<int> actions_;
};

}  // namespace gcsl
