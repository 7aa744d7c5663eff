#pragma once

#include <span>
#include <vector>

#include "gcsl/env.hpp"
#include "gcsl/rng.hpp"

namespace gcsl {

// One hindsight-relabeled supervised example: "action `action` was taken in
// `state` and the trajectory visited `goal` exactly `horizon` steps later".
struct RelabeledExample {
  StateVec state;
  int action = 0;
  Goal goal;
  int horizon = 1;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual int action_count() const = 0;
  // strictly positive, sums to 1; horizon = remaining steps, ignored by
  // horizon-agnostic policies
  virtual std::vector<double> action_probabilities(const StateVec& s, const Goal& g,
                                                   int horizon) const = 0;
  // argmax of action_probabilities, ties broken by lowest index
  virtual int greedy(const StateVec& s, const Goal& g, int horizon) const;
};

int sample_action(const Policy& p, const StateVec& s, const Goal& g, int horizon, Rng& rng);
int greedy_action(const Policy& p, const StateVec& s, const Goal& g, int horizon);

int argmax_lowest(std::span<const double> v);

// Count table over (state, goal[, horizon]) cells; probabilities are
// Laplace-smoothed normalized counts. States and goals are discrete ids
// carried in the first component of StateVec/Goal.
class TabularPolicy : public Policy {
 public:
  // horizons = 1 gives the default horizon-agnostic policy; horizons = T
  // keys cells by the remaining-step count h in [1, T]
  TabularPolicy(int states, int actions, int horizons = 1, double smoothing = 0.1);

  int action_count() const override { return actions_; }
  std::vector<double> action_probabilities(const StateVec& s, const Goal& g,
                                           int horizon) const override;
  int greedy(const StateVec& s, const Goal& g, int horizon) const override;

  std::vector<double> probabilities(int s, int g, int h) const;
  void observe(int s, int g, int h, int a, double weight = 1.0);
  void fit(std::span<const RelabeledExample> batch);
  double nll(std::span<const RelabeledExample> batch) const;  // mean -log pi(a|s,g,h)

  int states() const { return states_; }
  int horizons() const { return horizons_; }
  double smoothing() const { return smoothing_; }
  const std::vector<double>& counts() const { return counts_; }
  std::vector<double>& counts() { return counts_; }

 private:
  std::size_t cell(int s, int g, int h) const;
  int id_of(const StateVec& v) const;

  int states_;
  int actions_;
  int horizons_;
  double smoothing_;
  std::vector<double> counts_;  // [(s * states + g) * horizons + (h-1 or 0)] * actions + a
};

}  // namespace gcsl
