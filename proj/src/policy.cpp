#include "gcsl/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace gcsl {

int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

int Policy::greedy(const StateVec& s, const Goal& g, int horizon) const {
  const std::vector<double> p = action_probabilities(s, g, horizon);
  return argmax_lowest(p);
}

int sample_action(const Policy& p, const StateVec& s, const Goal& g, int horizon, Rng& rng) {
  const std::vector<double> probs = p.action_probabilities(s, g, horizon);
  return rng.categorical(probs);
}

int greedy_action(const Policy& p, const StateVec& s, const Goal& g, int horizon) {
  return p.greedy(s, g, horizon);
}

TabularPolicy::TabularPolicy(int states, int actions, int horizons, double smoothing)
    : states_(states), actions_(actions), horizons_(horizons), smoothing_(smoothing) {
  if (states < 1 || actions < 2 || horizons < 1)
    throw std::invalid_argument("TabularPolicy: bad dimensions");
  if (smoothing < 0.0) throw std::invalid_argument("TabularPolicy: negative smoothing");
  counts_.assign(static_cast<std::size_t>(states) * states * horizons * actions, 0.0);
}

std::size_t TabularPolicy::cell(int s, int g, int h) const {
  if (s < 0 || s >= states_ || g < 0 || g >= states_)
    throw std::out_of_range("TabularPolicy: state/goal id out of range");
  const int hi = horizons_ == 1 ? 0 : h - 1;
  if (hi < 0 || hi >= horizons_) throw std::out_of_range("TabularPolicy: horizon out of range");
  return ((static_cast<std::size_t>(s) * states_ + g) * horizons_ + hi) * actions_;
}

int TabularPolicy::id_of(const StateVec& v) const {
  if (v.size() != 1) throw std::invalid_argument("TabularPolicy: expected a discrete id");
  return static_cast<int>(std::lround(v[0]));
}

std::vector<double> TabularPolicy::probabilities(int s, int g, int h) const {
  const std::size_t base = cell(s, g, h);
  std::vector<double> p(actions_);
  double z = 0.0;
  for (int a = 0; a < actions_; ++a) z += counts_[base + a] + smoothing_;
  if (z <= 0.0) {  // smoothing 0 and an empty cell: fall back to uniform
    std::fill(p.begin(), p.end(), 1.0 / actions_);
    return p;
  }
  for (int a = 0; a < actions_; ++a) p[a] = (counts_[base + a] + smoothing_) / z;
  return p;
}

std::vector<double> TabularPolicy::action_probabilities(const StateVec& s, const Goal& g,
                                                        int horizon) const {
  return probabilities(id_of(s), id_of(g), horizon);
}

int TabularPolicy::greedy(const StateVec& s, const Goal& g, int horizon) const {
  // argmax of smoothed probabilities == argmax of raw counts (same tie order)
  const std::size_t base = cell(id_of(s), id_of(g), horizon);
  return argmax_lowest({counts_.data() + base, static_cast<std::size_t>(actions_)});
}

void TabularPolicy::observe(int s, int g, int h, int a, double weight) {
  if (a < 0 || a >= actions_) throw std::out_of_range("TabularPolicy: action out of range");
  counts_[cell(s, g, h) + a] += weight;
}

void TabularPolicy::fit(std::span<const RelabeledExample> batch) {
  for (const RelabeledExample& ex : batch)
    observe(id_of(ex.state), id_of(ex.goal), ex.horizon, ex.action);
}

double TabularPolicy::nll(std::span<const RelabeledExample> batch) const {
  if (batch.empty()) throw std::invalid_argument("TabularPolicy::nll: empty batch");
  double acc = 0.0;
  for (const RelabeledExample& ex : batch) {
    const std::size_t base = cell(id_of(ex.state), id_of(ex.goal), ex.horizon);
    double z = 0.0;
    for (int a = 0; a < actions_; ++a) z += counts_[base + a] + smoothing_;
    acc -= std::log((counts_[base + ex.action] + smoothing_) / z);
  }
  return acc / static_cast<double>(batch.size());
}

}  // namespace gcsl
