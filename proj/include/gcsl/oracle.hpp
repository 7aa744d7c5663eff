#pragma once

#include <span>
#include <vector>

#include "gcsl/env.hpp"
#include "gcsl/policy.hpp"
#include "gcsl/rng.hpp"

namespace gcsl {

// Explicit probability-table policy over (state, goal, remaining-horizon)
// cells, h in [1, T]. This is the object the exact checks below manipulate;
// it also implements the common Policy interface (ids travel in the first
// component of StateVec/Goal) so it can drive rollouts.
class TabularDistributionPolicy final : public Policy {
 public:
  TabularDistributionPolicy(int states, int actions, int horizons);

  static TabularDistributionPolicy uniform(const FiniteMdp& m);
  // independent Dirichlet(1) rows, i.e. uniform over the simplex
  static TabularDistributionPolicy random(const FiniteMdp& m, Rng& rng);

  int action_count() const override { return actions_; }
  std::vector<double> action_probabilities(const StateVec& s, const Goal& g,
                                           int horizon) const override;

  double prob(int s, int g, int h, int a) const { return table_[cell(s, g, h) + a]; }
  std::span<double> row(int s, int g, int h) { return {&table_[cell(s, g, h)], (size_t)actions_}; }
  std::span<const double> row(int s, int g, int h) const {
    return {&table_[cell(s, g, h)], (size_t)actions_};
  }

  int states() const { return states_; }
  int horizons() const { return horizons_; }

  // throws if any row fails to sum to 1 within tol
  void check_rows(double tol = 1e-12) const;

 private:
  std::size_t cell(int s, int g, int h) const;

  int states_;
  int actions_;
  int horizons_;
  std::vector<double> table_;
};

struct EnumeratedTrajectory {
  std::vector<int> states;   // T+1 ids
  std::vector<int> actions;  // T ids
  double probability = 0.0;  // full density: initial state, policy and dynamics
};

// Exhaustive distribution over length-T trajectories when `pi` is commanded
// with `goal`. Covers every action sequence (and every dynamics branch for
// stochastic MDPs); probabilities sum to 1 within 1e-10. Throws when the
// enumeration would exceed ~10^6 action sequences.
std::vector<EnumeratedTrajectory> enumerate_trajectories(const TabularDistributionPolicy& pi,
                                                         const FiniteMdp& m, int goal);

// P(s_T = goal) by forward propagation of the state distribution.
double exact_reach_probability(const TabularDistributionPolicy& pi, const FiniteMdp& m, int goal);

// J(pi) = E_{g ~ p(g)} P(s_T = g)
double exact_J(const TabularDistributionPolicy& pi, const FiniteMdp& m);

// J_gcsl(pi) = E_{g ~ p(g), tau ~ pi_old(.|g)} sum_t log pi(a_t | s_t, s_T, T-t)
double exact_j_gcsl(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old,
                    const FiniteMdp& m);

// J_surr(pi) = E[ 1{s_T = g} log pi(tau|g) ], log of the full trajectory
// density (the dynamics/initial-state terms vanish for deterministic MDPs)
double exact_j_surr(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old,
                    const FiniteMdp& m);

// alpha = max over (s,g,h) cells of the total-variation distance between rows
double tv_alpha(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old);

struct BoundReport {
  double J = 0.0;
  double J_surr = 0.0;
  double J_gcsl = 0.0;
  double E_logpi = 0.0;  // E_{tau ~ pi_old}[ log pi(tau | G(tau)) ], full density
  double C2 = 0.0;       // E_{tau ~ pi_old}[ log rho(s_0) + sum log T(s'|s,a) ]
  double alpha = 0.0;

  // relabeling-gap decomposition over right/wrong-goal trajectory conditionals
  double P_wrong = 0.0;
  double tv_right_wrong = 0.0;
  double gap = 0.0;
  double gap_bound = 0.0;
  bool gap_degenerate = false;  // P_wrong in {0,1}: conditionals undefined, check vacuous

  bool ok_surrogate_bound = false;  // J >= J_surr - 4T(T-1) alpha^2
  bool ok_relabel_ineq = false;     // J_surr >= E_logpi
  bool ok_identity = false;         // E_logpi == J_gcsl + C2
  bool ok_gap = false;              // |gap| <= |gap_bound|

  bool all_ok() const { return ok_surrogate_bound && ok_relabel_ineq && ok_identity && ok_gap; }
};

// Numerically verifies the surrogate lower bound, the relabeling inequality,
// the exact E_logpi = J_gcsl + C2 identity, and the right/wrong-conditional
// gap bound, all by exhaustive enumeration.
BoundReport check_objective_bounds(const TabularDistributionPolicy& pi,
                                   const TabularDistributionPolicy& pi_old, const FiniteMdp& m,
                                   double tol = 1e-9);

struct GapTerms {
  double P_wrong = 0.0;
  double tv_right_wrong = 0.0;
  double gap = 0.0;
  double gap_bound = 0.0;
  bool degenerate = false;
  bool ok = false;
};

GapTerms gap_terms(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old,
                   const FiniteMdp& m);

// pi~*(a | s, g, h=T-t) proportional to the mass, under pi_old's goal-
// marginalized trajectory distribution, of taking a at s at step t among
// trajectories ending at g; uniform where that event has probability zero.
TabularDistributionPolicy relabel_optimal_policy(const TabularDistributionPolicy& pi_old,
                                                 const FiniteMdp& m);

struct OptimalReach {
  TabularDistributionPolicy policy;
  double j_star = 0.0;
};

// Deterministic MDPs only (throws otherwise): V_0(s,g) = 1{s=g},
// V_h(s,g) = max_a V_{h-1}(step(s,a), g), greedy with lowest-index ties.
OptimalReach optimal_reach_policy(const FiniteMdp& m);

struct PerturbationCheck {
  double epsilon = 0.0;
  double j_perturbed = 0.0;
  double gap = 0.0;    // j_star - j_perturbed
  double bound = 0.0;  // epsilon * T
  bool ok = false;
};

struct RelabelOptimalityReport {
  double j_star = 0.0;
  double j_relabel_optimal = 0.0;
  bool optimality_ok = false;  // |j_star - j_relabel_optimal| <= tol
  std::vector<PerturbationCheck> perturbations;
  bool all_ok() const;
};

// Builds the relabel-optimal policy from pi_old, confirms it attains j_star,
// then moves epsilon probability mass off the argmax in every cell and checks
// the resulting performance drop against the epsilon * T guarantee.
RelabelOptimalityReport check_relabel_optimality(const FiniteMdp& m,
                                                 const TabularDistributionPolicy& pi_old,
                                                 std::span<const double> epsilons,
                                                 double tol = 1e-9);

}  // namespace gcsl
