#include "gcsl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>

namespace gcsl {

namespace {

int state_id_of(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("empty state/goal vector");
  return (int)std::llround(v[0]);
}

double transition_prob(const FiniteMdp& m, int s, int a, int sn) {
  if (m.deterministic()) return m.step(s, a) == sn ? 1.0 : 0.0;
  const auto& ss = m.succ_states[(size_t)s * m.action_count + a];
  const auto& ps = m.succ_probs[(size_t)s * m.action_count + a];
  for (size_t i = 0; i < ss.size(); ++i)
    if (ss[i] == sn) return ps[i];
  return 0.0;
}

// log rho(s_0) + sum_t log T(s_{t+1} | s_t, a_t)
double log_dynamics(const FiniteMdp& m, const EnumeratedTrajectory& tr) {
  double lp = std::log(m.initial_distribution[tr.states[0]]);
  for (size_t t = 0; t < tr.actions.size(); ++t)
    lp += std::log(transition_prob(m, tr.states[t], tr.actions[t], tr.states[t + 1]));
  return lp;
}

// sum_t log pi(a_t | s_t, goal, h = T-t)
double log_action_sum(const TabularDistributionPolicy& pi, const EnumeratedTrajectory& tr,
                      int goal) {
  const int T = (int)tr.actions.size();
  double lp = 0.0;
  for (int t = 0; t < T; ++t) lp += std::log(pi.prob(tr.states[t], goal, T - t, tr.actions[t]));
  return lp;
}

constexpr size_t kEnumBudget = 2'000'000;

void enumerate_rec(const TabularDistributionPolicy& pi, const FiniteMdp& m, int goal, int t,
                   double p, EnumeratedTrajectory& cur, std::vector<EnumeratedTrajectory>& out) {
  if (t == m.horizon) {
    if (out.size() >= kEnumBudget) throw std::runtime_error("trajectory enumeration budget exceeded");
    out.push_back(cur);
    out.back().probability = p;
    return;
  }
  const int s = cur.states[t];
  const int h = m.horizon - t;
  for (int a = 0; a < m.action_count; ++a) {
    const double pa = pi.prob(s, goal, h, a);
    if (pa == 0.0) continue;
    cur.actions[t] = a;
    if (m.deterministic()) {
      cur.states[t + 1] = m.step(s, a);
      enumerate_rec(pi, m, goal, t + 1, p * pa, cur, out);
    } else {
      const auto& ss = m.succ_states[(size_t)s * m.action_count + a];
      const auto& ps = m.succ_probs[(size_t)s * m.action_count + a];
      for (size_t i = 0; i < ss.size(); ++i) {
        if (ps[i] == 0.0) continue;
        cur.states[t + 1] = ss[i];
        enumerate_rec(pi, m, goal, t + 1, p * pa * ps[i], cur, out);
      }
    }
  }
}

// trajectory identity for mass bookkeeping: states followed by actions
std::vector<int> traj_key(const EnumeratedTrajectory& tr) {
  std::vector<int> k = tr.states;
  k.insert(k.end(), tr.actions.begin(), tr.actions.end());
  return k;
}

}  // namespace

TabularDistributionPolicy::TabularDistributionPolicy(int states, int actions, int horizons)
    : states_(states), actions_(actions), horizons_(horizons) {
  if (states <= 0 || actions <= 0 || horizons <= 0)
    throw std::invalid_argument("TabularDistributionPolicy: non-positive shape");
  table_.assign((size_t)states * states * horizons * actions, 1.0 / actions);
}

std::size_t TabularDistributionPolicy::cell(int s, int g, int h) const {
  if (s < 0 || s >= states_ || g < 0 || g >= states_ || h < 1 || h > horizons_)
    throw std::out_of_range("TabularDistributionPolicy cell (" + std::to_string(s) + "," +
                            std::to_string(g) + "," + std::to_string(h) + ")");
  return (((size_t)s * states_ + g) * horizons_ + (h - 1)) * actions_;
}

TabularDistributionPolicy TabularDistributionPolicy::uniform(const FiniteMdp& m) {
  return {m.state_count, m.action_count, m.horizon};
}

TabularDistributionPolicy TabularDistributionPolicy::random(const FiniteMdp& m, Rng& rng) {
  TabularDistributionPolicy pi(m.state_count, m.action_count, m.horizon);
  const size_t rows = pi.table_.size() / m.action_count;
  for (size_t r = 0; r < rows; ++r) {
    double* row = &pi.table_[r * m.action_count];
    double sum = 0.0;
    for (int a = 0; a < m.action_count; ++a) {
      sum += row[a] = -std::log(1.0 - rng.uniform01());  // Exp(1) draws -> Dirichlet(1)
    }
    if (sum <= 0.0) {
      for (int a = 0; a < m.action_count; ++a) row[a] = 1.0 / m.action_count;
    } else {
      for (int a = 0; a < m.action_count; ++a) row[a] /= sum;
    }
  }
  return pi;
}

std::vector<double> TabularDistributionPolicy::action_probabilities(const StateVec& s,
                                                                    const Goal& g,
                                                                    int horizon) const {
  const auto r = row(state_id_of(s), state_id_of(g), std::clamp(horizon, 1, horizons_));
  return {r.begin(), r.end()};
}

void TabularDistributionPolicy::check_rows(double tol) const {
  const size_t rows = table_.size() / actions_;
  for (size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int a = 0; a < actions_; ++a) sum += table_[r * actions_ + a];
    if (std::abs(sum - 1.0) > tol)
      throw std::runtime_error("policy row " + std::to_string(r) + " sums to " +
                               std::to_string(sum));
  }
}

std::vector<EnumeratedTrajectory> enumerate_trajectories(const TabularDistributionPolicy& pi,
                                                         const FiniteMdp& m, int goal) {
  double seqs = 1.0;
  for (int t = 0; t < m.horizon; ++t) seqs *= m.action_count;
  if (seqs > 1e6) throw std::runtime_error("trajectory enumeration budget exceeded");

  std::vector<EnumeratedTrajectory> out;
  EnumeratedTrajectory cur;
  cur.states.assign(m.horizon + 1, 0);
  cur.actions.assign(m.horizon, 0);
  for (int s0 = 0; s0 < m.state_count; ++s0) {
    const double p0 = m.initial_distribution[s0];
    if (p0 == 0.0) continue;
    cur.states[0] = s0;
    enumerate_rec(pi, m, goal, 0, p0, cur, out);
  }
  return out;
}

double exact_reach_probability(const TabularDistributionPolicy& pi, const FiniteMdp& m, int goal) {
  std::vector<double> d = m.initial_distribution;
  std::vector<double> nd(m.state_count);
  for (int t = 0; t < m.horizon; ++t) {
    std::fill(nd.begin(), nd.end(), 0.0);
    const int h = m.horizon - t;
    for (int s = 0; s < m.state_count; ++s) {
      if (d[s] == 0.0) continue;
      for (int a = 0; a < m.action_count; ++a) {
        const double pa = pi.prob(s, goal, h, a);
        if (pa == 0.0) continue;
        if (m.deterministic()) {
          nd[m.step(s, a)] += d[s] * pa;
        } else {
          const auto& ss = m.succ_states[(size_t)s * m.action_count + a];
          const auto& ps = m.succ_probs[(size_t)s * m.action_count + a];
          for (size_t i = 0; i < ss.size(); ++i) nd[ss[i]] += d[s] * pa * ps[i];
        }
      }
    }
    d.swap(nd);
  }
  return d[goal];
}

double exact_J(const TabularDistributionPolicy& pi, const FiniteMdp& m) {
  double j = 0.0;
  for (int g = 0; g < m.state_count; ++g) {
    const double pg = m.goal_distribution[g];
    if (pg > 0.0) j += pg * exact_reach_probability(pi, m, g);
  }
  return j;
}

double exact_j_gcsl(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old,
                    const FiniteMdp& m) {
  double acc = 0.0;
  for (int g = 0; g < m.state_count; ++g) {
    const double pg = m.goal_distribution[g];
    if (pg == 0.0) continue;
    for (const auto& tr : enumerate_trajectories(pi_old, m, g))
      acc += pg * tr.probability * log_action_sum(pi, tr, tr.states.back());
  }
  return acc;
}

double exact_j_surr(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old,
                    const FiniteMdp& m) {
  double acc = 0.0;
  for (int g = 0; g < m.state_count; ++g) {
    const double pg = m.goal_distribution[g];
    if (pg == 0.0) continue;
    for (const auto& tr : enumerate_trajectories(pi_old, m, g))
      if (tr.states.back() == g)
        acc += pg * tr.probability * (log_dynamics(m, tr) + log_action_sum(pi, tr, g));
  }
  return acc;
}

double tv_alpha(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old) {
  if (pi.states() != pi_old.states() || pi.action_count() != pi_old.action_count() ||
      pi.horizons() != pi_old.horizons())
    throw std::invalid_argument("tv_alpha: shape mismatch");
  double alpha = 0.0;
  for (int s = 0; s < pi.states(); ++s)
    for (int g = 0; g < pi.states(); ++g)
      for (int h = 1; h <= pi.horizons(); ++h) {
        const auto a = pi.row(s, g, h);
        const auto b = pi_old.row(s, g, h);
        double tv = 0.0;
        for (int i = 0; i < pi.action_count(); ++i) tv += std::abs(a[i] - b[i]);
        alpha = std::max(alpha, 0.5 * tv);
      }
  return alpha;
}

BoundReport check_objective_bounds(const TabularDistributionPolicy& pi,
                                   const TabularDistributionPolicy& pi_old, const FiniteMdp& m,
                                   double tol) {
  BoundReport r;
  // per-trajectory masses split by whether the commanded goal was reached,
  // plus the log-density under pi at the goal actually reached
  struct Mass {
    double right = 0.0, wrong = 0.0, lp = 0.0;
  };
  std::map<std::vector<int>, Mass> mass;

  for (int g = 0; g < m.state_count; ++g) {
    const double pg = m.goal_distribution[g];
    if (pg == 0.0) continue;
    for (const auto& tr : enumerate_trajectories(pi_old, m, g)) {
      const double w = pg * tr.probability;
      const int reached = tr.states.back();
      const double ldyn = log_dynamics(m, tr);
      const double lp = ldyn + log_action_sum(pi, tr, reached);
      r.E_logpi += w * lp;
      r.C2 += w * ldyn;
      if (reached == g) r.J_surr += w * (ldyn + log_action_sum(pi, tr, g));
      Mass& acc = mass[traj_key(tr)];
      (reached == g ? acc.right : acc.wrong) += w;
      acc.lp = lp;
    }
  }

  r.J = exact_J(pi, m);
  r.J_gcsl = exact_j_gcsl(pi, pi_old, m);
  r.alpha = tv_alpha(pi, pi_old);

  const double T = m.horizon;
  r.ok_surrogate_bound = r.J >= r.J_surr - 4.0 * T * (T - 1.0) * r.alpha * r.alpha - tol;
  r.ok_relabel_ineq = r.J_surr >= r.E_logpi - tol;
  r.ok_identity = std::abs(r.E_logpi - (r.J_gcsl + r.C2)) <= tol;

  double p_right = 0.0;
  for (const auto& [k, acc] : mass) {
    p_right += acc.right;
    r.P_wrong += acc.wrong;
  }
  if (r.P_wrong <= 0.0 || p_right <= 0.0) {
    r.gap_degenerate = true;
    r.ok_gap = true;  // conditionals undefined, nothing to check
  } else {
    double dtv = 0.0, signed_gap = 0.0;
    for (const auto& [k, acc] : mass) {
      const double pr = acc.right / p_right;
      const double pw = acc.wrong / r.P_wrong;
      dtv += std::abs(pr - pw);
      signed_gap += (pr - pw) * acc.lp;
    }
    dtv *= 0.5;
    r.tv_right_wrong = dtv;
    r.gap = r.P_wrong * p_right * signed_gap;
    r.gap_bound = 2.0 * r.P_wrong * p_right * dtv * r.E_logpi;
    r.ok_gap = std::abs(r.gap) <= std::abs(r.gap_bound) + tol;
  }
  return r;
}

GapTerms gap_terms(const TabularDistributionPolicy& pi, const TabularDistributionPolicy& pi_old,
                   const FiniteMdp& m) {
  const BoundReport r = check_objective_bounds(pi, pi_old, m);
  return {r.P_wrong, r.tv_right_wrong, r.gap, r.gap_bound, r.gap_degenerate, r.ok_gap};
}

TabularDistributionPolicy relabel_optimal_policy(const TabularDistributionPolicy& pi_old,
                                                 const FiniteMdp& m) {
  const int S = m.state_count, A = m.action_count, T = m.horizon;
  std::vector<double> w((size_t)S * S * T * A, 0.0);
  const auto at = [&](int s, int g, int t, int a) -> double& {
    return w[(((size_t)s * S + g) * T + t) * A + a];
  };
  for (int g = 0; g < S; ++g) {
    const double pg = m.goal_distribution[g];
    if (pg == 0.0) continue;
    for (const auto& tr : enumerate_trajectories(pi_old, m, g)) {
      const int reached = tr.states.back();
      for (int t = 0; t < T; ++t) at(tr.states[t], reached, t, tr.actions[t]) += pg * tr.probability;
    }
  }
  TabularDistributionPolicy pi(S, A, T);
  for (int s = 0; s < S; ++s)
    for (int g = 0; g < S; ++g)
      for (int t = 0; t < T; ++t) {
        auto row = pi.row(s, g, T - t);  // step t has T-t steps remaining
        double sum = 0.0;
        for (int a = 0; a < A; ++a) sum += at(s, g, t, a);
        for (int a = 0; a < A; ++a) row[a] = sum > 0.0 ? at(s, g, t, a) / sum : 1.0 / A;
      }
  return pi;
}

OptimalReach optimal_reach_policy(const FiniteMdp& m) {
  if (!m.deterministic())
    throw std::invalid_argument("optimal_reach_policy requires deterministic dynamics");
  const int S = m.state_count, A = m.action_count, T = m.horizon;
  // v[h][s*S+g] = max probability of sitting on g after h more steps
  std::vector<double> v((size_t)S * S, 0.0), nv((size_t)S * S);
  for (int s = 0; s < S; ++s) v[(size_t)s * S + s] = 1.0;

  TabularDistributionPolicy pi(S, A, T);
  std::vector<double> vT;
  for (int h = 1; h <= T; ++h) {
    for (int s = 0; s < S; ++s)
      for (int g = 0; g < S; ++g) {
        int best = 0;
        double bv = -1.0;
        for (int a = 0; a < A; ++a) {
          const double val = v[(size_t)m.step(s, a) * S + g];
          if (val > bv) {
            bv = val;
            best = a;
          }
        }
        nv[(size_t)s * S + g] = bv;
        auto row = pi.row(s, g, h);
        std::fill(row.begin(), row.end(), 0.0);
        row[best] = 1.0;
      }
    v.swap(nv);
  }
  double j = 0.0;
  for (int g = 0; g < S; ++g) {
    if (m.goal_distribution[g] == 0.0) continue;
    double reach = 0.0;
    for (int s0 = 0; s0 < S; ++s0) reach += m.initial_distribution[s0] * v[(size_t)s0 * S + g];
    j += m.goal_distribution[g] * reach;
  }
  return {std::move(pi), j};
}

bool RelabelOptimalityReport::all_ok() const {
  if (!optimality_ok) return false;
  for (const auto& p : perturbations)
    if (!p.ok) return false;
  return true;
}

RelabelOptimalityReport check_relabel_optimality(const FiniteMdp& m,
                                                 const TabularDistributionPolicy& pi_old,
                                                 std::span<const double> epsilons, double tol) {
  if (!m.deterministic())
    throw std::invalid_argument("check_relabel_optimality requires deterministic dynamics");
  RelabelOptimalityReport rep;
  const TabularDistributionPolicy tilde = relabel_optimal_policy(pi_old, m);
  rep.j_star = optimal_reach_policy(m).j_star;
  rep.j_relabel_optimal = exact_J(tilde, m);
  rep.optimality_ok = std::abs(rep.j_star - rep.j_relabel_optimal) <= tol;

  for (const double eps : epsilons) {
    TabularDistributionPolicy pert = tilde;
    for (int s = 0; s < pert.states(); ++s)
      for (int g = 0; g < pert.states(); ++g)
        for (int h = 1; h <= pert.horizons(); ++h) {
          auto row = pert.row(s, g, h);
          const int am = argmax_lowest({row.data(), row.size()});
          const double moved = std::min(eps, row[am]);
          row[am] -= moved;
          row[(am + 1) % pert.action_count()] += moved;
        }
    PerturbationCheck pc;
    pc.epsilon = eps;
    pc.j_perturbed = exact_J(pert, m);
    pc.gap = rep.j_star - pc.j_perturbed;
    pc.bound = eps * m.horizon;
    pc.ok = pc.gap <= pc.bound + tol && pc.gap >= -tol;
    rep.perturbations.push_back(pc);
  }
  return rep;
}

}  // namespace gcsl
