#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

// Explicit finite MDP with exact dynamic-programming routines. These are the
// ground-truth oracles the LP machinery is checked against, so everything here
// is written for correctness first: dense storage, LU solves with iterative
// refinement, sup-norm stopping rules.

namespace salp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Policy {
  std::vector<int> action_of;  // state -> action index
};

class MdpModel {
 public:
  // transitions[a] is the row-stochastic matrix P_a (n x n); costs is n x m.
  // Throws std::invalid_argument when any model invariant fails.
  MdpModel(std::vector<Matrix> transitions, Matrix costs, double discount);

  int num_states() const { return n_states_; }
  int num_actions() const { return n_actions_; }
  double discount() const { return discount_; }
  const Matrix& transition(int action) const { return transitions_[action]; }
  const Matrix& costs() const { return costs_; }
  double cost(int state, int action) const { return costs_(state, action); }

  // P_mu and g_mu for a stationary policy.
  Matrix policy_transition(const Policy& mu) const;
  Vector policy_cost(const Policy& mu) const;

  void check_policy(const Policy& mu) const;

 private:
  int n_states_;
  int n_actions_;
  double discount_;
  std::vector<Matrix> transitions_;
  Matrix costs_;
};

// Throws if w is not a probability distribution over n states (entries >= 0,
// sum within 1e-12 of 1).
void check_distribution(const Vector& w, int n, const std::string& what);

// (TJ)(x) = min_a g(x,a) + alpha * sum_x' P_a(x,x') J(x')
Vector bellman_apply(const Vector& J, const MdpModel& model);

// T_mu J = g_mu + alpha P_mu J
Vector bellman_policy_apply(const Vector& J, const Policy& mu, const MdpModel& model);

// Action attaining the Bellman minimum at each state; ties go to the lowest
// action index.
Policy greedy_policy(const Vector& J, const MdpModel& model);

// Unique solution of (I - alpha P_mu) J = g_mu, refined to residual <= 1e-10.
Vector policy_value(const Policy& mu, const MdpModel& model);

struct ValueIterationResult {
  Vector values;
  long iterations = 0;
  double residual = 0.0;  // sup-norm Bellman residual of `values`
};

// Iterates T until the sup-norm Bellman residual is <= tol.
ValueIterationResult exact_value_iteration(const MdpModel& model, double tol);

// pi^T = (1 - alpha) nu^T (I - alpha P_mu)^{-1}; a probability distribution.
Vector occupancy(const MdpModel& model, const Policy& mu, const Vector& nu);

// (I - alpha P_mu)^{-1} s
Vector resolvent_apply(const MdpModel& model, const Policy& mu, const Vector& s);

// Maximizer of nu^T J over { J <= TJ }, which equals J*. Requires nu > 0.
Vector solve_exact_lp(const MdpModel& model, const Vector& nu, double tol = 1e-9);

}  // namespace salp
