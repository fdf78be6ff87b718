#include "mdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lp.hpp"

namespace salp {

namespace {

constexpr double kRowSumTol = 1e-12;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

MdpModel::MdpModel(std::vector<Matrix> transitions, Matrix costs, double discount)
    : n_states_(static_cast<int>(costs.rows())),
      n_actions_(static_cast<int>(costs.cols())),
      discount_(discount),
      transitions_(std::move(transitions)),
      costs_(std::move(costs)) {
  require(n_states_ >= 1, "MdpModel: need at least one state");
  require(n_actions_ >= 1, "MdpModel: need at least one action");
  require(discount_ > 0.0 && discount_ < 1.0, "MdpModel: discount must be in (0,1)");
  require(static_cast<int>(transitions_.size()) == n_actions_,
          "MdpModel: one transition matrix per action required");
  require(costs_.allFinite(), "MdpModel: costs must be finite");
  for (int a = 0; a < n_actions_; ++a) {
    const Matrix& P = transitions_[a];
    require(P.rows() == n_states_ && P.cols() == n_states_,
            "MdpModel: transition matrix " + std::to_string(a) + " has wrong shape");
    require(P.allFinite(), "MdpModel: transition matrix " + std::to_string(a) + " has non-finite entries");
    for (int x = 0; x < n_states_; ++x) {
      require(P.row(x).minCoeff() >= 0.0,
              "MdpModel: negative probability in P_" + std::to_string(a) + " row " + std::to_string(x));
      const double sum = P.row(x).sum();
      require(std::abs(sum - 1.0) <= kRowSumTol,
              "MdpModel: row " + std::to_string(x) + " of P_" + std::to_string(a) +
                  " sums to " + std::to_string(sum));
    }
  }
}

Matrix MdpModel::policy_transition(const Policy& mu) const {
  check_policy(mu);
  Matrix P(n_states_, n_states_);
  for (int x = 0; x < n_states_; ++x) P.row(x) = transitions_[mu.action_of[x]].row(x);
  return P;
}

Vector MdpModel::policy_cost(const Policy& mu) const {
  check_policy(mu);
  Vector g(n_states_);
  for (int x = 0; x < n_states_; ++x) g(x) = costs_(x, mu.action_of[x]);
  return g;
}

void MdpModel::check_policy(const Policy& mu) const {
  require(static_cast<int>(mu.action_of.size()) == n_states_,
          "policy must assign an action to every state");
  for (int x = 0; x < n_states_; ++x) {
    require(mu.action_of[x] >= 0 && mu.action_of[x] < n_actions_,
            "policy action out of range at state " + std::to_string(x));
  }
}

void check_distribution(const Vector& w, int n, const std::string& what) {
  require(w.size() == n, what + ": wrong length");
  require(w.minCoeff() >= 0.0, what + ": negative entry");
  require(std::abs(w.sum() - 1.0) <= kRowSumTol, what + ": does not sum to 1");
}

Vector bellman_apply(const Vector& J, const MdpModel& model) {
  require(J.size() == model.num_states(), "bellman_apply: J has wrong length");
  Vector out(model.num_states());
  out.setConstant(std::numeric_limits<double>::infinity());
  for (int a = 0; a < model.num_actions(); ++a) {
    const Vector qa = model.costs().col(a) + model.discount() * (model.transition(a) * J);
    out = out.cwiseMin(qa);
  }
  return out;
}

Vector bellman_policy_apply(const Vector& J, const Policy& mu, const MdpModel& model) {
  require(J.size() == model.num_states(), "bellman_policy_apply: J has wrong length");
  return model.policy_cost(mu) + model.discount() * (model.policy_transition(mu) * J);
}

Policy greedy_policy(const Vector& J, const MdpModel& model) {
  require(J.size() == model.num_states(), "greedy_policy: J has wrong length");
  const int n = model.num_states();
  Matrix q(n, model.num_actions());
  for (int a = 0; a < model.num_actions(); ++a)
    q.col(a) = model.costs().col(a) + model.discount() * (model.transition(a) * J);
  Policy mu;
  mu.action_of.resize(n);
  for (int x = 0; x < n; ++x) {
    int best = 0;
    for (int a = 1; a < model.num_actions(); ++a)
      if (q(x, a) < q(x, best)) best = a;
    mu.action_of[x] = best;
  }
  return mu;
}

Vector policy_value(const Policy& mu, const MdpModel& model) {
  const int n = model.num_states();
  const Matrix P = model.policy_transition(mu);
  const Vector g = model.policy_cost(mu);
  const Matrix A = Matrix::Identity(n, n) - model.discount() * P;
  Eigen::PartialPivLU<Matrix> lu(A);
  Vector J = lu.solve(g);
  // One or two refinement sweeps push the residual to machine precision.
  for (int sweep = 0; sweep < 3; ++sweep) {
    const Vector res = g - A * J;
    if (res.lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, g.lpNorm<Eigen::Infinity>())) break;
    J += lu.solve(res);
  }
  const double res = (g - A * J).lpNorm<Eigen::Infinity>();
  if (!(res <= 1e-10 * std::max(1.0, g.lpNorm<Eigen::Infinity>())))
    throw std::runtime_error("policy_value: linear solve failed, residual " + std::to_string(res));
  return J;
}

ValueIterationResult exact_value_iteration(const MdpModel& model, double tol) {
  require(tol > 0.0, "exact_value_iteration: tol must be positive");
  ValueIterationResult out;
  Vector J = Vector::Zero(model.num_states());
  // Contraction with modulus alpha; residual r means the updated iterate has
  // Bellman residual <= alpha * r, so stopping at r <= tol is safe after the
  // assignment below.
  for (long k = 1;; ++k) {
    const Vector TJ = bellman_apply(J, model);
    const double res = (TJ - J).lpNorm<Eigen::Infinity>();
    J = TJ;
    if (res <= tol) {
      out.values = std::move(J);
      out.iterations = k;
      out.residual = (bellman_apply(out.values, model) - out.values).lpNorm<Eigen::Infinity>();
      return out;
    }
  }
}

Vector occupancy(const MdpModel& model, const Policy& mu, const Vector& nu) {
  check_distribution(nu, model.num_states(), "occupancy: nu");
  const int n = model.num_states();
  const Matrix P = model.policy_transition(mu);
  const Matrix At = (Matrix::Identity(n, n) - model.discount() * P).transpose();
  Eigen::PartialPivLU<Matrix> lu(At);
  Vector z = lu.solve(nu);
  for (int sweep = 0; sweep < 3; ++sweep) {
    const Vector res = nu - At * z;
    if (res.lpNorm<Eigen::Infinity>() <= 1e-14) break;
    z += lu.solve(res);
  }
  if (!z.allFinite()) throw std::runtime_error("occupancy: linear solve failed");
  return (1.0 - model.discount()) * z;
}

Vector resolvent_apply(const MdpModel& model, const Policy& mu, const Vector& s) {
  require(s.size() == model.num_states(), "resolvent_apply: s has wrong length");
  const int n = model.num_states();
  const Matrix A = Matrix::Identity(n, n) - model.discount() * model.policy_transition(mu);
  Eigen::PartialPivLU<Matrix> lu(A);
  Vector v = lu.solve(s);
  for (int sweep = 0; sweep < 3; ++sweep) {
    const Vector res = s - A * v;
    if (res.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, s.lpNorm<Eigen::Infinity>())) break;
    v += lu.solve(res);
  }
  if (!v.allFinite()) throw std::runtime_error("resolvent_apply: linear solve failed");
  return v;
}

Vector solve_exact_lp(const MdpModel& model, const Vector& nu, double tol) {
  check_distribution(nu, model.num_states(), "solve_exact_lp: nu");
  if (nu.minCoeff() <= 0.0)
    throw std::invalid_argument("solve_exact_lp: nu must have full support");
  const int n = model.num_states();
  const int m = model.num_actions();
  // maximize nu^T J  s.t.  J(x) - alpha P_a(x,:) J <= g(x,a) for all (x,a)
  DenseLp lp;
  lp.c = nu;
  lp.A = Matrix(n * m, n);
  lp.b = Vector(n * m);
  for (int a = 0; a < m; ++a) {
    lp.A.middleRows(a * n, n) =
        Matrix::Identity(n, n) - model.discount() * model.transition(a);
    lp.b.segment(a * n, n) = model.costs().col(a);
  }
  const LpSolution sol = solve_dense_lp(lp, tol);
  if (sol.report.status != LpStatus::optimal)
    throw std::runtime_error(std::string("solve_exact_lp: solver status ") +
                             to_string(sol.report.status));
  return sol.x;
}

}  // namespace salp
