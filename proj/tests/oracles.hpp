#pragma once

// Test-only generators and independent oracles. Everything here deliberately
// avoids the library's solver paths: straight power series, exhaustive
// enumeration, and grid search, so agreement with the implementation is
// meaningful.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mdp.hpp"
#include "rng.hpp"

namespace salp::testing {

inline MdpModel make_random_mdp(int n, int m, double alpha, uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> transitions(m, Matrix(n, n));
  for (int a = 0; a < m; ++a) {
    for (int x = 0; x < n; ++x) {
      double sum = 0.0;
      for (int y = 0; y < n; ++y) {
        const double v = rng.next_exponential();
        transitions[a](x, y) = v;
        sum += v;
      }
      transitions[a].row(x) /= sum;
      // Renormalize exactly so the 1e-12 row-sum invariant holds.
      transitions[a](x, n - 1) += 1.0 - transitions[a].row(x).sum();
    }
  }
  Matrix costs(n, m);
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < m; ++a) costs(x, a) = rng.next_double();
  return MdpModel(std::move(transitions), std::move(costs), alpha);
}

inline Vector make_random_distribution(int n, uint64_t seed) {
  Rng rng(seed);
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = rng.next_exponential() + 1e-3;
  w /= w.sum();
  w(n - 1) += 1.0 - w.sum();
  return w;
}

inline Policy make_random_policy(const MdpModel& model, uint64_t seed) {
  Rng rng(seed);
  Policy mu;
  mu.action_of.resize(model.num_states());
  for (auto& a : mu.action_of) a = rng.next_int(model.num_actions());
  return mu;
}

// Basis matrix with the constant function in column 0.
inline Matrix make_random_basis(int n, int K, uint64_t seed) {
  Rng rng(seed);
  Matrix phi(n, K);
  phi.col(0).setOnes();
  for (int k = 1; k < K; ++k)
    for (int x = 0; x < n; ++x) phi(x, k) = rng.next_normal();
  return phi;
}

// J_mu via the truncated series sum_{t<=T} alpha^t P^t g with alpha^T <= tail.
inline Vector power_series_policy_value(const MdpModel& model, const Policy& mu,
                                        double tail = 1e-12) {
  const Matrix P = model.policy_transition(mu);
  Vector v = model.policy_cost(mu);
  Vector J = Vector::Zero(model.num_states());
  double weight = 1.0;
  while (weight > tail) {
    J += weight * v;
    v = P * v;
    weight *= model.discount();
  }
  return J;
}

// (I - alpha P_mu)^{-1} s via the same truncated series.
inline Vector power_series_resolvent(const MdpModel& model, const Policy& mu, const Vector& s,
                                     double tail = 1e-12) {
  const Matrix P = model.policy_transition(mu);
  Vector v = s;
  Vector out = Vector::Zero(model.num_states());
  double weight = 1.0;
  while (weight > tail) {
    out += weight * v;
    v = P * v;
    weight *= model.discount();
  }
  return out;
}

// (1 - alpha) sum_t alpha^t nu^T P^t, truncated.
inline Vector power_series_occupancy(const MdpModel& model, const Policy& mu, const Vector& nu,
                                     double tail = 1e-12) {
  const Matrix Pt = model.policy_transition(mu).transpose();
  Vector v = nu;
  Vector out = Vector::Zero(model.num_states());
  double weight = 1.0;
  while (weight > tail) {
    out += weight * v;
    v = Pt * v;
    weight *= model.discount();
  }
  return (1.0 - model.discount()) * out;
}

// Stationary distribution of a row-stochastic matrix by power iteration.
inline Vector stationary_distribution(const Matrix& P, int iters = 200000, double tol = 1e-13) {
  const int n = static_cast<int>(P.rows());
  Vector w = Vector::Constant(n, 1.0 / n);
  for (int k = 0; k < iters; ++k) {
    Vector next = P.transpose() * w;
    next /= next.sum();
    const double diff = (next - w).lpNorm<1>();
    w = next;
    if (diff < tol) break;
  }
  return w;
}

inline double total_variation(const Vector& p, const Vector& q) {
  return 0.5 * (p - q).lpNorm<1>();
}

// Exhaustive vertex enumeration for tiny LPs: maximize c^T x, A x <= b.
// Tries every n-subset of rows as an active set. Returns -inf if infeasible.
inline double lp_vertex_enumeration(const Vector& c, const Matrix& A, const Vector& b,
                                    double feas_tol = 1e-9) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(n);
  std::vector<int> comb(n);
  for (int i = 0; i < n; ++i) comb[i] = i;
  auto advance = [&]() {
    int i = n - 1;
    while (i >= 0 && comb[i] == m - n + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  if (m < n) return best;
  do {
    Matrix As(n, n);
    Vector bs(n);
    for (int i = 0; i < n; ++i) {
      As.row(i) = A.row(comb[i]);
      bs(i) = b(comb[i]);
    }
    Eigen::FullPivLU<Matrix> lu(As);
    if (!lu.isInvertible()) continue;
    const Vector x = lu.solve(bs);
    if (((A * x - b).array() <= feas_tol).all()) best = std::max(best, c.dot(x));
  } while (advance());
  return best;
}

}  // namespace salp::testing
