#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>

// Dense reference LP solver: primal-dual path following with a Mehrotra-style
// predictor-corrector step. It is the oracle every specialized solve in this
// project is checked against, so it favors robustness over speed.

namespace salp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LpStatus {
  optimal,
  max_iterations,
  infeasible,
  unbounded,
  numerical_failure,
};

const char* to_string(LpStatus status);

struct SolverReport {
  int iterations = 0;
  double duality_gap = kInf;     // relative
  double primal_residual = kInf; // per-row relative feasibility violation
  double dual_residual = kInf;
  double wall_time_s = 0.0;
  LpStatus status = LpStatus::numerical_failure;
};

// maximize c^T x  subject to  A x <= b,  x >= lower.
// `lower` may be empty (all variables free); -inf entries mark free variables.
struct DenseLp {
  Vector c;
  Matrix A;
  Vector b;
  Vector lower;
};

struct LpSolution {
  Vector x;
  SolverReport report;
};

struct LpOptions {
  double tol = 1e-8;
  int max_iterations = 200;
};

LpSolution solve_dense_lp(const DenseLp& lp, double tol = 1e-8);
LpSolution solve_dense_lp(const DenseLp& lp, const LpOptions& options);

}  // namespace salp
