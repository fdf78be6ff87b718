#include "lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace salp {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::max_iterations: return "max-iterations";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

struct Iterate {
  Vector x, w, y;
  double gap = kInf, pres = kInf, dres = kInf;
  double err() const { return std::max(gap, std::max(pres, dres)); }
};

// Largest step in [0, 1] keeping v + step*dv strictly positive.
double max_step(const Vector& v, const Vector& dv, double boundary) {
  double step = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) step = std::min(step, -boundary * v(i) / dv(i));
  }
  return step;
}

// Exact-duplicate row removal; keeps the tighter right-hand side when two
// rows coincide.
void dedup_rows(Matrix& A, Vector& b) {
  const Eigen::Index m = A.rows();
  std::unordered_map<size_t, std::vector<Eigen::Index>> buckets;
  std::vector<bool> keep(static_cast<size_t>(m), true);
  auto row_hash = [&](Eigen::Index i) {
    size_t h = 1469598103934665603ULL;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      double v = A(i, j);
      uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = (h ^ bits) * 1099511628211ULL;
    }
    return h;
  };
  bool dropped = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    auto& bucket = buckets[row_hash(i)];
    bool merged = false;
    for (Eigen::Index j : bucket) {
      if ((A.row(i).array() == A.row(j).array()).all()) {
        b(j) = std::min(b(j), b(i));
        keep[static_cast<size_t>(i)] = false;
        merged = true;
        dropped = true;
        break;
      }
    }
    if (!merged) bucket.push_back(i);
  }
  if (!dropped) return;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!keep[static_cast<size_t>(i)]) continue;
    if (count != i) {
      A.row(count) = A.row(i);
      b(count) = b(i);
    }
    ++count;
  }
  A.conservativeResize(count, Eigen::NoChange);
  b.conservativeResize(count);
}

}  // namespace

LpSolution solve_dense_lp(const DenseLp& lp, double tol) {
  LpOptions options;
  options.tol = tol;
  return solve_dense_lp(lp, options);
}

LpSolution solve_dense_lp(const DenseLp& lp, const LpOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  const Eigen::Index n = lp.c.size();
  if (n == 0) throw std::invalid_argument("solve_dense_lp: empty objective");
  if (lp.A.size() > 0 && lp.A.cols() != n)
    throw std::invalid_argument("solve_dense_lp: A has wrong column count");
  if (lp.A.rows() != lp.b.size())
    throw std::invalid_argument("solve_dense_lp: A and b disagree");
  if (lp.lower.size() != 0 && lp.lower.size() != n)
    throw std::invalid_argument("solve_dense_lp: lower has wrong length");
  if (!lp.c.allFinite() || (lp.A.size() > 0 && !lp.A.allFinite()) || !lp.b.allFinite())
    throw std::invalid_argument("solve_dense_lp: non-finite data");

  // Fold variable lower bounds into inequality rows.
  Eigen::Index extra = 0;
  for (Eigen::Index j = 0; j < lp.lower.size(); ++j)
    if (lp.lower(j) > -kInf) ++extra;
  Matrix A(lp.A.rows() + extra, n);
  Vector b(lp.A.rows() + extra);
  A.topRows(lp.A.rows()) = lp.A;
  b.head(lp.A.rows()) = lp.b;
  {
    Eigen::Index row = lp.A.rows();
    for (Eigen::Index j = 0; j < lp.lower.size(); ++j) {
      if (lp.lower(j) <= -kInf) continue;
      A.row(row).setZero();
      A(row, j) = -1.0;
      b(row) = -lp.lower(j);
      ++row;
    }
  }
  dedup_rows(A, b);
  const Eigen::Index m = A.rows();

  LpSolution sol;
  sol.x = Vector::Zero(n);
  auto finish = [&](LpStatus status, const Iterate* it, int iters) {
    if (it) {
      sol.x = it->x;
      sol.report.duality_gap = it->gap;
      sol.report.primal_residual = it->pres;
      sol.report.dual_residual = it->dres;
    }
    sol.report.status = status;
    sol.report.iterations = iters;
    sol.report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return sol;
  };

  if (m == 0) {
    // No constraints at all: bounded only for a zero objective.
    Iterate it;
    it.x = Vector::Zero(n);
    it.gap = it.pres = it.dres = 0.0;
    return finish(lp.c.isZero(0.0) ? LpStatus::optimal : LpStatus::unbounded, &it, 0);
  }

  // Row equilibration.
  Vector row_scale(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    row_scale(i) = std::max(A.row(i).lpNorm<Eigen::Infinity>(), 1e-12);
    A.row(i) /= row_scale(i);
    b(i) /= row_scale(i);
  }

  const double tol = options.tol;
  const double feas_target = std::max(1e-11, 1e-2 * tol);

  Iterate cur;
  cur.x = Vector::Zero(n);
  cur.w = b.cwiseAbs().cwiseMax(1.0);
  cur.y = Vector::Ones(m);
  Iterate best = cur;

  Vector rp(m), rd(n), dinv(m);
  Matrix M(n, n);
  double stall_err = kInf;
  int stall_age = 0;

  for (int iter = 0;; ++iter) {
    rp = b - A * cur.x - cur.w;
    rd = lp.c - A.transpose() * cur.y;
    const double pobj = lp.c.dot(cur.x);
    const double dobj = b.dot(cur.y);
    cur.gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
    cur.pres = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      cur.pres = std::max(cur.pres, std::abs(rp(i)) / (1.0 + std::abs(b(i))));
    cur.dres = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      cur.dres = std::max(cur.dres, std::abs(rd(j)) / (1.0 + std::abs(lp.c(j))));

    if (!cur.x.allFinite() || !cur.w.allFinite() || !cur.y.allFinite())
      return finish(LpStatus::numerical_failure, &best, iter);

    if (cur.err() < best.err()) best = cur;

    const bool at_caller_tol =
        best.gap <= tol && best.pres <= tol && best.dres <= tol;
    const bool tight = best.gap <= tol && best.pres <= feas_target && best.dres <= feas_target;
    if (tight) return finish(LpStatus::optimal, &best, iter);

    // Farkas-style certificates, checked whenever the iterates look divergent
    // or progress has dried up.
    auto infeasibility_certificate = [&]() {
      Vector yh = cur.y / std::max(cur.y.lpNorm<1>(), 1e-300);
      return (A.transpose() * yh).lpNorm<Eigen::Infinity>() <= 1e-8 && b.dot(yh) < -1e-8;
    };
    auto unboundedness_certificate = [&]() {
      const double xn = cur.x.lpNorm<Eigen::Infinity>();
      if (xn < 1e2) return false;
      Vector d = cur.x / xn;
      return (A * d).maxCoeff() <= 1e-8 && lp.c.dot(d) > 1e-8;
    };

    // Progress bookkeeping: declare a stall when nothing improved for a while.
    if (cur.err() < 0.9 * stall_err) {
      stall_err = cur.err();
      stall_age = 0;
    } else if (++stall_age >= 12) {
      if (at_caller_tol) return finish(LpStatus::optimal, &best, iter);
      if (infeasibility_certificate()) return finish(LpStatus::infeasible, &best, iter);
      if (unboundedness_certificate()) return finish(LpStatus::unbounded, &best, iter);
      return finish(LpStatus::numerical_failure, &best, iter);
    }

    if (cur.y.lpNorm<Eigen::Infinity>() > 1e13) {
      if (infeasibility_certificate()) return finish(LpStatus::infeasible, &best, iter);
      return finish(LpStatus::numerical_failure, &best, iter);
    }
    if (cur.x.lpNorm<Eigen::Infinity>() > 1e13) {
      if (unboundedness_certificate()) return finish(LpStatus::unbounded, &best, iter);
      return finish(LpStatus::numerical_failure, &best, iter);
    }

    if (iter >= options.max_iterations) {
      if (at_caller_tol) return finish(LpStatus::optimal, &best, iter);
      if (infeasibility_certificate()) return finish(LpStatus::infeasible, &best, iter);
      if (unboundedness_certificate()) return finish(LpStatus::unbounded, &best, iter);
      return finish(LpStatus::max_iterations, &best, iter);
    }

    const double mu = cur.w.dot(cur.y) / static_cast<double>(m);
    dinv = cur.y.cwiseQuotient(cur.w);  // 1/D with D = w/y

    M.noalias() = A.transpose() * dinv.asDiagonal() * A;
    double reg = 1e-12 * (1.0 + M.trace() / static_cast<double>(n));
    Eigen::LDLT<Matrix> ldlt;
    for (int attempt = 0;; ++attempt) {
      Matrix Mr = M + reg * Matrix::Identity(n, n);
      ldlt.compute(Mr);
      if (ldlt.info() == Eigen::Success) break;
      if (attempt >= 4) return finish(LpStatus::numerical_failure, &best, iter);
      reg *= 1e3;
    }

    // rc is the complementarity target: affine pass uses -WYe, the corrector
    // adds sigma*mu - dW dY e.
    auto solve_newton = [&](const Vector& rc, Vector& dx, Vector& dw, Vector& dy) {
      // M dx = rd + A^T dinv .* (rp - rc ./ y)
      const Vector tmp = rp - rc.cwiseQuotient(cur.y);
      dx = ldlt.solve(rd + A.transpose() * dinv.cwiseProduct(tmp));
      dy = dinv.cwiseProduct(A * dx - tmp);
      dw = (rc - cur.w.cwiseProduct(dy)).cwiseQuotient(cur.y);
    };

    Vector rc = -cur.w.cwiseProduct(cur.y);
    Vector dx(n), dw(m), dy(m);
    solve_newton(rc, dx, dw, dy);
    const double ap_aff = max_step(cur.w, dw, 1.0);
    const double ad_aff = max_step(cur.y, dy, 1.0);
    const double mu_aff = (cur.w + ap_aff * dw).dot(cur.y + ad_aff * dy) / static_cast<double>(m);
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 1e-8, 0.99);

    rc = sigma * mu * Vector::Ones(m) - cur.w.cwiseProduct(cur.y) - dw.cwiseProduct(dy);
    solve_newton(rc, dx, dw, dy);

    const double ap = max_step(cur.w, dw, 0.9995);
    const double ad = max_step(cur.y, dy, 0.9995);
    cur.x += ap * dx;
    cur.w += ap * dw;
    cur.y += ad * dy;
  }
}

}  // namespace salp
