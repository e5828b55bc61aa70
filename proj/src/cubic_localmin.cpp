#include "newton3/cubic_localmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace newton3 {

const char* to_string(LocalMinOutcome o) {
  switch (o) {
    case LocalMinOutcome::LocalMin: return "LocalMin";
    case LocalMinOutcome::SecondOrderPoint: return "SecondOrderPoint";
    case LocalMinOutcome::NoSecondOrderPoint: return "NoSecondOrderPoint";
    case LocalMinOutcome::SolverFailed: return "SolverFailed";
  }
  return "?";
}

SdpProblem build_sdp(const CubicModel& m) {
  const int n = m.n;
  SdpProblem p;
  p.free_dim = n + 1;  // x_0..x_{n-1}, then y

  // Block 0 (affine, size n+1): [[sum_i x_i H_i + Q, t(X, x)], [t^T, y]] with
  // border t_i = Tr(H_i X) + (Q x)_i; X is the top-left of block 1.
  SdpBlock hess_block;
  hess_block.size = n + 1;
  hess_block.affine = true;
  for (int r = 0; r <= n; ++r)
    for (int c = r; c <= n; ++c) {
      LinFun f;
      if (r < n && c < n) {
        f.constant = m.Q(r, c);
        for (int k = 0; k < n; ++k) f.add_free(k, m.H[k](r, c));
      } else if (r < n && c == n) {
        for (int q = 0; q < n; ++q) {
          f.add(1, q, q, m.H[r](q, q));
          for (int s = q + 1; s < n; ++s) f.add(1, q, s, 2.0 * m.H[r](q, s));
        }
        for (int k = 0; k < n; ++k) f.add_free(k, m.Q(r, k));
      } else {
        f.add_free(n, 1.0);
      }
      hess_block.entries.push_back(std::move(f));
    }
  p.blocks.push_back(std::move(hess_block));

  // Block 1 (matrix variable, size n+1): moment matrix [[X, x], [x^T, 1]].
  SdpBlock moment;
  moment.size = n + 1;
  p.blocks.push_back(std::move(moment));

  // Gradient stationarity: 1/2 Tr(H_i X) + e_i^T Q x + b_i = 0.
  for (int i = 0; i < n; ++i) {
    LinFun f;
    for (int q = 0; q < n; ++q) {
      f.add(1, q, q, 0.5 * m.H[i](q, q));
      for (int s = q + 1; s < n; ++s) f.add(1, q, s, m.H[i](q, s));
    }
    for (int k = 0; k < n; ++k) f.add_free(k, m.Q(i, k));
    p.eq_constraints.emplace_back(std::move(f), -m.b[i]);
  }
  // Moment border equals the free x, and the corner is pinned to 1.
  for (int i = 0; i < n; ++i) {
    LinFun f;
    f.add(1, i, n, 1.0);
    f.add_free(i, -1.0);
    p.eq_constraints.emplace_back(std::move(f), 0.0);
  }
  {
    LinFun f;
    f.add(1, n, n, 1.0);
    p.eq_constraints.emplace_back(std::move(f), 1.0);
  }

  // phi = 1/2 Tr(Q X) + b^T x + y/2, nonnegative over the feasible set and
  // zero exactly when a second-order point exists.
  for (int q = 0; q < n; ++q) {
    p.objective.add(1, q, q, 0.5 * m.Q(q, q));
    for (int s = q + 1; s < n; ++s) p.objective.add(1, q, s, m.Q(q, s));
  }
  for (int k = 0; k < n; ++k) p.objective.add_free(k, m.b[k]);
  p.objective.add_free(n, 0.5);
  return p;
}

LocalMinResult find_local_min(const CubicModel& m, const LocalMinConfig& cfg) {
  // Condition the model before forming the certificate program. Substituting
  // d = s*e pulls distant minimizers toward unit scale (the substitution is a
  // congruence of both program blocks, so the certificate value is unchanged);
  // dividing by w then normalizes the coefficient magnitudes, which scales the
  // certificate value by 1/w. The feasibility threshold is applied to the
  // conditioned program, whose value is the scale-free one.
  double hn = 0.0;
  for (const dmat& Hi : m.H) hn = std::max(hn, Hi.norm());
  const double qn = m.Q.norm(), bn = m.b.norm();
  // Radius estimate for stationary points, from 1/2|H|d^2 ~ max(|Q|d, |b|),
  // padded upward: too large an s just drifts the model toward a pure cubic.
  double s = 1.0;
  if (hn > 0.0)
    s = std::clamp(
        2.0 * std::max(2.0 * qn / hn, std::sqrt(2.0 * bn / hn)), 1.0, 1e3);
  else if (qn > 0.0 || bn > 0.0)
    s = 1e3;
  CubicModel ms = m;
  for (dmat& Hi : ms.H) Hi *= s * s * s;
  ms.Q *= s * s;
  ms.b *= s;
  const double w = std::max({1.0, hn * s * s * s, qn * s * s, bn * s});
  for (dmat& Hi : ms.H) Hi /= w;
  ms.Q /= w;
  ms.b /= w;
  ms.c /= w;

  const SdpProblem prob = build_sdp(ms);
  const SdpSolution sol = solve(prob, cfg.solver);

  LocalMinResult r;
  r.solver_status = sol.status;
  r.phi_value = sol.objective_value;

  if (sol.status != SdpStatus::Optimal) {
    if (sol.max_eq_residual > 100.0 * cfg.solver.feas_tol) {
      // No certificate point could be approached at all: the equalities plus
      // cone constraints admit no solution, so no second-order point exists.
      r.outcome = LocalMinOutcome::NoSecondOrderPoint;
      r.phi_value = std::numeric_limits<double>::infinity();
    } else {
      r.outcome = LocalMinOutcome::SolverFailed;
    }
    return r;
  }

  if (r.phi_value > cfg.phi_tol) {
    r.outcome = LocalMinOutcome::NoSecondOrderPoint;
    return r;
  }

  dvec d = s * sol.primal.free_vars.head(m.n);
  if (cfg.polish) {
    // A few plain Newton steps sharpen the extracted point; accept each step
    // only while the gradient norm decreases.
    for (int step = 0; step < 3; ++step) {
      const dvec g = gradient(m, d);
      const dmat h = hessian(m, d);
      const dvec dn = d - h.fullPivLu().solve(g);
      if (!dn.allFinite()) break;
      if (gradient(m, dn).norm() >= g.norm()) break;
      d = dn;
    }
  }

  const dvec g = gradient(m, d);
  Eigen::SelfAdjointEigenSolver<dmat> es(hessian(m, d), Eigen::EigenvaluesOnly);
  r.point = d;
  r.grad_norm_at_point = g.norm();
  r.hess_min_eig_at_point = es.eigenvalues().minCoeff();

  if (r.grad_norm_at_point <= cfg.grad_tol &&
      r.hess_min_eig_at_point >= cfg.psd_tol) {
    r.outcome = LocalMinOutcome::LocalMin;
  } else if (r.grad_norm_at_point <= cfg.grad_tol &&
             r.hess_min_eig_at_point >= -cfg.psd_tol) {
    r.outcome = LocalMinOutcome::SecondOrderPoint;
  } else {
    // The certificate value vanished but the extracted point failed the
    // direct checks: report a failure rather than a spurious conclusion.
    r.outcome = LocalMinOutcome::SolverFailed;
  }
  return r;
}

LocalMinResult find_local_min_with_shift(const CubicModel& m,
                                         const std::vector<double>& shifts,
                                         const LocalMinConfig& cfg) {
  if (shifts.empty() || shifts.front() != 0.0)
    throw std::invalid_argument("shift ladder must start at 0");
  LocalMinResult base;
  for (size_t i = 0; i < shifts.size(); ++i) {
    CubicModel ms = m;
    ms.Q += shifts[i] * dmat::Identity(m.n, m.n);
    LocalMinResult r = find_local_min(ms, cfg);
    r.shift_used = shifts[i];
    if (r.outcome == LocalMinOutcome::LocalMin ||
        r.outcome == LocalMinOutcome::SecondOrderPoint)
      return r;
    if (i == 0) base = r;
  }
  return base;
}

}  // namespace newton3
