#include "newton3/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace newton3 {
namespace {

void append(OptimizerTrace& t, const Objective& f, const dvec& x,
            std::string ann) {
  t.iterates.push_back(x);
  t.f_values.push_back(f.value(x));
  t.grad_norms.push_back(f.grad(x).norm());
  t.annotations.push_back(std::move(ann));
}

// Shared outer loop: the convergence test runs at the top on the newest
// iterate, so a run that starts at a stationary point reports 0 iterations.
// step(x, k) either appends the next iterate (returning true) or reports a
// failed step via `failure`.
template <typename StepFn>
OptimizerTrace drive(const Objective& f, const dvec& x0,
                     const OptimizerConfig& cfg, StepFn step) {
  OptimizerTrace t;
  append(t, f, x0, "");
  for (int k = 0;; ++k) {
    if (t.grad_norms.back() <= cfg.grad_eps) {
      t.termination = Termination::Converged;
      break;
    }
    if (k == cfg.max_iters) {
      t.termination = Termination::MaxIterations;
      break;
    }
    Termination failure = Termination::StepFailed;
    if (!step(t, k, failure)) {
      t.termination = failure;
      break;
    }
    if (t.iterates.back().norm() > cfg.divergence_norm) {
      t.termination = Termination::MaxIterations;
      break;
    }
  }
  return t;
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::StepFailed: return "StepFailed";
  }
  return "?";
}

OptimizerTrace third_order_newton(const Objective& f, const dvec& x0,
                                  const OptimizerConfig& cfg) {
  return drive(f, x0, cfg, [&](OptimizerTrace& t, int, Termination&) {
    const dvec& x = t.iterates.back();
    const CubicModel model = taylor3(f, x);
    const LocalMinResult res =
        find_local_min_with_shift(model, cfg.shifts, cfg.localmin);
    const bool usable =
        res.outcome == LocalMinOutcome::LocalMin ||
        (res.outcome == LocalMinOutcome::SecondOrderPoint &&
         cfg.accept_second_order);
    if (!usable) return false;
    char ann[64];
    std::snprintf(ann, sizeof ann, "shift=%g%s", res.shift_used,
                  res.outcome == LocalMinOutcome::SecondOrderPoint
                      ? ";second-order"
                      : "");
    append(t, f, x + res.point, ann);
    return true;
  });
}

OptimizerTrace second_order_newton(const Objective& f, const dvec& x0,
                                   const OptimizerConfig& cfg) {
  return drive(f, x0, cfg, [&](OptimizerTrace& t, int, Termination&) {
    const dvec& x = t.iterates.back();
    const dmat h = f.hess(x);
    Eigen::SelfAdjointEigenSolver<dmat> es(h);
    const dvec abs_eigs = es.eigenvalues().cwiseAbs();
    const double lo = abs_eigs.minCoeff(), hi = abs_eigs.maxCoeff();
    if (lo == 0.0 || hi / lo > 1e14) return false;
    const dvec g = f.grad(x);
    const dvec step = es.eigenvectors() *
                      (es.eigenvectors().transpose() * g).cwiseQuotient(
                          es.eigenvalues());
    append(t, f, x - step, "");
    return true;
  });
}

OptimizerTrace gradient_descent_fixed(const Objective& f, const dvec& x0,
                                      const OptimizerConfig& cfg) {
  return drive(f, x0, cfg, [&](OptimizerTrace& t, int, Termination&) {
    const dvec& x = t.iterates.back();
    append(t, f, x - cfg.step_size * f.grad(x), "");
    return true;
  });
}

OptimizerTrace gradient_descent_qfit(const Objective& f, const dvec& x0,
                                     const OptimizerConfig& cfg) {
  double s = 1.0;  // bracket scale, carried across iterations
  return drive(f, x0, cfg, [&, s](OptimizerTrace& t, int,
                                  Termination& failure) mutable {
    const dvec x = t.iterates.back();
    const double f0 = t.f_values.back();
    const dvec g = f.grad(x);
    const dvec d = -g;
    const double gg = g.squaredNorm();
    for (int halvings = 0; halvings < 200; ++halvings) {
      const double f1 = f.value(x + s * d);
      const double f2 = f.value(x + 2.0 * s * d);
      const double curv = f0 - 2.0 * f1 + f2;
      double alpha = std::numeric_limits<double>::quiet_NaN();
      if (curv > 0.0) {
        const double av = s * (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * curv);
        if (std::isfinite(av) && av > 0.0 && av <= 2.0 * s) alpha = av;
      }
      double fcand;
      if (std::isnan(alpha)) {  // vertex unusable: best bracket endpoint
        alpha = (f1 <= f2) ? s : 2.0 * s;
        fcand = std::min(f1, f2);
      } else {
        fcand = f.value(x + alpha * d);
      }
      if (fcand < f0 - 1e-4 * alpha * gg) {
        char ann[48];
        std::snprintf(ann, sizeof ann, "alpha=%g", alpha);
        append(t, f, x + alpha * d, ann);
        if (alpha >= 2.0 * s * 0.999) s *= 2.0;
        return true;
      }
      s *= 0.5;
      if (s < 1e-17) break;
    }
    failure = Termination::MaxIterations;  // no acceptable step this small
    return false;
  });
}

bool write_trace_csv(const OptimizerTrace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) return false;
  const int n = t.iterates.empty() ? 0 : static_cast<int>(t.iterates[0].size());
  out << "iter";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  out << ",f,grad_norm,annotation\n";
  char buf[64];
  for (size_t k = 0; k < t.iterates.size(); ++k) {
    out << k;
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, ",%.17g", t.iterates[k][i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,", t.f_values[k],
                  t.grad_norms[k]);
    out << buf << t.annotations[k] << "\n";
  }
  return out.good();
}

std::vector<std::pair<double, double>> convergence_log_pairs(
    const OptimizerTrace& t, const dvec& xstar) {
  std::vector<std::pair<double, double>> pairs;
  for (size_t k = 0; k + 1 < t.iterates.size(); ++k) {
    const double d0 = (t.iterates[k] - xstar).norm();
    const double d1 = (t.iterates[k + 1] - xstar).norm();
    if (d0 >= 1e-11 && d0 <= 1e-2 && d1 > 1e-13)
      pairs.emplace_back(std::log(d0), std::log(d1));
  }
  return pairs;
}

double estimate_convergence_order(const OptimizerTrace& t, const dvec& xstar) {
  if (t.termination != Termination::Converged)
    throw std::invalid_argument("order estimate requires a converged trace");
  std::set<double> distinct;
  for (const dvec& x : t.iterates) {
    const double d = (x - xstar).norm();
    if (d > 1e-13) distinct.insert(d);
  }
  if (distinct.size() < 4)
    throw std::invalid_argument("order estimate requires 4 distinct distances");
  const auto pairs = convergence_log_pairs(t, xstar);
  if (pairs.empty())
    throw std::invalid_argument("order estimate: no usable iterate pairs");
  double num = 0.0, den = 0.0;
  for (const auto& [u, v] : pairs) {
    num += u * v;
    den += u * u;
  }
  return num / den;
}

}  // namespace newton3
