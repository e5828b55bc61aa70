#pragma once

#include <string>
#include <utility>
#include <vector>

#include "newton3/cubic_localmin.hpp"
#include "newton3/objectives.hpp"

namespace newton3 {

enum class Termination { Converged, MaxIterations, StepFailed };
const char* to_string(Termination t);

struct OptimizerConfig {
  double grad_eps = 1e-6;   // convergence: ||grad f(x_k)|| <= grad_eps
  int max_iters = 100;
  double step_size = 0.01;  // fixed-step gradient descent only
  std::vector<double> shifts = {0.0, 5.0, 10.0};  // third-order ladder
  bool accept_second_order = true;  // take flat-direction model minimizers
  double divergence_norm = 1e8;     // iterate norm treated as divergence
  LocalMinConfig localmin;
};

struct OptimizerTrace {
  std::vector<dvec> iterates;     // x_0 .. x_K
  std::vector<double> f_values;   // f at each iterate
  std::vector<double> grad_norms; // ||grad f|| at each iterate
  std::vector<std::string> annotations;  // [k] describes the step into x_k
  Termination termination = Termination::MaxIterations;

  int iterations() const { return static_cast<int>(iterates.size()) - 1; }
};

// Minimizes the degree-3 Taylor model at each iterate via the certificate
// program, walking the shift ladder when the unshifted model has no
// second-order point.
OptimizerTrace third_order_newton(const Objective& f, const dvec& x0,
                                  const OptimizerConfig& cfg = {});

// Classic Newton iteration; fails the step when the Hessian eigenvalue ratio
// exceeds 1e14.
OptimizerTrace second_order_newton(const Objective& f, const dvec& x0,
                                   const OptimizerConfig& cfg = {});

// x <- x - step_size * grad f(x).
OptimizerTrace gradient_descent_fixed(const Objective& f, const dvec& x0,
                                      const OptimizerConfig& cfg = {});

// Line-search descent fitting a quadratic through f(x), f(x+sd), f(x+2sd)
// along d = -grad f(x), with an adaptive bracket scale and a sufficient-
// decrease acceptance test.
OptimizerTrace gradient_descent_qfit(const Objective& f, const dvec& x0,
                                     const OptimizerConfig& cfg = {});

// Columns: iter, x1..xn, f, grad_norm, annotation.
bool write_trace_csv(const OptimizerTrace& t, const std::string& path);

// (log d_k, log d_{k+1}) for iterates whose distances to xstar fall in the
// usable window: d_k in [1e-11, 1e-2] and d_{k+1} > 1e-13.
std::vector<std::pair<double, double>> convergence_log_pairs(
    const OptimizerTrace& t, const dvec& xstar);

// Through-origin least-squares slope of the log-distance recursion; requires
// a converged trace with at least four distinct distances above 1e-13 and at
// least one usable pair (throws std::invalid_argument otherwise).
double estimate_convergence_order(const OptimizerTrace& t, const dvec& xstar);

}  // namespace newton3
