#pragma once

#include <optional>
#include <vector>

#include "newton3/linalg.hpp"

namespace newton3 {

struct Objective;  // objectives.hpp

// Multivariate cubic polynomial in centered coordinates d = x - center:
//
//   p(d) = 1/6 * sum_i d_i * d^T H_i d  +  1/2 * d^T Q d  +  b^T d  +  c
//
// The slices H_i form a fully symmetric third-derivative tensor:
// (H_i)_jk == (H_j)_ik == (H_k)_ij for all index triples.
struct CubicModel {
  int n = 0;
  std::vector<dmat> H;  // n slices, each n x n
  dmat Q;
  dvec b;
  double c = 0.0;
  dvec center;  // expansion point; models built directly sit at the origin
};

// Validates dimensions and full tensor symmetry (throws std::invalid_argument
// on violation). Tolerance scales with the largest tensor entry so analytic
// and finite-difference inputs are both accepted.
CubicModel make_cubic_model(std::vector<dmat> H, dmat Q, dvec b, double c,
                            dvec center = dvec());

// Evaluate p and its derivatives at centered coordinates d.
double eval(const CubicModel& m, const dvec& d);
dvec gradient(const CubicModel& m, const dvec& d);   // 1/2 sum_i d_i H_i d + Q d + b
dmat hessian(const CubicModel& m, const dvec& d);    // sum_i d_i H_i + Q

// sum_i x_i H_i y; by tensor symmetry this equals the stacked vector with
// entries x^T H_i y, and is symmetric in (x, y).
dvec tensor_apply(const std::vector<dmat>& H, const dvec& x, const dvec& y);

// Degree-3 Taylor expansion of f about x: slices/Q/b/c are the tensor,
// Hessian, gradient and value of f at x, and center = x.
CubicModel taylor3(const Objective& f, const dvec& x);

// a*t^3 + b*t^2 + c*t + d
struct UnivariateCubic {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

// Location of the local minimizer when one exists. A true cubic (a != 0) has
// one iff b^2 - 3ac >= 0; the quadratic limit a == 0 has one iff b > 0. Uses
// the root branch that avoids cancellation for either sign of b.
std::optional<double> univariate_local_min(const UnivariateCubic& u);

}  // namespace newton3
