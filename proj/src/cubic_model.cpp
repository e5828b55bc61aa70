#include "newton3/cubic_model.hpp"

#include <cmath>
#include <stdexcept>

#include "newton3/objectives.hpp"

namespace newton3 {

CubicModel make_cubic_model(std::vector<dmat> H, dmat Q, dvec b, double c,
                            dvec center) {
  const int n = static_cast<int>(b.size());
  if (n <= 0) throw std::invalid_argument("cubic model: empty b");
  if (static_cast<int>(H.size()) != n)
    throw std::invalid_argument("cubic model: tensor slice count != n");
  if (Q.rows() != n || Q.cols() != n)
    throw std::invalid_argument("cubic model: Q dimension mismatch");
  for (const dmat& Hi : H)
    if (Hi.rows() != n || Hi.cols() != n)
      throw std::invalid_argument("cubic model: slice dimension mismatch");
  if (center.size() == 0) center = dvec::Zero(n);
  if (center.size() != n)
    throw std::invalid_argument("cubic model: center dimension mismatch");

  double scale = 1.0;
  for (const dmat& Hi : H) scale = std::max(scale, Hi.cwiseAbs().maxCoeff());
  scale = std::max(scale, Q.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("cubic model: Q not symmetric");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double v = H[i](j, k);
        if (std::abs(v - H[j](i, k)) > tol || std::abs(v - H[k](j, i)) > tol)
          throw std::invalid_argument("cubic model: tensor not symmetric");
      }

  CubicModel m;
  m.n = n;
  m.H = std::move(H);
  m.Q = std::move(Q);
  m.b = std::move(b);
  m.c = c;
  m.center = std::move(center);
  return m;
}

dvec tensor_apply(const std::vector<dmat>& H, const dvec& x, const dvec& y) {
  dvec out = dvec::Zero(y.size());
  for (int i = 0; i < static_cast<int>(H.size()); ++i) out += x[i] * (H[i] * y);
  return out;
}

double eval(const CubicModel& m, const dvec& d) {
  const dvec t = tensor_apply(m.H, d, d);
  return d.dot(t) / 6.0 + 0.5 * d.dot(m.Q * d) + m.b.dot(d) + m.c;
}

dvec gradient(const CubicModel& m, const dvec& d) {
  return 0.5 * tensor_apply(m.H, d, d) + m.Q * d + m.b;
}

dmat hessian(const CubicModel& m, const dvec& d) {
  dmat h = m.Q;
  for (int i = 0; i < m.n; ++i) h += d[i] * m.H[i];
  return h;
}

CubicModel taylor3(const Objective& f, const dvec& x) {
  return make_cubic_model(f.tensor(x), f.hess(x), f.grad(x), f.value(x), x);
}

std::optional<double> univariate_local_min(const UnivariateCubic& u) {
  if (u.a == 0.0) {
    if (u.b > 0.0) return -u.c / (2.0 * u.b);
    return std::nullopt;
  }
  const double disc = u.b * u.b - 3.0 * u.a * u.c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  // Equivalent branches of the quadratic formula for p'; pick the one whose
  // denominator cannot cancel.
  if (u.b > 0.0) return -u.c / (u.b + root);
  return (-u.b + root) / (3.0 * u.a);
}

}  // namespace newton3
