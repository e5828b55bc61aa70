#include "newton3/objectives.hpp"

#include <cmath>

namespace newton3 {
namespace {

constexpr double kPi = 3.14159265358979323846;

dvec pt(double x, double y) {
  dvec v(2);
  v << x, y;
  return v;
}

}  // namespace

std::vector<CriticalPoint> Objective::minima() const {
  std::vector<CriticalPoint> out;
  for (const CriticalPoint& p : critical_points)
    if (p.kind != CriticalPointKind::Saddle) out.push_back(p);
  return out;
}

Objective bohachevsky() {
  Objective f;
  f.name = "bohachevsky";
  f.dim = 2;
  f.window = {-2.0, 2.0, -2.0, 2.0};
  f.value = [](const dvec& v) {
    const double x = v[0], y = v[1];
    return x * x + 2.0 * y * y - 0.3 * std::cos(3.0 * kPi * x) -
           0.4 * std::cos(4.0 * kPi * y) + 0.7;
  };
  f.grad = [](const dvec& v) {
    const double x = v[0], y = v[1];
    return pt(2.0 * x + 0.9 * kPi * std::sin(3.0 * kPi * x),
              4.0 * y + 1.6 * kPi * std::sin(4.0 * kPi * y));
  };
  f.hess = [](const dvec& v) {
    const double x = v[0], y = v[1];
    dmat h = dmat::Zero(2, 2);
    h(0, 0) = 2.0 + 2.7 * kPi * kPi * std::cos(3.0 * kPi * x);
    h(1, 1) = 4.0 + 6.4 * kPi * kPi * std::cos(4.0 * kPi * y);
    return h;
  };
  f.tensor = [](const dvec& v) {
    const double x = v[0], y = v[1];
    std::vector<dmat> t(2, dmat::Zero(2, 2));
    t[0](0, 0) = -8.1 * kPi * kPi * kPi * std::sin(3.0 * kPi * x);
    t[1](1, 1) = -25.6 * kPi * kPi * kPi * std::sin(4.0 * kPi * y);
    return t;
  };
  f.critical_points = {{pt(0.0, 0.0), CriticalPointKind::GlobalMin}};
  return f;
}

Objective mccormick() {
  Objective f;
  f.name = "mccormick";
  f.dim = 2;
  f.window = {-1.5, 4.0, -3.0, 4.0};
  f.value = [](const dvec& v) {
    const double x = v[0], y = v[1];
    const double d = x - y;
    return std::sin(x + y) + d * d - 1.5 * x + 2.5 * y + 1.0;
  };
  f.grad = [](const dvec& v) {
    const double x = v[0], y = v[1];
    const double c = std::cos(x + y);
    return pt(c + 2.0 * (x - y) - 1.5, c - 2.0 * (x - y) + 2.5);
  };
  f.hess = [](const dvec& v) {
    const double s = std::sin(v[0] + v[1]);
    dmat h(2, 2);
    h << -s + 2.0, -s - 2.0, -s - 2.0, -s + 2.0;
    return h;
  };
  f.tensor = [](const dvec& v) {
    const double c = std::cos(v[0] + v[1]);
    dmat slice = dmat::Constant(2, 2, -c);
    return std::vector<dmat>{slice, slice};
  };
  f.critical_points = {
      {pt(0.5 - kPi / 3.0, -0.5 - kPi / 3.0), CriticalPointKind::GlobalMin}};
  return f;
}

namespace {

// Shared pieces of the three-residual product objective: r_i = k_i - x + x y^i.
struct BealeTerms {
  double r[3], rx[3], ry[3], rxy[3], ryy[3], rxyy[3], ryyy[3];
};

BealeTerms beale_terms(double x, double y) {
  static const double k[3] = {1.5, 2.25, 2.625};
  BealeTerms t{};
  for (int i = 1; i <= 3; ++i) {
    const int j = i - 1;
    const double yi = std::pow(y, i);
    t.r[j] = k[j] - x + x * yi;
    t.rx[j] = yi - 1.0;
    t.ry[j] = i * x * std::pow(y, i - 1);
    t.rxy[j] = i * std::pow(y, i - 1);
    t.ryy[j] = i >= 2 ? i * (i - 1) * x * std::pow(y, i - 2) : 0.0;
    t.rxyy[j] = i >= 2 ? i * (i - 1) * std::pow(y, i - 2) : 0.0;
    t.ryyy[j] = i == 3 ? 6.0 * x : 0.0;
  }
  return t;
}

}  // namespace

Objective beale() {
  Objective f;
  f.name = "beale";
  f.dim = 2;
  f.window = {-4.0, 4.0, -4.0, 4.0};
  f.value = [](const dvec& v) {
    const BealeTerms t = beale_terms(v[0], v[1]);
    return t.r[0] * t.r[0] + t.r[1] * t.r[1] + t.r[2] * t.r[2];
  };
  f.grad = [](const dvec& v) {
    const BealeTerms t = beale_terms(v[0], v[1]);
    dvec g = dvec::Zero(2);
    for (int j = 0; j < 3; ++j) {
      g[0] += 2.0 * t.r[j] * t.rx[j];
      g[1] += 2.0 * t.r[j] * t.ry[j];
    }
    return g;
  };
  f.hess = [](const dvec& v) {
    const BealeTerms t = beale_terms(v[0], v[1]);
    dmat h = dmat::Zero(2, 2);
    for (int j = 0; j < 3; ++j) {
      h(0, 0) += 2.0 * t.rx[j] * t.rx[j];
      h(0, 1) += 2.0 * (t.rx[j] * t.ry[j] + t.r[j] * t.rxy[j]);
      h(1, 1) += 2.0 * (t.ry[j] * t.ry[j] + t.r[j] * t.ryy[j]);
    }
    h(1, 0) = h(0, 1);
    return h;
  };
  f.tensor = [](const dvec& v) {
    const BealeTerms t = beale_terms(v[0], v[1]);
    std::vector<dmat> T(2, dmat::Zero(2, 2));
    for (int j = 0; j < 3; ++j) {
      const double d1[2] = {t.rx[j], t.ry[j]};
      const double d2[2][2] = {{0.0, t.rxy[j]}, {t.rxy[j], t.ryy[j]}};
      double d3[2][2][2] = {};
      d3[0][1][1] = d3[1][0][1] = d3[1][1][0] = t.rxyy[j];
      d3[1][1][1] = t.ryyy[j];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            T[a](b, c) += 2.0 * (t.r[j] * d3[a][b][c] + d1[a] * d2[b][c] +
                                 d1[b] * d2[a][c] + d1[c] * d2[a][b]);
    }
    return T;
  };
  f.critical_points = {{pt(3.0, 0.5), CriticalPointKind::GlobalMin},
                       {pt(0.0, 1.0), CriticalPointKind::Saddle}};
  return f;
}

Objective himmelblau() {
  Objective f;
  f.name = "himmelblau";
  f.dim = 2;
  f.window = {-6.0, 6.0, -6.0, 6.0};
  f.value = [](const dvec& v) {
    const double x = v[0], y = v[1];
    const double r1 = x * x + y - 11.0, r2 = x + y * y - 7.0;
    return r1 * r1 + r2 * r2;
  };
  f.grad = [](const dvec& v) {
    const double x = v[0], y = v[1];
    const double r1 = x * x + y - 11.0, r2 = x + y * y - 7.0;
    return pt(4.0 * x * r1 + 2.0 * r2, 2.0 * r1 + 4.0 * y * r2);
  };
  f.hess = [](const dvec& v) {
    const double x = v[0], y = v[1];
    const double r1 = x * x + y - 11.0, r2 = x + y * y - 7.0;
    dmat h(2, 2);
    h << 8.0 * x * x + 4.0 * r1 + 2.0, 4.0 * (x + y), 4.0 * (x + y),
        8.0 * y * y + 4.0 * r2 + 2.0;
    return h;
  };
  f.tensor = [](const dvec& v) {
    std::vector<dmat> T(2, dmat::Constant(2, 2, 4.0));
    T[0](0, 0) = 24.0 * v[0];
    T[1](1, 1) = 24.0 * v[1];
    return T;
  };
  // All four minima attain the same value; the first is the designated one.
  f.critical_points = {
      {pt(3.0, 2.0), CriticalPointKind::GlobalMin},
      {pt(-2.805118086952745, 3.131312518250573), CriticalPointKind::GlobalMin},
      {pt(-3.779310253377747, -3.283185991286170), CriticalPointKind::GlobalMin},
      {pt(3.584428340330492, -1.848126526964403), CriticalPointKind::GlobalMin}};
  return f;
}

Objective quadratic_bowl() {
  Objective f;
  f.name = "quadratic";
  f.dim = 2;
  f.window = {-1.0, 1.0, -1.0, 1.0};
  f.value = [](const dvec& v) { return 0.5 * v.squaredNorm(); };
  f.grad = [](const dvec& v) { return dvec(v); };
  f.hess = [](const dvec& v) { return dmat(dmat::Identity(v.size(), v.size())); };
  f.tensor = [](const dvec& v) {
    return std::vector<dmat>(v.size(), dmat::Zero(v.size(), v.size()));
  };
  f.critical_points = {{pt(0.0, 0.0), CriticalPointKind::GlobalMin}};
  return f;
}

Objective finite_difference_objective(std::function<double(const dvec&)> value_fn,
                                      int dimension, FdSteps steps) {
  Objective f;
  f.name = "fd";
  f.dim = dimension;
  f.value = value_fn;
  const auto grad_fd = [value_fn, h = steps.grad](const dvec& x) {
    dvec g(x.size());
    for (int i = 0; i < x.size(); ++i) {
      dvec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (value_fn(xp) - value_fn(xm)) / (2.0 * h);
    }
    return g;
  };
  f.grad = grad_fd;
  const auto hess_fd = [grad_fd, h = steps.hess](const dvec& x) {
    dmat out(x.size(), x.size());
    for (int i = 0; i < x.size(); ++i) {
      dvec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      out.col(i) = (grad_fd(xp) - grad_fd(xm)) / (2.0 * h);
    }
    return out;
  };
  f.hess = hess_fd;
  f.tensor = [hess_fd, h = steps.tensor](const dvec& x) {
    std::vector<dmat> T;
    for (int i = 0; i < x.size(); ++i) {
      dvec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      T.push_back((hess_fd(xp) - hess_fd(xm)) / (2.0 * h));
    }
    return T;
  };
  return f;
}

std::optional<Objective> find_objective(const std::string& name) {
  if (name == "bohachevsky") return bohachevsky();
  if (name == "mccormick") return mccormick();
  if (name == "beale") return beale();
  if (name == "himmelblau") return himmelblau();
  if (name == "quadratic") return quadratic_bowl();
  return std::nullopt;
}

std::vector<std::string> objective_names() {
  return {"bohachevsky", "mccormick", "beale", "himmelblau", "quadratic"};
}

}  // namespace newton3
