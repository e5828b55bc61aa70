#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "newton3/linalg.hpp"

namespace newton3 {

enum class CriticalPointKind { GlobalMin, LocalMin, Saddle };

struct CriticalPoint {
  dvec x;
  CriticalPointKind kind = CriticalPointKind::LocalMin;
};

// Axis-aligned plotting / sampling window.
struct Window {
  double xlo = -1.0, xhi = 1.0, ylo = -1.0, yhi = 1.0;
};

// A smooth objective with derivative evaluators up to third order and a
// catalogue of known critical points (the designated global minimum first).
struct Objective {
  std::string name;
  int dim = 0;
  std::function<double(const dvec&)> value;
  std::function<dvec(const dvec&)> grad;
  std::function<dmat(const dvec&)> hess;
  std::function<std::vector<dmat>(const dvec&)> tensor;
  std::vector<CriticalPoint> critical_points;
  Window window;

  // Catalogue minima in order (global first), saddles filtered out.
  std::vector<CriticalPoint> minima() const;
};

Objective bohachevsky();   // x^2 + 2y^2 - 0.3 cos(3 pi x) - 0.4 cos(4 pi y) + 0.7
Objective mccormick();     // sin(x+y) + (x-y)^2 - 1.5x + 2.5y + 1
Objective beale();         // sum of three product residuals, min at (3, 0.5)
Objective himmelblau();    // (x^2+y-11)^2 + (x+y^2-7)^2, four global minima
Objective quadratic_bowl();// 1/2 (x^2 + y^2); trivial objective for smoke tests

struct FdSteps {
  double grad = 1e-5;
  double hess = 1e-4;
  double tensor = 1e-3;
};

// Wraps a raw value function with central-difference derivatives; each order
// differentiates the one below it with its own step.
Objective finite_difference_objective(std::function<double(const dvec&)> value_fn,
                                      int dimension, FdSteps steps = {});

// Name registry used by the CLI ("bohachevsky", "mccormick", "beale",
// "himmelblau", "quadratic").
std::optional<Objective> find_objective(const std::string& name);
std::vector<std::string> objective_names();

}  // namespace newton3
