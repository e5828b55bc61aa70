#pragma once

#include <array>
#include <string>
#include <vector>

#include "newton3/optimize.hpp"

namespace newton3 {

enum class FractalOptimizerKind {
  SecondOrder,      // classic Newton per pixel
  ThirdOrder,       // third-order step, no shift ladder
  ThirdOrderShift,  // third-order step with ladder {0, shift}
};

struct FractalSpec {
  Objective objective;
  FractalOptimizerKind kind = FractalOptimizerKind::ThirdOrder;
  double shift = 0.0;  // ThirdOrderShift only
  Window window;       // region covered by the image
  int width = 400;
  int height = 400;
  double match_radius = 1e-2;  // limit-to-catalogue matching distance
  int threads = 0;             // 0 = hardware concurrency
  OptimizerConfig run_cfg = [] {
    OptimizerConfig c;
    c.max_iters = 50;
    return c;
  }();
};

struct CatalogueEntry {
  dvec point;
  bool named = false;  // seeded from the objective's known minima
};

// Basin labels, row-major with row 0 at the window top. Label -1 marks a
// pixel whose run did not converge; labels >= 0 index the catalogue.
struct FractalImage {
  int width = 0, height = 0;
  Window window;
  std::vector<int> labels;
  std::vector<CatalogueEntry> catalogue;

  int label_at(int row, int col) const { return labels[row * width + col]; }
};

// Runs the per-pixel optimizer from every pixel center. The catalogue starts
// from the objective's named minima (designated global minimum = label 0);
// unmatched limits are assigned new labels in row-major order, so repeated
// renders of the same spec are identical regardless of thread count.
FractalImage render(const FractalSpec& spec);

// 8-bit binary PPM (P6). Label -1 is white, label 0 black, labels >= 1 cycle
// through the remaining seven palette colors.
bool write_ppm(const FractalImage& img, const std::string& path);

// Label grid as CSV rows (top row first), then one '#'-prefixed line per
// catalogue entry: "# label,x,y,named|discovered".
bool write_csv(const FractalImage& img, const std::string& path);

std::array<unsigned char, 3> label_color(int label);

// Translates the window by whole pixel strides until it contains p, keeping
// the pixel lattice fixed. Lets a render be centered on any start point while
// pixel centers stay comparable across windows.
Window contain_point(Window w, const dvec& p, int width, int height);

// Center of the pixel whose cell contains p (clamped to the image edge).
dvec pixel_center(const Window& w, const dvec& p, int width, int height);

}  // namespace newton3
