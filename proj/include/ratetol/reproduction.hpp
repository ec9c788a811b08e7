#pragma once

// The built-in 4-symbol coding example: uniform source on {1,2,3,4},
// tolerance |X - Y| <= 1, and squared distortion at D = 1.

#include <optional>
#include <string>
#include <vector>

#include "ratetol/rate_distortion.hpp"
#include "ratetol/rate_tolerance.hpp"

namespace ratetol {

inline constexpr double kCellTolerance = 0.01;

struct TableCell {
  std::string row;     // e.g. "x2"
  std::string column;  // e.g. "Q(B_i)"
  std::optional<double> reference;
  double recomputed;
  bool gated;  // a disagreement fails the reproduction

  bool agrees() const;
};

struct ReproductionGate {
  std::string name;
  bool passed;
  std::string detail;
};

struct ReproductionReport {
  std::vector<TableCell> tolerance_code;
  std::vector<TableCell> distortion_code;

  double tolerance_code_rate_bits = 0.0;
  double tolerance_code_distortion = 0.0;  // E d under the tolerance code

  double distortion_code_slope = -0.45;
  double distortion_code_distortion = 0.0;
  double distortion_code_h_star_bits = 0.0;
  double distortion_code_rate_bits = 0.0;

  EquivalenceReport equivalence;

  // Squared-distortion R at D = 1, from the curve bracket and by bisection.
  double rd_one_interpolated_bits = 0.0;
  double rd_one_bracket_low = 0.0;  // distortions of the bracketing curve points
  double rd_one_bracket_high = 0.0;
  double rd_one_bisected_bits = 0.0;
  double complexity_distortion_one_bits = 0.0;

  std::vector<ReproductionGate> gates;

  bool passed() const;
};

ReproductionReport reproduce_example(const SolverOptions& options = {});

}  // namespace ratetol
