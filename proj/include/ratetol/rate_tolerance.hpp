#pragma once

// Tolerance covers, the generalized entropy H*(X) = -sum_i P(x_i) log2 Q(B_i)
// with Q(B_i) = sum_j q_j c_ij, rate tolerance R(T), complexity distortion
// C(Dc), the structure function, and a checker for the equalities
// R(T) = R(D=0) = C(Dc) on ball covers.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ratetol/info_core.hpp"
#include "ratetol/rate_distortion.hpp"

namespace ratetol {

// A similarity cover in which every source symbol has at least one fully
// admissible output (some c_ij == 1).
class ToleranceCover {
 public:
  ToleranceCover() = default;
  // radius marks a cover built from uniform-radius balls.
  explicit ToleranceCover(SimilarityCover cover, std::optional<double> radius = std::nullopt);

  const SimilarityCover& cover() const noexcept { return cover_; }
  bool clear() const noexcept { return clear_; }
  std::optional<double> ball_radius() const noexcept { return radius_; }
  std::size_t rows() const noexcept { return cover_.rows(); }
  std::size_t cols() const noexcept { return cover_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return cover_(i, j); }

 private:
  SimilarityCover cover_;
  bool clear_ = true;
  std::optional<double> radius_;
};

struct ToleranceSolution {
  Distribution q;
  double rate_bits = 0.0;
  double h_star_bits = 0.0;
  Channel channel;  // P(y_j|x_i) = q_j c_ij / Q(B_i)
  std::size_t iterations = 0;
};

struct EquivalenceCheck {
  std::string name;
  double delta;
  double threshold;
  bool passed;
};

// Extra inputs for comparing against uniform-radius balls on coordinates.
struct BallComparison {
  Alphabet source_alphabet;
  Alphabet destination_alphabet;
  double dc;  // squared radius
};

struct EquivalenceReport {
  double rate_tolerance_bits = 0.0;
  double rate_distortion_at_zero_bits = 0.0;
  double zero_limit_slope = 0.0;  // s at which D(s) fell below 1e-9
  std::optional<double> complexity_distortion_bits;
  double delta_rt_rd0 = 0.0;
  std::optional<double> delta_rt_cdc;
  // R at average squared distortion Dc, and C(Dc) - R(Dc).
  std::optional<double> squared_rate_at_dc_bits;
  std::optional<double> squared_gap_bits;
  std::vector<EquivalenceCheck> checks;

  bool all_passed() const;
};

// c_ij = 1 iff |a_i - b_j| <= radius. Throws EmptyBallError for an empty row.
ToleranceCover clear_cover_from_threshold(const Alphabet& a, const Alphabet& b, double radius);

// Clear covers: ch_ij = 0 wherever c_ij = 0. Fuzzy covers:
// ch_ij <= q_j c_ij / Q(B_i) wherever c_ij != 1.
bool check_tolerance_constraint(const Channel& ch, const ToleranceCover& cover,
                                const Distribution& q);

// H*(X) at marginal q; +inf when some P(x_i) > 0 has Q(B_i) = 0.
double generalized_entropy(const Distribution& p, const SimilarityCover& cover,
                           const Distribution& q);

// Minimizes H* over q by q_j <- q_j sum_i p_i c_ij / Q(B_i) from the uniform
// start. rate_bits is the rate of the tolerance channel at the minimizer.
ToleranceSolution minimize_generalized_entropy(const Distribution& p, const ToleranceCover& cover,
                                               const SolverOptions& options = {});

ToleranceSolution rate_tolerance(const Distribution& p, const ToleranceCover& cover,
                                 const SolverOptions& options = {});

// R(T) for the balls |a_i - b_j| <= sqrt(dc).
ToleranceSolution complexity_distortion(const Distribution& p, const Alphabet& a,
                                        const Alphabet& b, double dc,
                                        const SolverOptions& options = {});

// log2 S for a clear cover whose nonempty columns all have S members.
double structure_function(const ToleranceCover& cover);

// -sum_j q_j sum_i P(x_i|A_j) log2 P(x_i|A_j) over a clear cover.
double conditional_entropy_given_tolerance(const Distribution& p, const ToleranceCover& cover,
                                           const Distribution& q);

// R(D=0) under d = -ln c: doubles |s| from 1 until D(s) < 1e-9.
RDPoint rate_distortion_at_zero(const Distribution& p, const ToleranceCover& cover,
                                const SolverOptions& options = {});

EquivalenceReport verify_equivalence(const Distribution& p, const ToleranceCover& cover,
                                     double tol,
                                     const std::optional<BallComparison>& balls = std::nullopt,
                                     const SolverOptions& options = {});

}  // namespace ratetol
