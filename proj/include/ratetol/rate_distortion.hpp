#pragma once

// Distortion matrices and the parametric rate-distortion solver.
//
// Units: the slope s is in nats per distortion unit, so exp(s * d) is
// dimensionless; rates are reported in bits,
//   R(s) = s * D(s) / ln 2 + sum_i P(x_i) log2 lambda_i,
//   lambda_i = 1 / sum_j q_j exp(s * d_ij).
// exp(s * inf) is taken as 0 for every s <= 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ratetol/info_core.hpp"

namespace ratetol {

// Nonnegative extended reals; +inf marks a forbidden pair.
class DistortionMatrix {
 public:
  DistortionMatrix() = default;
  explicit DistortionMatrix(Matrix m);

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

 private:
  Matrix m_;
};

struct RDPoint {
  double s = 0.0;
  Distribution q;   // output marginal the channel was built from
  Channel channel;  // channel_ij = q_j exp(s d_ij) lambda_i
  double distortion = 0.0;
  double rate_bits = 0.0;
  std::size_t iterations = 0;
};

struct SolverOptions {
  // On the objective sum_i P(x_i) log2 lambda_i (bits); the L1 change of q
  // must also drop below it.
  double tol = 1e-10;
  std::size_t max_iter = 1'000'000;
  // Marginal entries below this are zeroed and q renormalized.
  double support_floor = 1e-12;
  // Called after every update with (iteration, objective bits, q).
  std::function<void(std::size_t, double, std::span<const double>)> observer;
};

DistortionMatrix squared_distortion(const Alphabet& a, const Alphabet& b);

// d_ij = -ln c_ij; c = 0 maps to +inf.
DistortionMatrix neglog_distortion(const SimilarityCover& cover);

// sum_ij p_i ch_ij d_ij with 0 * inf = 0; +inf when mass sits on an inf entry.
double average_distortion(const Distribution& p, const Channel& ch, const DistortionMatrix& d);

// exp(s * d) with exp(s * inf) = 0.
double slope_kernel(double s, double d);

// Alternating update of the channel and the output marginal at fixed slope
// s <= 0, started from q0 (its zeros stay zero).
RDPoint ba_fixed_point(const Distribution& p, const DistortionMatrix& d, double s,
                       const Distribution& q0, const SolverOptions& options = {});
RDPoint ba_fixed_point(const Distribution& p, const DistortionMatrix& d, double s,
                       const SolverOptions& options = {});

// Builds the RDPoint for a given marginal without iterating.
RDPoint evaluate_rd_point(const Distribution& p, const DistortionMatrix& d, double s,
                          const Distribution& q);

// One point per slope, ascending; each solve warm-starts from the previous
// marginal with its zeros lifted so a support that should regrow can.
std::vector<RDPoint> rd_curve(const Distribution& p, const DistortionMatrix& d,
                              std::span<const double> s_grid, const SolverOptions& options = {});

// sum_i sum_j p_i P(y_j|B_i) log2(Q(B_i|y_j) / Q(B_i)) with
// Q(B_i|y_j) = exp(s d_ij), Q(B_i) = sum_j q_j Q(B_i|y_j).
double rate_via_generalized_form(const Distribution& p, const Distribution& q,
                                 const DistortionMatrix& d, double s);

// Linear interpolation of R at distortion D between the two curve points
// that bracket it; nullopt when no pair brackets D.
std::optional<double> interpolate_rate(std::span<const RDPoint> curve, double distortion);

// Largest distortion with positive rate: min_j sum_i p_i d_ij.
double max_useful_distortion(const Distribution& p, const DistortionMatrix& d);

// R(D) for a target average distortion, by bisection on s.
double rate_at_distortion(const Distribution& p, const DistortionMatrix& d, double distortion,
                          const SolverOptions& options = {});

}  // namespace ratetol
