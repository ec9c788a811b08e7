#include "ratetol/rate_tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ratetol/errors.hpp"

namespace ratetol {
namespace {

constexpr double kZeroDistortion = 1e-9;
constexpr int kMaxSlopeDoublings = 64;

void require_shapes(const Distribution& p, const ToleranceCover& cover, const char* what) {
  if (p.size() != cover.rows()) {
    throw ValidationError(std::string(what) + ": source has " + std::to_string(p.size()) +
                          " symbols, cover has " + std::to_string(cover.rows()) + " rows");
  }
}

std::vector<double> ball_masses(const SimilarityCover& cover, std::span<const double> q) {
  std::vector<double> ball(cover.rows(), 0.0);
  for (std::size_t i = 0; i < cover.rows(); ++i) {
    for (std::size_t j = 0; j < cover.cols(); ++j) ball[i] += q[j] * cover(i, j);
  }
  return ball;
}

// P(y_j|x_i) = P(y_j|B_i) = q_j c_ij / Q(B_i).
Channel tolerance_channel(const SimilarityCover& cover, const Distribution& q) {
  const std::vector<double> ball = ball_masses(cover, q.probs());
  Matrix ch(cover.rows(), cover.cols());
  for (std::size_t i = 0; i < cover.rows(); ++i) {
    if (ball[i] > 0.0) {
      for (std::size_t j = 0; j < cover.cols(); ++j) ch(i, j) = q[j] * cover(i, j) / ball[i];
    } else {
      double row_total = 0.0;
      for (std::size_t j = 0; j < cover.cols(); ++j) row_total += cover(i, j);
      for (std::size_t j = 0; j < cover.cols(); ++j) ch(i, j) = cover(i, j) / row_total;
    }
  }
  return Channel(std::move(ch));
}

std::vector<double> lifted(std::span<const double> q) {
  std::vector<double> out(q.begin(), q.end());
  for (double& v : out) v = std::max(v, 1e-6);
  return out;
}

}  // namespace

ToleranceCover::ToleranceCover(SimilarityCover cover, std::optional<double> radius)
    : cover_(std::move(cover)), clear_(cover_.is_clear()), radius_(radius) {
  for (std::size_t i = 0; i < cover_.rows(); ++i) {
    const auto row = cover_.matrix().row(i);
    if (std::find(row.begin(), row.end(), 1.0) == row.end()) {
      throw ValidationError("tolerance cover row " + std::to_string(i + 1) +
                            " has no fully admissible output (no entry equal to 1)");
    }
  }
  if (radius_ && !(*radius_ >= 0.0)) throw ValidationError("ball radius must be nonnegative");
}

bool EquivalenceReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ToleranceCover clear_cover_from_threshold(const Alphabet& a, const Alphabet& b, double radius) {
  if (!(radius >= 0.0)) throw ValidationError("threshold radius must be nonnegative");
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const bool inside = std::abs(a.value(i) - b.value(j)) <= radius;
      m(i, j) = inside ? 1.0 : 0.0;
      any = any || inside;
    }
    if (!any) {
      throw EmptyBallError("ball of radius " + std::to_string(radius) + " around " +
                           a.labels()[i] + " contains no destination symbol");
    }
  }
  return ToleranceCover(SimilarityCover(std::move(m)), radius);
}

bool check_tolerance_constraint(const Channel& ch, const ToleranceCover& cover,
                                const Distribution& q) {
  if (ch.inputs() != cover.rows() || ch.outputs() != cover.cols() || q.size() != cover.cols()) {
    throw ValidationError("check_tolerance_constraint: shape mismatch");
  }
  constexpr double slack = 1e-12;
  if (cover.clear()) {
    for (std::size_t i = 0; i < cover.rows(); ++i) {
      for (std::size_t j = 0; j < cover.cols(); ++j) {
        if (cover(i, j) == 0.0 && ch(i, j) > slack) return false;
      }
    }
    return true;
  }
  const std::vector<double> ball = ball_masses(cover.cover(), q.probs());
  for (std::size_t i = 0; i < cover.rows(); ++i) {
    for (std::size_t j = 0; j < cover.cols(); ++j) {
      if (cover(i, j) == 1.0) continue;
      if (!(ball[i] > 0.0)) return false;
      if (ch(i, j) > q[j] * cover(i, j) / ball[i] + slack) return false;
    }
  }
  return true;
}

double generalized_entropy(const Distribution& p, const SimilarityCover& cover,
                           const Distribution& q) {
  if (p.size() != cover.rows() || q.size() != cover.cols()) {
    throw ValidationError("generalized_entropy: shape mismatch");
  }
  const std::vector<double> ball = ball_masses(cover, q.probs());
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (!(ball[i] > 0.0)) return std::numeric_limits<double>::infinity();
    h -= p[i] * std::log2(std::min(ball[i], 1.0));
  }
  return h;
}

ToleranceSolution minimize_generalized_entropy(const Distribution& p, const ToleranceCover& cover,
                                               const SolverOptions& options) {
  require_shapes(p, cover, "minimize_generalized_entropy");
  if (!(options.tol > 0.0)) throw ValidationError("minimize_generalized_entropy: tol must be > 0");
  const SimilarityCover& c = cover.cover();
  const std::size_t n = c.cols();

  std::vector<double> q(n, 1.0 / static_cast<double>(n));
  std::vector<double> ball = ball_masses(c, q);
  double h = generalized_entropy(p, c, Distribution(q));
  std::vector<double> next(n);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < c.rows(); ++i) {
      if (p[i] == 0.0) continue;
      const double w = p[i] / ball[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += w * c(i, j);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] *= q[j];
      if (next[j] < options.support_floor) next[j] = 0.0;
      total += next[j];
    }
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= total;
      change += std::abs(next[j] - q[j]);
    }
    q.swap(next);
    ball = ball_masses(c, q);
    const Distribution qd(q);
    const double updated = generalized_entropy(p, c, qd);
    if (options.observer) options.observer(it, updated, q);
    if (std::abs(h - updated) < options.tol && change < options.tol) {
      ToleranceSolution sol;
      sol.q = qd;
      sol.h_star_bits = updated;
      sol.rate_bits = cover.clear()
                          ? updated
                          : rate_via_generalized_form(p, qd, neglog_distortion(c), -1.0);
      sol.channel = tolerance_channel(c, qd);
      sol.iterations = it;
      return sol;
    }
    h = updated;
  }
  throw NonConvergenceError("generalized entropy minimization did not converge", -1.0,
                            options.max_iter);
}

ToleranceSolution rate_tolerance(const Distribution& p, const ToleranceCover& cover,
                                 const SolverOptions& options) {
  require_shapes(p, cover, "rate_tolerance");
  if (cover.clear()) return minimize_generalized_entropy(p, cover, options);

  // exp(-1 * -ln c_ij) = c_ij: the fuzzy problem is the slope -1 point of the
  // rate-distortion solver under d = -ln c.
  const RDPoint pt = ba_fixed_point(p, neglog_distortion(cover.cover()), -1.0, options);
  ToleranceSolution sol;
  sol.q = pt.q;
  sol.rate_bits = pt.rate_bits;
  sol.h_star_bits = generalized_entropy(p, cover.cover(), pt.q);
  sol.channel = tolerance_channel(cover.cover(), pt.q);
  sol.iterations = pt.iterations;
  return sol;
}

ToleranceSolution complexity_distortion(const Distribution& p, const Alphabet& a,
                                        const Alphabet& b, double dc,
                                        const SolverOptions& options) {
  if (!(dc >= 0.0)) throw ValidationError("complexity_distortion: Dc must be nonnegative");
  return rate_tolerance(p, clear_cover_from_threshold(a, b, std::sqrt(dc)), options);
}

double structure_function(const ToleranceCover& cover) {
  if (!cover.clear()) throw ValidationError("structure_function requires a clear cover");
  std::optional<std::size_t> common;
  for (std::size_t j = 0; j < cover.cols(); ++j) {
    std::size_t members = 0;
    for (std::size_t i = 0; i < cover.rows(); ++i) members += cover(i, j) == 1.0 ? 1 : 0;
    if (members == 0) continue;
    if (common && *common != members) {
      throw UnequalBallError("structure function undefined: ball A_" + std::to_string(j + 1) +
                             " has " + std::to_string(members) + " members, earlier balls " +
                             std::to_string(*common));
    }
    common = members;
  }
  return std::log2(static_cast<double>(*common));
}

double conditional_entropy_given_tolerance(const Distribution& p, const ToleranceCover& cover,
                                           const Distribution& q) {
  if (!cover.clear()) {
    throw ValidationError("conditional_entropy_given_tolerance requires a clear cover");
  }
  require_shapes(p, cover, "conditional_entropy_given_tolerance");
  if (q.size() != cover.cols()) {
    throw ValidationError("conditional_entropy_given_tolerance: marginal size mismatch");
  }
  double h = 0.0;
  for (std::size_t j = 0; j < cover.cols(); ++j) {
    if (q[j] == 0.0) continue;
    h += q[j] * entropy(set_bayes_posterior(p, cover.cover().column(j)));
  }
  return h;
}

RDPoint rate_distortion_at_zero(const Distribution& p, const ToleranceCover& cover,
                                const SolverOptions& options) {
  require_shapes(p, cover, "rate_distortion_at_zero");
  const DistortionMatrix d = neglog_distortion(cover.cover());
  double s = -1.0;
  RDPoint pt = ba_fixed_point(p, d, s, options);
  for (int k = 0; pt.distortion >= kZeroDistortion; ++k) {
    if (k == kMaxSlopeDoublings) {
      throw NonConvergenceError("zero-distortion limit not reached", s, 0);
    }
    s *= 2.0;
    pt = ba_fixed_point(p, d, s, Distribution::normalized(lifted(pt.q.probs())), options);
  }
  return pt;
}

EquivalenceReport verify_equivalence(const Distribution& p, const ToleranceCover& cover,
                                     double tol, const std::optional<BallComparison>& balls,
                                     const SolverOptions& options) {
  if (!(tol > 0.0)) throw ValidationError("verify_equivalence: tol must be positive");
  EquivalenceReport report;
  report.rate_tolerance_bits = rate_tolerance(p, cover, options).rate_bits;
  const RDPoint zero = rate_distortion_at_zero(p, cover, options);
  report.rate_distortion_at_zero_bits = zero.rate_bits;
  report.zero_limit_slope = zero.s;
  report.delta_rt_rd0 = std::abs(report.rate_tolerance_bits - zero.rate_bits);
  report.checks.push_back({"R(T) = R(D=0)", report.delta_rt_rd0, tol, report.delta_rt_rd0 < tol});

  if (balls) {
    const double cdc = complexity_distortion(p, balls->source_alphabet,
                                             balls->destination_alphabet, balls->dc, options)
                           .rate_bits;
    report.complexity_distortion_bits = cdc;
    report.delta_rt_cdc = std::abs(report.rate_tolerance_bits - cdc);
    report.checks.push_back({"R(T) = C(Dc)", *report.delta_rt_cdc, tol, *report.delta_rt_cdc < tol});

    const DistortionMatrix squared =
        squared_distortion(balls->source_alphabet, balls->destination_alphabet);
    report.squared_rate_at_dc_bits = rate_at_distortion(p, squared, balls->dc, options);
    report.squared_gap_bits = cdc - *report.squared_rate_at_dc_bits;
  }
  return report;
}

}  // namespace ratetol
