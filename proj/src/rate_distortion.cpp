#include "ratetol/rate_distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ratetol/errors.hpp"

namespace ratetol {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWarmStartLift = 1e-6;

void require_shapes(const Distribution& p, const DistortionMatrix& d, const char* what) {
  if (p.size() != d.rows()) {
    throw ValidationError(std::string(what) + ": source has " + std::to_string(p.size()) +
                          " symbols, distortion has " + std::to_string(d.rows()) + " rows");
  }
}

void require_slope(double s) {
  if (!(s <= 0.0) || !std::isfinite(s)) {
    throw ValidationError("slope s must be finite and <= 0, got " + std::to_string(s));
  }
}

Matrix kernel(const DistortionMatrix& d, double s) {
  Matrix k(d.rows(), d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) k(i, j) = slope_kernel(s, d(i, j));
  }
  return k;
}

// Q(B_i) = sum_j q_j K_ij.
std::vector<double> ball_masses(const Matrix& k, std::span<const double> q) {
  std::vector<double> z(k.rows(), 0.0);
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (std::size_t j = 0; j < k.cols(); ++j) z[i] += q[j] * k(i, j);
  }
  return z;
}

// sum_i p_i log2 lambda_i = -sum_i p_i log2 Q(B_i).
double lagrangian_bits(const Distribution& p, std::span<const double> z, double s) {
  double f = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (!(z[i] > 0.0)) {
      throw NoFeasibleOutputError("source symbol " + std::to_string(i + 1) +
                                  " reaches no output with positive weight at s = " +
                                  std::to_string(s));
    }
    f -= p[i] * std::log2(z[i]);
  }
  return f;
}

std::vector<double> lift_zeros(std::span<const double> q) {
  std::vector<double> out(q.begin(), q.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::max(v, kWarmStartLift);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

DistortionMatrix::DistortionMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw ValidationError("distortion matrix is empty");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    bool any_finite = false;
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      const double v = m_(i, j);
      if (!(v >= 0.0)) {
        throw ValidationError("distortion entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") is negative or NaN");
      }
      any_finite = any_finite || std::isfinite(v);
    }
    if (!any_finite) {
      throw ValidationError("distortion row " + std::to_string(i) + " has no finite entry");
    }
  }
}

DistortionMatrix squared_distortion(const Alphabet& a, const Alphabet& b) {
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double diff = a.value(i) - b.value(j);
      m(i, j) = diff * diff;
    }
  }
  return DistortionMatrix(std::move(m));
}

DistortionMatrix neglog_distortion(const SimilarityCover& cover) {
  Matrix m(cover.rows(), cover.cols());
  for (std::size_t i = 0; i < cover.rows(); ++i) {
    for (std::size_t j = 0; j < cover.cols(); ++j) {
      const double c = cover(i, j);
      m(i, j) = c == 0.0 ? kInf : (c == 1.0 ? 0.0 : -std::log(c));
    }
  }
  return DistortionMatrix(std::move(m));
}

double average_distortion(const Distribution& p, const Channel& ch, const DistortionMatrix& d) {
  require_shapes(p, d, "average_distortion");
  if (ch.inputs() != d.rows() || ch.outputs() != d.cols()) {
    throw ValidationError("average_distortion: channel shape differs from distortion");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j) {
      const double w = p[i] * ch(i, j);
      if (w > 0.0) total += w * d(i, j);
    }
  }
  return total;
}

double slope_kernel(double s, double d) {
  if (std::isinf(d)) return 0.0;
  return std::exp(s * d);
}

RDPoint evaluate_rd_point(const Distribution& p, const DistortionMatrix& d, double s,
                          const Distribution& q) {
  require_shapes(p, d, "evaluate_rd_point");
  require_slope(s);
  if (q.size() != d.cols()) throw ValidationError("evaluate_rd_point: marginal size mismatch");
  const Matrix k = kernel(d, s);
  const std::vector<double> z = ball_masses(k, q.probs());
  const double f = lagrangian_bits(p, z, s);

  Matrix ch(d.rows(), d.cols());
  double distortion = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (z[i] > 0.0) {
      for (std::size_t j = 0; j < d.cols(); ++j) ch(i, j) = q[j] * k(i, j) / z[i];
    } else {
      // Unreachable row with P(x_i) = 0: send it to its admissible outputs.
      double row_total = 0.0;
      for (std::size_t j = 0; j < d.cols(); ++j) row_total += k(i, j);
      for (std::size_t j = 0; j < d.cols(); ++j) {
        ch(i, j) = row_total > 0.0 ? k(i, j) / row_total : 1.0 / static_cast<double>(d.cols());
      }
    }
    for (std::size_t j = 0; j < d.cols(); ++j) {
      const double w = p[i] * ch(i, j);
      if (w > 0.0) distortion += w * d(i, j);
    }
  }

  RDPoint pt;
  pt.s = s;
  pt.q = q;
  pt.distortion = distortion;
  pt.rate_bits = std::max(s * distortion / std::numbers::ln2 + f, 0.0);
  pt.channel = Channel(std::move(ch));
  return pt;
}

RDPoint ba_fixed_point(const Distribution& p, const DistortionMatrix& d, double s,
                       const Distribution& q0, const SolverOptions& options) {
  require_shapes(p, d, "ba_fixed_point");
  require_slope(s);
  if (q0.size() != d.cols()) throw ValidationError("ba_fixed_point: q0 size mismatch");
  if (!(options.tol > 0.0)) throw ValidationError("ba_fixed_point: tol must be positive");

  const Matrix k = kernel(d, s);
  std::vector<double> q(q0.begin(), q0.end());
  std::vector<double> z = ball_masses(k, q);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0.0)) {
      throw NoFeasibleOutputError("source symbol " + std::to_string(i + 1) +
                                  " has no admissible output under the initial marginal");
    }
  }
  double objective = lagrangian_bits(p, z, s);

  std::vector<double> next(q.size());
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < k.rows(); ++i) {
      if (p[i] == 0.0) continue;
      const double w = p[i] / z[i];
      for (std::size_t j = 0; j < k.cols(); ++j) next[j] += w * k(i, j);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      next[j] *= q[j];
      if (next[j] < options.support_floor) next[j] = 0.0;
      total += next[j];
    }
    double change = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      next[j] /= total;
      change += std::abs(next[j] - q[j]);
    }
    q.swap(next);
    z = ball_masses(k, q);
    const double updated = lagrangian_bits(p, z, s);
    if (options.observer) options.observer(it, updated, q);
    if (std::abs(objective - updated) < options.tol && change < options.tol) {
      RDPoint pt = evaluate_rd_point(p, d, s, Distribution(q));
      pt.iterations = it;
      return pt;
    }
    objective = updated;
  }
  throw NonConvergenceError("rate-distortion iteration did not converge", s, options.max_iter);
}

RDPoint ba_fixed_point(const Distribution& p, const DistortionMatrix& d, double s,
                       const SolverOptions& options) {
  return ba_fixed_point(p, d, s, Distribution::uniform(d.cols()), options);
}

std::vector<RDPoint> rd_curve(const Distribution& p, const DistortionMatrix& d,
                              std::span<const double> s_grid, const SolverOptions& options) {
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    require_slope(s_grid[k]);
    if (k > 0 && s_grid[k] < s_grid[k - 1]) {
      throw ValidationError("rd_curve: slope grid must be sorted ascending");
    }
  }
  std::vector<RDPoint> curve;
  curve.reserve(s_grid.size());
  Distribution start = Distribution::uniform(d.cols());
  for (double s : s_grid) {
    curve.push_back(ba_fixed_point(p, d, s, start, options));
    start = Distribution(lift_zeros(curve.back().q.probs()));
  }
  return curve;
}

double rate_via_generalized_form(const Distribution& p, const Distribution& q,
                                 const DistortionMatrix& d, double s) {
  require_shapes(p, d, "rate_via_generalized_form");
  require_slope(s);
  if (q.size() != d.cols()) throw ValidationError("rate_via_generalized_form: marginal size");
  const Matrix k = kernel(d, s);
  const std::vector<double> ball = ball_masses(k, q.probs());
  double rate = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (p[i] == 0.0) continue;
    if (!(ball[i] > 0.0)) {
      throw NoFeasibleOutputError("rate_via_generalized_form: Q(B_" + std::to_string(i + 1) +
                                  ") is zero");
    }
    const double log2_ball = std::log2(ball[i]);
    for (std::size_t j = 0; j < d.cols(); ++j) {
      const double posterior = q[j] * k(i, j) / ball[i];  // P(y_j|B_i)
      if (posterior == 0.0) continue;
      // log2 Q(B_i|y_j) = s d_ij / ln 2 exactly.
      rate += p[i] * posterior * (s * d(i, j) / std::numbers::ln2 - log2_ball);
    }
  }
  return std::max(rate, 0.0);
}

std::optional<double> interpolate_rate(std::span<const RDPoint> curve, double distortion) {
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    const RDPoint& a = curve[k];
    const RDPoint& b = curve[k + 1];
    const double lo = std::min(a.distortion, b.distortion);
    const double hi = std::max(a.distortion, b.distortion);
    if (distortion < lo || distortion > hi) continue;
    if (hi - lo == 0.0) return std::min(a.rate_bits, b.rate_bits);
    const double t = (distortion - a.distortion) / (b.distortion - a.distortion);
    return a.rate_bits + t * (b.rate_bits - a.rate_bits);
  }
  return std::nullopt;
}

double max_useful_distortion(const Distribution& p, const DistortionMatrix& d) {
  require_shapes(p, d, "max_useful_distortion");
  double best = kInf;
  for (std::size_t j = 0; j < d.cols(); ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      if (p[i] > 0.0) total += p[i] * d(i, j);
    }
    best = std::min(best, total);
  }
  return best;
}

double rate_at_distortion(const Distribution& p, const DistortionMatrix& d, double distortion,
                          const SolverOptions& options) {
  require_shapes(p, d, "rate_at_distortion");
  if (!(distortion >= 0.0)) throw ValidationError("rate_at_distortion: negative distortion");
  if (distortion >= max_useful_distortion(p, d)) return 0.0;

  double min_distortion = 0.0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (p[i] == 0.0) continue;
    const auto row = d.matrix().row(i);
    min_distortion += p[i] * *std::min_element(row.begin(), row.end());
  }
  if (distortion < min_distortion) {
    throw ValidationError("rate_at_distortion: target below the least achievable distortion");
  }

  Distribution start = Distribution::uniform(d.cols());
  auto solve = [&](double s) {
    RDPoint pt = ba_fixed_point(p, d, s, start, options);
    start = Distribution(lift_zeros(pt.q.probs()));
    return pt;
  };

  if (distortion - min_distortion < 1e-9) {
    RDPoint pt = solve(-1.0);
    for (int k = 0; pt.distortion - min_distortion >= 1e-9; ++k) {
      if (k == 60) {
        throw NonConvergenceError("rate_at_distortion: zero-distortion limit not reached", pt.s,
                                  0);
      }
      pt = solve(2.0 * pt.s);
    }
    return pt.rate_bits;
  }

  // D(s) is nondecreasing in s: lo has D <= target, hi has D >= target.
  RDPoint lo = solve(-1.0);
  RDPoint hi = lo;
  for (int k = 0; lo.distortion > distortion; ++k) {
    if (k == 60) {
      throw NonConvergenceError("rate_at_distortion: could not bracket the target", lo.s, 0);
    }
    hi = lo;
    lo = solve(2.0 * lo.s);
  }
  if (hi.distortion < distortion) {
    hi = solve(-0.5);
    while (hi.distortion < distortion) {
      if (hi.s > -1e-12) return 0.0;
      lo = hi;
      hi = solve(0.5 * hi.s);
    }
  }
  for (int k = 0; k < 200 && hi.s - lo.s > 1e-12 * std::abs(lo.s); ++k) {
    const RDPoint mid = solve(0.5 * (lo.s + hi.s));
    (mid.distortion <= distortion ? lo : hi) = mid;
    if (mid.distortion == distortion) return mid.rate_bits;
  }
  if (hi.distortion - lo.distortion <= 0.0) return lo.rate_bits;
  // A jump in D(s) corresponds to a straight segment of R(D).
  const double t = (distortion - lo.distortion) / (hi.distortion - lo.distortion);
  return lo.rate_bits + t * (hi.rate_bits - lo.rate_bits);
}

}  // namespace ratetol
