#include "ratetol/reproduction.hpp"

#include <cmath>
#include <sstream>

#include "ratetol/errors.hpp"

namespace ratetol {

namespace {

const Alphabet& example_alphabet() {
  static const Alphabet a = Alphabet::from_values({1, 2, 3, 4});
  return a;
}

std::string row_label(std::size_t i) { return "x" + std::to_string(i + 1); }

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

// Lattice from s_min to s_max, equal ratios in |s|.
std::vector<double> geometric_slopes(double s_min, double s_max, std::size_t n) {
  std::vector<double> s(n);
  const double ratio = std::log(s_max / s_min) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) s[k] = s_min * std::exp(ratio * static_cast<double>(k));
  s.back() = s_max;
  return s;
}

}  // namespace

bool TableCell::agrees() const {
  return !reference || std::abs(*reference - recomputed) <= kCellTolerance;
}

bool ReproductionReport::passed() const {
  for (const auto& g : gates) {
    if (!g.passed) return false;
  }
  return true;
}

ReproductionReport reproduce_example(const SolverOptions& options) {
  ReproductionReport rep;
  const Alphabet& a = example_alphabet();
  const Distribution p = Distribution::uniform(4);
  const ToleranceCover cover = clear_cover_from_threshold(a, a, 1.0);
  const DistortionMatrix sq = squared_distortion(a, a);

  // Clear-ball code at radius 1.
  const ToleranceSolution t1 = rate_tolerance(p, cover, options);
  rep.tolerance_code_rate_bits = t1.rate_bits;
  rep.tolerance_code_distortion = average_distortion(p, t1.channel, sq);
  const double q_reference[] = {0.0, 0.5, 0.5, 0.0};
  const double ball_reference[] = {0.5, 1.0, 1.0, 0.5};
  const double contrib_reference[] = {0.25, 0.0, 0.0, 0.25};
  bool tolerance_code_ok = true;
  for (std::size_t i = 0; i < 4; ++i) {
    double ball = 0.0;
    for (std::size_t j = 0; j < 4; ++j) ball += t1.q[j] * cover(i, j);
    const double contrib = -p[i] * std::log2(ball);
    rep.tolerance_code.push_back({row_label(i), "P(y_j)", q_reference[i], t1.q[i], true});
    rep.tolerance_code.push_back({row_label(i), "Q(B_i)", ball_reference[i], ball, true});
    rep.tolerance_code.push_back({row_label(i), "-P(x_i) log Q(B_i)", contrib_reference[i], contrib, true});
  }
  rep.tolerance_code.push_back({"total", "R(T)", 0.5, t1.rate_bits, true});
  rep.tolerance_code.push_back({"total", "E d", 0.75, rep.tolerance_code_distortion, false});
  for (const auto& c : rep.tolerance_code) tolerance_code_ok = tolerance_code_ok && (!c.gated || c.agrees());
  rep.gates.push_back({"tolerance code cells agree at 0.01", tolerance_code_ok, ""});
  rep.gates.push_back({"tolerance code R(T) = 0.5 within 1e-9", std::abs(t1.rate_bits - 0.5) < 1e-9,
                       "R(T) = " + fixed(t1.rate_bits, 12)});

  // Squared-distortion code: s = -0.45 with the output restricted to {y2, y3}.
  const RDPoint t2 = ba_fixed_point(p, sq, rep.distortion_code_slope,
                                    Distribution({0.0, 0.5, 0.5, 0.0}), options);
  rep.distortion_code_distortion = t2.distortion;
  rep.distortion_code_rate_bits = t2.rate_bits;
  const double y2_reference[] = {0.8, 0.903, 0.097, 0.2};
  const double y3_reference[] = {0.2, 0.097, 0.903, 0.8};
  const double ball2_reference[] = {0.395, 0.816, 0.816, 0.395};
  const double contrib2_reference[] = {0.335, 0.073, 0.073, 0.335};
  double h_star = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double ball = 0.0;
    for (std::size_t j = 0; j < 4; ++j) ball += t2.q[j] * std::exp(rep.distortion_code_slope * sq(i, j));
    const double contrib = -p[i] * std::log2(ball);
    h_star += contrib;
    rep.distortion_code.push_back({row_label(i), "P(y2|x_i)", y2_reference[i], t2.channel(i, 1), false});
    rep.distortion_code.push_back({row_label(i), "P(y3|x_i)", y3_reference[i], t2.channel(i, 2), false});
    rep.distortion_code.push_back({row_label(i), "P(y_j)", q_reference[i], t2.q[i], false});
    rep.distortion_code.push_back({row_label(i), "Q(B_i)", ball2_reference[i], ball, i == 1});
    rep.distortion_code.push_back({row_label(i), "-P(x_i) log Q(B_i)", contrib2_reference[i], contrib, false});
  }
  rep.distortion_code_h_star_bits = h_star;
  rep.distortion_code.push_back({"total", "D", 0.994, t2.distortion, false});
  rep.distortion_code.push_back({"total", "H*", 0.816, h_star, false});
  rep.distortion_code.push_back({"total", "R(D)", 0.369, t2.rate_bits, false});
  const TableCell& qb2 = rep.distortion_code[8];
  rep.gates.push_back({"distortion code Q(B_2) agrees at 0.01", qb2.agrees(),
                       "Q(B_2) = " + fixed(qb2.recomputed, 6) + ", reference 0.816"});

  // Special-case chain.
  rep.equivalence = verify_equivalence(p, cover, 1e-6, BallComparison{a, a, 1.0}, options);
  rep.gates.push_back({"R(T) = R(D=0) = C(Dc=1)", rep.equivalence.all_passed(), ""});

  // R(D=1) against C(1).
  const std::vector<double> grid = geometric_slopes(-50.0, -0.01, 600);
  const std::vector<RDPoint> curve = rd_curve(p, sq, grid, options);
  rep.complexity_distortion_one_bits = complexity_distortion(p, a, a, 1.0, options).rate_bits;
  bool bracketed = false;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    if (curve[k].distortion <= 1.0 && curve[k + 1].distortion >= 1.0) {
      rep.rd_one_bracket_low = curve[k].distortion;
      rep.rd_one_bracket_high = curve[k + 1].distortion;
      bracketed = true;
      break;
    }
  }
  const auto interpolated = interpolate_rate(curve, 1.0);
  if (!bracketed || !interpolated) throw Error("reproduce: curve does not bracket D = 1");
  rep.rd_one_interpolated_bits = *interpolated;
  rep.rd_one_bisected_bits = rate_at_distortion(p, sq, 1.0, options);
  const bool tight = rep.rd_one_bracket_low >= 0.99 && rep.rd_one_bracket_high <= 1.01;
  rep.gates.push_back({"R(D=1) < 0.45 < C(1)",
                       tight && rep.rd_one_interpolated_bits < 0.45 &&
                           rep.complexity_distortion_one_bits > 0.45,
                       "R(D=1) = " + fixed(rep.rd_one_interpolated_bits, 6) + " from bracket [" +
                           fixed(rep.rd_one_bracket_low, 4) + ", " +
                           fixed(rep.rd_one_bracket_high, 4) + "], C(1) = " +
                           fixed(rep.complexity_distortion_one_bits, 6)});
  return rep;
}

}  // namespace ratetol
