#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "ratetol/errors.hpp"
#include "ratetol/rate_distortion.hpp"
#include "test_support.hpp"

using namespace ratetol;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Alphabet& coords_1_to_4() {
  static const Alphabet a = Alphabet::from_values({1, 2, 3, 4});
  return a;
}

DistortionMatrix random_distortion(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = testing::uniform01(rng) < 0.15 ? kInf : 4.0 * testing::uniform01(rng);
    }
    m(i, testing::uniform_index(rng, 0, cols - 1)) = testing::uniform01(rng);
  }
  return DistortionMatrix(std::move(m));
}

}  // namespace

TEST_CASE("distortion constructors") {
  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());
  CHECK(sq(1, 1) == 0.0);
  CHECK(sq(0, 2) == 4.0);
  CHECK(sq(0, 1) == 1.0);

  const SimilarityCover c(Matrix::from_rows({{1.0, 0.0, std::exp(-0.5)}}));
  const DistortionMatrix nl = neglog_distortion(c);
  CHECK(nl(0, 0) == 0.0);
  CHECK(std::isinf(nl(0, 1)));
  CHECK(nl(0, 2) == Approx(0.5));

  CHECK_THROWS_AS(DistortionMatrix(Matrix::from_rows({{kInf, kInf}})), ValidationError);
  CHECK_THROWS_AS(DistortionMatrix(Matrix::from_rows({{-1.0, 0.0}})), ValidationError);
}

TEST_CASE("average distortion") {
  const auto p = Distribution::uniform(4);
  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());
  CHECK(average_distortion(p, Channel::identity(4), sq) == 0.0);

  // x1, x2 -> y2 and x3, x4 -> y3.
  const Channel det(Matrix::from_rows({{0, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}}));
  CHECK(average_distortion(p, det, sq) == Approx(0.5));

  // The randomized tolerance code: x2, x3 split evenly between y2 and y3.
  const Channel split(
      Matrix::from_rows({{0, 1, 0, 0}, {0, 0.5, 0.5, 0}, {0, 0.5, 0.5, 0}, {0, 0, 1, 0}}));
  CHECK(average_distortion(p, split, sq) == Approx(0.75));

  const DistortionMatrix forbidden(Matrix::from_rows({{0.0, kInf}, {0.0, 1.0}}));
  const Channel onto_inf(Matrix::from_rows({{0.5, 0.5}, {1.0, 0.0}}));
  CHECK(std::isinf(average_distortion(Distribution({0.5, 0.5}), onto_inf, forbidden)));
  const Channel avoid(Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(average_distortion(Distribution({0.5, 0.5}), avoid, forbidden) == Approx(0.5));
}

TEST_CASE("fixed point at s = 0 keeps the start marginal") {
  const auto p = Distribution::uniform(4);
  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());
  const RDPoint pt = ba_fixed_point(p, sq, 0.0);
  CHECK(pt.rate_bits == Approx(0.0).epsilon(1e-15));
  CHECK(pt.distortion == Approx(2.5));  // 40 / 16
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(pt.channel(i, j) == Approx(pt.q[j]));
  }
}

TEST_CASE("lossless limit at very negative slope") {
  const auto p = Distribution::uniform(4);
  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());
  const RDPoint pt = ba_fixed_point(p, sq, -50.0);
  CHECK(pt.rate_bits == Approx(2.0).epsilon(1e-9));
  CHECK(pt.distortion < 1e-18);
}

TEST_CASE("restricted-support operating point at s = -0.45") {
  const auto p = Distribution::uniform(4);
  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());
  const Distribution q0({0.0, 0.5, 0.5, 0.0});
  const RDPoint pt = ba_fixed_point(p, sq, -0.45, q0);

  CHECK(pt.q[0] == 0.0);
  CHECK(pt.q[1] == Approx(0.5).epsilon(1e-12));
  // Q(B_i) = sum_j q_j exp(s d_ij), evaluated directly.
  auto ball = [&](std::size_t i) {
    double z = 0.0;
    for (std::size_t j = 0; j < 4; ++j) z += pt.q[j] * std::exp(-0.45 * sq(i, j));
    return z;
  };
  CHECK(ball(1) == Approx(0.81881408).epsilon(1e-8));
  CHECK(std::abs(ball(1) - 0.816) < 0.01);
  CHECK(ball(0) == Approx(0.40146352).epsilon(1e-8));
  CHECK(pt.channel(1, 1) == Approx(0.5 / 0.81881408).epsilon(1e-8));
  CHECK(pt.distortion == Approx(1.0034859407268102).epsilon(1e-9));
  CHECK(pt.rate_bits == Approx(0.15104980801860285).epsilon(1e-9));

  // The same point is reached from the uniform start: the optimal support is {y2, y3}.
  const RDPoint cold = ba_fixed_point(p, sq, -0.45);
  CHECK(cold.q[0] < 1e-8);
  CHECK(cold.rate_bits == Approx(pt.rate_bits).epsilon(1e-9));
}

TEST_CASE("solver errors") {
  const auto p = Distribution::uniform(2);
  const DistortionMatrix d(Matrix::from_rows({{0.0, kInf}, {kInf, 0.0}}));
  CHECK_THROWS_AS(ba_fixed_point(p, d, -1.0, Distribution({1.0, 0.0})), NoFeasibleOutputError);
  CHECK_THROWS_AS(ba_fixed_point(p, d, 0.5), ValidationError);

  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());
  SolverOptions tight;
  tight.max_iter = 1;
  CHECK_THROWS_AS(ba_fixed_point(Distribution::uniform(4), sq, -1.0, tight), NonConvergenceError);
  try {
    ba_fixed_point(Distribution::uniform(4), sq, -1.0, tight);
  } catch (const NonConvergenceError& e) {
    CHECK(e.slope() == -1.0);
  }
}

TEST_CASE("alternating update never increases the objective and ends stationary") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto na = testing::uniform_index(rng, 1, 5);
    const auto nb = testing::uniform_index(rng, 1, 5);
    const Distribution p = testing::random_distribution(rng, na);
    const DistortionMatrix d = random_distortion(rng, na, nb);
    const double s = -5.0 * testing::uniform01(rng);

    SolverOptions opts;
    double prev = std::numeric_limits<double>::infinity();
    bool descending = true;
    opts.observer = [&](std::size_t, double objective, std::span<const double>) {
      descending = descending && objective <= prev + 1e-12;
      prev = objective;
    };
    const RDPoint pt = ba_fixed_point(p, d, s, opts);
    CHECK(descending);
    CHECK(pt.rate_bits >= 0.0);
    CHECK(pt.distortion >= 0.0);

    // One more update from the fixed point.
    SolverOptions one;
    one.max_iter = 1;
    one.tol = 1.0;
    const RDPoint again = ba_fixed_point(p, d, s, pt.q, one);
    double change = 0.0;
    for (std::size_t j = 0; j < nb; ++j) change += std::abs(again.q[j] - pt.q[j]);
    CHECK(change < 10.0 * opts.tol);

    // channel_ij = q_j exp(s d_ij) lambda_i.
    for (std::size_t i = 0; i < na; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < nb; ++j) z += pt.q[j] * slope_kernel(s, d(i, j));
      for (std::size_t j = 0; j < nb; ++j) {
        CHECK(pt.channel(i, j) == Approx(pt.q[j] * slope_kernel(s, d(i, j)) / z).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("generalized form equals the parametric rate") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto na = testing::uniform_index(rng, 1, 5);
    const auto nb = testing::uniform_index(rng, 1, 5);
    const Distribution p = testing::random_distribution(rng, na);
    const DistortionMatrix d = random_distortion(rng, na, nb);
    const double s = -6.0 * testing::uniform01(rng);
    const RDPoint pt = ba_fixed_point(p, d, s);
    CHECK(std::abs(rate_via_generalized_form(p, pt.q, d, s) - pt.rate_bits) < 1e-9);
  }
  CHECK(rate_via_generalized_form(Distribution::uniform(3),
                                  Distribution::uniform(3),
                                  squared_distortion(Alphabet::from_values({0, 1, 2}), Alphabet::from_values({0, 1, 2})),
                                  0.0) == 0.0);
}

TEST_CASE("clear-set limit does not depend on s") {
  const auto p = Distribution::uniform(4);
  const SimilarityCover clear(
      Matrix::from_rows({{1, 1, 0, 0}, {1, 1, 1, 0}, {0, 1, 1, 1}, {0, 0, 1, 1}}));
  const DistortionMatrix d = neglog_distortion(clear);
  const Distribution q({0.1, 0.3, 0.4, 0.2});
  double h_star = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double ball = 0.0;
    for (std::size_t j = 0; j < 4; ++j) ball += q[j] * clear(i, j);
    h_star -= p[i] * std::log2(ball);
  }
  for (double s : {-0.1, -1.0, -7.0, -100.0}) {
    CHECK(rate_via_generalized_form(p, q, d, s) == Approx(h_star).epsilon(1e-12));
  }
}

TEST_CASE("two-output Lagrangian matches a brute-force grid over q") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto na = testing::uniform_index(rng, 2, 5);
    const Distribution p = testing::random_distribution(rng, na);
    Matrix dm(na, 2);
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < 2; ++j) dm(i, j) = 3.0 * testing::uniform01(rng);
    }
    const DistortionMatrix d(dm);
    const double s = -0.2 - 4.0 * testing::uniform01(rng);

    // I(X;Y) - s D / ln 2 for the channel induced by q, each term measured
    // from its own definition.
    double grid_min = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 1000; ++k) {
      const double t = k / 1000.0;
      Matrix ch(na, 2);
      for (std::size_t i = 0; i < na; ++i) {
        const double a = t * std::exp(s * dm(i, 0));
        const double b = (1 - t) * std::exp(s * dm(i, 1));
        ch(i, 0) = a / (a + b);
        ch(i, 1) = b / (a + b);
      }
      const Channel c(ch);
      const double lagr = shannon_mutual_information(p, c) -
                          s * average_distortion(p, c, d) / std::numbers::ln2;
      grid_min = std::min(grid_min, lagr);
    }
    // Endpoints: a single output carries zero information.
    for (std::size_t j = 0; j < 2; ++j) {
      double dj = 0.0;
      for (std::size_t i = 0; i < na; ++i) dj += p[i] * dm(i, j);
      grid_min = std::min(grid_min, -s * dj / std::numbers::ln2);
    }

    const RDPoint pt = ba_fixed_point(p, d, s);
    const double solver = pt.rate_bits - s * pt.distortion / std::numbers::ln2;
    CHECK(std::abs(solver - grid_min) < 1e-4);
    CHECK(solver <= grid_min + 1e-9);
  }
}

TEST_CASE("rate-distortion curve shape") {
  const auto p = Distribution::uniform(4);
  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());

  SUBCASE("s = 0 alone") {
    const std::vector<double> grid{0.0};
    const auto curve = rd_curve(p, sq, grid);
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].rate_bits == Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("monotone, convex and slope-consistent") {
    std::vector<double> grid;
    for (int k = 40; k >= 1; --k) grid.push_back(-0.1 * k);
    const auto curve = rd_curve(p, sq, grid);
    for (std::size_t k = 1; k < curve.size(); ++k) {
      CHECK(curve[k].distortion >= curve[k - 1].distortion - 1e-12);
      CHECK(curve[k].rate_bits <= curve[k - 1].rate_bits + 1e-12);
      const double dd = curve[k].distortion - curve[k - 1].distortion;
      if (dd > 1e-9) {
        const double chord = (curve[k].rate_bits - curve[k - 1].rate_bits) / dd * std::numbers::ln2;
        CHECK(chord >= curve[k - 1].s - 1e-6);
        CHECK(chord <= curve[k].s + 1e-6);
      }
    }
    // Every middle point lies on or below the chord of its neighbours.
    for (std::size_t a = 0; a < curve.size(); ++a) {
      for (std::size_t b = a + 2; b < curve.size(); ++b) {
        const double da = curve[a].distortion, db = curve[b].distortion;
        if (db - da < 1e-9) continue;
        for (std::size_t m = a + 1; m < b; ++m) {
          const double t = (curve[m].distortion - da) / (db - da);
          const double chord = curve[a].rate_bits + t * (curve[b].rate_bits - curve[a].rate_bits);
          CHECK(curve[m].rate_bits <= chord + 1e-6);
        }
      }
    }
  }

  SUBCASE("warm and cold starts agree") {
    std::vector<double> grid{-2.0, -1.0, -0.6, -0.45, -0.3};
    const auto warm = rd_curve(p, sq, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const RDPoint cold = ba_fixed_point(p, sq, grid[k]);
      CHECK(warm[k].rate_bits == Approx(cold.rate_bits).epsilon(1e-8));
      CHECK(warm[k].distortion == Approx(cold.distortion).epsilon(1e-8));
    }
  }

  const std::vector<double> unsorted{-1.0, -2.0};
  CHECK_THROWS_AS(rd_curve(p, sq, unsorted), ValidationError);
}

TEST_CASE("rate at a target distortion") {
  const auto p = Distribution::uniform(4);
  const DistortionMatrix sq = squared_distortion(coords_1_to_4(), coords_1_to_4());
  // Bisection oracle on s run independently: s* = -0.454092..., support {y2, y3}.
  CHECK(rate_at_distortion(p, sq, 1.0) == Approx(0.15332320430670485).epsilon(1e-7));
  CHECK(rate_at_distortion(p, sq, 1.5) == 0.0);
  CHECK(max_useful_distortion(p, sq) == Approx(1.5));
  CHECK(rate_at_distortion(p, sq, 0.0) == Approx(2.0).epsilon(1e-8));

  std::vector<double> grid;
  for (int k = 0; k <= 60; ++k) grid.push_back(-0.6 + 0.005 * k);
  const auto curve = rd_curve(p, sq, grid);
  const auto interp = interpolate_rate(curve, 1.0);
  REQUIRE(interp.has_value());
  CHECK(*interp >= 0.15332320430670485 - 1e-9);  // chords lie above a convex curve
  CHECK(*interp == Approx(0.15332320430670485).epsilon(1e-3));
  CHECK_FALSE(interpolate_rate(curve, 100.0).has_value());
}
