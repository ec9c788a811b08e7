#include <cmath>
#include <random>

#include "doctest.h"
#include "ratetol/errors.hpp"
#include "ratetol/info_core.hpp"
#include "test_support.hpp"

using namespace ratetol;
using doctest::Approx;

namespace {

const Channel& split_channel() {
  static const Channel ch(Matrix::from_rows({{0, 0.8, 0.2, 0},
                                             {0, 0.903, 0.097, 0},
                                             {0, 0.097, 0.903, 0},
                                             {0, 0.2, 0.8, 0}}));
  return ch;
}

Membership clear_set(std::size_t n, std::initializer_list<std::size_t> members) {
  Membership m(n, 0.0);
  for (auto i : members) m[i] = 1.0;
  return m;
}

}  // namespace

TEST_CASE("domain types reject invalid input") {
  CHECK_THROWS_AS(Distribution({0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), ValidationError);
  CHECK_THROWS_AS(Channel(Matrix::from_rows({{0.5, 0.4}})), ValidationError);
  CHECK_THROWS_AS(SimilarityCover(Matrix::from_rows({{0.0, 0.0}})), ValidationError);
  CHECK_THROWS_AS(SimilarityCover(Matrix::from_rows({{1.2, 0.0}})), ValidationError);
  CHECK_THROWS_AS(Alphabet({"a", "a"}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(Alphabet({"a"}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(ExtendedBits(std::numeric_limits<double>::infinity()), ValidationError);

  CHECK(SimilarityCover(Matrix::identity(3)).is_clear());
  CHECK_FALSE(SimilarityCover(Matrix::from_rows({{1.0, 0.5}})).is_clear());
}

TEST_CASE("extended bits absorb -inf and treat 0 * -inf as 0") {
  const auto ninf = ExtendedBits::negative_infinity();
  CHECK((ninf + ExtendedBits(3.0)).is_negative_infinity());
  CHECK(ninf.scaled(0.0) == ExtendedBits(0.0));
  CHECK(ninf.scaled(0.5).is_negative_infinity());
  CHECK(ExtendedBits(2.0).scaled(0.25).value() == 0.5);
}

TEST_CASE("entropy") {
  CHECK(entropy(Distribution::uniform(4)) == Approx(2.0));
  CHECK(entropy(Distribution::point_mass(3, 1)) == 0.0);
  CHECK(entropy(Distribution({0.5, 0.25, 0.25})) == Approx(1.5));
}

TEST_CASE("kl divergence") {
  const Distribution p({0.3, 0.7});
  CHECK(kl_divergence(p, p) == 0.0);
  // 0.5 log2(2) + 0.5 log2(2/3)
  CHECK(kl_divergence(Distribution({0.5, 0.5}), Distribution({0.25, 0.75})) ==
        Approx(0.20751874963942185).epsilon(1e-12));
  CHECK_THROWS_AS(kl_divergence(Distribution({1.0, 0.0}), Distribution({0.0, 1.0})),
                  SupportMismatchError);
}

TEST_CASE("shannon mutual information") {
  const auto p = Distribution::uniform(4);
  CHECK(shannon_mutual_information(p, Channel::identity(4)) == Approx(2.0));

  const Channel same(Matrix::from_rows({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}}));
  CHECK(shannon_mutual_information(p, same) == Approx(0.0).epsilon(1e-15));

  // Direct evaluation of the defining double sum (q = (0, .5, .5, 0)):
  // this channel carries 0.4093 bits, not the 0.369 quoted with it.
  CHECK(shannon_mutual_information(p, split_channel()) ==
        Approx(0.40932943620395856).epsilon(1e-12));
}

TEST_CASE("logical probability") {
  const auto p = Distribution::uniform(4);
  CHECK(logical_probability(p, clear_set(4, {0, 1, 2})) == Approx(0.75));
  CHECK(logical_probability(p, Membership(4, 1.0)) == Approx(1.0));
  Membership gauss(4);
  for (int i = 0; i < 4; ++i) gauss[i] = std::exp(-0.5 * i * i);
  CHECK(logical_probability(p, gauss) == Approx(0.43824373487187207).epsilon(1e-12));
  CHECK(logical_probability(p, Membership{1.0, 0.6065, 0.1353, 0.0111}) == Approx(0.438225));
  CHECK_THROWS_AS(logical_probability(p, Membership{1.5, 0, 0, 0}), ValidationError);
}

TEST_CASE("set-Bayesian posterior") {
  const auto p = Distribution::uniform(4);
  const Distribution post = set_bayes_posterior(p, clear_set(4, {1, 3}));
  CHECK(post[0] == 0.0);
  CHECK(post[1] == Approx(0.5));
  CHECK(post[2] == 0.0);
  CHECK(post[3] == Approx(0.5));

  const Distribution prior({0.1, 0.2, 0.7});
  const Distribution same = set_bayes_posterior(prior, Membership(3, 0.3));
  for (std::size_t i = 0; i < 3; ++i) CHECK(same[i] == Approx(prior[i]));

  const Distribution two = set_bayes_posterior(Distribution({0.5, 0.5}), Membership{1.0, 0.5});
  CHECK(two[0] == Approx(2.0 / 3.0));
  CHECK(two[1] == Approx(1.0 / 3.0));

  CHECK_THROWS_AS(set_bayes_posterior(Distribution({1.0, 0.0}), Membership{0.0, 1.0}),
                  ZeroLogicalProbabilityError);
}

TEST_CASE("single event information") {
  CHECK(single_event_information(0.3, 0.3).value() == Approx(0.0));
  CHECK(single_event_information(0.25, 1.0).value() == Approx(2.0));
  CHECK(single_event_information(0.5, 0.25).value() == Approx(-1.0));
  CHECK(single_event_information(0.5, 0.0).is_negative_infinity());
  CHECK_THROWS_AS(single_event_information(0.0, 0.5), InvalidPriorError);
}

TEST_CASE("predictive information") {
  CHECK(predictive_information(1.0, 0.25).value() == Approx(2.0));
  CHECK(predictive_information(0.0, 0.25).is_negative_infinity());
  CHECK(predictive_information(0.0, 1.0).is_negative_infinity());
  CHECK(predictive_information(0.4, 0.4).value() == Approx(0.0));
  CHECK_THROWS_AS(predictive_information(0.5, 0.0), ZeroLogicalProbabilityError);

  SUBCASE("strictly increasing in membership, positive iff above Q") {
    const double q = 0.3;
    double prev = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 100; ++k) {
      const double m = k / 100.0;
      const double v = predictive_information(m, q).value();
      CHECK(v > prev);
      CHECK((v > 0.0) == (m > q));
      prev = v;
    }
  }
}

TEST_CASE("kullback information") {
  const auto p = Distribution::uniform(4);
  CHECK(kullback_information(p, Membership(4, 0.7)) == Approx(0.0));
  CHECK(kullback_information(p, clear_set(4, {0, 1})) == Approx(1.0));
  CHECK(kullback_information(p, clear_set(4, {0, 1, 2})) == Approx(std::log2(4.0 / 3.0)));
}

TEST_CASE("generalized kullback") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = testing::uniform_index(rng, 2, 6);
    const Distribution p = testing::random_distribution(rng, n);
    const Matrix c = testing::random_cover_matrix(rng, n, 1);
    const Membership m = c.column(0);
    const Distribution forecast = set_bayes_posterior(p, m);
    CHECK(generalized_kullback(forecast, p, m).value() ==
          Approx(kullback_information(p, m)).epsilon(1e-12));

    const Distribution evidence = testing::random_distribution(rng, n);
    CHECK(generalized_kullback(evidence, p, Membership(n, 0.4)).value() ==
          Approx(0.0).epsilon(1e-15));

    const std::size_t at = testing::uniform_index(rng, 0, n - 1);
    const auto point = generalized_kullback(Distribution::point_mass(n, at), p, m);
    const auto single = predictive_information(m[at], logical_probability(p, m));
    CHECK(point.is_negative_infinity() == single.is_negative_infinity());
    if (single.is_finite()) CHECK(point.value() == Approx(single.value()));
  }

  // Evidence on a falsified symbol gives -inf rather than an error.
  const auto v = generalized_kullback(Distribution({0.5, 0.5}), Distribution({0.5, 0.5}),
                                      Membership{1.0, 0.0});
  CHECK(v.is_negative_infinity());
}

TEST_CASE("generalized mutual information") {
  const auto p = Distribution::uniform(4);
  const Channel ch = split_channel();
  const SimilarityCover flat(Matrix(4, 4, 0.6));
  CHECK(generalized_mutual_information(p, ch, flat).value() == Approx(0.0).epsilon(1e-15));

  // Deterministic partition channel with the matching clear cover: forecast
  // and factual posteriors coincide.
  const Channel partition(Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}}));
  const SimilarityCover blocks(Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}}));
  CHECK(generalized_mutual_information(p, partition, blocks).value() ==
        Approx(shannon_mutual_information(p, partition)));

  const SimilarityCover wrong(Matrix::from_rows({{0, 1}, {1, 0}, {0, 1}, {0, 1}}));
  CHECK(generalized_mutual_information(p, partition, wrong).is_negative_infinity());
}

TEST_CASE("generalized mutual information is dominated by Shannon's") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto na = testing::uniform_index(rng, 1, 6);
    const auto nb = testing::uniform_index(rng, 1, 6);
    const Distribution p = testing::random_distribution(rng, na);
    const Channel ch = testing::random_channel(rng, na, nb);
    Matrix c = testing::random_cover_matrix(rng, na, nb);
    // Every label needs a nonempty extension.
    for (std::size_t j = 0; j < nb; ++j) {
      if (logical_probability(p, c.column(j)) == 0.0) c(testing::uniform_index(rng, 0, na - 1), j) = 0.5;
    }
    const SimilarityCover cover(std::move(c));
    const double shannon = shannon_mutual_information(p, ch);
    CHECK(generalized_mutual_information(p, ch, cover).value() <= shannon + 1e-9);
  }
}

TEST_CASE("semantic normalize") {
  const Channel tie(Matrix::from_rows({{0.5, 0.5}}));
  CHECK(semantic_normalize(tie, 0)[0] == 1.0);
  CHECK(semantic_normalize(tie, 1)[0] == 1.0);

  const Channel id = Channel::identity(3);
  const Membership col = semantic_normalize(id, 1);
  CHECK(col == Membership{0.0, 1.0, 0.0});

  const Channel skew(Matrix::from_rows({{0.8, 0.2}}));
  CHECK(semantic_normalize(skew, 1)[0] == Approx(0.25));
  CHECK_THROWS_AS(semantic_normalize(skew, 2), ValidationError);
}

TEST_CASE("nonnegativity and posterior validity on random batteries") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = testing::uniform_index(rng, 1, 6);
    const Distribution p = testing::random_distribution(rng, n);
    const Distribution q = testing::random_distribution(rng, n);
    CHECK(entropy(p) >= 0.0);
    CHECK(kl_divergence(p, q) >= 0.0);
    CHECK(kl_divergence(p, p) <= 1e-12);
    const Membership m = testing::random_cover_matrix(rng, n, 1).column(0);
    const Distribution post = set_bayes_posterior(p, m);  // validates on construction
    CHECK(post.size() == n);
    CHECK(shannon_mutual_information(p, testing::random_channel(rng, n, 3)) >= 0.0);
  }
}
