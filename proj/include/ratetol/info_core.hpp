#pragma once

// Alphabets, distributions, similarity covers and the statistical and
// semantic information measures built on them.
//
// Every reported information value is in bits (log base 2). Gaussian
// memberships and slopes elsewhere in the toolkit use the natural base.
// Sums follow 0 * log 0 = 0 and 0 * (-inf) = 0.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ratetol/matrix.hpp"

namespace ratetol {

inline constexpr double kProbabilityTolerance = 1e-9;

// Membership grades Q(A_j|x_i) of one fuzzy set, indexed by source symbol.
using Membership = std::vector<double>;

class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(std::vector<std::string> labels, std::vector<double> values);

  // Labels default to prefix1, prefix2, ...
  static Alphabet from_values(std::vector<double> values, const std::string& prefix = "x");

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_.at(i); }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t n);
  static Distribution point_mass(std::size_t n, std::size_t at);
  // Scales nonnegative weights to unit mass.
  static Distribution normalized(std::vector<double> weights);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::vector<double>::const_iterator begin() const { return probs_.begin(); }
  std::vector<double>::const_iterator end() const { return probs_.end(); }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

// Row-stochastic P(Y|X).
class Channel {
 public:
  Channel() = default;
  explicit Channel(Matrix m);

  static Channel identity(std::size_t n);

  std::size_t inputs() const noexcept { return m_.rows(); }
  std::size_t outputs() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::span<const double> row(std::size_t i) const { return m_.row(i); }
  const Matrix& matrix() const noexcept { return m_; }

  // P(Y) induced by a source P(X).
  Distribution output_marginal(const Distribution& p) const;

 private:
  Matrix m_;
};

// c_ij in [0,1]: row i is the fuzzy ball B_i on B, column j the fuzzy set A_j on A.
class SimilarityCover {
 public:
  SimilarityCover() = default;
  explicit SimilarityCover(Matrix m);

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  Membership column(std::size_t j) const { return m_.column(j); }
  const Matrix& matrix() const noexcept { return m_; }

  // Every entry is exactly 0 or 1.
  bool is_clear() const noexcept;

  friend bool operator==(const SimilarityCover&, const SimilarityCover&) = default;

 private:
  Matrix m_;
};

// A number of bits, or -inf (the log of a zero membership).
class ExtendedBits {
 public:
  constexpr ExtendedBits() = default;
  // Throws ValidationError for NaN or +inf.
  explicit ExtendedBits(double bits);

  static ExtendedBits negative_infinity() noexcept;

  bool is_negative_infinity() const noexcept;
  bool is_finite() const noexcept { return !is_negative_infinity(); }
  // -inf as a double when is_negative_infinity().
  double value() const noexcept { return bits_; }

  // weight * *this with 0 * (-inf) = 0. weight must be >= 0.
  ExtendedBits scaled(double weight) const;

  friend ExtendedBits operator+(ExtendedBits a, ExtendedBits b) noexcept;
  ExtendedBits& operator+=(ExtendedBits other) noexcept { return *this = *this + other; }
  friend auto operator<=>(ExtendedBits a, ExtendedBits b) noexcept { return a.bits_ <=> b.bits_; }
  friend bool operator==(ExtendedBits a, ExtendedBits b) noexcept = default;

 private:
  double bits_ = 0.0;
};

double entropy(const Distribution& p);

// Throws SupportMismatchError when p has mass where q has none.
double kl_divergence(const Distribution& p, const Distribution& q);

double shannon_mutual_information(const Distribution& p, const Channel& ch);

// Q(A_j) = sum_i P(x_i) Q(A_j|x_i).
double logical_probability(const Distribution& p, std::span<const double> membership);

// P(x_i|A_j) = P(x_i) Q(A_j|x_i) / Q(A_j).
Distribution set_bayes_posterior(const Distribution& p, std::span<const double> membership);

// log2(posterior / prior); -inf for a zero posterior.
ExtendedBits single_event_information(double prior, double posterior);

// log2(Q(A_j|x_i) / Q(A_j)); -inf when x_i is outside the set.
ExtendedBits predictive_information(double membership_at_fact, double logical_prob);

// sum_i P(x_i|A_j) log2(P(x_i|A_j) / P(x_i)).
double kullback_information(const Distribution& p, std::span<const double> membership);

// sum_i evidence_i log2(P(x_i|A_j) / P(x_i)); evidence is the observed
// P(X|y_j), the membership column the forecast.
ExtendedBits generalized_kullback(const Distribution& evidence, const Distribution& p,
                                  std::span<const double> membership);

// sum_ij P(x_i) P(y_j|x_i) log2(Q(A_j|x_i) / Q(A_j)).
ExtendedBits generalized_mutual_information(const Distribution& p, const Channel& ch,
                                            const SimilarityCover& cover);

// Q(A_j|x_i) = P(y_j|x_i) / max_k P(y_k|x_i).
Membership semantic_normalize(const Channel& ch, std::size_t j);

}  // namespace ratetol
