#include "ratetol/info_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "ratetol/errors.hpp"

namespace ratetol {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ValidationError(std::string(what) + ": size mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

void validate_membership(std::span<const double> membership) {
  for (std::size_t i = 0; i < membership.size(); ++i) {
    const double m = membership[i];
    if (!(m >= 0.0 && m <= 1.0)) {
      throw ValidationError("membership grade " + std::to_string(i) + " outside [0,1]");
    }
  }
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  if (labels_.size() != values_.size()) {
    throw ValidationError("alphabet has " + std::to_string(labels_.size()) + " labels but " +
                          std::to_string(values_.size()) + " values");
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw ValidationError("duplicate alphabet label '" + l + "'");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("alphabet coordinate is not finite");
  }
}

Alphabet Alphabet::from_values(std::vector<double> values, const std::string& prefix) {
  std::vector<std::string> labels(values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = prefix + std::to_string(i + 1);
  return Alphabet(std::move(labels), std::move(values));
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("distribution is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0) || !std::isfinite(probs_[i])) {
      throw ValidationError("probability " + std::to_string(i) + " is negative or not finite");
    }
    total += probs_[i];
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

Distribution Distribution::uniform(std::size_t n) {
  return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(std::size_t n, std::size_t at) {
  std::vector<double> v(n, 0.0);
  v.at(at) = 1.0;
  return Distribution(std::move(v));
}

Distribution Distribution::normalized(std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw ValidationError("cannot normalize weights with total " + std::to_string(total));
  }
  for (double& w : weights) w /= total;
  return Distribution(std::move(weights));
}

Channel::Channel(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw ValidationError("channel is empty");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    double total = 0.0;
    for (double v : m_.row(i)) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError("channel row " + std::to_string(i) + " has a negative entry");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw ValidationError("channel row " + std::to_string(i) + " sums to " +
                            std::to_string(total));
    }
  }
}

Channel Channel::identity(std::size_t n) { return Channel(Matrix::identity(n)); }

Distribution Channel::output_marginal(const Distribution& p) const {
  require_same_size(p.size(), inputs(), "output_marginal");
  std::vector<double> q(outputs(), 0.0);
  for (std::size_t i = 0; i < inputs(); ++i) {
    for (std::size_t j = 0; j < outputs(); ++j) q[j] += p[i] * m_(i, j);
  }
  return Distribution::normalized(std::move(q));
}

SimilarityCover::SimilarityCover(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.cols() == 0) throw ValidationError("similarity cover is empty");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    bool any_positive = false;
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      const double c = m_(i, j);
      if (!(c >= 0.0 && c <= 1.0)) {
        throw ValidationError("similarity entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside [0,1]");
      }
      any_positive = any_positive || c > 0.0;
    }
    if (!any_positive) {
      throw ValidationError("similarity row " + std::to_string(i) + " admits no output");
    }
  }
}

bool SimilarityCover::is_clear() const noexcept {
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    for (double c : m_.row(i)) {
      if (c != 0.0 && c != 1.0) return false;
    }
  }
  return true;
}

ExtendedBits::ExtendedBits(double bits) : bits_(bits) {
  if (std::isnan(bits) || bits == std::numeric_limits<double>::infinity()) {
    throw ValidationError("extended bits must be finite or -inf");
  }
}

ExtendedBits ExtendedBits::negative_infinity() noexcept {
  ExtendedBits b;
  b.bits_ = kNegInf;
  return b;
}

bool ExtendedBits::is_negative_infinity() const noexcept { return bits_ == kNegInf; }

ExtendedBits ExtendedBits::scaled(double weight) const {
  if (!(weight >= 0.0)) throw ValidationError("extended bits scaled by a negative weight");
  if (weight == 0.0) return ExtendedBits{};
  if (is_negative_infinity()) return negative_infinity();
  return ExtendedBits(weight * bits_);
}

ExtendedBits operator+(ExtendedBits a, ExtendedBits b) noexcept {
  ExtendedBits out;
  out.bits_ = a.bits_ + b.bits_;  // -inf absorbs; +inf is never representable
  return out;
}

double entropy(const Distribution& p) {
  double h = 0.0;
  for (double pi : p) {
    if (pi > 0.0) h -= pi * std::log2(pi);
  }
  return std::max(h, 0.0);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  require_same_size(p.size(), q.size(), "kl_divergence");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw SupportMismatchError("kl_divergence: p has mass at symbol " + std::to_string(i) +
                                 " where q has none");
    }
    kl += p[i] * std::log2(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double shannon_mutual_information(const Distribution& p, const Channel& ch) {
  require_same_size(p.size(), ch.inputs(), "shannon_mutual_information");
  std::vector<double> q(ch.outputs(), 0.0);
  for (std::size_t i = 0; i < ch.inputs(); ++i) {
    for (std::size_t j = 0; j < ch.outputs(); ++j) q[j] += p[i] * ch(i, j);
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < ch.inputs(); ++i) {
    if (p[i] == 0.0) continue;
    for (std::size_t j = 0; j < ch.outputs(); ++j) {
      const double c = ch(i, j);
      if (c > 0.0) mi += p[i] * c * std::log2(c / q[j]);
    }
  }
  return std::max(mi, 0.0);
}

double logical_probability(const Distribution& p, std::span<const double> membership) {
  require_same_size(p.size(), membership.size(), "logical_probability");
  validate_membership(membership);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p[i] * membership[i];
  return std::min(total, 1.0);
}

Distribution set_bayes_posterior(const Distribution& p, std::span<const double> membership) {
  const double q = logical_probability(p, membership);
  if (q == 0.0) {
    throw ZeroLogicalProbabilityError("set_bayes_posterior: logical probability is zero");
  }
  std::vector<double> post(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) post[i] = p[i] * membership[i] / q;
  return Distribution::normalized(std::move(post));
}

ExtendedBits single_event_information(double prior, double posterior) {
  if (!(prior > 0.0) || prior > 1.0) {
    throw InvalidPriorError("single_event_information: prior must lie in (0,1]");
  }
  if (!(posterior >= 0.0) || posterior > 1.0) {
    throw ValidationError("single_event_information: posterior must lie in [0,1]");
  }
  if (posterior == 0.0) return ExtendedBits::negative_infinity();
  return ExtendedBits(std::log2(posterior / prior));
}

ExtendedBits predictive_information(double membership_at_fact, double logical_prob) {
  if (!(membership_at_fact >= 0.0 && membership_at_fact <= 1.0)) {
    throw ValidationError("predictive_information: membership outside [0,1]");
  }
  if (logical_prob == 0.0) {
    throw ZeroLogicalProbabilityError("predictive_information: logical probability is zero");
  }
  if (!(logical_prob > 0.0 && logical_prob <= 1.0)) {
    throw ValidationError("predictive_information: logical probability outside (0,1]");
  }
  if (membership_at_fact == 0.0) return ExtendedBits::negative_infinity();
  return ExtendedBits(std::log2(membership_at_fact / logical_prob));
}

double kullback_information(const Distribution& p, std::span<const double> membership) {
  const Distribution post = set_bayes_posterior(p, membership);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (post[i] > 0.0) kl += post[i] * std::log2(post[i] / p[i]);
  }
  return std::max(kl, 0.0);
}

ExtendedBits generalized_kullback(const Distribution& evidence, const Distribution& p,
                                  std::span<const double> membership) {
  require_same_size(evidence.size(), p.size(), "generalized_kullback");
  const double q = logical_probability(p, membership);
  if (q == 0.0) {
    throw ZeroLogicalProbabilityError("generalized_kullback: logical probability is zero");
  }
  // P(x_i|A_j)/P(x_i) = Q(A_j|x_i)/Q(A_j), which stays defined where P(x_i) = 0.
  ExtendedBits total;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += predictive_information(membership[i], q).scaled(evidence[i]);
  }
  return total;
}

ExtendedBits generalized_mutual_information(const Distribution& p, const Channel& ch,
                                            const SimilarityCover& cover) {
  require_same_size(p.size(), ch.inputs(), "generalized_mutual_information");
  if (cover.rows() != ch.inputs() || cover.cols() != ch.outputs()) {
    throw ValidationError("generalized_mutual_information: cover shape differs from channel");
  }
  ExtendedBits total;
  for (std::size_t j = 0; j < ch.outputs(); ++j) {
    double py = 0.0;
    for (std::size_t i = 0; i < ch.inputs(); ++i) py += p[i] * ch(i, j);
    if (py == 0.0) continue;
    const Membership col = cover.column(j);
    const double q = logical_probability(p, col);
    if (q == 0.0) {
      throw ZeroLogicalProbabilityError("generalized_mutual_information: Q(A_" +
                                        std::to_string(j + 1) + ") is zero");
    }
    for (std::size_t i = 0; i < ch.inputs(); ++i) {
      total += predictive_information(col[i], q).scaled(p[i] * ch(i, j));
    }
  }
  return total;
}

Membership semantic_normalize(const Channel& ch, std::size_t j) {
  if (j >= ch.outputs()) throw ValidationError("semantic_normalize: output index out of range");
  Membership out(ch.inputs());
  for (std::size_t i = 0; i < ch.inputs(); ++i) {
    const auto row = ch.row(i);
    const double peak = *std::max_element(row.begin(), row.end());
    if (!(peak > 0.0)) {
      throw AllZeroRowError("semantic_normalize: channel row " + std::to_string(i) + " is zero");
    }
    out[i] = row[j] / peak;
  }
  return out;
}

}  // namespace ratetol
