#pragma once

// Gaussian confusion memberships, GPS accuracy conventions, the random-set
// membership estimator and forecast scoring/optimization.

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ratetol/info_core.hpp"

namespace ratetol {

// c(x, center) = exp(-(x - center)^2 / (2 sigma^2)).
struct GaussianConfusion {
  GaussianConfusion(double center, double sigma);

  double center;
  double sigma;
};

enum class AccuracyKind { kDrms, k2Drms, kCep };

struct AccuracySpec {
  AccuracySpec(AccuracyKind kind, double radius);

  AccuracyKind kind;
  double radius;
};

// Outcomes of repeated confusion experiments for one predicted position;
// each subset lists the indices of the source symbols confused with it.
class SubsetSampleSet {
 public:
  explicit SubsetSampleSet(std::vector<std::vector<std::size_t>> subsets);

  std::size_t size() const noexcept { return subsets_.size(); }
  const std::vector<std::vector<std::size_t>>& subsets() const noexcept { return subsets_; }

 private:
  std::vector<std::vector<std::size_t>> subsets_;
};

struct ForecastChoice {
  double center;
  double sigma;
  ExtendedBits value;
};

double confusion(double x, const GaussianConfusion& model);
// Natural log of confusion(), exact even where confusion() underflows.
double log_confusion(double x, const GaussianConfusion& model);

Membership confusion_column(const Alphabet& a, const GaussianConfusion& model);

SimilarityCover build_cover(const Alphabet& a, const Alphabet& b, double sigma);

// Mass of the standard normal on [-z, z], by adaptive Simpson quadrature.
double normal_central_mass(double z);
// z with normal_central_mass(z) == mass, by bisection.
double central_normal_quantile(double mass);

// DRMS r -> r, 2DRMS r -> r/2, CEP r -> r / z_0.5 (1-D central quantile).
double accuracy_to_sigma(const AccuracySpec& spec);

// N_i / N for each source symbol.
Membership estimate_membership(const SubsetSampleSet& samples, const Alphabet& a);

// One experiment per draw: symbol i joins the subset with probability
// confusion(value_i, model). The caller owns the generator.
SubsetSampleSet draw_confusion_subsets(const Alphabet& a, const GaussianConfusion& model,
                                       std::size_t n, std::mt19937_64& rng);

// sum_i P(x_i|z) log2(Q(A_j|x_i) / Q(A_j)) with Q(A_j) under the prior p.
ExtendedBits evaluate_forecast(const Distribution& evidence, const Distribution& p,
                               const GaussianConfusion& model, const Alphabet& a);

// Exhaustive grid search; centers outer, sigmas inner, first maximum wins.
ForecastChoice optimize_forecast(const Distribution& evidence, const Distribution& p,
                                 std::span<const double> centers,
                                 std::span<const double> sigmas, const Alphabet& a);

}  // namespace ratetol
