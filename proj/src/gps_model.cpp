#include "ratetol/gps_model.hpp"

#include <cmath>
#include <numbers>

#include "ratetol/errors.hpp"

namespace ratetol {
namespace {

constexpr double kSimpsonTolerance = 1e-10;

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = standard_normal_pdf(lm);
  const double frm = standard_normal_pdf(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double uniform01(std::mt19937_64& rng) {
  // 53 high bits; independent of the standard library's distribution code.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

GaussianConfusion::GaussianConfusion(double center_, double sigma_)
    : center(center_), sigma(sigma_) {
  if (!std::isfinite(center)) throw ValidationError("confusion center is not finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValidationError("confusion sigma must be positive");
  }
}

AccuracySpec::AccuracySpec(AccuracyKind kind_, double radius_) : kind(kind_), radius(radius_) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ValidationError("accuracy radius must be positive");
  }
}

SubsetSampleSet::SubsetSampleSet(std::vector<std::vector<std::size_t>> subsets)
    : subsets_(std::move(subsets)) {
  if (subsets_.empty()) throw ValidationError("subset sample set is empty");
}

double log_confusion(double x, const GaussianConfusion& model) {
  const double dx = x - model.center;
  return -dx * dx / (2.0 * model.sigma * model.sigma);
}

double confusion(double x, const GaussianConfusion& model) {
  return std::exp(log_confusion(x, model));
}

Membership confusion_column(const Alphabet& a, const GaussianConfusion& model) {
  Membership col(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) col[i] = confusion(a.value(i), model);
  return col;
}

SimilarityCover build_cover(const Alphabet& a, const Alphabet& b, double sigma) {
  Matrix m(a.size(), b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    const GaussianConfusion model(b.value(j), sigma);
    for (std::size_t i = 0; i < a.size(); ++i) m(i, j) = confusion(a.value(i), model);
  }
  return SimilarityCover(std::move(m));
}

double normal_central_mass(double z) {
  if (!(z >= 0.0)) throw ValidationError("normal_central_mass: z must be nonnegative");
  if (z == 0.0) return 0.0;
  // Beyond 40 sigma the tail is far below double resolution.
  const double b = std::min(z, 40.0);
  const double fa = standard_normal_pdf(0.0);
  const double fm = standard_normal_pdf(0.5 * b);
  const double fb = standard_normal_pdf(b);
  const double half =
      adaptive_simpson(0.0, b, fa, fm, fb, simpson(0.0, b, fa, fm, fb), kSimpsonTolerance, 50);
  return std::min(2.0 * half, 1.0);
}

double central_normal_quantile(double mass) {
  if (!(mass > 0.0 && mass < 1.0)) {
    throw ValidationError("central_normal_quantile: mass must lie in (0,1)");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (normal_central_mass(hi) < mass) hi *= 2.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (normal_central_mass(mid) < mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double accuracy_to_sigma(const AccuracySpec& spec) {
  switch (spec.kind) {
    case AccuracyKind::kDrms:
      return spec.radius;
    case AccuracyKind::k2Drms:
      return spec.radius / 2.0;
    case AccuracyKind::kCep:
      return spec.radius / central_normal_quantile(0.5);
  }
  throw ValidationError("unknown accuracy kind");
}

Membership estimate_membership(const SubsetSampleSet& samples, const Alphabet& a) {
  std::vector<std::size_t> counts(a.size(), 0);
  for (const auto& subset : samples.subsets()) {
    std::vector<bool> seen(a.size(), false);
    for (std::size_t i : subset) {
      if (i >= a.size()) throw ValidationError("subset member outside the alphabet");
      if (!seen[i]) ++counts[i];
      seen[i] = true;
    }
  }
  Membership out(a.size());
  const auto n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = static_cast<double>(counts[i]) / n;
  return out;
}

SubsetSampleSet draw_confusion_subsets(const Alphabet& a, const GaussianConfusion& model,
                                       std::size_t n, std::mt19937_64& rng) {
  const Membership c = confusion_column(a, model);
  std::vector<std::vector<std::size_t>> subsets(n);
  for (auto& subset : subsets) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (uniform01(rng) < c[i]) subset.push_back(i);
    }
  }
  return SubsetSampleSet(std::move(subsets));
}

ExtendedBits evaluate_forecast(const Distribution& evidence, const Distribution& p,
                               const GaussianConfusion& model, const Alphabet& a) {
  if (evidence.size() != a.size() || p.size() != a.size()) {
    throw ValidationError("evaluate_forecast: distributions and alphabet differ in size");
  }
  std::vector<double> log_c(a.size());
  double q = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    log_c[i] = log_confusion(a.value(i), model);
    q += p[i] * std::exp(log_c[i]);
  }
  if (!(q > 0.0)) {
    throw ZeroLogicalProbabilityError("evaluate_forecast: logical probability is zero");
  }
  const double log_q = std::log(q);
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (evidence[i] > 0.0) total += evidence[i] * (log_c[i] - log_q);
  }
  return ExtendedBits(total / std::numbers::ln2);
}

ForecastChoice optimize_forecast(const Distribution& evidence, const Distribution& p,
                                 std::span<const double> centers,
                                 std::span<const double> sigmas, const Alphabet& a) {
  if (centers.empty() || sigmas.empty()) {
    throw ValidationError("optimize_forecast: empty candidate grid");
  }
  bool have_best = false;
  ForecastChoice best{0.0, 0.0, ExtendedBits::negative_infinity()};
  for (double c : centers) {
    for (double s : sigmas) {
      const ExtendedBits v = evaluate_forecast(evidence, p, GaussianConfusion(c, s), a);
      if (!have_best || v > best.value) {
        best = {c, s, v};
        have_best = true;
      }
    }
  }
  return best;
}

}  // namespace ratetol
