#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "detproc/random.hpp"

namespace detproc {

struct TestReport {
  std::string description;
  double statistic = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();  // NaN: no p-value
  std::size_t sample_size = 0;
  std::size_t degrees_of_freedom = 0;
  double significance = 1e-3;
  bool passed = false;
};

/// Pearson goodness of fit of category counts against a pmf. Mass missing
/// from `expected` (1 - sum) forms a final tail category that also collects
/// observed counts past the end of `expected`. Adjacent categories are
/// merged until each expected count is at least 5.
TestReport chi_square_fit(std::span<const std::uint64_t> observed,
                          std::span<const double> expected,
                          double significance = 1e-3,
                          std::string description = "chi-square fit");

/// Two-sample chi-square test of homogeneity on a common category axis.
TestReport chi_square_homogeneity(std::span<const std::uint64_t> first,
                                  std::span<const std::uint64_t> second,
                                  double significance = 1e-3,
                                  std::string description = "chi-square homogeneity");

/// Histogram of non-negative integer values.
std::vector<std::uint64_t> tally(std::span<const std::size_t> values);

struct NamedDistribution {
  enum class Kind { Uniform, Gamma, Beta, Normal, Exponential };
  Kind kind = Kind::Uniform;
  double a = 0.0;
  double b = 1.0;

  static NamedDistribution uniform() { return {Kind::Uniform, 0.0, 1.0}; }
  static NamedDistribution gamma(double shape) { return {Kind::Gamma, shape, 1.0}; }
  static NamedDistribution beta(double a, double b) { return {Kind::Beta, a, b}; }
  static NamedDistribution normal() { return {Kind::Normal, 0.0, 1.0}; }
  static NamedDistribution exponential() { return {Kind::Exponential, 1.0, 1.0}; }

  /// "uniform", "normal", "exponential", "gamma(k)", "beta(a,b)".
  static NamedDistribution parse(const std::string& text);

  double cdf(double x) const;
  std::string name() const;
};

/// Kolmogorov-Smirnov statistic with the asymptotic p-value
/// Q((sqrt(n) + 0.12 + 0.11/sqrt(n)) D). Requires at least 10 samples.
TestReport ks_fit(std::vector<double> samples, const NamedDistribution& dist,
                  double significance = 1e-3, std::string description = "");

/// Sup distance between the empirical CDF of `samples` and `cdf`.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

double kolmogorov_survival(double lambda);

struct CltLevel {
  double mean = 0.0;
  double variance = 0.0;
  double ks = 0.0;
};

struct CltReport {
  std::vector<CltLevel> levels;
  TestReport report;
};

inline constexpr double kCltMaxFinalKs = 0.02;
inline constexpr double kCltMinFinalVariance = 50.0;

/// Counts at each level are sums of independent Bernoulli(lambda) draws,
/// standardized by the exact mean sum(l) and variance sum(l(1-l)). Passes
/// when the KS distance to N(0,1) decreases across levels and the last
/// level has variance >= 50 and KS < 0.02. Needs >= 3 levels with strictly
/// increasing variance.
CltReport clt_check(const std::vector<std::vector<double>>& levels,
                    std::size_t samples_per_level, const RandomStream& root);

}  // namespace detproc
