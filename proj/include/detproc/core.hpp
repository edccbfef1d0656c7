#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "detproc/random.hpp"

namespace detproc {

/// Eigenvalues within this distance outside [0, 1] are clamped onto it.
inline constexpr double kEigenTolerance = 1e-9;

/// Finite ground set: labeled atoms with positive reference masses.
class GroundSet {
 public:
  GroundSet(std::vector<std::string> labels, std::vector<double> weights);

  /// `n` atoms labeled "0".."n-1" with unit mass.
  static GroundSet unit(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  /// Index of `label`, or size() when absent.
  std::size_t find(const std::string& label) const;

  GroundSet subset(std::span<const std::size_t> indices) const;

  bool operator==(const GroundSet&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
};

/// A sample. Simple configurations are sets; others are multisets and may
/// repeat an index. Order is the order points were produced in.
class PointConfiguration {
 public:
  PointConfiguration() = default;
  PointConfiguration(std::vector<std::size_t> points, bool simple,
                     std::size_t ground_size);

  const std::vector<std::size_t>& points() const { return points_; }
  bool simple() const { return simple_; }
  std::size_t size() const { return points_.size(); }

  /// Number of points (with multiplicity) whose index is in `subset`.
  std::size_t count_in(std::span<const std::size_t> subset) const;

  /// Per-atom multiplicities, length ground_size.
  std::vector<std::size_t> occupation(std::size_t ground_size) const;

 private:
  std::vector<std::size_t> points_;
  bool simple_ = true;
};

struct CountDistribution {
  std::vector<double> pmf;
  double tail_bound = 0.0;

  double mean() const;
  double variance() const;
  double total() const;
};

/// Clamp `value` into [0, 1] when it lies within kEigenTolerance of the
/// interval; throws InvalidEigenvalue otherwise.
double clamp_unit_eigenvalue(double value);

/// Clamp small negative jitter to zero; throws NotPsd below -kEigenTolerance.
double clamp_nonnegative_eigenvalue(double value);

/// Exact law of a sum of independent Bernoulli(lambda_k) variables.
CountDistribution bernoulli_sum_pmf(std::span<const double> lambdas);

/// Law of a sum of independent geometrics with means lambda_k, i.e.
/// P(g_k = s) = (l/(l+1))^s / (l+1), truncated at n_max.
///
/// Entries 0..n_max are exact (truncated convolution never needs mass
/// beyond n_max), and tail_bound = 1 - sum(pmf) is the mass of counts
/// above n_max. It never exceeds sum_k (l_k/(l_k+1))^(ceil((n_max+1)/n)),
/// the union bound over "some g_k exceeds n_max/n".
CountDistribution geometric_sum_pmf(std::span<const double> lambdas,
                                    std::size_t n_max);

/// Index i with probability weights[i] / sum(weights).
std::size_t sample_categorical(std::span<const double> weights,
                               RandomStream& stream);

double sample_gamma(double shape, RandomStream& stream);
double sample_beta(double a, double b, RandomStream& stream);
double sample_standard_normal(RandomStream& stream);

/// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
std::complex<double> sample_complex_normal(RandomStream& stream);

/// Poisson draw; inversion below mean 30, libstdc++'s rejection sampler above.
std::size_t sample_poisson(double mean, RandomStream& stream);

/// Geometric on {0, 1, ...} with the given mean (mean 0 gives 0).
std::size_t sample_geometric(double mean, RandomStream& stream);

bool sample_bernoulli(double p, RandomStream& stream);

}  // namespace detproc
