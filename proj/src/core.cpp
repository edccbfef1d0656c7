#include "detproc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "detproc/error.hpp"

namespace detproc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidEigenvalue: return "invalid-eigenvalue";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Symmetry: return "symmetry";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::NotPsd: return "not-psd";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Disconnected: return "disconnected";
    case ErrorKind::Input: return "input";
  }
  return "unknown";
}

GroundSet::GroundSet(std::vector<std::string> labels,
                     std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw Error(ErrorKind::Input, "ground set must have at least one atom");
  }
  if (labels_.size() != weights_.size()) {
    throw Error(ErrorKind::Input, "ground set labels/weights length mismatch");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::Input, "ground set weights must be positive");
    }
  }
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) {
    throw Error(ErrorKind::Input, "ground set labels must be distinct");
  }
}

GroundSet GroundSet::unit(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return GroundSet(std::move(labels), std::vector<double>(n, 1.0));
}

std::size_t GroundSet::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  return static_cast<std::size_t>(it - labels_.begin());
}

GroundSet GroundSet::subset(std::span<const std::size_t> indices) const {
  std::vector<std::string> labels;
  std::vector<double> weights;
  labels.reserve(indices.size());
  weights.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) {
      throw Error(ErrorKind::OutOfRange, "subset index out of range");
    }
    labels.push_back(labels_[i]);
    weights.push_back(weights_[i]);
  }
  return GroundSet(std::move(labels), std::move(weights));
}

PointConfiguration::PointConfiguration(std::vector<std::size_t> points,
                                       bool simple, std::size_t ground_size)
    : points_(std::move(points)), simple_(simple) {
  for (std::size_t p : points_) {
    if (p >= ground_size) {
      throw Error(ErrorKind::OutOfRange, "configuration index out of range");
    }
  }
  if (simple_) {
    std::vector<std::size_t> sorted = points_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorKind::Input, "simple configuration repeats a point");
    }
  }
}

std::size_t PointConfiguration::count_in(
    std::span<const std::size_t> subset) const {
  std::size_t total = 0;
  for (std::size_t p : points_) {
    if (std::find(subset.begin(), subset.end(), p) != subset.end()) ++total;
  }
  return total;
}

std::vector<std::size_t> PointConfiguration::occupation(
    std::size_t ground_size) const {
  std::vector<std::size_t> occ(ground_size, 0);
  for (std::size_t p : points_) ++occ.at(p);
  return occ;
}

double CountDistribution::total() const {
  return std::accumulate(pmf.begin(), pmf.end(), 0.0);
}

double CountDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
  return m;
}

double CountDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double d = static_cast<double>(k) - m;
    v += d * d * pmf[k];
  }
  return v;
}

double clamp_unit_eigenvalue(double value) {
  if (!std::isfinite(value) || value < -kEigenTolerance ||
      value > 1.0 + kEigenTolerance) {
    std::ostringstream os;
    os << "eigenvalue " << value << " outside [0, 1]";
    throw Error(ErrorKind::InvalidEigenvalue, os.str());
  }
  return std::clamp(value, 0.0, 1.0);
}

double clamp_nonnegative_eigenvalue(double value) {
  if (!std::isfinite(value) || value < -kEigenTolerance) {
    std::ostringstream os;
    os << "eigenvalue " << value << " is negative";
    throw Error(ErrorKind::NotPsd, os.str());
  }
  return std::max(value, 0.0);
}

CountDistribution bernoulli_sum_pmf(std::span<const double> lambdas) {
  CountDistribution out;
  out.pmf.assign(1, 1.0);
  out.pmf.reserve(lambdas.size() + 1);
  // Multiply the generating polynomial by (1 - l + l t) one factor at a time.
  for (double raw : lambdas) {
    const double l = clamp_unit_eigenvalue(raw);
    out.pmf.push_back(0.0);
    for (std::size_t k = out.pmf.size() - 1; k > 0; --k) {
      out.pmf[k] = out.pmf[k] * (1.0 - l) + out.pmf[k - 1] * l;
    }
    out.pmf[0] *= (1.0 - l);
  }
  return out;
}

CountDistribution geometric_sum_pmf(std::span<const double> lambdas,
                                    std::size_t n_max) {
  CountDistribution out;
  out.pmf.assign(n_max + 1, 0.0);
  out.pmf[0] = 1.0;
  std::vector<double> factor(n_max + 1);
  std::vector<double> next(n_max + 1);
  for (double l : lambdas) {
    if (!std::isfinite(l) || l < -kEigenTolerance) {
      throw Error(ErrorKind::InvalidEigenvalue, "geometric mean must be >= 0");
    }
    l = std::max(l, 0.0);
    const double ratio = l / (l + 1.0);
    factor[0] = 1.0 / (l + 1.0);
    for (std::size_t s = 1; s <= n_max; ++s) factor[s] = factor[s - 1] * ratio;
    for (std::size_t k = 0; k <= n_max; ++k) {
      double acc = 0.0;
      for (std::size_t s = 0; s <= k; ++s) acc += out.pmf[k - s] * factor[s];
      next[k] = acc;
    }
    out.pmf.swap(next);
  }
  out.tail_bound = std::max(0.0, 1.0 - out.total());
  if (lambdas.empty()) out.pmf.resize(1);
  return out;
}

std::size_t sample_categorical(std::span<const double> weights,
                               RandomStream& stream) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::Degenerate, "categorical weights must be >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::Degenerate, "categorical weights are all zero");
  }
  const double target = stream.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    acc += weights[i];
    if (target < acc) return i;
  }
  return last_positive;
}

double sample_gamma(double shape, RandomStream& stream) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorKind::Parameter, "gamma shape must be positive");
  }
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(stream);
}

double sample_beta(double a, double b, RandomStream& stream) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorKind::Parameter, "beta parameters must be positive");
  }
  const double x = sample_gamma(a, stream);
  const double y = sample_gamma(b, stream);
  return x / (x + y);
}

double sample_standard_normal(RandomStream& stream) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(stream);
}

std::complex<double> sample_complex_normal(RandomStream& stream) {
  const double s = std::sqrt(0.5);
  const double re = sample_standard_normal(stream);
  const double im = sample_standard_normal(stream);
  return {s * re, s * im};
}

std::size_t sample_poisson(double mean, RandomStream& stream) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorKind::Parameter, "poisson mean must be >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Sequential inversion of the CDF.
    const double u = stream.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::size_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p == 0.0 && cdf < u) break;  // exhausted double precision
    }
    return k;
  }
  std::poisson_distribution<long long> dist(mean);
  return static_cast<std::size_t>(dist(stream));
}

std::size_t sample_geometric(double mean, RandomStream& stream) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorKind::Parameter, "geometric mean must be >= 0");
  }
  if (mean == 0.0) return 0;
  // P(s) = q^s (1 - q), q = mean / (1 + mean); invert the survival function.
  const double q = mean / (1.0 + mean);
  const double u = stream.uniform_open();
  return static_cast<std::size_t>(std::floor(std::log(u) / std::log(q)));
}

bool sample_bernoulli(double p, RandomStream& stream) {
  return stream.uniform() < p;
}

}  // namespace detproc
