#include "detproc/alphadet.hpp"

#include <cmath>
#include <sstream>

#include "detproc/dpp.hpp"
#include "detproc/error.hpp"
#include "detproc/permanental.hpp"

namespace detproc {

namespace {

constexpr double kReciprocalTolerance = 1e-9;

// m when x is within tolerance of a positive integer m, else 0.
std::size_t positive_integer(double x) {
  if (!std::isfinite(x) || x < 0.5) return 0;
  const double r = std::round(x);
  return std::abs(x - r) <= kReciprocalTolerance * std::max(1.0, r)
             ? static_cast<std::size_t>(r)
             : 0;
}

AlphaRegime require_supported(double alpha) {
  const AlphaRegime regime = AlphaRegime::classify(alpha);
  if (regime.mode == AlphaMode::Unsupported) {
    std::ostringstream os;
    os << "alpha = " << alpha << " is not of the form +-1/m";
    throw Error(ErrorKind::Unsupported, os.str());
  }
  return regime;
}

HermitianKernel scaled(const HermitianKernel& kernel, double factor) {
  return HermitianKernel(kernel.matrix() * factor, kernel.ground());
}

// Convolve `acc` with `factor`, keeping at most `limit` entries.
std::vector<double> convolve(const std::vector<double>& acc,
                             const std::vector<double>& factor,
                             std::size_t limit) {
  const std::size_t len = std::min(acc.size() + factor.size() - 1, limit);
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    for (std::size_t j = 0; j < factor.size() && i + j < len; ++j) {
      out[i + j] += acc[i] * factor[j];
    }
  }
  return out;
}

}  // namespace

AlphaRegime AlphaRegime::classify(double alpha) {
  AlphaRegime regime;
  regime.alpha = alpha;
  if (alpha == 0.0 || !std::isfinite(alpha)) return regime;
  if (alpha < 0.0) {
    if (std::size_t m = positive_integer(-1.0 / alpha); m > 0) {
      regime.mode = AlphaMode::DetUnion;
      regime.copies = m;
    }
  } else if (std::size_t m = positive_integer(1.0 / alpha); m > 0) {
    regime.mode = AlphaMode::PermUnion;
    regime.copies = m;
  }
  return regime;
}

PointConfiguration sample_alpha(const HermitianKernel& kernel, double alpha,
                                RandomStream& stream) {
  const AlphaRegime regime = require_supported(alpha);
  const HermitianKernel copy_kernel =
      scaled(kernel, 1.0 / static_cast<double>(regime.copies));
  const Spectrum spec = [&] {
    if (regime.mode == AlphaMode::DetUnion) {
      const Verdict v = validate_determinantal(copy_kernel);
      if (!v.valid) throw Error(ErrorKind::Validation, "-alpha K: " + v.reason);
    }
    return spectrum(copy_kernel);
  }();

  std::vector<std::size_t> points;
  for (std::size_t c = 0; c < regime.copies; ++c) {
    RandomStream copy_stream = stream.split(c);
    const PointConfiguration part =
        regime.mode == AlphaMode::DetUnion
            ? sample_dpp(spec, kernel.ground(), copy_stream)
            : sample_permanental(spec, kernel.ground(), copy_stream);
    points.insert(points.end(), part.points().begin(), part.points().end());
  }
  stream.next_u64();  // advance the parent so successive calls differ
  const bool simple = regime.mode == AlphaMode::DetUnion && regime.copies == 1;
  return PointConfiguration(std::move(points), simple, kernel.size());
}

CountDistribution alpha_count_pmf(std::span<const double> eigenvalues,
                                  double alpha, std::size_t n_max) {
  const AlphaRegime regime = require_supported(alpha);
  const auto m = static_cast<double>(regime.copies);
  CountDistribution out;
  out.pmf = {1.0};
  if (regime.mode == AlphaMode::DetUnion) {
    for (double l : eigenvalues) {
      const double p = clamp_unit_eigenvalue(l / m);
      // Binomial(m, p) as an m-fold Bernoulli convolution.
      const std::vector<double> bern{1.0 - p, p};
      for (std::size_t c = 0; c < regime.copies; ++c) {
        out.pmf = convolve(out.pmf, bern, out.pmf.size() + 1);
      }
    }
    return out;
  }
  // Negative binomial with shape r = 1/alpha = m and success weight
  // q = alpha l / (alpha l + 1): P(s) = C(s + r - 1, s) q^s (1 - q)^r.
  const double r = m;
  out.pmf.assign(n_max + 1, 0.0);
  out.pmf[0] = 1.0;
  std::vector<double> factor(n_max + 1);
  for (double l : eigenvalues) {
    l = clamp_nonnegative_eigenvalue(l);
    const double q = (l / m) / (l / m + 1.0);
    factor[0] = std::pow(1.0 - q, r);
    for (std::size_t s = 1; s <= n_max; ++s) {
      factor[s] = factor[s - 1] * q * (static_cast<double>(s) + r - 1.0) /
                  static_cast<double>(s);
    }
    out.pmf = convolve(out.pmf, factor, n_max + 1);
  }
  out.tail_bound = std::max(0.0, 1.0 - out.total());
  if (eigenvalues.empty()) out.pmf.resize(1);
  return out;
}

CountDistribution alpha_count_pmf(const HermitianKernel& kernel, double alpha,
                                  std::span<const std::size_t> subset,
                                  std::size_t n_max) {
  require_supported(alpha);
  if (subset.empty()) return alpha_count_pmf(std::span<const double>{}, alpha, n_max);
  const Spectrum spec = spectrum(restrict(kernel, subset));
  std::vector<double> eig(spec.eigenvalues.data(),
                          spec.eigenvalues.data() + spec.eigenvalues.size());
  return alpha_count_pmf(eig, alpha, n_max);
}

ComplexMatrix witness_matrix() {
  ComplexMatrix k(3, 3);
  k << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  return k;
}

WitnessResult existence_witness(double alpha) {
  WitnessResult out;
  out.value = alpha_det(witness_matrix(), alpha).real();
  // Integer-valued polynomial in alpha; snap rounding noise at the roots.
  if (std::abs(out.value) < 1e-9) out.value = 0.0;
  out.negative_intensity = out.value < 0.0;
  return out;
}

}  // namespace detproc
