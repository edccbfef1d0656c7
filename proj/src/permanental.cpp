#include "detproc/permanental.hpp"

#include <cmath>

#include "detproc/error.hpp"
#include "detproc/parallel.hpp"

namespace detproc {

namespace {

Spectrum psd_spectrum(const HermitianKernel& kernel) {
  Spectrum spec = spectrum(kernel);
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    spec.eigenvalues(k) = clamp_nonnegative_eigenvalue(spec.eigenvalues(k));
  }
  return spec;
}

}  // namespace

GaussianField sample_gaussian_field(const Spectrum& spec, RandomStream& stream) {
  GaussianField field;
  field.coefficients.resize(spec.size());
  Eigen::VectorXcd scaled(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double l =
        clamp_nonnegative_eigenvalue(spec.eigenvalues(static_cast<Eigen::Index>(k)));
    field.coefficients[k] = sample_complex_normal(stream);
    scaled(static_cast<Eigen::Index>(k)) = std::sqrt(l) * field.coefficients[k];
  }
  field.values = spec.eigenvectors * scaled;
  return field;
}

PointConfiguration sample_permanental(const Spectrum& spec,
                                      const GroundSet& ground,
                                      RandomStream& stream) {
  const GaussianField field = sample_gaussian_field(spec, stream);
  std::vector<std::size_t> points;
  for (std::size_t x = 0; x < ground.size(); ++x) {
    const double mean =
        std::norm(field.values(static_cast<Eigen::Index>(x))) * ground.weight(x);
    const std::size_t count = sample_poisson(mean, stream);
    points.insert(points.end(), count, x);
  }
  return PointConfiguration(std::move(points), false, ground.size());
}

PointConfiguration sample_permanental(const HermitianKernel& kernel,
                                      RandomStream& stream) {
  return sample_permanental(psd_spectrum(kernel), kernel.ground(), stream);
}

std::vector<PointConfiguration> sample_permanental_batch(
    const HermitianKernel& kernel, std::size_t count, const RandomStream& root) {
  const Spectrum spec = psd_spectrum(kernel);
  return generate_batch(count, root, [&](RandomStream& s) {
    return sample_permanental(spec, kernel.ground(), s);
  });
}

std::vector<double> restricted_psd_eigenvalues(const HermitianKernel& kernel,
                                               std::span<const std::size_t> subset) {
  if (subset.empty()) return {};
  const Spectrum spec = psd_spectrum(restrict(kernel, subset));
  return {spec.eigenvalues.data(), spec.eigenvalues.data() + spec.eigenvalues.size()};
}

CountDistribution count_pmf_perm(const HermitianKernel& kernel,
                                 std::span<const std::size_t> subset,
                                 std::size_t n_max) {
  return geometric_sum_pmf(restricted_psd_eigenvalues(kernel, subset), n_max);
}

double bosonic_density(const ComplexMatrix& phis,
                       std::span<const std::size_t> occupancy,
                       std::span<const std::size_t> points) {
  if (occupancy.size() != static_cast<std::size_t>(phis.rows())) {
    throw Error(ErrorKind::Input, "occupancy length must match number of states");
  }
  std::size_t total = 0;
  for (std::size_t a : occupancy) total += a;
  if (total != points.size()) {
    throw Error(ErrorKind::Input, "number of points must equal total occupancy");
  }
  if (total > kPermanentCapacity) {
    throw Error(ErrorKind::Capacity, "bosonic density exceeds permanent capacity");
  }
  const auto l = static_cast<Eigen::Index>(total);
  ComplexMatrix m(l, l);
  double norm = 1.0;
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < occupancy.size(); ++i) {
    for (std::size_t rep = 0; rep < occupancy[i]; ++rep, ++row) {
      norm *= static_cast<double>(rep + 1);
      for (Eigen::Index j = 0; j < l; ++j) {
        const auto x = points[static_cast<std::size_t>(j)];
        if (x >= static_cast<std::size_t>(phis.cols())) {
          throw Error(ErrorKind::OutOfRange, "bosonic density point out of range");
        }
        m(row, j) = phis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(x));
      }
    }
  }
  for (std::size_t k = 2; k <= total; ++k) norm *= static_cast<double>(k);
  return std::norm(permanent(m)) / norm;
}

std::vector<std::size_t> sample_mixture_label(const HermitianKernel& kernel,
                                              RandomStream& stream) {
  const Spectrum spec = psd_spectrum(kernel);
  std::vector<std::size_t> out(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    out[k] = sample_geometric(spec.eigenvalues(static_cast<Eigen::Index>(k)), stream);
  }
  return out;
}

std::vector<std::size_t> joint_counts_observable_perm(const Eigen::MatrixXd& lambda,
                                                      RandomStream& stream) {
  const Eigen::Index cells = lambda.cols();
  std::vector<std::size_t> counts(static_cast<std::size_t>(cells), 0);
  std::vector<double> split(static_cast<std::size_t>(cells));
  for (Eigen::Index k = 0; k < lambda.rows(); ++k) {
    if ((lambda.row(k).array() < 0.0).any()) {
      throw Error(ErrorKind::InvalidEigenvalue, "occupancy entries must be >= 0");
    }
    const double row_total = lambda.row(k).sum();
    const std::size_t eta = sample_geometric(row_total, stream);
    for (Eigen::Index i = 0; i < cells; ++i) {
      split[static_cast<std::size_t>(i)] = lambda(k, i);
    }
    for (std::size_t ball = 0; ball < eta; ++ball) {
      ++counts[sample_categorical(split, stream)];
    }
  }
  return counts;
}

}  // namespace detproc
