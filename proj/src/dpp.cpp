#include "detproc/dpp.hpp"

#include <algorithm>
#include <cmath>

#include "detproc/error.hpp"
#include "detproc/parallel.hpp"

namespace detproc {

namespace {

constexpr double kOrthonormalTolerance = 1e-8;
constexpr double kRankDropThreshold = 1e-6;

Eigen::VectorXd weight_vector(const GroundSet& ground) {
  return Eigen::Map<const Eigen::VectorXd>(ground.weights().data(),
                                           static_cast<Eigen::Index>(ground.size()));
}

// <f, g>_mu for row vectors.
Complex inner(const Eigen::RowVectorXcd& f, const Eigen::RowVectorXcd& g,
              const Eigen::VectorXd& w) {
  return (f.array() * g.conjugate().array() * w.transpose().array().cast<Complex>())
      .sum();
}

double norm(const Eigen::RowVectorXcd& f, const Eigen::VectorXd& w) {
  return std::sqrt((f.cwiseAbs2().array() * w.transpose().array()).sum());
}

// Orthonormal basis of the span of `rows`, which must have rank exactly
// rows() - 1. Column-pivoted modified Gram-Schmidt; the single row left
// with norm below the threshold is dropped.
ComplexMatrix orthonormalize_dropping_one(ComplexMatrix rows,
                                          const Eigen::VectorXd& w) {
  const Eigen::Index r = rows.rows();
  ComplexMatrix out(r - 1, rows.cols());
  std::vector<char> used(static_cast<std::size_t>(r), 0);
  for (Eigen::Index step = 0; step < r - 1; ++step) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double nrm = norm(rows.row(i), w);
      if (nrm > best_norm) {
        best_norm = nrm;
        best = i;
      }
    }
    if (best_norm < kRankDropThreshold) {
      throw Error(ErrorKind::Numerical,
                  "projection update dropped more than one dimension");
    }
    used[static_cast<std::size_t>(best)] = 1;
    Eigen::RowVectorXcd q = rows.row(best) / best_norm;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      rows.row(i) -= inner(rows.row(i), q, w) * q;
    }
    out.row(step) = q;
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    if (norm(rows.row(i), w) >= kRankDropThreshold) {
      throw Error(ErrorKind::Numerical, "projection update left rank unchanged");
    }
  }
  return out;
}

}  // namespace

double orthonormality_defect(const ComplexMatrix& rows, const GroundSet& ground) {
  const Eigen::VectorXd w = weight_vector(ground);
  const ComplexMatrix gram = rows * w.cast<Complex>().asDiagonal() * rows.adjoint();
  return (gram - ComplexMatrix::Identity(rows.rows(), rows.rows()))
      .cwiseAbs()
      .maxCoeff();
}

ProjectionBasis::ProjectionBasis(ComplexMatrix rows, GroundSet ground)
    : rows_(std::move(rows)), ground_(std::move(ground)) {
  if (static_cast<std::size_t>(rows_.cols()) != ground_.size()) {
    throw Error(ErrorKind::Input, "basis width does not match ground set");
  }
  if (rows_.rows() > 0 &&
      orthonormality_defect(rows_, ground_) > kOrthonormalTolerance) {
    throw Error(ErrorKind::Input, "basis rows are not mu-orthonormal");
  }
}

ProjectionBasis ProjectionBasis::from_spectrum(const Spectrum& spec,
                                               std::span<const std::size_t> columns,
                                               const GroundSet& ground) {
  ComplexMatrix rows(static_cast<Eigen::Index>(columns.size()),
                     spec.eigenvectors.rows());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) =
        spec.eigenvectors.col(static_cast<Eigen::Index>(columns[i])).transpose();
  }
  return ProjectionBasis(std::move(rows), ground);
}

HermitianKernel ProjectionBasis::kernel() const {
  ComplexMatrix k = rows_.transpose() * rows_.conjugate();
  k = 0.5 * (k + k.adjoint()).eval();
  return HermitianKernel(std::move(k), ground_);
}

PointConfiguration sample_projection(const ProjectionBasis& basis,
                                     RandomStream& stream) {
  const Eigen::VectorXd w = weight_vector(basis.ground());
  const auto n = static_cast<Eigen::Index>(basis.ground().size());
  ComplexMatrix rows = basis.rows();
  std::vector<std::size_t> points;
  points.reserve(basis.rank());
  std::vector<double> weights(static_cast<std::size_t>(n));

  while (rows.rows() > 0) {
    const Eigen::VectorXd col_norms = rows.cwiseAbs2().colwise().sum().transpose();
    for (Eigen::Index x = 0; x < n; ++x) {
      weights[static_cast<std::size_t>(x)] = w(x) * col_norms(x);
    }
    const std::size_t picked = sample_categorical(weights, stream);
    points.push_back(picked);
    if (rows.rows() == 1) break;

    // psi = K_H delta_x = sum_i conj(phi_i(x)) phi_i.
    const auto x = static_cast<Eigen::Index>(picked);
    Eigen::RowVectorXcd psi = rows.col(x).adjoint() * rows;
    const double psi_norm = norm(psi, w);
    if (!(psi_norm > 0.0)) {
      throw Error(ErrorKind::Degenerate, "selected point has zero intensity");
    }
    psi /= psi_norm;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      rows.row(i) -= inner(rows.row(i), psi, w) * psi;
    }
    rows = orthonormalize_dropping_one(std::move(rows), w);
  }
  return PointConfiguration(std::move(points), true, basis.ground().size());
}

PointConfiguration sample_dpp(const Spectrum& spec, const GroundSet& ground,
                              RandomStream& stream) {
  std::vector<std::size_t> selected;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double l = clamp_unit_eigenvalue(spec.eigenvalues(static_cast<Eigen::Index>(k)));
    if (sample_bernoulli(l, stream)) selected.push_back(k);
  }
  if (selected.empty()) return PointConfiguration({}, true, ground.size());
  return sample_projection(ProjectionBasis::from_spectrum(spec, selected, ground),
                           stream);
}

PointConfiguration sample_dpp(const HermitianKernel& kernel,
                              RandomStream& stream) {
  const Verdict verdict = validate_determinantal(kernel);
  if (!verdict.valid) throw Error(ErrorKind::Validation, verdict.reason);
  return sample_dpp(spectrum(kernel), kernel.ground(), stream);
}

std::vector<PointConfiguration> sample_dpp_batch(const HermitianKernel& kernel,
                                                 std::size_t count,
                                                 const RandomStream& root) {
  const Verdict verdict = validate_determinantal(kernel);
  if (!verdict.valid) throw Error(ErrorKind::Validation, verdict.reason);
  const Spectrum spec = spectrum(kernel);
  return generate_batch(count, root, [&](RandomStream& s) {
    return sample_dpp(spec, kernel.ground(), s);
  });
}

std::vector<PointConfiguration> sample_dpp_batch_serial(
    const HermitianKernel& kernel, std::size_t count, const RandomStream& root) {
  const Verdict verdict = validate_determinantal(kernel);
  if (!verdict.valid) throw Error(ErrorKind::Validation, verdict.reason);
  const Spectrum spec = spectrum(kernel);
  return generate_batch_serial(count, root, [&](RandomStream& s) {
    return sample_dpp(spec, kernel.ground(), s);
  });
}

std::vector<double> restricted_eigenvalues(const HermitianKernel& kernel,
                                           std::span<const std::size_t> subset) {
  if (subset.empty()) return {};
  const Spectrum spec = spectrum(restrict(kernel, subset));
  std::vector<double> out(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    out[k] = clamp_unit_eigenvalue(spec.eigenvalues(static_cast<Eigen::Index>(k)));
  }
  return out;
}

CountDistribution count_pmf(const HermitianKernel& kernel,
                            std::span<const std::size_t> subset) {
  return bernoulli_sum_pmf(restricted_eigenvalues(kernel, subset));
}

std::vector<std::size_t> joint_counts_observable(const Eigen::MatrixXd& lambda,
                                                 RandomStream& stream) {
  const Eigen::Index cells = lambda.cols();
  for (Eigen::Index k = 0; k < lambda.rows(); ++k) {
    if ((lambda.row(k).array() < -kEigenTolerance).any()) {
      throw Error(ErrorKind::InvalidEigenvalue, "occupancy entries must be >= 0");
    }
    if (lambda.row(k).sum() > 1.0 + kEigenTolerance) {
      throw Error(ErrorKind::InvalidEigenvalue, "occupancy row sums to more than 1");
    }
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(cells), 0);
  for (Eigen::Index k = 0; k < lambda.rows(); ++k) {
    const double u = stream.uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < cells; ++i) {
      acc += std::max(lambda(k, i), 0.0);
      if (u < acc) {
        ++counts[static_cast<std::size_t>(i)];
        break;
      }
    }
  }
  return counts;
}

double projection_density(const ProjectionBasis& basis,
                          std::span<const std::size_t> points) {
  if (points.size() != basis.rank()) {
    throw Error(ErrorKind::Input, "projection density needs rank-many points");
  }
  std::vector<std::size_t> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return 0.0;

  std::vector<std::size_t> all_rows(basis.rank());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
  const Complex det = determinant(minor(basis.rows(), all_rows, points));
  double factorial = 1.0;
  for (std::size_t k = 2; k <= basis.rank(); ++k) factorial *= static_cast<double>(k);
  return std::norm(det) / factorial;
}

}  // namespace detproc
