#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "detproc/core.hpp"
#include "detproc/kernels.hpp"

namespace detproc {

/// Rows are functions on the ground set, orthonormal in L^2(mu); they span
/// the range H of a projection kernel K_H(x, y) = sum_k phi_k(x) conj(phi_k(y)).
class ProjectionBasis {
 public:
  ProjectionBasis(ComplexMatrix rows, GroundSet ground);

  /// Basis from the eigenvector columns listed in `columns`.
  static ProjectionBasis from_spectrum(const Spectrum& spec,
                                       std::span<const std::size_t> columns,
                                       const GroundSet& ground);

  const ComplexMatrix& rows() const { return rows_; }
  const GroundSet& ground() const { return ground_; }
  std::size_t rank() const { return static_cast<std::size_t>(rows_.rows()); }

  /// The induced projection kernel.
  HermitianKernel kernel() const;

 private:
  ComplexMatrix rows_;
  GroundSet ground_;
};

/// Max |<phi_i, phi_j>_mu - delta_ij| over the rows of `rows`.
double orthonormality_defect(const ComplexMatrix& rows, const GroundSet& ground);

/// Draws exactly rank() distinct points, in the order produced: each step
/// picks x with probability mu(x) * sum_i |phi_i(x)|^2 / r, then replaces H
/// by the orthocomplement of K_H delta_x inside H.
PointConfiguration sample_projection(const ProjectionBasis& basis,
                                     RandomStream& stream);

/// Mixture sampler: I_k ~ Bernoulli(lambda_k) in descending eigenvalue
/// order, then a projection sample on the selected eigenvectors. The
/// indicators are not recoverable from the output configuration.
PointConfiguration sample_dpp(const HermitianKernel& kernel,
                              RandomStream& stream);
PointConfiguration sample_dpp(const Spectrum& spec, const GroundSet& ground,
                              RandomStream& stream);

/// Independent samples; draw i uses stream.split(i). OpenMP-parallel.
std::vector<PointConfiguration> sample_dpp_batch(const HermitianKernel& kernel,
                                                 std::size_t count,
                                                 const RandomStream& root);
std::vector<PointConfiguration> sample_dpp_batch_serial(
    const HermitianKernel& kernel, std::size_t count, const RandomStream& root);

/// Exact count law in `subset`: Bernoulli sum over the restricted spectrum.
CountDistribution count_pmf(const HermitianKernel& kernel,
                            std::span<const std::size_t> subset);

/// Eigenvalues of the restriction, clamped into [0, 1], descending.
std::vector<double> restricted_eigenvalues(const HermitianKernel& kernel,
                                           std::span<const std::size_t> subset);

/// Occupancy model for simultaneously observable sets: row k is a ball that
/// lands in cell i with probability lambda(k, i) and nowhere otherwise.
std::vector<std::size_t> joint_counts_observable(const Eigen::MatrixXd& lambda,
                                                 RandomStream& stream);

/// (1/r!) |det(phi_i(x_j))|^2, the ordered-tuple density w.r.t. mu^r.
double projection_density(const ProjectionBasis& basis,
                          std::span<const std::size_t> points);

}  // namespace detproc
