#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "detproc/core.hpp"
#include "detproc/kernels.hpp"

namespace detproc {

/// F(x) = sum_k sqrt(lambda_k) a_k phi_k(x) with a_k standard complex normal.
struct GaussianField {
  std::vector<Complex> coefficients;
  Eigen::VectorXcd values;  // F at each atom

  Eigen::VectorXd intensity() const { return values.cwiseAbs2(); }
};

/// Draws the coefficients a_k (one per eigenpair, in order) and evaluates F.
GaussianField sample_gaussian_field(const Spectrum& spec, RandomStream& stream);

/// Cox sampler: given F, an independent Poisson(|F(x)|^2 mu(x)) count at
/// each atom. Returns a multiset; atoms may repeat.
PointConfiguration sample_permanental(const HermitianKernel& kernel,
                                      RandomStream& stream);
PointConfiguration sample_permanental(const Spectrum& spec,
                                      const GroundSet& ground,
                                      RandomStream& stream);

std::vector<PointConfiguration> sample_permanental_batch(
    const HermitianKernel& kernel, std::size_t count, const RandomStream& root);

/// Eigenvalues of the restriction, clamped at zero (throws NotPsd).
std::vector<double> restricted_psd_eigenvalues(const HermitianKernel& kernel,
                                               std::span<const std::size_t> subset);

/// Count law in `subset`: sum of geometrics over the restricted spectrum.
CountDistribution count_pmf_perm(const HermitianKernel& kernel,
                                 std::span<const std::size_t> subset,
                                 std::size_t n_max);

/// Density of l = sum(occupancy) bosons w.r.t. mu^l on ordered tuples, given
/// occupancy[i] of them in state phis.row(i):
/// |per(rows repeated by occupancy, evaluated at points)|^2 / (l! prod occupancy_i!).
double bosonic_density(const ComplexMatrix& phis,
                       std::span<const std::size_t> occupancy,
                       std::span<const std::size_t> points);

/// One draw of the geometric occupation numbers gamma_k (mean lambda_k),
/// in descending eigenvalue order.
std::vector<std::size_t> sample_mixture_label(const HermitianKernel& kernel,
                                              RandomStream& stream);

/// Row k: eta_k geometric with mean sum_i lambda(k, i), split multinomially
/// over the cells with probabilities lambda(k, i) / sum_i lambda(k, i).
std::vector<std::size_t> joint_counts_observable_perm(const Eigen::MatrixXd& lambda,
                                                      RandomStream& stream);

}  // namespace detproc
