#pragma once

#include <cstddef>
#include <span>

#include "detproc/core.hpp"
#include "detproc/kernels.hpp"

namespace detproc {

enum class AlphaMode { DetUnion, PermUnion, Unsupported };

/// alpha = -1/m gives a union of m determinantal copies with kernel K/m;
/// alpha = 1/m a union of m permanental copies with kernel K/m.
struct AlphaRegime {
  double alpha = 0.0;
  AlphaMode mode = AlphaMode::Unsupported;
  std::size_t copies = 0;

  static AlphaRegime classify(double alpha);
};

PointConfiguration sample_alpha(const HermitianKernel& kernel, double alpha,
                                RandomStream& stream);

/// Binomial(m, lambda_k / m) convolution for alpha = -1/m, truncated
/// negative-binomial(1/alpha, alpha lambda_k / (alpha lambda_k + 1))
/// convolution for alpha = 1/m. n_max only matters in the second case.
CountDistribution alpha_count_pmf(const HermitianKernel& kernel, double alpha,
                                  std::span<const std::size_t> subset,
                                  std::size_t n_max);

/// Same laws, from a list of eigenvalues.
CountDistribution alpha_count_pmf(std::span<const double> eigenvalues,
                                  double alpha, std::size_t n_max);

struct WitnessResult {
  bool negative_intensity = false;
  double value = 0.0;
};

/// alpha-determinant of [[2,-1,-1],[-1,2,-1],[-1,-1,2]]; a negative value
/// rules out an alpha-determinantal process with that kernel.
WitnessResult existence_witness(double alpha);

ComplexMatrix witness_matrix();

}  // namespace detproc
