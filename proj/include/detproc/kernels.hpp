#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "detproc/core.hpp"

namespace detproc {

using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Largest deviation from Hermitian symmetry, relative to 1 + max|K|.
double hermitian_defect(const ComplexMatrix& matrix);

/// Kernel K(x_i, x_j) on a finite ground set, Hermitian within
/// 1e-10 * (1 + max|K|).
class HermitianKernel {
 public:
  HermitianKernel(ComplexMatrix matrix, GroundSet ground);

  const ComplexMatrix& matrix() const { return matrix_; }
  const GroundSet& ground() const { return ground_; }
  std::size_t size() const { return ground_.size(); }
  Complex operator()(std::size_t i, std::size_t j) const { return matrix_(i, j); }

 private:
  ComplexMatrix matrix_;
  GroundSet ground_;
};

/// Eigenpairs of the integral operator f -> sum_y K(., y) f(y) mu(y).
///
/// Eigenvalues are descending; eigenvector columns are orthonormal in
/// L^2(mu). A spectrum may be thin (fewer columns than atoms) when every
/// omitted eigenvalue is zero.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  ComplexMatrix eigenvectors;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

Spectrum spectrum(const HermitianKernel& kernel);

/// K rebuilt as sum_k lambda_k phi_k phi_k^*.
ComplexMatrix reconstruct(const Spectrum& spec);

struct Verdict {
  bool valid = false;
  std::string reason;
  std::optional<double> offending_eigenvalue;
};

Verdict validate_determinantal(const ComplexMatrix& matrix,
                               const GroundSet& ground);
Verdict validate_determinantal(const HermitianKernel& kernel);

HermitianKernel restrict(const HermitianKernel& kernel,
                         std::span<const std::size_t> subset);

inline constexpr std::size_t kPermanentCapacity = 20;
inline constexpr std::size_t kAlphaDetCapacity = 9;

/// Ryser's formula with Gray-code subset order; OpenMP-parallel over
/// blocks of the Gray sequence for n above a small threshold.
Complex permanent(const ComplexMatrix& matrix);

/// Single-threaded Ryser; reference for permanent().
Complex permanent_serial(const ComplexMatrix& matrix);

/// sum over permutations of alpha^(n - cycles) * prod M(i, pi(i)).
Complex alpha_det(const ComplexMatrix& matrix, double alpha);

/// Determinant by partial-pivot LU. Reports exactly zero when a pivot falls
/// below 1e-12 * max(1, max|M|).
Complex determinant(const ComplexMatrix& matrix);

struct Determinantal {};
struct Permanental {};
struct AlphaKind {
  double alpha;
};
using IntensityKind = std::variant<Determinantal, Permanental, AlphaKind>;

ComplexMatrix minor(const ComplexMatrix& matrix,
                    std::span<const std::size_t> rows,
                    std::span<const std::size_t> cols);

/// k-point joint intensity with respect to mu^k at the given tuple.
double joint_intensity(const HermitianKernel& kernel,
                       std::span<const std::size_t> points,
                       const IntensityKind& kind);

}  // namespace detproc
