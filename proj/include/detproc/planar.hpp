#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "detproc/core.hpp"
#include "detproc/kernels.hpp"

namespace detproc {

/// Radial reference measures with an exact law nu for |z|^2.
///   Gaussian:      mu = exp(-|z|^2)/pi dz,  nu = Exp(1)
///   LebesgueDisk:  mu = dz/pi on |z| < 1,   nu = Uniform[0, 1]
enum class RadialBase { Gaussian, LebesgueDisk };

RadialBase parse_radial_base(const std::string& name);
std::string to_string(RadialBase base);

/// Density of mu with respect to Lebesgue measure at modulus r.
double base_density(RadialBase base, double r);

/// E_nu[q^k].
double modulus_moment(RadialBase base, int degree);

/// CDF at q of Q_k, the law with density q^k / E_nu[q^k] w.r.t. nu.
double squared_modulus_cdf(RadialBase base, int degree, double q);

struct RadialTerm {
  int degree = 0;
  double lambda = 1.0;
  double a2 = 1.0;  // |a_k|^2, so that a_k z^k has unit norm in L^2(mu)
};

/// K(z, w) = sum_k lambda_k a_k^2 (z conj(w))^k w.r.t. a radial base measure.
struct RadialKernelSpec {
  std::vector<RadialTerm> terms;
  RadialBase base = RadialBase::Gaussian;

  /// Throws Input on repeated degrees, lambda outside [0, 1] or a wrong
  /// normalizer (|a2 E_nu[q^k] - 1| > 1e-8).
  void validate() const;

  /// a_k^2 = 1 / E_nu[q^k].
  static double auto_a2(RadialBase base, int degree);

  /// Truncated Ginibre: degrees 0..n-1, lambda = 1, a2 = 1/k!.
  static RadialKernelSpec ginibre(int n);
  /// Truncated Bergman kernel on the disk: degrees 0..n-1, a2 = k + 1.
  static RadialKernelSpec truncated_bergman(int n);

  int max_degree() const;
};

/// Squared moduli of one sample: term k contributes an independent draw of
/// Q_k with probability lambda_k. Order follows the terms, unsorted.
std::vector<double> sample_radial_moduli(const RadialKernelSpec& spec,
                                         RandomStream& stream);

/// Eigenvalues of an n x n matrix with i.i.d. standard complex normal
/// entries: an exact draw of the truncated Ginibre process in the plane.
std::vector<std::complex<double>> sample_ginibre_eigenvalues(int n,
                                                             RandomStream& stream);

struct Annulus {
  double inner = 0.0;
  double outer = 0.0;  // may be +infinity
};

/// lambda(k, i) = lambda_k P(Q_k in (inner_i^2, outer_i^2)); rows follow
/// spec.terms. Annuli must be listed in increasing, non-overlapping order.
Eigen::MatrixXd annuli_lambdas(const RadialKernelSpec& spec,
                               const std::vector<Annulus>& annuli);

/// Index of the annulus containing modulus r, or annuli.size().
std::size_t annulus_index(const std::vector<Annulus>& annuli, double r);

/// Finite grid realization of a radial kernel. The kernel is stored by its
/// thin spectrum; fine grids never build the dense cell-by-cell matrix.
struct DiscretizedKernel {
  GroundSet ground;
  Spectrum spectrum;                    // nonzero eigenpairs, clamped into [0, 1]
  std::vector<double> raw_eigenvalues;  // before clamping, descending
  std::vector<std::complex<double>> centers;
  double spacing = 0.0;
  double clamp_magnitude = 0.0;

  /// Dense matrix rebuilt from the clamped spectrum; O(cells^2) memory.
  HermitianKernel kernel() const;

  /// K(x, x) at every cell, without the dense matrix.
  Eigen::VectorXd diagonal() const;
};

inline constexpr double kMaxClampMagnitude = 0.05;

/// Midpoint quadrature on the square lattice of cell centers
/// ((i + 1/2) h, (j + 1/2) h) inside |z| < radius (and inside the support of
/// the base). Cell weight = h^2 * base density at the center.
DiscretizedKernel discretize_radial_kernel(const RadialKernelSpec& spec,
                                           double spacing, double radius);

/// Configuration on a discretized kernel mapped to complex cell centers.
std::vector<std::complex<double>> to_points(const DiscretizedKernel& grid,
                                            const PointConfiguration& config);

enum class CloudProcess { Poisson, Determinantal, Permanental };

/// Fig-1 style point cloud on the grid: the Poisson process with intensity
/// K(z, z), or the determinantal / permanental process with kernel K. Each
/// point is jittered uniformly inside its cell, so the output is approximate.
std::vector<std::complex<double>> sample_cloud(const DiscretizedKernel& grid,
                                               CloudProcess process,
                                               RandomStream& stream);

/// Trigonometric polynomial on the n-torus. A key is the per-variable
/// exponent of z_i minus that of conj(z_i).
class LaurentPoly {
 public:
  using Exponent = std::vector<int>;

  explicit LaurentPoly(std::size_t variables) : variables_(variables) {}

  static LaurentPoly constant(std::size_t variables, Complex value);
  static LaurentPoly monomial(const Exponent& exponent, Complex coefficient);

  void add_term(const Exponent& exponent, Complex coefficient);

  std::size_t variables() const { return variables_; }
  const std::map<Exponent, Complex>& terms() const { return terms_; }
  Complex coefficient(const Exponent& exponent) const;

  /// Largest |exponent| of variable i.
  int degree(std::size_t i) const;

  LaurentPoly conjugate() const;
  bool is_real(double tol = 1e-12) const;

  LaurentPoly operator+(const LaurentPoly& other) const;
  LaurentPoly operator*(const LaurentPoly& other) const;
  LaurentPoly operator*(Complex scale) const;

 private:
  std::size_t variables_;
  std::map<Exponent, Complex> terms_;
};

/// Exact integral of prod z_i^{e_i} * P over the torus with uniform measure:
/// the coefficient of prod z_i^{-e_i} in P.
Complex torus_moment(const LaurentPoly& density, const LaurentPoly::Exponent& e);

/// (1/n!) prod_{i<j} |z_i - z_j|^2: the joint angle density, w.r.t. uniform
/// measure, of n points whose radial kernel has degrees 0..n-1 restricted
/// to the unit circle. Degree n - 1 in each variable.
LaurentPoly circular_vandermonde_density(std::size_t n);

struct MomentEstimate {
  std::string label;
  Complex mean;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  bool within_bound = true;
};

struct PowerIndependenceReport {
  int power = 1;
  int degree = 0;
  std::size_t samples = 0;
  std::vector<MomentEstimate> moments;
  bool passed = false;
};

/// Empirical angular moments of the set {z^power}: with u = (z/|z|)^power,
/// one-point sums sum_i u_i^a (a = 1, 2) and ordered-pair sums
/// sum_{i != j} u_i^a u_j^b for (a, b) in {(1,-1), (2,-2), (1,1), (2,-1)}.
/// All vanish in expectation for independent rotation-invariant points;
/// passes when every real and imaginary part is within 4 standard errors
/// of zero.
PowerIndependenceReport power_independence_check(
    const std::vector<std::vector<std::complex<double>>>& samples, int power,
    int degree);

}  // namespace detproc
