#include "detproc/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "detproc/error.hpp"

namespace detproc {

namespace {

constexpr double kHermitianTolerance = 1e-10;
constexpr double kSingularThreshold = 1e-12;
// Below this size the thread fork costs more than the subset sum.
constexpr std::size_t kParallelPermanentMin = 14;

bool has_repeats(std::span<const std::size_t> points) {
  std::vector<std::size_t> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::Input, std::string(what) + ": matrix not square");
  }
}

// Partial sum of Ryser's formula over Gray codes g(begin) .. g(end - 1),
// skipping the empty set.
Complex ryser_block(const ComplexMatrix& m, std::uint64_t begin,
                    std::uint64_t end) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXcd row_sums = Eigen::VectorXcd::Zero(n);
  std::uint64_t gray = begin ^ (begin >> 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (gray >> j & 1U) row_sums += m.col(j);
  }
  Complex total = 0.0;
  for (std::uint64_t k = begin; k < end; ++k) {
    if (k > begin) {
      const std::uint64_t next = k ^ (k >> 1);
      const std::uint64_t flipped = next ^ gray;
      const int j = std::countr_zero(flipped);
      if (next & flipped) {
        row_sums += m.col(j);
      } else {
        row_sums -= m.col(j);
      }
      gray = next;
    }
    if (gray == 0) continue;
    Complex prod = row_sums.prod();
    total += (std::popcount(gray) & 1) ? -prod : prod;
  }
  return total;
}

void check_permanent_size(const ComplexMatrix& m) {
  require_square(m, "permanent");
  if (static_cast<std::size_t>(m.rows()) > kPermanentCapacity) {
    throw Error(ErrorKind::Capacity, "permanent capacity is n <= 20");
  }
}

}  // namespace

double hermitian_defect(const ComplexMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) return INFINITY;
  if (matrix.size() == 0) return 0.0;
  const double scale = 1.0 + matrix.cwiseAbs().maxCoeff();
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() / scale;
}

HermitianKernel::HermitianKernel(ComplexMatrix matrix, GroundSet ground)
    : matrix_(std::move(matrix)), ground_(std::move(ground)) {
  if (matrix_.rows() != matrix_.cols() ||
      static_cast<std::size_t>(matrix_.rows()) != ground_.size()) {
    throw Error(ErrorKind::Input, "kernel size does not match ground set");
  }
  if (!matrix_.allFinite()) {
    throw Error(ErrorKind::Input, "kernel has non-finite entries");
  }
  if (hermitian_defect(matrix_) > kHermitianTolerance) {
    throw Error(ErrorKind::Symmetry, "kernel is not Hermitian");
  }
}

Spectrum spectrum(const HermitianKernel& kernel) {
  const auto& w = kernel.ground().weights();
  const Eigen::Index n = kernel.matrix().rows();
  Eigen::VectorXd sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_w(i) = std::sqrt(w[i]);

  ComplexMatrix sym = sqrt_w.asDiagonal() * kernel.matrix() * sqrt_w.asDiagonal();
  sym = 0.5 * (sym + sym.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "eigensolver did not converge");
  }
  // Eigen returns ascending order.
  Spectrum out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = sqrt_w.cwiseInverse().asDiagonal() *
                     solver.eigenvectors().rowwise().reverse();
  return out;
}

ComplexMatrix reconstruct(const Spectrum& spec) {
  return spec.eigenvectors * spec.eigenvalues.cast<Complex>().asDiagonal() *
         spec.eigenvectors.adjoint();
}

Verdict validate_determinantal(const ComplexMatrix& matrix,
                               const GroundSet& ground) {
  Verdict v;
  if (matrix.rows() != matrix.cols() ||
      static_cast<std::size_t>(matrix.rows()) != ground.size()) {
    v.reason = "kernel size does not match ground set";
    return v;
  }
  if (!matrix.allFinite()) {
    v.reason = "kernel has non-finite entries";
    return v;
  }
  if (hermitian_defect(matrix) > kHermitianTolerance) {
    v.reason = "kernel is not Hermitian";
    return v;
  }
  const Spectrum spec = spectrum(HermitianKernel(matrix, ground));
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    const double l = spec.eigenvalues(k);
    if (l < -kEigenTolerance || l > 1.0 + kEigenTolerance) {
      std::ostringstream os;
      os << "eigenvalue " << l << (l > 1.0 ? " exceeds 1" : " is negative");
      v.reason = os.str();
      v.offending_eigenvalue = l;
      return v;
    }
  }
  v.valid = true;
  return v;
}

Verdict validate_determinantal(const HermitianKernel& kernel) {
  return validate_determinantal(kernel.matrix(), kernel.ground());
}

HermitianKernel restrict(const HermitianKernel& kernel,
                         std::span<const std::size_t> subset) {
  if (has_repeats(subset)) {
    throw Error(ErrorKind::Input, "restriction subset repeats an index");
  }
  GroundSet sub = kernel.ground().subset(subset);  // range-checks
  return HermitianKernel(minor(kernel.matrix(), subset, subset), std::move(sub));
}

ComplexMatrix minor(const ComplexMatrix& matrix,
                    std::span<const std::size_t> rows,
                    std::span<const std::size_t> cols) {
  ComplexMatrix out(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (rows[i] >= static_cast<std::size_t>(matrix.rows()) ||
          cols[j] >= static_cast<std::size_t>(matrix.cols())) {
        throw Error(ErrorKind::OutOfRange, "minor index out of range");
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          matrix(static_cast<Eigen::Index>(rows[i]),
                 static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

Complex permanent_serial(const ComplexMatrix& matrix) {
  check_permanent_size(matrix);
  const auto n = static_cast<unsigned>(matrix.rows());
  if (n == 0) return 1.0;
  const Complex sum = ryser_block(matrix, 0, std::uint64_t{1} << n);
  return (n & 1U) ? -sum : sum;
}

Complex permanent(const ComplexMatrix& matrix) {
  check_permanent_size(matrix);
  const auto n = static_cast<unsigned>(matrix.rows());
  if (n < kParallelPermanentMin) return permanent_serial(matrix);

  const std::uint64_t total = std::uint64_t{1} << n;
  const std::int64_t blocks = 64;
  const std::uint64_t block_len = total / blocks;
  double re = 0.0;
  double im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::uint64_t begin = static_cast<std::uint64_t>(b) * block_len;
    const Complex part = ryser_block(matrix, begin, begin + block_len);
    re += part.real();
    im += part.imag();
  }
  const Complex sum(re, im);
  return (n & 1U) ? -sum : sum;
}

Complex alpha_det(const ComplexMatrix& matrix, double alpha) {
  require_square(matrix, "alpha_det");
  const auto n = static_cast<std::size_t>(matrix.rows());
  if (n > kAlphaDetCapacity) {
    throw Error(ErrorKind::Capacity, "alpha_det capacity is n <= 9");
  }
  if (n == 0) return 1.0;

  std::vector<double> alpha_pow(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) alpha_pow[k] = alpha_pow[k - 1] * alpha;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> seen(n);
  Complex total = 0.0;
  do {
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t cycles = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (seen[i]) continue;
      ++cycles;
      for (std::size_t j = i; !seen[j]; j = perm[j]) seen[j] = 1;
    }
    Complex prod = alpha_pow[n - cycles];
    for (std::size_t i = 0; i < n; ++i) {
      prod *= matrix(static_cast<Eigen::Index>(i),
                     static_cast<Eigen::Index>(perm[i]));
    }
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Complex determinant(const ComplexMatrix& matrix) {
  require_square(matrix, "determinant");
  if (matrix.rows() == 0) return 1.0;
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  Eigen::PartialPivLU<ComplexMatrix> lu(matrix);
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (std::abs(diag(i)) < kSingularThreshold * scale) return 0.0;
  }
  return lu.determinant();
}

double joint_intensity(const HermitianKernel& kernel,
                       std::span<const std::size_t> points,
                       const IntensityKind& kind) {
  for (std::size_t p : points) {
    if (p >= kernel.size()) {
      throw Error(ErrorKind::OutOfRange, "intensity point out of range");
    }
  }
  const ComplexMatrix m = minor(kernel.matrix(), points, points);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Determinantal>) {
          if (has_repeats(points)) return 0.0;
          return determinant(m).real();
        } else if constexpr (std::is_same_v<K, Permanental>) {
          return permanent(m).real();
        } else {
          return alpha_det(m, k.alpha).real();
        }
      },
      kind);
}

}  // namespace detproc
