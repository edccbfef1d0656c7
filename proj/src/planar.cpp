#include "detproc/planar.hpp"

#include <algorithm>
#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <set>

#include "detproc/dpp.hpp"
#include "detproc/error.hpp"
#include "detproc/permanental.hpp"

namespace detproc {

RadialBase parse_radial_base(const std::string& name) {
  if (name == "gaussian") return RadialBase::Gaussian;
  if (name == "lebesgue-disk") return RadialBase::LebesgueDisk;
  throw Error(ErrorKind::Input, "unknown base density '" + name + "'");
}

std::string to_string(RadialBase base) {
  return base == RadialBase::Gaussian ? "gaussian" : "lebesgue-disk";
}

double base_density(RadialBase base, double r) {
  switch (base) {
    case RadialBase::Gaussian:
      return std::exp(-r * r) / std::numbers::pi;
    case RadialBase::LebesgueDisk:
      return r < 1.0 ? 1.0 / std::numbers::pi : 0.0;
  }
  return 0.0;
}

double modulus_moment(RadialBase base, int degree) {
  if (degree < 0) throw Error(ErrorKind::Input, "negative degree");
  if (base == RadialBase::Gaussian) {
    return boost::math::factorial<double>(static_cast<unsigned>(degree));
  }
  return 1.0 / (degree + 1.0);
}

double squared_modulus_cdf(RadialBase base, int degree, double q) {
  if (q <= 0.0) return 0.0;
  if (base == RadialBase::Gaussian) {
    if (std::isinf(q)) return 1.0;
    // q^k e^{-q} / k! is the gamma(k + 1, 1) density.
    return boost::math::gamma_p(degree + 1.0, q);
  }
  return q >= 1.0 ? 1.0 : std::pow(q, degree + 1.0);
}

double RadialKernelSpec::auto_a2(RadialBase base, int degree) {
  return 1.0 / modulus_moment(base, degree);
}

void RadialKernelSpec::validate() const {
  std::set<int> degrees;
  for (const RadialTerm& t : terms) {
    if (t.degree < 0 || !degrees.insert(t.degree).second) {
      throw Error(ErrorKind::Input, "radial degrees must be distinct and >= 0");
    }
    if (!(t.lambda >= 0.0 && t.lambda <= 1.0)) {
      throw Error(ErrorKind::InvalidEigenvalue, "radial lambda outside [0, 1]");
    }
    if (std::abs(t.a2 * modulus_moment(base, t.degree) - 1.0) > 1e-8) {
      throw Error(ErrorKind::Input,
                  "a2 for degree " + std::to_string(t.degree) +
                      " does not normalize a_k z^k");
    }
  }
}

RadialKernelSpec RadialKernelSpec::ginibre(int n) {
  RadialKernelSpec spec;
  spec.base = RadialBase::Gaussian;
  for (int k = 0; k < n; ++k) spec.terms.push_back({k, 1.0, auto_a2(spec.base, k)});
  return spec;
}

RadialKernelSpec RadialKernelSpec::truncated_bergman(int n) {
  RadialKernelSpec spec;
  spec.base = RadialBase::LebesgueDisk;
  for (int k = 0; k < n; ++k) spec.terms.push_back({k, 1.0, auto_a2(spec.base, k)});
  return spec;
}

int RadialKernelSpec::max_degree() const {
  int d = 0;
  for (const RadialTerm& t : terms) d = std::max(d, t.degree);
  return d;
}

std::vector<double> sample_radial_moduli(const RadialKernelSpec& spec,
                                         RandomStream& stream) {
  spec.validate();
  std::vector<double> out;
  for (const RadialTerm& t : spec.terms) {
    // Both draws are always made so the stream advances identically.
    const bool include = sample_bernoulli(t.lambda, stream);
    double q = 0.0;
    if (spec.base == RadialBase::Gaussian) {
      q = sample_gamma(t.degree + 1.0, stream);
    } else {
      q = std::pow(stream.uniform_open(), 1.0 / (t.degree + 1.0));
    }
    if (include) out.push_back(q);
  }
  return out;
}

std::vector<std::complex<double>> sample_ginibre_eigenvalues(int n,
                                                             RandomStream& stream) {
  if (n < 1) throw Error(ErrorKind::Input, "matrix size must be >= 1");
  ComplexMatrix q(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = sample_complex_normal(stream);
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(q, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "eigensolver did not converge");
  }
  const Eigen::VectorXcd& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

Eigen::MatrixXd annuli_lambdas(const RadialKernelSpec& spec,
                               const std::vector<Annulus>& annuli) {
  spec.validate();
  for (std::size_t i = 0; i < annuli.size(); ++i) {
    const Annulus& a = annuli[i];
    if (!(a.inner >= 0.0) || !(a.outer > a.inner)) {
      throw Error(ErrorKind::Input, "annulus needs 0 <= inner < outer");
    }
    if (i > 0 && a.inner < annuli[i - 1].outer) {
      throw Error(ErrorKind::Input, "annuli overlap or are out of order");
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(spec.terms.size()),
                      static_cast<Eigen::Index>(annuli.size()));
  for (std::size_t k = 0; k < spec.terms.size(); ++k) {
    const RadialTerm& t = spec.terms[k];
    for (std::size_t i = 0; i < annuli.size(); ++i) {
      const double hi = squared_modulus_cdf(spec.base, t.degree,
                                            annuli[i].outer * annuli[i].outer);
      const double lo = squared_modulus_cdf(spec.base, t.degree,
                                            annuli[i].inner * annuli[i].inner);
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          t.lambda * (hi - lo);
    }
  }
  return out;
}

std::size_t annulus_index(const std::vector<Annulus>& annuli, double r) {
  for (std::size_t i = 0; i < annuli.size(); ++i) {
    if (r > annuli[i].inner && r < annuli[i].outer) return i;
  }
  return annuli.size();
}

DiscretizedKernel discretize_radial_kernel(const RadialKernelSpec& spec,
                                           double spacing, double radius) {
  spec.validate();
  if (!(spacing > 0.0) || !(radius > 0.0)) {
    throw Error(ErrorKind::Input, "grid spacing and radius must be positive");
  }
  std::vector<std::complex<double>> centers;
  std::vector<double> weights;
  const auto half = static_cast<long>(std::ceil(radius / spacing));
  for (long i = -half; i < half; ++i) {
    for (long j = -half; j < half; ++j) {
      const std::complex<double> z((i + 0.5) * spacing, (j + 0.5) * spacing);
      if (std::abs(z) >= radius) continue;
      const double w = spacing * spacing * base_density(spec.base, std::abs(z));
      if (!(w > 0.0)) continue;
      centers.push_back(z);
      weights.push_back(w);
    }
  }
  const auto n = static_cast<Eigen::Index>(centers.size());
  const auto r = static_cast<Eigen::Index>(spec.terms.size());

  // K = Phi Phi^*, Phi(x, k) = sqrt(lambda_k a_k^2) z_x^k. The nonzero
  // spectrum of K W is that of the r x r Gram matrix Phi^* W Phi.
  ComplexMatrix features(n, r);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index k = 0; k < r; ++k) {
      const RadialTerm& t = spec.terms[static_cast<std::size_t>(k)];
      features(x, k) = std::sqrt(t.lambda * t.a2) *
                       std::pow(centers[static_cast<std::size_t>(x)], t.degree);
    }
  }
  const Eigen::VectorXd w =
      Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  ComplexMatrix gram = features.adjoint() * w.cast<Complex>().asDiagonal() * features;
  gram = 0.5 * (gram + gram.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "eigensolver did not converge");
  }

  std::vector<double> raw;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = r - 1; k >= 0; --k) {
    const double d = solver.eigenvalues()(k);
    raw.push_back(d);
    if (d > 1e-12) kept.push_back(k);
  }

  double clamp = 0.0;
  Spectrum spec_out;
  spec_out.eigenvalues.resize(static_cast<Eigen::Index>(kept.size()));
  spec_out.eigenvectors.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const Eigen::Index k = kept[c];
    const double d = solver.eigenvalues()(k);
    const double clamped = std::clamp(d, 0.0, 1.0);
    clamp = std::max(clamp, std::abs(d - clamped));
    spec_out.eigenvalues(static_cast<Eigen::Index>(c)) = clamped;
    spec_out.eigenvectors.col(static_cast<Eigen::Index>(c)) =
        features * solver.eigenvectors().col(k) / std::sqrt(d);
  }
  for (double d : raw) {
    if (d < 0.0) clamp = std::max(clamp, -d);
  }
  if (clamp > kMaxClampMagnitude) {
    throw Error(ErrorKind::Numerical,
                "discretization too coarse: eigenvalue clamp " + std::to_string(clamp));
  }

  std::vector<std::string> labels(centers.size());
  for (std::size_t x = 0; x < centers.size(); ++x) labels[x] = "c" + std::to_string(x);

  return DiscretizedKernel{GroundSet(std::move(labels), weights),
                           std::move(spec_out),
                           std::move(raw),
                           std::move(centers),
                           spacing,
                           clamp};
}

HermitianKernel DiscretizedKernel::kernel() const {
  ComplexMatrix matrix = reconstruct(spectrum);
  matrix = 0.5 * (matrix + matrix.adjoint()).eval();
  return HermitianKernel(std::move(matrix), ground);
}

Eigen::VectorXd DiscretizedKernel::diagonal() const {
  return spectrum.eigenvectors.cwiseAbs2() * spectrum.eigenvalues;
}

std::vector<std::complex<double>> to_points(const DiscretizedKernel& grid,
                                            const PointConfiguration& config) {
  std::vector<std::complex<double>> out;
  out.reserve(config.size());
  for (std::size_t p : config.points()) out.push_back(grid.centers.at(p));
  return out;
}

std::vector<std::complex<double>> sample_cloud(const DiscretizedKernel& grid,
                                               CloudProcess process,
                                               RandomStream& stream) {
  const GroundSet& ground = grid.ground;
  PointConfiguration config;
  switch (process) {
    case CloudProcess::Poisson: {
      std::vector<std::size_t> points;
      const Eigen::VectorXd diag = grid.diagonal();
      for (std::size_t x = 0; x < ground.size(); ++x) {
        const double mean = diag(static_cast<Eigen::Index>(x)) * ground.weight(x);
        points.insert(points.end(), sample_poisson(mean, stream), x);
      }
      config = PointConfiguration(std::move(points), false, ground.size());
      break;
    }
    case CloudProcess::Determinantal:
      config = sample_dpp(grid.spectrum, ground, stream);
      break;
    case CloudProcess::Permanental:
      config = sample_permanental(grid.spectrum, ground, stream);
      break;
  }
  std::vector<std::complex<double>> out = to_points(grid, config);
  for (auto& z : out) {
    z += std::complex<double>((stream.uniform() - 0.5) * grid.spacing,
                              (stream.uniform() - 0.5) * grid.spacing);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Torus moments

LaurentPoly LaurentPoly::constant(std::size_t variables, Complex value) {
  LaurentPoly p(variables);
  p.add_term(Exponent(variables, 0), value);
  return p;
}

LaurentPoly LaurentPoly::monomial(const Exponent& exponent, Complex coefficient) {
  LaurentPoly p(exponent.size());
  p.add_term(exponent, coefficient);
  return p;
}

void LaurentPoly::add_term(const Exponent& exponent, Complex coefficient) {
  if (exponent.size() != variables_) {
    throw Error(ErrorKind::Input, "exponent length does not match variables");
  }
  auto [it, inserted] = terms_.try_emplace(exponent, coefficient);
  if (!inserted) it->second += coefficient;
  if (it->second == Complex(0.0)) terms_.erase(it);
}

Complex LaurentPoly::coefficient(const Exponent& exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

int LaurentPoly::degree(std::size_t i) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::abs(e.at(i)));
  return d;
}

LaurentPoly LaurentPoly::conjugate() const {
  LaurentPoly out(variables_);
  for (const auto& [e, c] : terms_) {
    Exponent neg(e.size());
    std::transform(e.begin(), e.end(), neg.begin(), [](int v) { return -v; });
    out.add_term(neg, std::conj(c));
  }
  return out;
}

bool LaurentPoly::is_real(double tol) const {
  const LaurentPoly c = conjugate();
  for (const auto& [e, v] : terms_) {
    if (std::abs(v - c.coefficient(e)) > tol) return false;
  }
  return c.terms().size() == terms_.size();
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& other) const {
  LaurentPoly out = *this;
  for (const auto& [e, c] : other.terms_) out.add_term(e, c);
  return out;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& other) const {
  if (other.variables_ != variables_) {
    throw Error(ErrorKind::Input, "multiplying polynomials in different variables");
  }
  LaurentPoly out(variables_);
  Exponent sum(variables_);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : other.terms_) {
      for (std::size_t i = 0; i < variables_; ++i) sum[i] = e1[i] + e2[i];
      out.add_term(sum, c1 * c2);
    }
  }
  return out;
}

LaurentPoly LaurentPoly::operator*(Complex scale) const {
  LaurentPoly out(variables_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * scale);
  return out;
}

Complex torus_moment(const LaurentPoly& density, const LaurentPoly::Exponent& e) {
  LaurentPoly::Exponent target(e.size());
  std::transform(e.begin(), e.end(), target.begin(), [](int v) { return -v; });
  if (target.size() != density.variables()) {
    throw Error(ErrorKind::Input, "moment exponent length does not match variables");
  }
  return density.coefficient(target);
}

LaurentPoly circular_vandermonde_density(std::size_t n) {
  LaurentPoly p = LaurentPoly::constant(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // |z_i - z_j|^2 = 2 - z_i conj(z_j) - conj(z_i) z_j on the circle.
      LaurentPoly factor = LaurentPoly::constant(n, 2.0);
      LaurentPoly::Exponent e(n, 0);
      e[i] = 1;
      e[j] = -1;
      factor.add_term(e, -1.0);
      e[i] = -1;
      e[j] = 1;
      factor.add_term(e, -1.0);
      p = p * factor;
    }
  }
  return p * Complex(1.0 / boost::math::factorial<double>(static_cast<unsigned>(n)));
}

// ---------------------------------------------------------------------------
// Power independence

PowerIndependenceReport power_independence_check(
    const std::vector<std::vector<std::complex<double>>>& samples, int power,
    int degree) {
  if (samples.empty()) throw Error(ErrorKind::Input, "no samples");
  if (power < 1) throw Error(ErrorKind::Input, "power must be >= 1");

  struct Stat {
    std::string label;
    int a;
    int b;  // 0 means one-point sum of u^a
  };
  const std::vector<Stat> stats{
      {"sum u^1", 1, 0},           {"sum u^2", 2, 0},
      {"sum_{i!=j} u_i u_j^-1", 1, -1}, {"sum_{i!=j} u_i^2 u_j^-2", 2, -2},
      {"sum_{i!=j} u_i u_j", 1, 1},    {"sum_{i!=j} u_i^2 u_j^-1", 2, -1},
  };
  const std::size_t m = stats.size();
  std::vector<Complex> sum(m, 0.0);
  std::vector<double> sq_re(m, 0.0);
  std::vector<double> sq_im(m, 0.0);

  auto power_sum = [](const std::vector<Complex>& u, int a) {
    Complex s = 0.0;
    for (const Complex& v : u) s += std::pow(v, a);
    return s;
  };

  std::vector<Complex> u;
  for (const auto& config : samples) {
    u.clear();
    for (const auto& z : config) {
      const double r = std::abs(z);
      if (r == 0.0) continue;
      u.push_back(std::pow(z / r, power));
    }
    for (std::size_t s = 0; s < m; ++s) {
      Complex v;
      if (stats[s].b == 0) {
        v = power_sum(u, stats[s].a);
      } else {
        v = power_sum(u, stats[s].a) * power_sum(u, stats[s].b) -
            power_sum(u, stats[s].a + stats[s].b);
      }
      sum[s] += v;
      sq_re[s] += v.real() * v.real();
      sq_im[s] += v.imag() * v.imag();
    }
  }

  PowerIndependenceReport report;
  report.power = power;
  report.degree = degree;
  report.samples = samples.size();
  report.passed = true;
  const auto n = static_cast<double>(samples.size());
  for (std::size_t s = 0; s < m; ++s) {
    MomentEstimate est;
    est.label = stats[s].label;
    est.mean = sum[s] / n;
    const double var_re = std::max(0.0, sq_re[s] / n - est.mean.real() * est.mean.real());
    const double var_im = std::max(0.0, sq_im[s] / n - est.mean.imag() * est.mean.imag());
    est.stderr_re = std::sqrt(var_re / std::max(1.0, n - 1.0));
    est.stderr_im = std::sqrt(var_im / std::max(1.0, n - 1.0));
    auto ok = [](double mean, double se) {
      return se > 1e-12 ? std::abs(mean) <= 4.0 * se : std::abs(mean) < 1e-9;
    };
    est.within_bound = ok(est.mean.real(), est.stderr_re) &&
                       ok(est.mean.imag(), est.stderr_im);
    report.passed = report.passed && est.within_bound;
    report.moments.push_back(std::move(est));
  }
  return report;
}

}  // namespace detproc
