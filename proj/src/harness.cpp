#include "detproc/harness.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <numeric>
#include <regex>
#include <sstream>

#include "detproc/core.hpp"
#include "detproc/error.hpp"
#include "detproc/parallel.hpp"

namespace detproc {

namespace {

constexpr double kMinExpected = 5.0;

double chi_square_survival(double statistic, std::size_t dof) {
  if (!std::isfinite(statistic)) return 0.0;
  return boost::math::gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

// Greedy left-to-right grouping of categories so each group's weight
// reaches the threshold; a light final group joins its predecessor.
std::vector<std::size_t> merge_groups(const std::vector<double>& weight,
                                      double threshold) {
  std::vector<std::size_t> group(weight.size());
  double acc = 0.0;
  std::size_t current = 0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    group[i] = current;
    acc += weight[i];
    if (acc >= threshold) {
      acc = 0.0;
      ++current;
    }
  }
  for (auto& g : group) {
    if (g == current && current > 0) g = current - 1;
  }
  return group;
}

TestReport finish(TestReport r) {
  r.p_value = chi_square_survival(r.statistic, r.degrees_of_freedom);
  r.passed = r.p_value > r.significance;
  return r;
}

}  // namespace

std::vector<std::uint64_t> tally(std::span<const std::size_t> values) {
  std::vector<std::uint64_t> out;
  for (std::size_t v : values) {
    if (v >= out.size()) out.resize(v + 1, 0);
    ++out[v];
  }
  return out;
}

TestReport chi_square_fit(std::span<const std::uint64_t> observed,
                          std::span<const double> expected, double significance,
                          std::string description) {
  TestReport r;
  r.description = std::move(description);
  r.significance = significance;
  r.sample_size = std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
  if (r.sample_size == 0) throw Error(ErrorKind::Input, "chi-square needs observations");

  std::vector<double> prob(expected.begin(), expected.end());
  for (double p : prob) {
    if (!(p >= 0.0)) throw Error(ErrorKind::Input, "expected pmf has negative mass");
  }
  const double tail = std::max(0.0, 1.0 - std::accumulate(prob.begin(), prob.end(), 0.0));
  std::vector<double> obs(prob.size() + 1, 0.0);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs[std::min(i, prob.size())] += static_cast<double>(observed[i]);
  }
  prob.push_back(tail);

  // Merging would hide observations in categories the model rules out.
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (prob[i] == 0.0 && obs[i] > 0.0) {
      r.statistic = INFINITY;
      r.p_value = 0.0;
      r.degrees_of_freedom = prob.size() - 1;
      r.passed = false;
      return r;
    }
  }

  const auto n = static_cast<double>(r.sample_size);
  std::vector<double> exp_count(prob.size());
  for (std::size_t i = 0; i < prob.size(); ++i) exp_count[i] = n * prob[i];
  const auto group = merge_groups(exp_count, kMinExpected);
  const std::size_t groups = group.empty() ? 0 : group.back() + 1;
  std::vector<double> g_obs(groups, 0.0);
  std::vector<double> g_exp(groups, 0.0);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    g_obs[group[i]] += obs[i];
    g_exp[group[i]] += exp_count[i];
  }
  if (groups < 2) {
    throw Error(ErrorKind::Degenerate, "all expected mass falls in one bin after merging");
  }
  r.statistic = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    if (g_exp[g] <= 0.0) {
      if (g_obs[g] > 0.0) r.statistic = INFINITY;
      continue;
    }
    const double d = g_obs[g] - g_exp[g];
    r.statistic += d * d / g_exp[g];
  }
  r.degrees_of_freedom = groups - 1;
  return finish(std::move(r));
}

TestReport chi_square_homogeneity(std::span<const std::uint64_t> first,
                                  std::span<const std::uint64_t> second,
                                  double significance, std::string description) {
  TestReport r;
  r.description = std::move(description);
  r.significance = significance;
  const std::size_t k = std::max(first.size(), second.size());
  std::vector<double> a(k, 0.0);
  std::vector<double> b(k, 0.0);
  for (std::size_t i = 0; i < first.size(); ++i) a[i] = static_cast<double>(first[i]);
  for (std::size_t i = 0; i < second.size(); ++i) b[i] = static_cast<double>(second[i]);
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::Input, "empty sample");
  r.sample_size = static_cast<std::size_t>(na + nb);

  // Merge on the smaller of the two expected counts per category.
  std::vector<double> weight(k);
  const double frac = std::min(na, nb) / (na + nb);
  for (std::size_t i = 0; i < k; ++i) weight[i] = (a[i] + b[i]) * frac;
  const auto group = merge_groups(weight, kMinExpected);
  const std::size_t groups = group.empty() ? 0 : group.back() + 1;
  if (groups < 2) {
    throw Error(ErrorKind::Degenerate, "all mass falls in one bin after merging");
  }
  std::vector<double> ga(groups, 0.0);
  std::vector<double> gb(groups, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    ga[group[i]] += a[i];
    gb[group[i]] += b[i];
  }
  r.statistic = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    const double pooled = ga[g] + gb[g];
    if (pooled == 0.0) continue;
    const double ea = pooled * na / (na + nb);
    const double eb = pooled * nb / (na + nb);
    r.statistic += (ga[g] - ea) * (ga[g] - ea) / ea + (gb[g] - eb) * (gb[g] - eb) / eb;
  }
  r.degrees_of_freedom = groups - 1;
  return finish(std::move(r));
}

NamedDistribution NamedDistribution::parse(const std::string& text) {
  static const std::regex one(R"(\s*(\w+)\s*(?:\(\s*([-+0-9.eE]+)\s*(?:,\s*([-+0-9.eE]+)\s*)?\))?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, one)) {
    throw Error(ErrorKind::Input, "cannot parse distribution '" + text + "'");
  }
  const std::string name = m[1];
  const bool has_a = m[2].matched;
  const bool has_b = m[3].matched;
  if (name == "uniform" && !has_a) return uniform();
  if (name == "normal" && !has_a) return normal();
  if (name == "exponential" && !has_a) return exponential();
  const double a = has_a ? std::stod(m[2]) : 1.0;
  const double b = has_b ? std::stod(m[3]) : 1.0;
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorKind::Input, "distribution parameters must be positive");
  }
  if (name == "gamma" && has_a && !has_b) return gamma(a);
  if (name == "beta" && has_a && has_b) return beta(a, b);
  throw Error(ErrorKind::Input, "unknown distribution '" + text + "'");
}

double NamedDistribution::cdf(double x) const {
  switch (kind) {
    case Kind::Uniform:
      return std::clamp(x, 0.0, 1.0);
    case Kind::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-x);
    case Kind::Gamma:
      return x <= 0.0 ? 0.0 : boost::math::gamma_p(a, x);
    case Kind::Beta:
      if (x <= 0.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return boost::math::cdf(boost::math::beta_distribution<double>(a, b), x);
    case Kind::Normal:
      return 0.5 * std::erfc(-x / std::sqrt(2.0));
  }
  return 0.0;
}

std::string NamedDistribution::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Uniform: return "uniform";
    case Kind::Exponential: return "exponential";
    case Kind::Normal: return "normal";
    case Kind::Gamma: os << "gamma(" << a << ")"; break;
    case Kind::Beta: os << "beta(" << a << "," << b << ")"; break;
  }
  return os.str();
}

double kolmogorov_survival(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

TestReport ks_fit(std::vector<double> samples, const NamedDistribution& dist,
                  double significance, std::string description) {
  if (samples.size() < 10) throw Error(ErrorKind::Input, "KS needs at least 10 samples");
  TestReport r;
  r.description = description.empty() ? "KS vs " + dist.name() : std::move(description);
  r.significance = significance;
  r.sample_size = samples.size();
  r.statistic = ks_statistic(std::move(samples), [&](double x) { return dist.cdf(x); });
  const double rn = std::sqrt(static_cast<double>(r.sample_size));
  r.p_value = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * r.statistic);
  r.passed = r.p_value > significance;
  return r;
}

CltReport clt_check(const std::vector<std::vector<double>>& levels,
                    std::size_t samples_per_level, const RandomStream& root) {
  if (levels.size() < 3) throw Error(ErrorKind::Input, "clt_check needs at least 3 levels");
  if (samples_per_level < 10) throw Error(ErrorKind::Input, "too few samples per level");

  CltReport out;
  for (const auto& lambdas : levels) {
    CltLevel level;
    for (double raw : lambdas) {
      const double l = clamp_unit_eigenvalue(raw);
      level.mean += l;
      level.variance += l * (1.0 - l);
    }
    if (!(level.variance > 0.0)) {
      throw Error(ErrorKind::Input, "clt level has zero variance");
    }
    if (!out.levels.empty() && !(level.variance > out.levels.back().variance)) {
      throw Error(ErrorKind::Input, "clt level variances are not increasing");
    }
    out.levels.push_back(level);
  }

  bool decreasing = true;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    CltLevel& level = out.levels[li];
    const auto& lambdas = levels[li];
    const auto counts = generate_batch(samples_per_level, root.split(li),
                                       [&](RandomStream& s) {
                                         std::size_t c = 0;
                                         for (double l : lambdas) c += s.uniform() < l;
                                         return c;
                                       });
    std::vector<double> z(counts.size());
    const double sd = std::sqrt(level.variance);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      z[i] = (static_cast<double>(counts[i]) - level.mean) / sd;
    }
    const NamedDistribution normal = NamedDistribution::normal();
    level.ks = ks_statistic(std::move(z), [&](double x) { return normal.cdf(x); });
    if (li > 0 && !(level.ks < out.levels[li - 1].ks)) decreasing = false;
  }

  const CltLevel& last = out.levels.back();
  out.report.description = "standardized Bernoulli-sum counts vs N(0,1)";
  out.report.statistic = last.ks;
  out.report.sample_size = samples_per_level * levels.size();
  out.report.passed = decreasing && last.variance >= kCltMinFinalVariance &&
                      last.ks < kCltMaxFinalKs;
  return out;
}

}  // namespace detproc
