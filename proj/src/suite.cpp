#include "detproc/suite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "detproc/alphadet.hpp"
#include "detproc/dpp.hpp"
#include "detproc/error.hpp"
#include "detproc/parallel.hpp"
#include "detproc/permanental.hpp"

namespace detproc {

namespace {

HermitianKernel resolve_kernel(const Json& ref, const std::filesystem::path& base) {
  if (ref.is_string()) return load_kernel(base / ref.get<std::string>());
  return kernel_from_json(ref);
}

RadialKernelSpec resolve_spec(const Json& ref, const std::filesystem::path& base) {
  if (ref.is_string()) return load_radial_spec(base / ref.get<std::string>());
  return radial_spec_from_json(ref);
}

std::vector<std::size_t> resolve_subset(const Json& check, std::size_t n) {
  std::vector<std::size_t> subset;
  if (check.contains("subset")) {
    subset = check.at("subset").get<std::vector<std::size_t>>();
  } else {
    subset.resize(n);
    std::iota(subset.begin(), subset.end(), 0);
  }
  for (std::size_t i : subset) {
    if (i >= n) throw Error(ErrorKind::OutOfRange, "subset index out of range");
  }
  return subset;
}

template <class Sampler>
TestReport count_check(const HermitianKernel& kernel,
                       const std::vector<std::size_t>& subset,
                       const CountDistribution& law, std::size_t samples,
                       const RandomStream& stream, Sampler&& sample,
                       const std::string& description) {
  const auto counts = generate_batch(samples, stream, [&](RandomStream& s) {
    return sample(kernel, s).count_in(subset);
  });
  return chi_square_fit(tally(counts), law.pmf, 1.0, description);
}

std::vector<TestReport> run_check(const Json& check, const RandomStream& stream,
                                  const std::filesystem::path& base) {
  const auto type = check.at("type").get<std::string>();
  const auto samples = check.value("samples", std::size_t{100000});
  std::vector<TestReport> out;

  if (type == "dpp_count" || type == "perm_count" || type == "alpha_count") {
    const HermitianKernel kernel = resolve_kernel(check.at("kernel"), base);
    const auto subset = resolve_subset(check, kernel.size());
    const auto n_max = check.value("nmax", std::size_t{200});
    if (type == "dpp_count") {
      out.push_back(count_check(
          kernel, subset, count_pmf(kernel, subset), samples, stream,
          [](const HermitianKernel& k, RandomStream& s) { return sample_dpp(k, s); },
          "determinantal counts vs Bernoulli-sum law"));
    } else if (type == "perm_count") {
      out.push_back(count_check(
          kernel, subset, count_pmf_perm(kernel, subset, n_max), samples, stream,
          [](const HermitianKernel& k, RandomStream& s) {
            return sample_permanental(k, s);
          },
          "permanental counts vs geometric-sum law"));
    } else {
      const double alpha = check.at("alpha").get<double>();
      out.push_back(count_check(
          kernel, subset, alpha_count_pmf(kernel, alpha, subset, n_max), samples,
          stream,
          [alpha](const HermitianKernel& k, RandomStream& s) {
            return sample_alpha(k, alpha, s);
          },
          "alpha-determinantal counts, alpha = " + format12(alpha)));
    }
  } else if (type == "ust_uniform") {
    const Graph graph = load_graph(base / check.at("graph").get<std::string>());
    const auto trees = enumerate_spanning_trees(graph);
    std::map<std::vector<std::size_t>, std::size_t> index;
    double total = 0.0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      index[trees[i].edges] = i;
      total += trees[i].weight;
    }
    std::vector<double> expected;
    for (const auto& t : trees) expected.push_back(t.weight / total);
    const auto draws = generate_batch(samples, stream, [&](RandomStream& s) {
      return sample_ust(graph, s);
    });
    std::vector<std::uint64_t> observed(trees.size() + 1, 0);
    for (const auto& d : draws) {
      auto it = index.find(d);
      ++observed[it == index.end() ? trees.size() : it->second];
    }
    out.push_back(chi_square_fit(observed, expected, 1.0,
                                 "spanning tree frequencies vs weighted uniform law"));
  } else if (type == "radial_moduli") {
    const RadialKernelSpec spec = resolve_spec(check.at("spec"), base);
    for (const auto& t : spec.terms) {
      if (t.lambda != 1.0) {
        throw Error(ErrorKind::Input, "radial_moduli checks need every lambda = 1");
      }
    }
    const auto draws = generate_batch(samples, stream, [&](RandomStream& s) {
      return sample_radial_moduli(spec, s);
    });
    for (std::size_t k = 0; k < spec.terms.size(); ++k) {
      std::vector<double> q(draws.size());
      for (std::size_t i = 0; i < draws.size(); ++i) q[i] = draws[i][k];
      const int degree = spec.terms[k].degree;
      const double rn = std::sqrt(static_cast<double>(q.size()));
      TestReport r;
      r.description = "squared modulus of degree " + std::to_string(degree) +
                      " term vs its exact law";
      r.sample_size = q.size();
      r.statistic = ks_statistic(std::move(q), [&](double x) {
        return squared_modulus_cdf(spec.base, degree, x);
      });
      r.p_value = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * r.statistic);
      out.push_back(r);
    }
  } else if (type == "clt") {
    std::vector<std::vector<double>> levels;
    const Json& spec = check.at("levels");
    if (spec.is_array()) {
      levels = spec.get<std::vector<std::vector<double>>>();
    } else {
      const double lambda = spec.at("lambda").get<double>();
      for (std::size_t n : spec.at("sizes").get<std::vector<std::size_t>>()) {
        levels.emplace_back(n, lambda);
      }
    }
    out.push_back(clt_check(levels, samples, stream).report);
  } else if (type == "witness") {
    for (double alpha : check.at("alphas").get<std::vector<double>>()) {
      const WitnessResult w = existence_witness(alpha);
      const double closed = 2.0 * (4.0 - alpha) * (alpha + 1.0);
      TestReport r;
      r.description = "witness alpha-determinant at alpha = " + format12(alpha);
      r.statistic = w.value;
      r.passed = std::abs(w.value - closed) <= 1e-10 &&
                 w.negative_intensity == (closed < 0.0);
      out.push_back(r);
    }
  } else {
    throw Error(ErrorKind::Input, "unknown check type '" + type + "'");
  }
  return out;
}

}  // namespace

std::vector<WeightedTree> enumerate_spanning_trees(const Graph& graph) {
  const std::size_t m = graph.edge_count();
  const std::size_t k = graph.vertex_count() - 1;
  double candidates = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    candidates = candidates * static_cast<double>(m - i) / static_cast<double>(i + 1);
  }
  if (candidates > 2e6) throw Error(ErrorKind::Capacity, "graph too large to enumerate");

  std::vector<WeightedTree> out;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    if (is_spanning_tree(graph, pick)) {
      double w = 1.0;
      for (std::size_t e : pick) w *= graph.edges()[e].conductance;
      out.push_back({pick, w});
    }
    // Next k-combination of {0..m-1} in lexicographic order.
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

std::vector<TestReport> run_suite(const Json& suite, std::uint64_t seed,
                                  const std::filesystem::path& base_dir) {
  const RandomStream root(seed);
  double significance = 1e-3;
  std::vector<TestReport> reports;
  try {
    significance = suite.value("significance", 1e-3);
    const Json& checks = suite.at("checks");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      auto part = run_check(checks.at(i), root.split(i), base_dir);
      reports.insert(reports.end(), part.begin(), part.end());
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Input, std::string("suite: ") + e.what());
  }
  const double corrected = significance / static_cast<double>(std::max<std::size_t>(1, reports.size()));
  for (TestReport& r : reports) {
    r.significance = corrected;
    if (!std::isnan(r.p_value)) r.passed = r.p_value > corrected;
  }
  return reports;
}

}  // namespace detproc
