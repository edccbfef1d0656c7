#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "detproc/harness.hpp"
#include "detproc/io.hpp"

namespace detproc {

/// Runs a verification suite:
///
///   {"significance": 1e-3,
///    "checks": [{"type": "dpp_count", "kernel": "k.json", "subset": [0, 1],
///                "samples": 100000}, ...]}
///
/// Types: dpp_count, perm_count (optional "nmax"), alpha_count ("alpha"),
/// ust_uniform ("graph"), radial_moduli ("spec"), clt ("levels" or
/// {"lambda", "sizes"}), witness ("alphas"). File references resolve
/// against `base_dir`; kernels and specs may also be inline objects.
/// Check i draws from RandomStream(seed).split(i). Reports carry the
/// Bonferroni-corrected significance (global / number of reports).
std::vector<TestReport> run_suite(const Json& suite, std::uint64_t seed,
                                  const std::filesystem::path& base_dir);

/// Spanning trees of `graph` by exhaustive search over edge subsets, each
/// with its conductance-product weight. Capped at 2e6 candidate subsets.
struct WeightedTree {
  std::vector<std::size_t> edges;
  double weight = 1.0;
};
std::vector<WeightedTree> enumerate_spanning_trees(const Graph& graph);

}  // namespace detproc
