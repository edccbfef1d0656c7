#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "detproc/core.hpp"
#include "detproc/harness.hpp"
#include "detproc/kernels.hpp"
#include "detproc/planar.hpp"
#include "detproc/ust.hpp"

namespace detproc {

using Json = nlohmann::json;

/// Round to 12 significant digits. nlohmann prints the shortest string that
/// round-trips, so a rounded double serializes with at most 12 digits.
double round12(double value);
std::string format12(double value);

/// Parse errors of any kind surface as Error(Input).
Json read_json_file(const std::filesystem::path& path);

GroundSet ground_from_json(const Json& j);
Json to_json(const GroundSet& ground);

/// {"ground": {...}?, "matrix": [[[re, im], ...], ...]} or with
/// "matrix_real": [[...]]. Without "ground" the atoms are unit-mass "0".."n-1".
HermitianKernel kernel_from_json(const Json& j);
Json to_json(const HermitianKernel& kernel);
HermitianKernel load_kernel(const std::filesystem::path& path);

/// {"base": "gaussian"|"lebesgue-disk", "terms": [{"k", "lambda"?}],
///  "a2": "auto" | [values]} or {"preset": "ginibre"|"bergman", "n": N}.
/// A term may carry its own "a2"; otherwise a2 is the exact normalizer.
/// Missing lambda is 1.
RadialKernelSpec radial_spec_from_json(const Json& j);
RadialKernelSpec load_radial_spec(const std::filesystem::path& path);

Graph load_graph(const std::filesystem::path& path);

Json to_json(const CountDistribution& dist);
Json to_json(const TestReport& report);
Json to_json(const Verdict& verdict);

/// Comma separated integers, e.g. "0,2,5".
std::vector<std::size_t> parse_index_list(const std::string& text);

}  // namespace detproc
