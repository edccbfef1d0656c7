#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "detproc/alphadet.hpp"
#include "detproc/dpp.hpp"
#include "detproc/error.hpp"
#include "detproc/io.hpp"
#include "detproc/parallel.hpp"
#include "detproc/permanental.hpp"
#include "detproc/planar.hpp"
#include "detproc/suite.hpp"
#include "detproc/ust.hpp"

using namespace detproc;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

// Destination for command output: a file when --out is given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::Input, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

enum class Format { Jsonl, Csv };

Format parse_format(const std::string& name) {
  if (name == "jsonl") return Format::Jsonl;
  if (name == "csv") return Format::Csv;
  throw Error(ErrorKind::Input, "unknown format '" + name + "'");
}

std::vector<Annulus> parse_annuli(const std::string& text) {
  // "r0:R0,r1:R1"; "inf" is accepted as an outer radius.
  std::vector<Annulus> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::Input, "annulus '" + item + "' is not inner:outer");
    }
    try {
      out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw Error(ErrorKind::Input, "annulus '" + item + "' is not numeric");
    }
  }
  if (out.empty()) throw Error(ErrorKind::Input, "no annuli given");
  return out;
}

Json round_all(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(round12(v));
  return out;
}

void emit_configurations(std::ostream& os, const std::vector<PointConfiguration>& draws,
                         const GroundSet& ground, Format format) {
  if (format == Format::Csv) os << "sample,point,label\n";
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto& pts = draws[i].points();
    if (format == Format::Csv) {
      for (std::size_t p : pts) os << i << ',' << p << ',' << ground.label(p) << '\n';
      continue;
    }
    Json labels = Json::array();
    for (std::size_t p : pts) labels.push_back(ground.label(p));
    os << Json{{"sample", i}, {"points", pts}, {"labels", labels}}.dump() << '\n';
  }
}

struct SampleArgs {
  std::string process;
  std::string kernel;
  double alpha = -1.0;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "jsonl";
};

int run_sample(const SampleArgs& a) {
  const HermitianKernel kernel = load_kernel(a.kernel);
  const Format format = parse_format(a.format);
  const RandomStream root(a.seed);
  std::vector<PointConfiguration> draws;
  if (a.process == "dpp") {
    draws = sample_dpp_batch(kernel, a.count, root);
  } else if (a.process == "perm") {
    draws = sample_permanental_batch(kernel, a.count, root);
  } else {
    const AlphaRegime regime = AlphaRegime::classify(a.alpha);
    if (regime.mode == AlphaMode::Unsupported) {
      throw Error(ErrorKind::Unsupported, "alpha must be -1/m or 1/m");
    }
    draws = generate_batch(a.count, root, [&](RandomStream& s) {
      return sample_alpha(kernel, a.alpha, s);
    });
  }
  Output out(a.out);
  emit_configurations(out.stream(), draws, kernel.ground(), format);
  return 0;
}

struct CountsArgs {
  std::string kernel;
  std::string subset;
  std::string kind = "dpp";
  double alpha = -1.0;
  std::size_t nmax = 200;
};

int run_counts(const CountsArgs& a) {
  const HermitianKernel kernel = load_kernel(a.kernel);
  std::vector<std::size_t> subset;
  if (a.subset.empty()) {
    for (std::size_t i = 0; i < kernel.size(); ++i) subset.push_back(i);
  } else {
    subset = parse_index_list(a.subset);
  }
  CountDistribution law;
  if (a.kind == "dpp") {
    law = count_pmf(kernel, subset);
  } else if (a.kind == "perm") {
    law = count_pmf_perm(kernel, subset, a.nmax);
  } else {
    law = alpha_count_pmf(kernel, a.alpha, subset, a.nmax);
  }
  std::cout << to_json(law).dump() << '\n';
  return 0;
}

struct RadialArgs {
  std::string action;
  std::string spec;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string annuli;
  std::string process = "all";
  double spacing = 0.1;
  double radius = 4.0;
  std::string out;
};

int run_radial(const RadialArgs& a) {
  const RadialKernelSpec spec = load_radial_spec(a.spec);
  Output out(a.out);
  std::ostream& os = out.stream();
  const RandomStream root(a.seed);
  if (a.action == "sample") {
    const auto draws = generate_batch(a.count, root, [&](RandomStream& s) {
      return sample_radial_moduli(spec, s);
    });
    for (std::size_t i = 0; i < draws.size(); ++i) {
      os << Json{{"sample", i}, {"squared_moduli", round_all(draws[i])}}.dump() << '\n';
    }
  } else if (a.action == "lambdas") {
    const auto annuli = parse_annuli(a.annuli);
    const Eigen::MatrixXd lambda = annuli_lambdas(spec, annuli);
    Json rows = Json::array();
    for (Eigen::Index k = 0; k < lambda.rows(); ++k) {
      std::vector<double> row;
      for (Eigen::Index i = 0; i < lambda.cols(); ++i) row.push_back(lambda(k, i));
      rows.push_back({{"degree", spec.terms[static_cast<std::size_t>(k)].degree},
                      {"lambda", round_all(row)}});
    }
    os << Json{{"terms", rows}}.dump() << '\n';
  } else {
    const DiscretizedKernel grid = discretize_radial_kernel(spec, a.spacing, a.radius);
    std::vector<std::pair<std::string, CloudProcess>> processes;
    if (a.process == "all" || a.process == "poisson") processes.emplace_back("poisson", CloudProcess::Poisson);
    if (a.process == "all" || a.process == "determinantal") processes.emplace_back("determinantal", CloudProcess::Determinantal);
    if (a.process == "all" || a.process == "permanental") processes.emplace_back("permanental", CloudProcess::Permanental);
    if (processes.empty()) throw Error(ErrorKind::Input, "unknown process '" + a.process + "'");
    std::cerr << "grid cells " << grid.ground.size() << ", eigenvalue clamp "
              << format12(grid.clamp_magnitude) << '\n';
    os << "process,sample,re,im\n";
    for (std::size_t p = 0; p < processes.size(); ++p) {
      const RandomStream stream = root.split(p);
      const auto clouds = generate_batch(a.count, stream, [&](RandomStream& s) {
        return sample_cloud(grid, processes[p].second, s);
      });
      for (std::size_t i = 0; i < clouds.size(); ++i) {
        for (const auto& z : clouds[i]) {
          os << processes[p].first << ',' << i << ',' << format12(z.real()) << ','
             << format12(z.imag()) << '\n';
        }
      }
    }
  }
  return 0;
}

struct UstArgs {
  std::string graph;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_ust(const UstArgs& a) {
  const Graph graph = load_graph(a.graph);
  const auto trees = generate_batch(a.count, RandomStream(a.seed), [&](RandomStream& s) {
    return sample_ust(graph, s);
  });
  Output out(a.out);
  for (const auto& t : trees) {
    Json labels = Json::array();
    for (std::size_t e : t) labels.push_back(graph.edge_label(e));
    out.stream() << Json{{"edges", t}, {"labels", labels}}.dump() << '\n';
  }
  return 0;
}

int run_validate(const std::string& path) {
  const Verdict v = validate_determinantal(load_kernel(path));
  std::cout << to_json(v).dump() << '\n';
  return v.valid ? 0 : kExitFail;
}

int run_verify(const std::string& path, std::uint64_t seed) {
  const std::filesystem::path suite_path(path);
  const auto reports = run_suite(read_json_file(suite_path), seed, suite_path.parent_path());
  bool all = true;
  for (const auto& r : reports) {
    std::cout << to_json(r).dump() << '\n';
    all = all && r.passed;
  }
  return all ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determinantal and permanental point process toolkit"};
  app.require_subcommand(1);
  int status = 0;

  std::string validate_kernel;
  auto* validate = app.add_subcommand("validate", "Check that a kernel defines a determinantal process");
  validate->add_option("--kernel", validate_kernel, "Kernel JSON file")->required();
  validate->callback([&] { status = run_validate(validate_kernel); });

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Draw point configurations");
  sample->add_option("process", sample_args.process, "dpp, perm or alpha")
      ->required()
      ->check(CLI::IsMember({"dpp", "perm", "alpha"}));
  sample->add_option("--kernel", sample_args.kernel, "Kernel JSON file")->required();
  sample->add_option("--alpha", sample_args.alpha, "alpha = -1/m or 1/m");
  sample->add_option("--count", sample_args.count, "Number of samples");
  sample->add_option("--seed", sample_args.seed, "Root seed");
  sample->add_option("--out", sample_args.out, "Output file (default stdout)");
  sample->add_option("--format", sample_args.format, "jsonl or csv");
  sample->callback([&] { status = run_sample(sample_args); });

  CountsArgs counts_args;
  auto* counts = app.add_subcommand("counts", "Exact count distribution in a subset");
  counts->add_option("--kernel", counts_args.kernel, "Kernel JSON file")->required();
  counts->add_option("--subset", counts_args.subset, "Comma separated indices (default all)");
  counts->add_option("--kind", counts_args.kind, "dpp, perm or alpha")
      ->check(CLI::IsMember({"dpp", "perm", "alpha"}));
  counts->add_option("--alpha", counts_args.alpha, "alpha for --kind alpha");
  counts->add_option("--nmax", counts_args.nmax, "Truncation for unbounded laws");
  counts->callback([&] { status = run_counts(counts_args); });

  RadialArgs radial_args;
  auto* radial = app.add_subcommand("radial", "Radially symmetric planar kernels");
  radial->add_option("action", radial_args.action, "sample, lambdas or cloud")
      ->required()
      ->check(CLI::IsMember({"sample", "lambdas", "cloud"}));
  radial->add_option("--spec", radial_args.spec, "Radial spec JSON file")->required();
  radial->add_option("--count", radial_args.count, "Number of samples");
  radial->add_option("--seed", radial_args.seed, "Root seed");
  radial->add_option("--annuli", radial_args.annuli, "inner:outer,... for lambdas");
  radial->add_option("--process", radial_args.process,
                     "poisson, determinantal, permanental or all (cloud)");
  radial->add_option("--spacing", radial_args.spacing, "Grid spacing (cloud)");
  radial->add_option("--radius", radial_args.radius, "Grid radius (cloud)");
  radial->add_option("--out", radial_args.out, "Output file (default stdout)");
  radial->callback([&] { status = run_radial(radial_args); });

  UstArgs ust_args;
  auto* ust = app.add_subcommand("ust", "Uniform spanning trees");
  auto* ust_sample = ust->add_subcommand("sample", "Draw spanning trees");
  ust->require_subcommand(1);
  ust_sample->add_option("--graph", ust_args.graph, "Edge-list file")->required();
  ust_sample->add_option("--count", ust_args.count, "Number of trees");
  ust_sample->add_option("--seed", ust_args.seed, "Root seed");
  ust_sample->add_option("--out", ust_args.out, "Output file (default stdout)");
  ust_sample->callback([&] { status = run_ust(ust_args); });

  std::string suite_file;
  std::uint64_t suite_seed = 0;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", suite_file, "Suite JSON file")->required();
  verify->add_option("--seed", suite_seed, "Root seed");
  verify->callback([&] { status = run_verify(suite_file, suite_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return status;
}
