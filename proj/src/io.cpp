#include "detproc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "detproc/error.hpp"

namespace detproc {

double round12(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  return std::stod(format12(value));
}

std::string format12(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Input, path.string() + ": " + e.what());
  }
}

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Input, std::string(what) + ": " + e.what());
  }
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

}  // namespace

GroundSet ground_from_json(const Json& j) {
  return guarded("ground set", [&] {
    std::vector<std::string> labels;
    for (const auto& l : j.at("labels")) {
      labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
    }
    return GroundSet(std::move(labels), j.at("weights").get<std::vector<double>>());
  });
}

Json to_json(const GroundSet& ground) {
  Json weights = Json::array();
  for (double w : ground.weights()) weights.push_back(number(w));
  return {{"labels", ground.labels()}, {"weights", weights}};
}

HermitianKernel kernel_from_json(const Json& j) {
  ComplexMatrix m = guarded("kernel", [&] {
    const bool real = j.contains("matrix_real");
    const Json& rows = real ? j.at("matrix_real") : j.at("matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix out(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Json& row = rows.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw Error(ErrorKind::Input, "kernel matrix is not square");
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        const Json& v = row.at(static_cast<std::size_t>(c));
        if (real) {
          out(r, c) = v.get<double>();
        } else if (v.is_number()) {
          out(r, c) = v.get<double>();
        } else {
          out(r, c) = Complex(v.at(0).get<double>(), v.at(1).get<double>());
        }
      }
    }
    return out;
  });
  if (m.rows() == 0) throw Error(ErrorKind::Input, "empty kernel matrix");
  GroundSet ground = j.contains("ground")
                         ? ground_from_json(j.at("ground"))
                         : GroundSet::unit(static_cast<std::size_t>(m.rows()));
  if (ground.size() != static_cast<std::size_t>(m.rows())) {
    throw Error(ErrorKind::Input, "ground set and matrix sizes differ");
  }
  return HermitianKernel(std::move(m), std::move(ground));
}

Json to_json(const HermitianKernel& kernel) {
  Json rows = Json::array();
  const ComplexMatrix& m = kernel.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({number(m(r, c).real()), number(m(r, c).imag())});
    }
    rows.push_back(row);
  }
  return {{"ground", to_json(kernel.ground())}, {"matrix", rows}};
}

HermitianKernel load_kernel(const std::filesystem::path& path) {
  return kernel_from_json(read_json_file(path));
}

RadialKernelSpec radial_spec_from_json(const Json& j) {
  RadialKernelSpec spec = guarded("radial spec", [&] {
    if (j.contains("preset")) {
      const auto preset = j.at("preset").get<std::string>();
      const int n = j.at("n").get<int>();
      if (n < 1) throw Error(ErrorKind::Input, "preset needs n >= 1");
      if (preset == "ginibre") return RadialKernelSpec::ginibre(n);
      if (preset == "bergman") return RadialKernelSpec::truncated_bergman(n);
      throw Error(ErrorKind::Input, "unknown preset '" + preset + "'");
    }
    RadialKernelSpec s;
    s.base = parse_radial_base(j.value("base", std::string("gaussian")));
    const Json& terms = j.at("terms");
    std::vector<double> a2_list;
    if (j.contains("a2") && j.at("a2").is_array()) {
      a2_list = j.at("a2").get<std::vector<double>>();
      if (a2_list.size() != terms.size()) {
        throw Error(ErrorKind::Input, "a2 list and terms differ in length");
      }
    } else if (j.contains("a2") && j.at("a2") != "auto") {
      throw Error(ErrorKind::Input, "a2 must be \"auto\" or a list");
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Json& t = terms.at(i);
      RadialTerm term;
      term.degree = t.contains("k") ? t.at("k").get<int>() : t.at("degree").get<int>();
      term.lambda = t.value("lambda", 1.0);
      if (!a2_list.empty()) {
        term.a2 = a2_list[i];
      } else if (t.contains("a2")) {
        term.a2 = t.at("a2").get<double>();
      } else {
        term.a2 = RadialKernelSpec::auto_a2(s.base, term.degree);
      }
      s.terms.push_back(term);
    }
    return s;
  });
  spec.validate();
  return spec;
}

RadialKernelSpec load_radial_spec(const std::filesystem::path& path) {
  return radial_spec_from_json(read_json_file(path));
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Input, "cannot open " + path.string());
  return Graph::parse(in);
}

Json to_json(const CountDistribution& dist) {
  Json pmf = Json::array();
  for (double p : dist.pmf) pmf.push_back(number(p));
  return {{"pmf", pmf},
          {"tail_bound", number(dist.tail_bound)},
          {"mean", number(dist.mean())},
          {"variance", number(dist.variance())}};
}

Json to_json(const TestReport& report) {
  Json j = {{"description", report.description},
            {"statistic", number(report.statistic)},
            {"p_value", number(report.p_value)},
            {"sample_size", report.sample_size},
            {"significance", number(report.significance)},
            {"passed", report.passed}};
  if (report.degrees_of_freedom > 0) j["dof"] = report.degrees_of_freedom;
  return j;
}

Json to_json(const Verdict& verdict) {
  Json j = {{"valid", verdict.valid}, {"reason", verdict.reason}};
  if (verdict.offending_eigenvalue) {
    j["offending_eigenvalue"] = number(*verdict.offending_eigenvalue);
  }
  return j;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Input, "bad index '" + item + "'");
    }
    if (used != item.size() || v < 0) throw Error(ErrorKind::Input, "bad index '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace detproc
