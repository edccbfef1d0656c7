#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "detproc/dpp.hpp"
#include "detproc/error.hpp"
#include "detproc/harness.hpp"
#include "detproc/io.hpp"
#include "detproc/parallel.hpp"
#include "detproc/suite.hpp"
#include "support.hpp"

using namespace detproc;

namespace {

std::filesystem::path fixtures() {
  const char* dir = std::getenv("DETPROC_FIXTURES");
  return dir ? std::filesystem::path(dir) : std::filesystem::path("tests/fixtures");
}

// Multinomial counts by inversion of the cumulative pmf.
std::vector<std::uint64_t> multinomial(const std::vector<double>& pmf, std::size_t n,
                                       RandomStream& s) {
  std::vector<std::uint64_t> out(pmf.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    double u = s.uniform();
    std::size_t k = 0;
    while (k + 1 < pmf.size() && u >= pmf[k]) u -= pmf[k++];
    ++out[k];
  }
  return out;
}

}  // namespace

TEST_CASE("chi-square examples") {
  const std::vector<double> pmf{0.1, 0.2, 0.3, 0.25, 0.15};
  RandomStream s(1);
  const auto good = multinomial(pmf, 100000, s);
  const auto r = chi_square_fit(good, pmf);
  CHECK(r.passed);
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);
  CHECK(r.sample_size == 100000);
  CHECK(r.degrees_of_freedom == 4);

  const std::vector<double> shifted{0.11, 0.19, 0.3, 0.25, 0.15};
  const auto bad = multinomial(shifted, 100000, s);
  CHECK(chi_square_fit(bad, pmf).p_value < 1e-6);

  // Hand-computed statistic: observed (30, 70) against (0.5, 0.5).
  const std::vector<std::uint64_t> obs{30, 70};
  const std::vector<double> half{0.5, 0.5};
  const auto h = chi_square_fit(obs, half);
  CHECK(h.statistic == doctest::Approx(16.0));
  CHECK(h.p_value == doctest::Approx(std::erfc(std::sqrt(8.0))).epsilon(1e-9));

  // Light categories merge into their neighbours.
  const std::vector<std::uint64_t> sparse{50, 40, 8, 1, 1};
  const std::vector<double> sparse_pmf{0.5, 0.4, 0.08, 0.01, 0.01};
  CHECK(chi_square_fit(sparse, sparse_pmf).degrees_of_freedom == 2);

  // Observations where the pmf has no mass are an immediate failure.
  const std::vector<std::uint64_t> impossible{50, 50, 1};
  const std::vector<double> two{0.5, 0.5};
  const auto imp = chi_square_fit(impossible, two);
  CHECK_FALSE(imp.passed);
  CHECK(imp.p_value == 0.0);

  const std::vector<std::uint64_t> one{100};
  const std::vector<double> all{1.0};
  CHECK_THROWS_AS(chi_square_fit(one, all), Error);
}

TEST_CASE("bernoulli-sum counts against the exact pmf") {
  const std::vector<double> lambdas{0.2, 0.5, 0.9};
  const auto law = bernoulli_sum_pmf(lambdas);
  const auto draws = generate_batch(100000, RandomStream(2), [&](RandomStream& s) {
    std::size_t c = 0;
    for (double l : lambdas) c += s.uniform() < l;
    return c;
  });
  CHECK(chi_square_fit(tally(draws), law.pmf).passed);
}

TEST_CASE("calibration under the null") {
  // At significance 0.05 the rejection count over 200 replications must lie
  // within a factor of two of the nominal 10.
  const double sig = 0.05;
  const std::vector<double> pmf{0.1, 0.2, 0.3, 0.25, 0.15};
  std::size_t chi = 0, homog = 0, ks = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    RandomStream s = RandomStream(3).split(rep);
    chi += !chi_square_fit(multinomial(pmf, 2000, s), pmf, sig).passed;
    const auto a = multinomial(pmf, 2000, s);
    const auto b = multinomial(pmf, 3000, s);
    homog += !chi_square_homogeneity(a, b, sig).passed;
    std::vector<double> u;
    for (int i = 0; i < 500; ++i) u.push_back(sample_gamma(3.0, s));
    ks += !ks_fit(u, NamedDistribution::gamma(3.0), sig).passed;
  }
  for (std::size_t rejections : {chi, homog, ks}) {
    CHECK(rejections >= 5);
    CHECK(rejections <= 20);
  }
}

TEST_CASE("homogeneity") {
  RandomStream s(4);
  const std::vector<double> p{0.3, 0.3, 0.4};
  const std::vector<double> q{0.35, 0.3, 0.35};
  CHECK(chi_square_homogeneity(multinomial(p, 50000, s), multinomial(p, 50000, s)).passed);
  CHECK_FALSE(chi_square_homogeneity(multinomial(p, 50000, s), multinomial(q, 50000, s)).passed);
  const std::vector<std::uint64_t> x{10, 20};
  const std::vector<std::uint64_t> y{10, 20, 30};
  CHECK(chi_square_homogeneity(x, y).degrees_of_freedom == 2);
}

TEST_CASE("ks examples") {
  RandomStream s(5);
  std::vector<double> u, g, shifted;
  for (int i = 0; i < 20000; ++i) {
    u.push_back(s.uniform());
    g.push_back(sample_gamma(3.0, s));
    shifted.push_back(sample_gamma(3.0, s) * 1.05);
  }
  CHECK(ks_fit(u, NamedDistribution::uniform()).passed);
  CHECK(ks_fit(g, NamedDistribution::gamma(3.0)).passed);
  CHECK_FALSE(ks_fit(shifted, NamedDistribution::gamma(3.0)).passed);
  CHECK_THROWS_AS(ks_fit({0.1, 0.2}, NamedDistribution::uniform()), Error);

  // D for a single point at 0.5 against uniform is 0.5.
  CHECK(ks_statistic({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
  CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0494).epsilon(0.01));
}

TEST_CASE("named distributions") {
  CHECK(NamedDistribution::parse("gamma(3)").kind == NamedDistribution::Kind::Gamma);
  CHECK(NamedDistribution::parse("beta(2, 1)").a == 2.0);
  CHECK(NamedDistribution::parse("uniform").cdf(0.25) == doctest::Approx(0.25));
  CHECK(NamedDistribution::parse("exponential").cdf(std::log(2.0)) == doctest::Approx(0.5));
  CHECK(NamedDistribution::normal().cdf(0.0) == doctest::Approx(0.5));
  CHECK(NamedDistribution::beta(2.0, 1.0).cdf(0.5) == doctest::Approx(0.25));
  CHECK(NamedDistribution::gamma(1.0).cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(NamedDistribution::parse(NamedDistribution::beta(3.0, 1.0).name()).a == 3.0);
  CHECK_THROWS_AS(NamedDistribution::parse("cauchy"), Error);
  CHECK_THROWS_AS(NamedDistribution::parse("gamma(-1)"), Error);
}

TEST_CASE("clt check") {
  const std::vector<std::vector<double>> degenerate{std::vector<double>(8, 1.0),
                                                    std::vector<double>(16, 1.0),
                                                    std::vector<double>(32, 1.0)};
  CHECK_THROWS_AS(clt_check(degenerate, 1000, RandomStream(1)), Error);
  const std::vector<std::vector<double>> flat{std::vector<double>(8, 0.5),
                                              std::vector<double>(8, 0.5),
                                              std::vector<double>(16, 0.5)};
  CHECK_THROWS_AS(clt_check(flat, 1000, RandomStream(1)), Error);
  CHECK_THROWS_AS(clt_check({std::vector<double>(8, 0.5)}, 1000, RandomStream(1)), Error);

  const std::vector<std::vector<double>> halves{std::vector<double>(8, 0.5),
                                                std::vector<double>(64, 0.5),
                                                std::vector<double>(512, 0.5)};
  const CltReport r = clt_check(halves, 100000, RandomStream(2));
  REQUIRE(r.levels.size() == 3);
  CHECK(r.report.passed);
  CHECK(r.levels[2].variance == doctest::Approx(128.0));
  CHECK(r.levels[2].ks < kCltMaxFinalKs);
  // Lattice-dominated KS shrinks like variance^{-1/2}.
  for (std::size_t i = 0; i < 3; ++i) {
    const double scaled = r.levels[i].ks * std::sqrt(r.levels[i].variance);
    CHECK(scaled > 0.1);
    CHECK(scaled < 0.6);
  }

  const std::vector<std::vector<double>> small{std::vector<double>(8, 0.5),
                                               std::vector<double>(16, 0.5),
                                               std::vector<double>(32, 0.5)};
  CHECK_FALSE(clt_check(small, 20000, RandomStream(3)).report.passed);
}

TEST_CASE("json round trips") {
  RandomStream s(6);
  const GroundSet g = testing::random_ground(4, s);
  const HermitianKernel k(testing::kernel_with_spectrum({0.9, 0.4}, g, s), g);
  const Json j = to_json(k);
  const HermitianKernel back = kernel_from_json(Json::parse(j.dump()));
  CHECK((back.matrix() - k.matrix()).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(back.ground().size() == 4);
  CHECK(back.ground().label(2) == "x2");

  const Json real = Json::parse(R"({"matrix_real": [[0.5, 0.1], [0.1, 0.5]]})");
  const HermitianKernel kr = kernel_from_json(real);
  CHECK(kr.ground().weight(1) == 1.0);
  CHECK(kr.matrix()(0, 1) == Complex(0.1));

  CHECK_THROWS_AS(kernel_from_json(Json::parse(R"({"matrix": 3})")), Error);
  CHECK_THROWS_AS(kernel_from_json(Json::parse(R"({"matrix_real": [[0.5, 0.2], [0.1, 0.5]]})")), Error);

  const auto spec = radial_spec_from_json(
      Json::parse(R"({"base": "gaussian", "terms": [{"k": 0}, {"k": 2, "lambda": 0.5}], "a2": "auto"})"));
  CHECK(spec.terms.size() == 2);
  CHECK(spec.terms[1].a2 == doctest::Approx(0.5));
  CHECK(spec.terms[1].lambda == 0.5);
  CHECK(radial_spec_from_json(Json::parse(R"({"preset": "bergman", "n": 3})")).terms[2].a2 == 3.0);
  CHECK_THROWS_AS(radial_spec_from_json(Json::parse(R"({"base": "gaussian", "terms": [{"k": 1}], "a2": [2.0]})")), Error);

  CHECK(format12(1.0 / 3.0) == "0.333333333333");
  CHECK(round12(0.1 + 0.2) == 0.3);
  CHECK(parse_index_list("0,2,5") == std::vector<std::size_t>{0, 2, 5});
  CHECK_THROWS_AS(parse_index_list("0,x"), Error);
  CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), Error);

  const auto law = bernoulli_sum_pmf(std::vector<double>{0.5});
  const Json lj = to_json(law);
  CHECK(lj.at("mean").get<double>() == 0.5);
  CHECK(lj.at("pmf").size() == 2);
}

TEST_CASE("fixtures load") {
  const auto dir = fixtures();
  for (const char* name : {"c4.txt", "example23.txt"}) {
    CHECK_NOTHROW(load_graph(dir / "graphs" / name));
  }
  CHECK(validate_determinantal(load_kernel(dir / "kernels" / "rank2_on_4.json")).valid);
  CHECK_FALSE(validate_determinantal(load_kernel(dir / "kernels" / "scaled_identity.json")).valid);
  CHECK_FALSE(validate_determinantal(load_kernel(dir / "kernels" / "not_contraction.json")).valid);
  CHECK(load_radial_spec(dir / "radial" / "ginibre3.json").terms.size() == 3);
  CHECK(load_radial_spec(dir / "radial" / "bergman4.json").terms[3].a2 == 4.0);
}

TEST_CASE("committed verification suite passes") {
  const auto dir = fixtures() / "suites";
  const auto reports = run_suite(read_json_file(dir / "verify.json"), 7, dir);
  CHECK(reports.size() == 23);
  for (const auto& r : reports) CHECK_MESSAGE(r.passed, r.description << " p=" << r.p_value);
  CHECK_FALSE(run_suite(read_json_file(dir / "failing.json"), 7, dir).front().passed);
}

TEST_CASE("suite runner") {
  const Json suite = Json::parse(R"({
    "significance": 1e-3,
    "checks": [
      {"type": "dpp_count", "kernel": {"matrix_real": [[0.6, 0.2], [0.2, 0.5]]}, "samples": 20000},
      {"type": "perm_count", "kernel": {"matrix_real": [[0.6, 0.2], [0.2, 0.5]]}, "samples": 20000},
      {"type": "alpha_count", "alpha": -0.5, "kernel": {"matrix_real": [[0.6, 0.2], [0.2, 0.5]]}, "samples": 20000},
      {"type": "ust_uniform", "graph": "graphs/c4.txt", "samples": 20000},
      {"type": "radial_moduli", "spec": {"preset": "ginibre", "n": 3}, "samples": 20000},
      {"type": "clt", "levels": {"lambda": 0.5, "sizes": [8, 64, 512]}, "samples": 50000},
      {"type": "witness", "alphas": [-1, 5]}
    ]})");
  const auto reports = run_suite(suite, 42, fixtures());
  CHECK(reports.size() == 10);
  for (const auto& r : reports) {
    CHECK_MESSAGE(r.passed, r.description << " p=" << r.p_value);
    CHECK(r.significance == doctest::Approx(1e-3 / 10.0));
  }
  const auto again = run_suite(suite, 42, fixtures());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(again[i].statistic == reports[i].statistic);
  }

  const Json failing = Json::parse(R"({"checks": [
      {"type": "clt", "levels": {"lambda": 0.5, "sizes": [8, 16, 32]}, "samples": 20000}]})");
  CHECK_FALSE(run_suite(failing, 1, fixtures())[0].passed);
  CHECK_THROWS_AS(run_suite(Json::parse(R"({"checks": [{"type": "nope"}]})"), 1, fixtures()), Error);
  CHECK_THROWS_AS(run_suite(Json::parse(R"({"checks": 3})"), 1, fixtures()), Error);
}

TEST_CASE("spanning tree enumeration") {
  const auto trees = enumerate_spanning_trees(testing::square_with_chord());
  CHECK(trees.size() == 8);
  const Graph w = Graph::parse_string("a b 2\nb c 3\nc a 5\n");
  const auto wt = enumerate_spanning_trees(w);
  REQUIRE(wt.size() == 3);
  double total = 0.0;
  for (const auto& t : wt) total += t.weight;
  CHECK(total == doctest::Approx(6.0 + 10.0 + 15.0));
}
