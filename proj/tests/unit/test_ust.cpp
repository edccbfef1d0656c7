#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "detproc/dpp.hpp"
#include "detproc/error.hpp"
#include "detproc/harness.hpp"
#include "detproc/parallel.hpp"
#include "detproc/ust.hpp"
#include "support.hpp"

using namespace detproc;

namespace {

const std::size_t kSamples = 100000;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Input;
}

// Tree frequencies against an exact weight per tree.
TestReport tree_fit(const std::vector<std::vector<std::size_t>>& draws,
                    const std::vector<std::vector<std::size_t>>& trees,
                    const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> expected;
  for (double w : weights) expected.push_back(w / total);
  std::vector<std::uint64_t> observed(trees.size() + 1, 0);
  for (const auto& d : draws) {
    auto it = std::find(trees.begin(), trees.end(), d);
    ++observed[static_cast<std::size_t>(it - trees.begin())];
  }
  return chi_square_fit(observed, expected);
}

std::vector<double> unit_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

TEST_CASE("graph parsing") {
  const Graph g = Graph::parse_string("# square\na b\nb c 2.5\n\nc a\n");
  CHECK(g.vertex_count() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(g.edges()[1].conductance == 2.5);
  CHECK(g.vertices()[2] == "c");
  CHECK(kind_of([] { Graph::parse_string("a b\nc d\n"); }) == ErrorKind::Disconnected);
  CHECK(kind_of([] { Graph::parse_string("a a\n"); }) == ErrorKind::Input);
  CHECK(kind_of([] { Graph::parse_string("a b x\n"); }) == ErrorKind::Input);
  CHECK(kind_of([] { Graph::parse_string("a b -1\n"); }) == ErrorKind::Input);
  CHECK(kind_of([] { Graph::parse_string("a\n"); }) == ErrorKind::Input);

  const Eigen::MatrixXd b = g.incidence();
  CHECK(b.rows() == 3);
  CHECK(b.cols() == 3);
  CHECK(b.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transfer-current examples") {
  const Graph c4 = Graph::parse_string("a b\nb c\nc d\nd a\n");
  const HermitianKernel k = transfer_current_kernel(c4);
  for (Eigen::Index e = 0; e < 4; ++e) CHECK(k.matrix()(e, e).real() == doctest::Approx(0.75));
  CHECK(k.matrix().trace().real() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(validate_determinantal(k).valid);

  const Graph single = Graph::parse_string("a b\n");
  const HermitianKernel k1 = transfer_current_kernel(single);
  CHECK(k1.matrix()(0, 0).real() == doctest::Approx(1.0));

  // Triangle with a pendant vertex: the pendant edge is a bridge.
  const Graph lollipop = Graph::parse_string("a b\nb c\nc a\nc d\n");
  CHECK(effective_resistance(lollipop, 3) == doctest::Approx(1.0));
  CHECK(effective_resistance(lollipop, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(effective_resistance(c4, 2) == doctest::Approx(0.75));
  CHECK(kind_of([&] { effective_resistance(c4, 9); }) == ErrorKind::OutOfRange);

  // Parallel edges split the unit current.
  const Graph doubled = Graph::parse_string("a b\na b\n");
  CHECK(effective_resistance(doubled, 0) == doctest::Approx(0.5));
}

TEST_CASE("example 23 kernel from tree enumeration") {
  const Graph g = testing::square_with_chord();
  const auto trees = testing::brute_force_trees(g);
  REQUIRE(trees.size() == 8);
  const Eigen::Matrix3d oracle = testing::kernel_from_trees(trees, {0, 1, 2});

  const HermitianKernel k = transfer_current_kernel(g);
  const std::vector<std::size_t> d{0, 1, 2};
  const ComplexMatrix restricted = testing::pick(k.matrix(), d);
  // Edge orientations fix K only up to D K D with D = diag(+-1): compare
  // magnitudes and the orientation-free cycle product.
  CHECK((restricted.real().cwiseAbs() - oracle.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-12);
  const Complex cycle = restricted(0, 1) * restricted(1, 2) * restricted(2, 0);
  CHECK(cycle.real() == doctest::Approx(oracle(0, 1) * oracle(1, 2) * oracle(2, 0)).epsilon(1e-12));
  CHECK(restricted.imag().cwiseAbs().maxCoeff() < 1e-14);

  // Entries are multiples of 1/8.
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double scaled = 8.0 * restricted(i, j).real();
      CHECK(std::abs(scaled - std::round(scaled)) < 1e-12);
    }

  const auto eig = restricted_eigenvalues(k, d);
  const double r = std::sqrt(17.0);
  CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig[1] == doctest::Approx((7.0 + r) / 16.0).epsilon(1e-12));
  CHECK(eig[2] == doctest::Approx((7.0 - r) / 16.0).epsilon(1e-12));

  // Count law in D against the enumeration: multiples of 1/8 even though
  // the Bernoulli parameters are irrational.
  std::vector<double> exact(4, 0.0);
  for (const auto& t : trees) {
    std::size_t c = 0;
    for (std::size_t e : t) c += e < 3;
    exact[c] += 1.0 / 8.0;
  }
  const auto law = count_pmf(k, d);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(law.pmf[c] == doctest::Approx(exact[c]).epsilon(1e-12));
    CHECK(std::abs(8.0 * law.pmf[c] - std::round(8.0 * law.pmf[c])) < 1e-12);
  }
}

TEST_CASE("transfer-current kernel is a projection of rank |V| - 1") {
  RandomStream s(5);
  for (int rep = 0; rep < 20; ++rep) {
    const Graph g = testing::random_connected_graph(3 + s.next_u64() % 8, s);
    const HermitianKernel k = transfer_current_kernel(g);
    const ComplexMatrix& m = k.matrix();
    CHECK((m * m - m).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.imag().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(std::abs(m.trace().real() - (g.vertex_count() - 1.0)) < 1e-8);
    const auto r = effective_resistances(g);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      CHECK(r[e] == doctest::Approx(m(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(e)).real()).epsilon(1e-10));
    }
    const Verdict v = validate_determinantal(k);
    CHECK(v.valid);
    const Spectrum sp = spectrum(k);
    for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
      const double l = sp.eigenvalues(i);
      CHECK((std::abs(l) < 1e-6 || std::abs(l - 1.0) < 1e-6));
    }
  }
}

TEST_CASE("weighted edge marginals against tree weights") {
  // P(e in T) = sum of conductance products over trees containing e.
  RandomStream s(6);
  for (int rep = 0; rep < 10; ++rep) {
    const Graph g = testing::random_connected_graph(5, s);
    const auto trees = testing::brute_force_trees(g);
    std::vector<double> w;
    for (const auto& t : trees) {
      double p = 1.0;
      for (std::size_t e : t) p *= g.edges()[e].conductance;
      w.push_back(p);
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const auto r = effective_resistances(g);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      double in = 0.0;
      for (std::size_t t = 0; t < trees.size(); ++t) {
        if (std::binary_search(trees[t].begin(), trees[t].end(), e)) in += w[t];
      }
      CHECK(r[e] == doctest::Approx(in / total).epsilon(1e-10));
    }
  }
}

TEST_CASE("sample_ust examples") {
  RandomStream s(7);
  const Graph path = Graph::parse_string("a b\nb c\nc d\nb e\n");
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_ust(path, s) == std::vector<std::size_t>{0, 1, 2, 3});
  }

  const Graph c4 = Graph::parse_string("a b\nb c\nc d\nd a\n");
  const auto c4_trees = testing::brute_force_trees(c4);
  REQUIRE(c4_trees.size() == 4);
  const auto draws = generate_batch(kSamples, RandomStream(8), [&](RandomStream& st) {
    return sample_ust(c4, st);
  });
  const auto r = tree_fit(draws, c4_trees, unit_weights(4));
  CHECK_MESSAGE(r.passed, "p=" << r.p_value);
}

TEST_CASE("sample_ust on the example 23 graph") {
  const Graph g = testing::square_with_chord();
  const auto trees = testing::brute_force_trees(g);
  const auto draws = generate_batch(kSamples, RandomStream(9), [&](RandomStream& st) {
    return sample_ust(g, st);
  });
  bool all_trees = true;
  for (const auto& d : draws) all_trees = all_trees && is_spanning_tree(g, d);
  CHECK(all_trees);
  const auto r = tree_fit(draws, trees, unit_weights(8));
  CHECK_MESSAGE(r.passed, "p=" << r.p_value);

  const std::vector<std::size_t> d{0, 1, 2};
  std::vector<std::size_t> counts;
  for (const auto& t : draws) counts.push_back(static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [](std::size_t e) { return e < 3; })));
  const auto law = count_pmf(transfer_current_kernel(g), d);
  const auto rc = chi_square_fit(tally(counts), law.pmf);
  CHECK_MESSAGE(rc.passed, "p=" << rc.p_value);
}

TEST_CASE("sample_ust on a weighted graph") {
  const Graph g = Graph::parse_string("a b 1\nb c 2\nc a 3\nc d 0.5\nd a 1.5\n");
  const auto trees = testing::brute_force_trees(g);
  std::vector<double> w;
  for (const auto& t : trees) {
    double p = 1.0;
    for (std::size_t e : t) p *= g.edges()[e].conductance;
    w.push_back(p);
  }
  const auto draws = generate_batch(kSamples, RandomStream(10), [&](RandomStream& st) {
    return sample_ust(g, st);
  });
  const auto r = tree_fit(draws, trees, w);
  CHECK_MESSAGE(r.passed, "p=" << r.p_value);
}

TEST_CASE("sample_ust marginals agree with the kernel and the projection sampler") {
  RandomStream s(11);
  const Graph g = testing::random_connected_graph(7, s);
  const HermitianKernel k = transfer_current_kernel(g);
  const std::size_t n = 40000;
  const auto ust = generate_batch(n, RandomStream(12), [&](RandomStream& st) {
    return sample_ust(g, st);
  });
  const Spectrum sp = spectrum(k);
  std::vector<std::size_t> ones;
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    if (sp.eigenvalues(i) > 0.5) ones.push_back(static_cast<std::size_t>(i));
  }
  REQUIRE(ones.size() == g.vertex_count() - 1);
  const ProjectionBasis basis = ProjectionBasis::from_spectrum(sp, ones, k.ground());
  const auto proj = generate_batch(n, RandomStream(13), [&](RandomStream& st) {
    auto pts = sample_projection(basis, st).points();
    std::sort(pts.begin(), pts.end());
    return pts;
  });

  std::vector<std::uint64_t> a(g.edge_count(), 0);
  std::vector<std::uint64_t> b(g.edge_count(), 0);
  for (const auto& t : ust) for (std::size_t e : t) ++a[e];
  for (const auto& t : proj) {
    CHECK(is_spanning_tree(g, t));
    for (std::size_t e : t) ++b[e];
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const double p = k.matrix()(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(e)).real();
    const double se = std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(n)) + 1e-12;
    CHECK(std::abs(static_cast<double>(a[e]) / n - p) <= 4.0 * se + 1e-12);
  }
  // Whole-tree laws of the two samplers agree.
  std::map<std::vector<std::size_t>, std::pair<std::uint64_t, std::uint64_t>> joint;
  for (const auto& t : ust) ++joint[t].first;
  for (const auto& t : proj) ++joint[t].second;
  std::vector<std::uint64_t> first;
  std::vector<std::uint64_t> second;
  for (const auto& [t, c] : joint) {
    first.push_back(c.first);
    second.push_back(c.second);
  }
  const auto r = chi_square_homogeneity(first, second);
  CHECK_MESSAGE(r.passed, "p=" << r.p_value);
}

TEST_CASE("spanning tree check") {
  const Graph g = testing::square_with_chord();
  CHECK(is_spanning_tree(g, {0, 1, 2}));
  CHECK_FALSE(is_spanning_tree(g, {0, 1, 4}));
  CHECK_FALSE(is_spanning_tree(g, {0, 1}));
  CHECK_FALSE(is_spanning_tree(g, {0, 1, 2, 3}));
}

TEST_CASE("ust batches are reproducible") {
  const Graph g = testing::square_with_chord();
  auto draw = [&](RandomStream& st) { return sample_ust(g, st); };
  CHECK(generate_batch(500, RandomStream(3), draw) == generate_batch_serial(500, RandomStream(3), draw));
}
