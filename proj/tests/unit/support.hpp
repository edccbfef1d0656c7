#pragma once

// Test-side constructions and brute-force oracles. Nothing here calls the
// library code paths that the tests are checking.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "detproc/core.hpp"
#include "detproc/kernels.hpp"
#include "detproc/random.hpp"
#include "detproc/ust.hpp"

namespace testing {

using detproc::Complex;
using detproc::ComplexMatrix;
using detproc::GroundSet;
using detproc::RandomStream;

inline Complex gaussian(RandomStream& s) {
  // Box-Muller, kept separate from the library's normal sampler.
  const double u = s.uniform_open();
  const double v = s.uniform();
  const double r = std::sqrt(-std::log(u));
  return {r * std::cos(2 * M_PI * v), r * std::sin(2 * M_PI * v)};
}

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols,
                                   RandomStream& s) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gaussian(s);
  return m;
}

inline ComplexMatrix random_unitary(Eigen::Index n, RandomStream& s) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(n, n, s));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

inline GroundSet random_ground(std::size_t n, RandomStream& s) {
  std::vector<std::string> labels;
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("x" + std::to_string(i));
    weights.push_back(0.25 + 1.5 * s.uniform());
  }
  return GroundSet(labels, weights);
}

/// K with the given operator spectrum in L^2(mu):
/// W^{-1/2} U diag(eigs) U^* W^{-1/2}.
inline ComplexMatrix kernel_with_spectrum(const std::vector<double>& eigs,
                                          const GroundSet& ground,
                                          RandomStream& s) {
  const auto n = static_cast<Eigen::Index>(ground.size());
  const ComplexMatrix u = random_unitary(n, s);
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
  for (std::size_t i = 0; i < eigs.size(); ++i) d(static_cast<Eigen::Index>(i)) = eigs[i];
  Eigen::VectorXcd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = 1.0 / std::sqrt(ground.weight(i));
  ComplexMatrix k = w.asDiagonal() * (u * d.asDiagonal() * u.adjoint()) * w.asDiagonal();
  return 0.5 * (k + k.adjoint());
}

/// Determinant by Laplace expansion along the first row.
inline Complex laplace_det(const ComplexMatrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  Complex total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    ComplexMatrix sub(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index cc = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        sub(r - 1, cc++) = m(r, c);
      }
    }
    total += (j % 2 == 0 ? 1.0 : -1.0) * m(0, j) * laplace_det(sub);
  }
  return total;
}

/// Permanent by summing over all permutations.
inline Complex naive_permanent(const ComplexMatrix& m) {
  std::vector<int> p(static_cast<std::size_t>(m.rows()));
  std::iota(p.begin(), p.end(), 0);
  Complex total = 0.0;
  do {
    Complex prod = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) prod *= m(static_cast<Eigen::Index>(i), p[i]);
    total += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

inline ComplexMatrix pick(const ComplexMatrix& m, const std::vector<std::size_t>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  ComplexMatrix out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      out(a, b) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
                    static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]));
  return out;
}

/// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

/// Example-23 style graph: square a-b-c-d with chord a-c.
/// Edges: 0 = a-b, 1 = b-c, 2 = c-d, 3 = d-a, 4 = a-c.
inline detproc::Graph square_with_chord() {
  return detproc::Graph::parse_string("a b\nb c\nc d\nd a\na c\n");
}

/// Spanning trees of a small unit-conductance graph by brute force: every
/// (|V|-1)-subset of edges that connects all vertices.
inline std::vector<std::vector<std::size_t>> brute_force_trees(const detproc::Graph& g) {
  std::vector<std::vector<std::size_t>> trees;
  for (auto& cand : subsets(g.edge_count(), g.vertex_count() - 1)) {
    std::vector<std::size_t> comp(g.vertex_count());
    std::iota(comp.begin(), comp.end(), 0);
    std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
      return comp[x] == x ? x : comp[x] = root(comp[x]);
    };
    std::size_t merges = 0;
    for (std::size_t e : cand) {
      const auto a = root(g.edges()[e].tail);
      const auto b = root(g.edges()[e].head);
      if (a != b) {
        comp[a] = b;
        ++merges;
      }
    }
    if (merges == g.vertex_count() - 1) trees.push_back(cand);
  }
  return trees;
}

/// Fraction of trees containing every edge in `edges`.
inline double inclusion_probability(const std::vector<std::vector<std::size_t>>& trees,
                                    const std::vector<std::size_t>& edges) {
  std::size_t hits = 0;
  for (const auto& t : trees) {
    bool all = true;
    for (std::size_t e : edges) all = all && std::binary_search(t.begin(), t.end(), e);
    hits += all;
  }
  return static_cast<double>(hits) / static_cast<double>(trees.size());
}

/// Restricted kernel on three edges recovered from tree inclusion
/// probabilities alone: K(e,e) = P(e), |K(e,f)|^2 = P(e)P(f) - P(e,f), and
/// the sign of K12 K23 K31 fixed by det K = P(e1, e2, e3).
inline Eigen::Matrix3d kernel_from_trees(const std::vector<std::vector<std::size_t>>& trees,
                                         const std::vector<std::size_t>& e) {
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i) k(i, i) = inclusion_probability(trees, {e[i]});
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      auto pair = std::vector<std::size_t>{e[i], e[j]};
      std::sort(pair.begin(), pair.end());
      const double off = std::sqrt(std::max(0.0, k(i, i) * k(j, j) -
                                                     inclusion_probability(trees, pair)));
      k(i, j) = k(j, i) = off;
    }
  auto all = e;
  std::sort(all.begin(), all.end());
  const double target = inclusion_probability(trees, all);
  Eigen::Matrix3d flipped = k;
  flipped(0, 1) = flipped(1, 0) = -k(0, 1);
  return std::abs(k.determinant() - target) <= std::abs(flipped.determinant() - target)
             ? k
             : flipped;
}

inline std::vector<double> pmf_from_counts(const std::vector<std::size_t>& values,
                                           std::size_t len) {
  std::vector<double> out(len, 0.0);
  for (auto v : values) out.at(v) += 1.0;
  for (auto& p : out) p /= static_cast<double>(values.size());
  return out;
}

/// Random connected graph on n vertices: a random spanning tree plus extra
/// edges, unit conductance.
inline detproc::Graph random_connected_graph(std::size_t n, RandomStream& s) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  std::vector<detproc::Edge> edges;
  for (std::size_t v = 1; v < n; ++v) {
    edges.push_back({static_cast<std::size_t>(s.next_u64() % v), v, 1.0});
  }
  const std::size_t extra = s.next_u64() % (n + 1);
  for (std::size_t i = 0; i < extra; ++i) {
    const auto a = static_cast<std::size_t>(s.next_u64() % n);
    const auto b = static_cast<std::size_t>(s.next_u64() % n);
    if (a != b) edges.push_back({a, b, 0.5 + s.uniform()});
  }
  return detproc::Graph(names, edges);
}

}  // namespace testing
