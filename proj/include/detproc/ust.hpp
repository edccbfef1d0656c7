#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "detproc/core.hpp"
#include "detproc/kernels.hpp"

namespace detproc {

struct Edge {
  std::size_t tail = 0;  // reference orientation tail -> head
  std::size_t head = 0;
  double conductance = 1.0;
};

/// Connected multigraph without self-loops. Parallel edges are distinct.
class Graph {
 public:
  Graph(std::vector<std::string> vertices, std::vector<Edge> edges);

  /// Edge-list text: one `u v [conductance]` per line; '#' starts a comment.
  /// Vertices are named by first appearance.
  static Graph parse(std::istream& in);
  static Graph parse_string(const std::string& text);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::string edge_label(std::size_t e) const;

  /// Signed |E| x |V| incidence matrix: +1 at the tail, -1 at the head.
  Eigen::MatrixXd incidence() const;

 private:
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
};

/// K(e, f): current through f when a unit current is driven across e, in
/// the symmetric form C^{1/2} B L^+ B^T C^{1/2}. Computed as the orthogonal
/// projection onto the column space of C^{1/2} B (the star space), so it
/// is a projection of rank |V| - 1 on the edges with counting measure.
HermitianKernel transfer_current_kernel(const Graph& graph);

/// R(e) = K(e, e), via a grounded-Laplacian solve (independent of the
/// projection route). For unit conductances this is the effective resistance
/// between the endpoints of e.
double effective_resistance(const Graph& graph, std::size_t edge);
std::vector<double> effective_resistances(const Graph& graph);

/// Edge indices of a spanning tree, sorted ascending. Uniform over spanning
/// trees (conductance-product weighted). Repeatedly picks e with
/// probability R(e)/n on the contracted multigraph, contracts it and drops
/// self-loops.
std::vector<std::size_t> sample_ust(const Graph& graph, RandomStream& stream);

/// Connected, acyclic, |V| - 1 edges.
bool is_spanning_tree(const Graph& graph, const std::vector<std::size_t>& edges);

}  // namespace detproc
