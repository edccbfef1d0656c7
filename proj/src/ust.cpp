#include "detproc/ust.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "detproc/error.hpp"

namespace detproc {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

// K(e, e) for every edge of a connected multigraph on `vertices` vertices,
// from the Laplacian grounded at vertex 0.
std::vector<double> grounded_resistances(std::size_t vertices,
                                         const std::vector<Edge>& edges) {
  std::vector<double> out(edges.size(), 0.0);
  if (vertices <= 1) return out;
  const auto m = static_cast<Eigen::Index>(vertices - 1);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
  auto idx = [](std::size_t v) { return static_cast<Eigen::Index>(v) - 1; };
  for (const Edge& e : edges) {
    if (e.tail == e.head) continue;
    const double c = e.conductance;
    if (e.tail > 0) lap(idx(e.tail), idx(e.tail)) += c;
    if (e.head > 0) lap(idx(e.head), idx(e.head)) += c;
    if (e.tail > 0 && e.head > 0) {
      lap(idx(e.tail), idx(e.head)) -= c;
      lap(idx(e.head), idx(e.tail)) -= c;
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lap);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "grounded Laplacian factorization failed");
  }
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(m, m));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.tail == e.head) continue;
    double r = 0.0;
    if (e.tail > 0) r += inv(idx(e.tail), idx(e.tail));
    if (e.head > 0) r += inv(idx(e.head), idx(e.head));
    if (e.tail > 0 && e.head > 0) r -= 2.0 * inv(idx(e.tail), idx(e.head));
    out[i] = e.conductance * r;
  }
  return out;
}

}  // namespace

Graph::Graph(std::vector<std::string> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  if (vertices_.empty()) throw Error(ErrorKind::Input, "graph has no vertices");
  if (std::set<std::string>(vertices_.begin(), vertices_.end()).size() !=
      vertices_.size()) {
    throw Error(ErrorKind::Input, "vertex labels must be distinct");
  }
  DisjointSets sets(vertices_.size());
  std::size_t components = vertices_.size();
  for (const Edge& e : edges_) {
    if (e.tail >= vertices_.size() || e.head >= vertices_.size()) {
      throw Error(ErrorKind::OutOfRange, "edge endpoint out of range");
    }
    if (e.tail == e.head) throw Error(ErrorKind::Input, "self-loops are not allowed");
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) {
      throw Error(ErrorKind::Input, "conductances must be positive");
    }
    if (sets.unite(e.tail, e.head)) --components;
  }
  if (components != 1) throw Error(ErrorKind::Disconnected, "graph is disconnected");
}

Graph Graph::parse(std::istream& in) {
  std::vector<std::string> vertices;
  std::map<std::string, std::size_t> index;
  std::vector<Edge> edges;
  auto vertex = [&](const std::string& name) {
    auto [it, inserted] = index.try_emplace(name, vertices.size());
    if (inserted) vertices.push_back(name);
    return it->second;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string u;
    std::string v;
    if (!(ls >> u)) continue;
    if (!(ls >> v)) {
      throw Error(ErrorKind::Input, "line " + std::to_string(line_no) + ": expected `u v [c]`");
    }
    Edge e{vertex(u), vertex(v), 1.0};
    std::string extra;
    if (ls >> extra) {
      try {
        std::size_t used = 0;
        e.conductance = std::stod(extra, &used);
        if (used != extra.size()) throw std::invalid_argument(extra);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Input, "line " + std::to_string(line_no) + ": bad conductance");
      }
      if (ls >> extra) {
        throw Error(ErrorKind::Input, "line " + std::to_string(line_no) + ": trailing tokens");
      }
    }
    edges.push_back(e);
  }
  return Graph(std::move(vertices), std::move(edges));
}

Graph Graph::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

std::string Graph::edge_label(std::size_t e) const {
  const Edge& edge = edges_.at(e);
  return vertices_[edge.tail] + "-" + vertices_[edge.head];
}

Eigen::MatrixXd Graph::incidence() const {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(edges_.size()),
                                            static_cast<Eigen::Index>(vertices_.size()));
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(edges_[i].tail)) = 1.0;
    b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(edges_[i].head)) = -1.0;
  }
  return b;
}

HermitianKernel transfer_current_kernel(const Graph& graph) {
  if (graph.edge_count() == 0) {
    throw Error(ErrorKind::Input, "graph has no edges");
  }
  Eigen::MatrixXd a = graph.incidence();
  for (std::size_t i = 0; i < graph.edge_count(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) *= std::sqrt(graph.edges()[i].conductance);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  if (static_cast<std::size_t>(rank) + 1 != graph.vertex_count()) {
    throw Error(ErrorKind::Disconnected, "star space has the wrong dimension");
  }
  const Eigen::MatrixXd q = svd.matrixU().leftCols(rank);
  Eigen::MatrixXd k = q * q.transpose();
  k = 0.5 * (k + k.transpose()).eval();

  std::vector<std::string> labels(graph.edge_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = "e" + std::to_string(i) + ":" + graph.edge_label(i);
  }
  return HermitianKernel(k.cast<Complex>(),
                         GroundSet(std::move(labels),
                                   std::vector<double>(graph.edge_count(), 1.0)));
}

std::vector<double> effective_resistances(const Graph& graph) {
  return grounded_resistances(graph.vertex_count(), graph.edges());
}

double effective_resistance(const Graph& graph, std::size_t edge) {
  if (edge >= graph.edge_count()) throw Error(ErrorKind::OutOfRange, "unknown edge");
  return effective_resistances(graph)[edge];
}

std::vector<std::size_t> sample_ust(const Graph& graph, RandomStream& stream) {
  DisjointSets merged(graph.vertex_count());
  std::vector<std::size_t> tree;
  std::vector<std::size_t> live;   // original ids of non-loop edges
  std::vector<Edge> contracted;
  std::vector<std::size_t> relabel(graph.vertex_count());

  while (true) {
    // Relabel components 0..m-1 and keep edges that are not self-loops.
    std::map<std::size_t, std::size_t> component;
    for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
      const std::size_t root = merged.find(v);
      relabel[v] = component.try_emplace(root, component.size()).first->second;
    }
    const std::size_t m = component.size();
    if (m == 1) break;

    live.clear();
    contracted.clear();
    for (std::size_t i = 0; i < graph.edge_count(); ++i) {
      const Edge& e = graph.edges()[i];
      const std::size_t a = relabel[e.tail];
      const std::size_t b = relabel[e.head];
      if (a == b) continue;
      live.push_back(i);
      contracted.push_back({a, b, e.conductance});
    }

    const std::vector<double> resistance = grounded_resistances(m, contracted);
    const double trace = std::accumulate(resistance.begin(), resistance.end(), 0.0);
    if (std::abs(trace - static_cast<double>(m - 1)) > 1e-8 * static_cast<double>(m)) {
      throw Error(ErrorKind::Numerical,
                  "resistance sum " + std::to_string(trace) +
                      " differs from remaining tree size " + std::to_string(m - 1));
    }
    const std::size_t pick = sample_categorical(resistance, stream);
    const Edge& chosen = graph.edges()[live[pick]];
    merged.unite(chosen.tail, chosen.head);
    tree.push_back(live[pick]);
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

bool is_spanning_tree(const Graph& graph, const std::vector<std::size_t>& edges) {
  if (edges.size() + 1 != graph.vertex_count()) return false;
  DisjointSets sets(graph.vertex_count());
  for (std::size_t id : edges) {
    if (id >= graph.edge_count()) return false;
    const Edge& e = graph.edges()[id];
    if (!sets.unite(e.tail, e.head)) return false;
  }
  return true;
}

}  // namespace detproc
