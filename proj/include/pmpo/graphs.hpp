#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pmpo {

/// Layer tags of the four vertex sets around a square.  Graphs between
/// them carry these tags so that compositions can be checked.
enum Layer : int { layer_v0 = 0, layer_v1 = 1, layer_v2 = 2, layer_v3 = 3 };

struct Edge {
  std::string id;
  std::size_t source = 0;  // index into the source-layer vertex list
  std::size_t range = 0;   // index into the range-layer vertex list
};

/// Bipartite multigraph between two layers, edges oriented source -> range.
/// Vertices are referenced by their position in the per-layer id lists.
class LayeredGraph {
 public:
  LayeredGraph() = default;
  LayeredGraph(int source_layer, std::vector<std::string> source_vertices, int range_layer,
               std::vector<std::string> range_vertices, std::vector<Edge> edges);

  int source_layer() const { return source_layer_; }
  int range_layer() const { return range_layer_; }
  const std::vector<std::string>& source_vertices() const { return source_vertices_; }
  const std::vector<std::string>& range_vertices() const { return range_vertices_; }
  std::size_t num_sources() const { return source_vertices_.size(); }
  std::size_t num_ranges() const { return range_vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const Edge& edge(std::size_t e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const std::size_t> edges_from(std::size_t source) const { return from_[source]; }
  std::span<const std::size_t> edges_into(std::size_t range) const { return into_[range]; }
  std::span<const std::size_t> edges_between(std::size_t source, std::size_t range) const {
    return between_[source * num_ranges() + range];
  }
  /// Position of `e` among edges_between(source(e), range(e)).
  std::size_t slot(std::size_t e) const { return slot_[e]; }

  std::optional<std::size_t> find_edge(const std::string& id) const;

  /// Multiplicity matrix, rows = source vertices, columns = range vertices.
  Eigen::MatrixXd adjacency() const;

  friend bool operator==(const LayeredGraph& a, const LayeredGraph& b);

 private:
  int source_layer_ = 0;
  int range_layer_ = 0;
  std::vector<std::string> source_vertices_;
  std::vector<std::string> range_vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> from_;
  std::vector<std::vector<std::size_t>> into_;
  std::vector<std::vector<std::size_t>> between_;
  std::vector<std::size_t> slot_;
};

struct NamedEdge {
  std::string id;
  std::string source;
  std::string range;
};

/// Graph from external ids.  Vertices and edges are ordered lexicographically
/// by id; duplicate ids or unknown endpoints raise InputError.
LayeredGraph graph_from_ids(int source_layer, std::vector<std::string> source_vertices, int range_layer,
                            std::vector<std::string> range_vertices, std::vector<NamedEdge> edges);

/// Every edge reversed; edge ids and order are kept.
LayeredGraph reverse_graph(const LayeredGraph& g);

/// Edges (a, b) with range(a) == source(b); ids are "(a,b)".
/// `pairs` receives the component edge indices when non-null.
LayeredGraph compose_graphs(const LayeredGraph& first, const LayeredGraph& second,
                            std::vector<std::pair<std::size_t, std::size_t>>* pairs = nullptr);

/// Connected as an undirected graph (isolated vertices count as disconnected).
bool is_connected(const LayeredGraph& g);

struct PerronFrobenius {
  double eigenvalue = 0.0;
  std::vector<double> source_weights;
  std::vector<double> range_weights;
  std::size_t iterations = 0;
};

/// Positive eigenvector of the bipartite adjacency.  Scale: the weight of
/// `base` (a source vertex) is 1 when given, otherwise the largest weight is 1.
/// Throws NumericError when the iteration cap is reached.
PerronFrobenius perron_frobenius(const LayeredGraph& g, double tol = 1e-12,
                                 std::optional<std::size_t> base = std::nullopt);

/// Perron-Frobenius eigenvalue (spectral radius) of a square nonnegative matrix.
double spectral_radius(const Eigen::MatrixXd& m);

/// The four graphs of a square with their eigen-data.
///   g:        V0 -> V3   (top)
///   h:        V0 -> V1   (left)
///   g_prime:  V1 -> V2   (bottom)
///   h_prime:  V3 -> V2   (right)
struct SquareScheme {
  LayeredGraph g, h, g_prime, h_prime;
  std::array<std::vector<double>, 4> mu;  // indexed by Layer
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::size_t base = 0;  // vertex of V0
};

struct SquareReport {
  std::array<double, 8> residuals{};  // the eight eigenvalue equations, max-norm
  bool layers_ok = true;
  bool connected = true;
  bool enough_edges = true;
  bool mu_positive = true;
  bool gammas_above_one = true;
  double tolerance = 0.0;
  bool passed = false;
  std::vector<std::string> issues;
};

SquareReport validate_square(const SquareScheme& s, double tol = 1e-9);

/// Eigen-data of a square from its graphs alone: Perron-Frobenius on g fixes
/// V0 and V3 (weight 1 at `base`), h and g_prime propagate to V1 and V2.
SquareScheme complete_scheme(LayeredGraph g, LayeredGraph h, LayeredGraph g_prime,
                             LayeredGraph h_prime, std::size_t base, double tol = 1e-12);

/// Number of paths of `length` steps starting at `start`, where step i walks
/// along steps[i % steps.size()].  Returns counts per vertex of the final layer.
/// Throws InputError when consecutive graphs do not share a layer.
std::vector<std::uint64_t> count_paths(std::span<const LayeredGraph> steps, std::size_t start,
                                       std::size_t length);

/// Closed paths of `length` steps at `base`.
std::uint64_t count_loops(std::span<const LayeredGraph> steps, std::size_t base, std::size_t length);

}  // namespace pmpo
