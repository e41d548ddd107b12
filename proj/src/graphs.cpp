#include "pmpo/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "pmpo/linalg.hpp"

namespace pmpo {

LayeredGraph::LayeredGraph(int source_layer, std::vector<std::string> source_vertices, int range_layer,
                           std::vector<std::string> range_vertices, std::vector<Edge> edges)
    : source_layer_(source_layer),
      range_layer_(range_layer),
      source_vertices_(std::move(source_vertices)),
      range_vertices_(std::move(range_vertices)),
      edges_(std::move(edges)) {
  from_.assign(num_sources(), {});
  into_.assign(num_ranges(), {});
  between_.assign(num_sources() * num_ranges(), {});
  slot_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.source >= num_sources() || ed.range >= num_ranges()) {
      throw InputError("edge '" + ed.id + "' references a vertex outside its layers");
    }
    from_[ed.source].push_back(e);
    into_[ed.range].push_back(e);
    auto& cell = between_[ed.source * num_ranges() + ed.range];
    slot_[e] = cell.size();
    cell.push_back(e);
  }
}

std::optional<std::size_t> LayeredGraph::find_edge(const std::string& id) const {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].id == id) return e;
  }
  return std::nullopt;
}

Eigen::MatrixXd LayeredGraph::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_sources()),
                                            static_cast<Eigen::Index>(num_ranges()));
  for (const Edge& e : edges_) a(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.range)) += 1.0;
  return a;
}

bool operator==(const LayeredGraph& a, const LayeredGraph& b) {
  if (a.source_layer_ != b.source_layer_ || a.range_layer_ != b.range_layer_) return false;
  if (a.source_vertices_ != b.source_vertices_ || a.range_vertices_ != b.range_vertices_) return false;
  if (a.edges_.size() != b.edges_.size()) return false;
  for (std::size_t e = 0; e < a.edges_.size(); ++e) {
    const Edge& x = a.edges_[e];
    const Edge& y = b.edges_[e];
    if (x.id != y.id || x.source != y.source || x.range != y.range) return false;
  }
  return true;
}

LayeredGraph graph_from_ids(int source_layer, std::vector<std::string> source_vertices, int range_layer,
                            std::vector<std::string> range_vertices, std::vector<NamedEdge> edges) {
  auto index_of = [](std::vector<std::string>& ids, const char* what) {
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw InputError(std::string("duplicate ") + what + " id");
    }
    return [&ids, what](const std::string& id) {
      const auto it = std::lower_bound(ids.begin(), ids.end(), id);
      if (it == ids.end() || *it != id) throw InputError(std::string("unknown ") + what + " '" + id + "'");
      return static_cast<std::size_t>(it - ids.begin());
    };
  };
  const auto src = index_of(source_vertices, "vertex");
  const auto dst = index_of(range_vertices, "vertex");
  std::sort(edges.begin(), edges.end(), [](const NamedEdge& a, const NamedEdge& b) { return a.id < b.id; });
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i > 0 && edges[i].id == edges[i - 1].id) throw InputError("duplicate edge id '" + edges[i].id + "'");
    out.push_back({edges[i].id, src(edges[i].source), dst(edges[i].range)});
  }
  return LayeredGraph(source_layer, std::move(source_vertices), range_layer, std::move(range_vertices),
                      std::move(out));
}

LayeredGraph reverse_graph(const LayeredGraph& g) {
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) edges.push_back({e.id, e.range, e.source});
  return LayeredGraph(g.range_layer(), g.range_vertices(), g.source_layer(), g.source_vertices(),
                      std::move(edges));
}

LayeredGraph compose_graphs(const LayeredGraph& first, const LayeredGraph& second,
                            std::vector<std::pair<std::size_t, std::size_t>>* pairs) {
  if (first.range_layer() != second.source_layer() || first.range_vertices() != second.source_vertices()) {
    throw InputError("compose_graphs: middle layers differ");
  }
  std::vector<Edge> edges;
  if (pairs) pairs->clear();
  for (std::size_t a = 0; a < first.num_edges(); ++a) {
    const Edge& ea = first.edge(a);
    for (std::size_t b : second.edges_from(ea.range)) {
      const Edge& eb = second.edge(b);
      edges.push_back({"(" + ea.id + "," + eb.id + ")", ea.source, eb.range});
      if (pairs) pairs->emplace_back(a, b);
    }
  }
  return LayeredGraph(first.source_layer(), first.source_vertices(), second.range_layer(),
                      second.range_vertices(), std::move(edges));
}

bool is_connected(const LayeredGraph& g) {
  const std::size_t ns = g.num_sources();
  const std::size_t n = ns + g.num_ranges();
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    auto visit = [&](std::size_t u) {
      if (!seen[u]) {
        seen[u] = true;
        ++count;
        stack.push_back(u);
      }
    };
    if (v < ns) {
      for (std::size_t e : g.edges_from(v)) visit(ns + g.edge(e).range);
    } else {
      for (std::size_t e : g.edges_into(v - ns)) visit(g.edge(e).source);
    }
  }
  return count == n;
}

PerronFrobenius perron_frobenius(const LayeredGraph& g, double tol, std::optional<std::size_t> base) {
  if (g.num_sources() == 0 || g.num_ranges() == 0 || g.num_edges() == 0) {
    throw InputError("perron_frobenius: empty graph");
  }
  if (!is_connected(g)) throw NumericError("perron_frobenius: graph is disconnected");
  const Eigen::MatrixXd a = g.adjacency();
  Eigen::VectorXd u = Eigen::VectorXd::Ones(a.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols());
  constexpr std::size_t cap = 100000;
  double lambda = 0.0;
  PerronFrobenius out;
  for (std::size_t it = 1; it <= cap; ++it) {
    // One step of the primitive iteration u <- A A^T u.
    v = a.transpose() * u;
    const Eigen::VectorXd next = a * v;
    const double norm = next.maxCoeff();
    if (!(norm > 0.0)) throw NumericError("perron_frobenius: iteration collapsed");
    const double lambda_new = std::sqrt(norm / u.maxCoeff());
    u = next / norm;
    v = a.transpose() * u / lambda_new;
    const double res_range = (a.transpose() * u - lambda_new * v).cwiseAbs().maxCoeff();
    const double res_source = (a * v - lambda_new * u).cwiseAbs().maxCoeff();
    const bool settled = std::abs(lambda_new - lambda) < tol * lambda_new;
    lambda = lambda_new;
    if (settled && std::max(res_range, res_source) < tol * std::max(1.0, lambda)) {
      out.iterations = it;
      break;
    }
    if (it == cap) throw NumericError("perron_frobenius: no convergence (disconnected or degenerate graph?)");
  }
  if (u.minCoeff() <= 0.0 || v.minCoeff() <= 0.0) {
    throw NumericError("perron_frobenius: eigenvector not strictly positive (graph disconnected?)");
  }
  const double scale = base ? u(static_cast<Eigen::Index>(*base)) : std::max(u.maxCoeff(), v.maxCoeff());
  out.eigenvalue = lambda;
  out.source_weights.resize(static_cast<std::size_t>(u.size()));
  out.range_weights.resize(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) out.source_weights[i] = u(i) / scale;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.range_weights[i] = v(i) / scale;
  return out;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  // Collatz-Wielandt bracketing on the shifted (aperiodic) matrix.
  const Eigen::MatrixXd shifted = m + Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Ones(m.rows());
  for (int it = 0; it < 100000; ++it) {
    const Eigen::VectorXd y = shifted * x;
    const Eigen::ArrayXd ratio = y.array() / x.array();
    const double lo = ratio.minCoeff();
    const double hi = ratio.maxCoeff();
    if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi) - 1.0;
    x = y / y.maxCoeff();
    if (x.minCoeff() < 1e-200) break;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

double max_residual_forward(const LayeredGraph& g, const std::vector<double>& mu_s,
                            const std::vector<double>& mu_r, double gamma) {
  // sum_x Delta_xy mu_x = gamma mu_y  (y in range)
  double worst = 0.0;
  for (std::size_t y = 0; y < g.num_ranges(); ++y) {
    double sum = 0.0;
    for (std::size_t e : g.edges_into(y)) sum += mu_s[g.edge(e).source];
    worst = std::max(worst, std::abs(sum - gamma * mu_r[y]));
  }
  return worst;
}

double max_residual_backward(const LayeredGraph& g, const std::vector<double>& mu_s,
                             const std::vector<double>& mu_r, double gamma) {
  // sum_y Delta_xy mu_y = gamma mu_x  (x in source)
  double worst = 0.0;
  for (std::size_t x = 0; x < g.num_sources(); ++x) {
    double sum = 0.0;
    for (std::size_t e : g.edges_from(x)) sum += mu_r[g.edge(e).range];
    worst = std::max(worst, std::abs(sum - gamma * mu_s[x]));
  }
  return worst;
}

}  // namespace

SquareReport validate_square(const SquareScheme& s, double tol) {
  SquareReport rep;
  rep.tolerance = tol;
  struct Slot {
    const LayeredGraph* g;
    int src;
    int dst;
    const char* name;
    double gamma;
  };
  const std::array<Slot, 4> slots{{{&s.g, layer_v0, layer_v3, "top", s.gamma1},
                                   {&s.h, layer_v0, layer_v1, "left", s.gamma2},
                                   {&s.g_prime, layer_v1, layer_v2, "bottom", s.gamma1},
                                   {&s.h_prime, layer_v3, layer_v2, "right", s.gamma2}}};
  std::array<const std::vector<std::string>*, 4> layer_ids{};
  for (const Slot& slot : slots) {
    const LayeredGraph& g = *slot.g;
    if (g.source_layer() != slot.src || g.range_layer() != slot.dst) {
      rep.layers_ok = false;
      rep.issues.push_back(std::string(slot.name) + " graph joins the wrong layers");
      continue;
    }
    for (auto [layer, ids] : {std::pair{slot.src, &g.source_vertices()}, std::pair{slot.dst, &g.range_vertices()}}) {
      if (!layer_ids[layer]) {
        layer_ids[layer] = ids;
      } else if (*layer_ids[layer] != *ids) {
        rep.layers_ok = false;
        rep.issues.push_back("vertex set of layer " + std::to_string(layer) + " differs between graphs");
      }
    }
    if (!is_connected(g)) {
      rep.connected = false;
      rep.issues.push_back(std::string(slot.name) + " graph is not connected");
    }
    if (g.num_edges() < 2) {
      rep.enough_edges = false;
      rep.issues.push_back(std::string(slot.name) + " graph has fewer than two edges");
    }
  }
  for (int layer = 0; layer < 4; ++layer) {
    if (!layer_ids[layer] || s.mu[layer].size() != layer_ids[layer]->size()) {
      rep.layers_ok = false;
      rep.issues.push_back("weights missing for layer " + std::to_string(layer));
      continue;
    }
    for (double m : s.mu[layer]) {
      if (!(m > 0.0)) rep.mu_positive = false;
    }
  }
  if (!rep.mu_positive) rep.issues.push_back("weights not strictly positive");
  rep.gammas_above_one = s.gamma1 > 1.0 && s.gamma2 > 1.0;
  if (!rep.gammas_above_one) rep.issues.push_back("eigenvalues must exceed 1");

  if (rep.layers_ok) {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const Slot& slot = slots[i];
      const auto& mu_s = s.mu[slot.src];
      const auto& mu_r = s.mu[slot.dst];
      rep.residuals[2 * i] = max_residual_forward(*slot.g, mu_s, mu_r, slot.gamma);
      rep.residuals[2 * i + 1] = max_residual_backward(*slot.g, mu_s, mu_r, slot.gamma);
    }
  } else {
    rep.residuals.fill(std::numeric_limits<double>::infinity());
  }
  const double worst = *std::max_element(rep.residuals.begin(), rep.residuals.end());
  if (!(worst < tol)) rep.issues.push_back("eigenvalue equations violated: residual " + std::to_string(worst));
  rep.passed = rep.issues.empty();
  return rep;
}

SquareScheme complete_scheme(LayeredGraph g, LayeredGraph h, LayeredGraph g_prime, LayeredGraph h_prime,
                             std::size_t base, double tol) {
  SquareScheme s;
  const PerronFrobenius top = perron_frobenius(g, tol, base);
  const PerronFrobenius left = perron_frobenius(h, tol, base);
  s.gamma1 = top.eigenvalue;
  s.gamma2 = left.eigenvalue;
  s.mu[layer_v0] = top.source_weights;
  s.mu[layer_v3] = top.range_weights;
  s.mu[layer_v1].assign(h.num_ranges(), 0.0);
  for (const Edge& e : h.edges()) s.mu[layer_v1][e.range] += s.mu[layer_v0][e.source];
  for (double& m : s.mu[layer_v1]) m /= s.gamma2;
  s.mu[layer_v2].assign(g_prime.num_ranges(), 0.0);
  for (const Edge& e : g_prime.edges()) s.mu[layer_v2][e.range] += s.mu[layer_v1][e.source];
  for (double& m : s.mu[layer_v2]) m /= s.gamma1;
  s.g = std::move(g);
  s.h = std::move(h);
  s.g_prime = std::move(g_prime);
  s.h_prime = std::move(h_prime);
  s.base = base;
  return s;
}

std::vector<std::uint64_t> count_paths(std::span<const LayeredGraph> steps, std::size_t start, std::size_t length) {
  if (steps.empty()) throw InputError("count_paths: no graphs given");
  const std::size_t used = std::min(length, steps.size());
  for (std::size_t i = 0; i + 1 < std::max<std::size_t>(used, length > steps.size() ? steps.size() + 1 : used); ++i) {
    const LayeredGraph& a = steps[i % steps.size()];
    const LayeredGraph& b = steps[(i + 1) % steps.size()];
    if (a.range_layer() != b.source_layer() || a.num_ranges() != b.num_sources()) {
      throw InputError("count_paths: incompatible layers between consecutive graphs");
    }
  }
  if (start >= steps[0].num_sources()) throw InputError("count_paths: start vertex out of range");
  std::vector<std::uint64_t> counts(steps[0].num_sources(), 0);
  counts[start] = 1;
  for (std::size_t i = 0; i < length; ++i) {
    const LayeredGraph& g = steps[i % steps.size()];
    std::vector<std::uint64_t> next(g.num_ranges(), 0);
    for (const Edge& e : g.edges()) {
      std::uint64_t sum = 0;
      if (__builtin_add_overflow(next[e.range], counts[e.source], &sum)) {
        throw NumericError("count_paths: count overflow");
      }
      next[e.range] = sum;
    }
    counts = std::move(next);
  }
  return counts;
}

std::uint64_t count_loops(std::span<const LayeredGraph> steps, std::size_t base, std::size_t length) {
  const auto counts = count_paths(steps, base, length);
  const LayeredGraph& last = steps[(length + steps.size() - 1) % steps.size()];
  if (length > 0 && last.range_layer() != steps[0].source_layer()) {
    throw InputError("count_loops: path does not return to the starting layer");
  }
  return counts.at(base);
}

}  // namespace pmpo
