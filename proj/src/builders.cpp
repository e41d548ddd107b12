#include "pmpo/builders.hpp"

#include <cmath>
#include <numbers>
#include <queue>

namespace pmpo {
namespace {

std::string vid(int layer, const std::string& label) { return "v" + std::to_string(layer) + "_" + label; }

struct Square {
  std::array<std::vector<std::string>, 4> ids;  // per layer, any order
  std::array<std::vector<NamedEdge>, 4> edges;  // top, left, bottom, right
};

std::array<LayeredGraph, 4> square_graphs(const Square& s) {
  return {graph_from_ids(layer_v0, s.ids[layer_v0], layer_v3, s.ids[layer_v3], s.edges[0]),
          graph_from_ids(layer_v0, s.ids[layer_v0], layer_v1, s.ids[layer_v1], s.edges[1]),
          graph_from_ids(layer_v1, s.ids[layer_v1], layer_v2, s.ids[layer_v2], s.edges[2]),
          graph_from_ids(layer_v3, s.ids[layer_v3], layer_v2, s.ids[layer_v2], s.edges[3])};
}

std::size_t index_in(const std::vector<std::string>& ids, const std::string& id) {
  return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
}

}  // namespace

DynkinDiagram dynkin_diagram(const std::string& name) {
  DynkinDiagram d;
  d.name = name;
  if (name.size() < 2) throw InputError("unknown diagram '" + name + "'");
  const char family = name[0];
  std::size_t n = 0;
  try {
    std::size_t used = 0;
    n = std::stoul(name.substr(1), &used);
    if (used != name.size() - 1) throw InputError("");
  } catch (const std::exception&) {
    throw InputError("unknown diagram '" + name + "'");
  }
  d.vertices = n;
  switch (family) {
    case 'A':
      if (n < 2) throw InputError("A_n needs n >= 2");
      for (std::size_t i = 1; i < n; ++i) d.edges.emplace_back(i, i + 1);
      d.coxeter = static_cast<int>(n) + 1;
      break;
    case 'D':
      if (n < 4) throw InputError("D_n needs n >= 4");
      for (std::size_t i = 1; i + 2 < n; ++i) d.edges.emplace_back(i, i + 1);
      d.edges.emplace_back(n - 2, n - 1);
      d.edges.emplace_back(n - 2, n);
      d.coxeter = 2 * static_cast<int>(n) - 2;
      break;
    case 'E':
      if (n < 6 || n > 8) throw InputError("E_n needs 6 <= n <= 8");
      for (std::size_t i = 1; i + 1 < n; ++i) d.edges.emplace_back(i, i + 1);
      d.edges.emplace_back(3, n);
      d.coxeter = n == 6 ? 12 : n == 7 ? 18 : 30;
      break;
    default:
      throw InputError("unknown diagram '" + name + "'");
  }
  return d;
}

Connection build_dynkin(const std::string& name) {
  const DynkinDiagram dia = dynkin_diagram(name);
  const std::size_t n = dia.vertices;
  std::vector<std::vector<std::size_t>> adj(n + 1);
  for (auto [a, b] : dia.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> parity(n + 1, -1);
  std::queue<std::size_t> q;
  parity[1] = 0;
  q.push(1);
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    for (std::size_t u : adj[v]) {
      if (parity[u] < 0) {
        parity[u] = 1 - parity[v];
        q.push(u);
      }
    }
  }

  Square s;
  for (std::size_t v = 1; v <= n; ++v) {
    const std::string label = std::to_string(v);
    if (parity[v] == 0) {
      s.ids[layer_v0].push_back(vid(0, label));
      s.ids[layer_v2].push_back(vid(2, label));
    } else {
      s.ids[layer_v1].push_back(vid(1, label));
      s.ids[layer_v3].push_back(vid(3, label));
    }
  }
  for (auto [a, b] : dia.edges) {
    const std::size_t even = parity[a] == 0 ? a : b;
    const std::size_t odd = parity[a] == 0 ? b : a;
    const std::string e = std::to_string(even), o = std::to_string(odd);
    s.edges[0].push_back({"t_" + e + "_" + o, vid(0, e), vid(3, o)});
    s.edges[1].push_back({"l_" + e + "_" + o, vid(0, e), vid(1, o)});
    s.edges[2].push_back({"b_" + o + "_" + e, vid(1, o), vid(2, e)});
    s.edges[3].push_back({"r_" + o + "_" + e, vid(3, o), vid(2, e)});
  }
  auto [top, left, bottom, right] = square_graphs(s);

  // Weights by diagram label: Perron-Frobenius on the top graph, vertex 1 has weight 1.
  const std::size_t base = index_in(top.source_vertices(), vid(0, "1"));
  const PerronFrobenius pf = perron_frobenius(top, 1e-14, base);
  std::vector<double> weight(n + 1, 0.0);
  auto label_of = [](const std::string& id) { return std::stoul(id.substr(3)); };
  for (std::size_t i = 0; i < top.num_sources(); ++i) weight[label_of(top.source_vertices()[i])] = pf.source_weights[i];
  for (std::size_t i = 0; i < top.num_ranges(); ++i) weight[label_of(top.range_vertices()[i])] = pf.range_weights[i];

  std::array<std::vector<double>, 4> mu;
  for (int layer = 0; layer < 4; ++layer) {
    const auto& ids = layer == layer_v0 ? top.source_vertices()
                      : layer == layer_v3 ? top.range_vertices()
                      : layer == layer_v1 ? left.range_vertices()
                                          : bottom.range_vertices();
    for (const auto& id : ids) mu[layer].push_back(weight[label_of(id)]);
  }

  const double gamma = 2.0 * std::cos(std::numbers::pi / dia.coxeter);
  const cplx eps = cplx{0.0, 1.0} * std::polar(1.0, std::numbers::pi / (2.0 * dia.coxeter));
  std::vector<CellValue> cells;
  for (std::size_t t = 0; t < top.num_edges(); ++t) {
    const std::size_t x = top.edge(t).source, y = top.edge(t).range;
    for (std::size_t l : left.edges_from(x)) {
      const std::size_t z = left.edge(l).range;
      for (std::size_t r : right.edges_from(y)) {
        const std::size_t w = right.edge(r).range;
        for (std::size_t b : bottom.edges_between(z, w)) {
          const auto lx = label_of(top.source_vertices()[x]), ly = label_of(top.range_vertices()[y]);
          const auto lz = label_of(left.range_vertices()[z]), lw = label_of(bottom.range_vertices()[w]);
          cplx v{};
          if (ly == lz) v += eps;
          if (lx == lw) v += std::sqrt(weight[ly] * weight[lz] / (weight[lx] * weight[lw])) * std::conj(eps);
          cells.push_back({{l, t, r, b}, v});
        }
      }
    }
  }
  return Connection(std::move(top), std::move(left), std::move(bottom), std::move(right), std::move(mu),
                    std::move(cells), gamma, gamma, base);
}

Connection build_trivial(int d) {
  if (d < 2) throw InputError("trivial connection needs d >= 2 (graphs must have more than one edge)");
  Square s;
  for (int layer = 0; layer < 4; ++layer) s.ids[layer] = {"x" + std::to_string(layer)};
  const int width = static_cast<int>(std::to_string(d).size());
  for (int i = 1; i <= d; ++i) {
    std::string label = std::to_string(i);
    label.insert(0, static_cast<std::size_t>(width) - label.size(), '0');
    s.edges[0].push_back({"e" + label, "x0", "x3"});
    s.edges[1].push_back({"e" + label, "x0", "x1"});
    s.edges[2].push_back({"e" + label, "x1", "x2"});
    s.edges[3].push_back({"e" + label, "x3", "x2"});
  }
  auto [top, left, bottom, right] = square_graphs(s);
  std::vector<CellValue> cells;
  const auto e = static_cast<std::size_t>(d);
  for (std::size_t i = 0; i < e; ++i) {
    for (std::size_t j = 0; j < e; ++j) cells.push_back({{i, j, i, j}, 1.0});
  }
  std::array<std::vector<double>, 4> mu{{{1.0}, {1.0}, {1.0}, {1.0}}};
  return Connection(std::move(top), std::move(left), std::move(bottom), std::move(right), std::move(mu),
                    std::move(cells), d, d, 0);
}

Connection build_abelian(const std::vector<int>& orders) {
  if (orders.empty()) throw InputError("abelian group needs at least one factor");
  std::size_t size = 1;
  for (int n : orders) {
    if (n < 2) throw InputError("cyclic factors need order >= 2");
    size *= static_cast<std::size_t>(n);
  }
  std::vector<std::vector<int>> elems(size);
  std::vector<std::string> names(size);
  for (std::size_t g = 0; g < size; ++g) {
    std::size_t rest = g;
    for (std::size_t i = orders.size(); i-- > 0;) {
      elems[g].insert(elems[g].begin(), static_cast<int>(rest % orders[i]));
      rest /= orders[i];
    }
    for (std::size_t i = 0; i < orders.size(); ++i) names[g] += (i ? "." : "") + std::to_string(elems[g][i]);
  }
  Square s;
  s.ids[layer_v1] = {vid(1, "c")};
  s.ids[layer_v3] = {vid(3, "c")};
  for (std::size_t g = 0; g < size; ++g) {
    s.ids[layer_v0].push_back(vid(0, names[g]));
    s.ids[layer_v2].push_back(vid(2, names[g]));
    s.edges[0].push_back({"t_" + names[g], vid(0, names[g]), vid(3, "c")});
    s.edges[1].push_back({"l_" + names[g], vid(0, names[g]), vid(1, "c")});
    s.edges[2].push_back({"b_" + names[g], vid(1, "c"), vid(2, names[g])});
    s.edges[3].push_back({"r_" + names[g], vid(3, "c"), vid(2, names[g])});
  }
  auto [top, left, bottom, right] = square_graphs(s);
  auto element_of = [&](const std::string& id) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), id.substr(2)) - names.begin());
  };
  std::vector<CellValue> cells;
  for (std::size_t t = 0; t < top.num_edges(); ++t) {
    const std::size_t g = element_of(top.edge(t).id);
    const std::size_t l = *left.find_edge("l_" + names[g]);
    for (std::size_t b = 0; b < bottom.num_edges(); ++b) {
      const std::size_t h = element_of(bottom.edge(b).id);
      const std::size_t r = *right.find_edge("r_" + names[h]);
      double phase = 0.0;
      for (std::size_t i = 0; i < orders.size(); ++i) {
        phase += static_cast<double>(elems[g][i] * elems[h][i] % orders[i]) / orders[i];
      }
      cells.push_back({{l, t, r, b}, std::polar(1.0, 2.0 * std::numbers::pi * phase)});
    }
  }
  const double root = std::sqrt(static_cast<double>(size));
  std::array<std::vector<double>, 4> mu{std::vector<double>(size, 1.0), {root}, std::vector<double>(size, 1.0),
                                        {root}};
  return Connection(std::move(top), std::move(left), std::move(bottom), std::move(right), std::move(mu),
                    std::move(cells), root, root, 0);
}

Connection build_cyclic_group(int n) {
  if (n < 2) throw InputError("cyclic group needs n >= 2");
  return build_abelian({n});
}

Connection build_identity(const Connection& c) {
  const LayeredGraph& g = c.top();
  std::vector<Edge> left, right;
  for (std::size_t v = 0; v < g.num_sources(); ++v) left.push_back({"id_" + g.source_vertices()[v], v, v});
  for (std::size_t v = 0; v < g.num_ranges(); ++v) right.push_back({"id_" + g.range_vertices()[v], v, v});
  LayeredGraph lg(g.source_layer(), g.source_vertices(), g.source_layer(), g.source_vertices(), std::move(left));
  LayeredGraph rg(g.range_layer(), g.range_vertices(), g.range_layer(), g.range_vertices(), std::move(right));
  std::vector<CellValue> cells;
  for (std::size_t t = 0; t < g.num_edges(); ++t) cells.push_back({{g.edge(t).source, t, g.edge(t).range, t}, 1.0});
  std::array<std::vector<double>, 4> mu{c.mu(corner_x), c.mu(corner_x), c.mu(corner_y), c.mu(corner_y)};
  return Connection(g, std::move(lg), g, std::move(rg), std::move(mu), std::move(cells), c.gamma1(), 1.0, c.base());
}

Connection build_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InputError("builtin spec must look like family:parameter, got '" + spec + "'");
  const std::string family = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw InputError("");
      return v;
    } catch (const std::exception&) {
      throw InputError("bad integer '" + s + "' in builtin spec");
    }
  };
  if (family == "dynkin") return build_dynkin(arg);
  if (family == "trivial") return build_trivial(to_int(arg));
  if (family == "cyclic") return build_cyclic_group(to_int(arg));
  if (family == "abelian") {
    std::vector<int> orders;
    std::size_t start = 0;
    while (true) {
      const auto x = arg.find('x', start);
      orders.push_back(to_int(arg.substr(start, x - start)));
      if (x == std::string::npos) break;
      start = x + 1;
    }
    return build_abelian(orders);
  }
  throw InputError("unknown builtin family '" + family + "'");
}

}  // namespace pmpo
