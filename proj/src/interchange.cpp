#include "pmpo/interchange.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pmpo {
namespace {

using nlohmann::json;

constexpr std::array<const char*, 4> slot_names{"top", "left", "bottom", "right"};
// Source and range layer of each slot.
constexpr std::array<std::pair<int, int>, 4> slot_layers{{{layer_v0, layer_v3},
                                                          {layer_v0, layer_v1},
                                                          {layer_v1, layer_v2},
                                                          {layer_v3, layer_v2}}};

double parse_decimal(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw InputError(what + ": expected a decimal string");
  const std::string s = j.get<std::string>();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw InputError(what + ": malformed decimal '" + s + "'");
  }
  return v;
}

const json& field(const json& obj, const char* name) {
  if (!obj.is_object() || !obj.contains(name)) throw InputError(std::string("missing field '") + name + "'");
  return obj.at(name);
}

std::string text_of(const json& j, const std::string& what) {
  if (!j.is_string()) throw InputError(what + ": expected a string");
  return j.get<std::string>();
}

Connection from_json(const json& doc) {
  const json& version = field(doc, "version");
  if (!version.is_number_integer() || version.get<int>() != interchange_version) {
    throw InputError("unsupported document version");
  }
  std::array<std::vector<std::string>, 4> ids;
  std::map<std::string, int> layer_of;
  const json& layers = field(doc, "layers");
  if (!layers.is_array()) throw InputError("'layers' must be a list");
  for (const json& rec : layers) {
    const std::string id = text_of(field(rec, "id"), "vertex id");
    const json& lj = field(rec, "layer");
    if (!lj.is_number_integer() || lj.get<int>() < 0 || lj.get<int>() > 3) {
      throw InputError("vertex '" + id + "': layer must be 0..3");
    }
    if (!layer_of.emplace(id, lj.get<int>()).second) throw InputError("vertex '" + id + "' listed twice");
    ids[lj.get<int>()].push_back(id);
  }

  const json& graphs = field(doc, "graphs");
  std::array<LayeredGraph, 4> g;
  for (std::size_t s = 0; s < 4; ++s) {
    const json& list = field(graphs, slot_names[s]);
    if (!list.is_array()) throw InputError(std::string("graph '") + slot_names[s] + "' must be a list");
    std::vector<NamedEdge> edges;
    for (const json& e : list) {
      NamedEdge ne{text_of(field(e, "id"), "edge id"), text_of(field(e, "src"), "edge source"),
                   text_of(field(e, "dst"), "edge range")};
      auto check = [&](const std::string& v, int layer) {
        const auto it = layer_of.find(v);
        if (it == layer_of.end() || it->second != layer) {
          throw InputError(std::string("graph '") + slot_names[s] + "' edge '" + ne.id + "': vertex '" + v +
                           "' is not in layer " + std::to_string(layer));
        }
      };
      check(ne.source, slot_layers[s].first);
      check(ne.range, slot_layers[s].second);
      edges.push_back(std::move(ne));
    }
    g[s] = graph_from_ids(slot_layers[s].first, ids[slot_layers[s].first], slot_layers[s].second,
                          ids[slot_layers[s].second], std::move(edges));
  }

  const std::string base_id = text_of(field(doc, "base"), "base");
  const auto& v0 = g[0].source_vertices();
  const auto base_it = std::find(v0.begin(), v0.end(), base_id);
  if (base_it == v0.end()) throw InputError("base vertex '" + base_id + "' is not in layer 0");
  const auto base = static_cast<std::size_t>(base_it - v0.begin());

  SquareScheme scheme = complete_scheme(g[0], g[1], g[2], g[3], base);
  std::array<std::vector<double>, 4> mu = scheme.mu;
  if (doc.contains("mu")) {
    const json& mj = doc.at("mu");
    if (!mj.is_object()) throw InputError("'mu' must map vertex ids to decimals");
    for (int layer = 0; layer < 4; ++layer) {
      const auto& lids = layer == layer_v0 ? g[0].source_vertices()
                         : layer == layer_v3 ? g[0].range_vertices()
                         : layer == layer_v1 ? g[1].range_vertices()
                                             : g[2].range_vertices();
      for (std::size_t i = 0; i < lids.size(); ++i) {
        if (!mj.contains(lids[i])) throw InputError("'mu' lacks vertex '" + lids[i] + "'");
        mu[layer][i] = parse_decimal(mj.at(lids[i]), "mu of " + lids[i]);
      }
    }
  }
  double gamma1 = scheme.gamma1, gamma2 = scheme.gamma2;
  if (doc.contains("gamma")) {
    const json& gj = doc.at("gamma");
    if (!gj.is_array() || gj.size() != 2) throw InputError("'gamma' must be a pair");
    gamma1 = parse_decimal(gj[0], "gamma1");
    gamma2 = parse_decimal(gj[1], "gamma2");
  }

  std::vector<CellValue> cells;
  const json& values = field(doc, "values");
  if (!values.is_array()) throw InputError("'values' must be a list");
  for (const json& rec : values) {
    Cell c;
    std::array<std::size_t*, 4> slots{&c.top, &c.left, &c.bottom, &c.right};
    for (std::size_t s = 0; s < 4; ++s) {
      const std::string id = text_of(field(rec, slot_names[s]), std::string(slot_names[s]) + " edge");
      const auto e = g[s].find_edge(id);
      if (!e) throw InputError(std::string("value references unknown ") + slot_names[s] + " edge '" + id + "'");
      *slots[s] = *e;
    }
    cells.push_back({c, {parse_decimal(field(rec, "re"), "re"), parse_decimal(field(rec, "im"), "im")}});
  }
  return Connection(g[0], g[1], g[2], g[3], std::move(mu), std::move(cells), gamma1, gamma2, base);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_connection(const Connection& c, std::ostream& out) { out << write_connection(c) << '\n'; }

std::string write_connection(const Connection& c) {
  json doc;
  doc["version"] = interchange_version;
  json layers = json::array();
  json mu = json::object();
  for (int layer = 0; layer < 4; ++layer) {
    const auto& vs = c.vertices(static_cast<Corner>(layer));
    for (std::size_t i = 0; i < vs.size(); ++i) {
      layers.push_back({{"id", vs[i]}, {"layer", layer}});
      mu[vs[i]] = format_double(c.mu(static_cast<Corner>(layer))[i]);
    }
  }
  doc["layers"] = layers;
  const std::array<const LayeredGraph*, 4> gs{&c.top(), &c.left(), &c.bottom(), &c.right()};
  json graphs = json::object();
  for (std::size_t s = 0; s < 4; ++s) {
    json list = json::array();
    for (const Edge& e : gs[s]->edges()) {
      list.push_back({{"id", e.id}, {"src", gs[s]->source_vertices()[e.source]}, {"dst", gs[s]->range_vertices()[e.range]}});
    }
    graphs[slot_names[s]] = list;
  }
  doc["graphs"] = graphs;
  doc["mu"] = mu;
  doc["gamma"] = {format_double(c.gamma1()), format_double(c.gamma2())};
  doc["base"] = c.vertices(corner_x).at(c.base());
  json values = json::array();
  for (const CellValue& cv : c.cells()) {
    values.push_back({{"left", c.left().edge(cv.cell.left).id},
                      {"top", c.top().edge(cv.cell.top).id},
                      {"right", c.right().edge(cv.cell.right).id},
                      {"bottom", c.bottom().edge(cv.cell.bottom).id},
                      {"re", format_double(cv.value.real())},
                      {"im", format_double(cv.value.imag())}});
  }
  doc["values"] = values;
  return doc.dump(2);
}

Connection read_connection(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  try {
    return from_json(doc);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  } catch (const NumericError& e) {
    throw InputError(std::string("graphs have no Perron-Frobenius data: ") + e.what());
  }
}

Connection read_connection_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_connection(ss.str());
}

SquareScheme scheme_of(const Connection& c) {
  SquareScheme s;
  s.g = c.top();
  s.h = c.left();
  s.g_prime = c.bottom();
  s.h_prime = c.right();
  s.mu = c.mu();
  s.gamma1 = c.gamma1();
  s.gamma2 = c.gamma2();
  s.base = c.base();
  return s;
}

}  // namespace pmpo
