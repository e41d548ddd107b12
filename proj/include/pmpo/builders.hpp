#pragma once

#include <string>
#include <vector>

#include "pmpo/connection.hpp"

namespace pmpo {

/// Adjacency lists (1-based labels) and Coxeter number of a simply laced diagram.
struct DynkinDiagram {
  std::string name;
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  int coxeter = 0;
};

/// "A3", "D5", "E6", ...; throws InputError for anything else.
DynkinDiagram dynkin_diagram(const std::string& name);

/// The connection of a Dynkin diagram: all four graphs are the diagram,
/// even vertices (distance parity from vertex 1) in V0 and V2, odd ones in V1 and V3.
/// Vertex ids are "v<layer>_<label>".
Connection build_dynkin(const std::string& name);

/// One vertex per layer, d parallel edges per graph, value delta(l,r) delta(t,b).
Connection build_trivial(int d);

/// Finite abelian group Z/n1 x ... x Z/nm with the standard bicharacter.
Connection build_abelian(const std::vector<int>& orders);
Connection build_cyclic_group(int n);

/// Unit a-type connection on the top graph of `c`: one loop per vertex on
/// each side, value delta(top, bottom).
Connection build_identity(const Connection& c);

/// "dynkin:A3", "trivial:2", "cyclic:3", "abelian:2x2".
Connection build_from_spec(const std::string& spec);

}  // namespace pmpo
