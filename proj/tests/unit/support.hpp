#pragma once

#include <string>
#include <vector>

#include "pmpo/builders.hpp"
#include "pmpo/connection.hpp"
#include "pmpo/decomp.hpp"

namespace pmpo::testing {

inline const std::vector<std::string>& small_specs() {
  static const std::vector<std::string> specs{"dynkin:A3", "dynkin:A4", "dynkin:D4", "trivial:2", "cyclic:3"};
  return specs;
}

/// Diagram label of a builder vertex id "v<layer>_<label>".
inline std::string label(const std::string& id) { return id.substr(id.find('_') + 1); }

/// Every valid cell of the square, stored or not.
inline std::vector<Cell> all_cells(const Connection& c) {
  std::vector<Cell> out;
  for (std::size_t t = 0; t < c.top().num_edges(); ++t) {
    const std::size_t x = c.top().edge(t).source;
    const std::size_t y = c.top().edge(t).range;
    for (std::size_t l : c.left().edges_from(x)) {
      const std::size_t z = c.left().edge(l).range;
      for (std::size_t r : c.right().edges_from(y)) {
        const std::size_t w = c.right().edge(r).range;
        for (std::size_t b : c.bottom().edges_between(z, w)) out.push_back({l, t, r, b});
      }
    }
  }
  return out;
}

/// Same connection with every cell value multiplied by `factor`.
inline Connection scaled_values(const Connection& c, double factor) {
  std::vector<CellValue> cells = c.cells();
  for (CellValue& cv : cells) cv.value *= factor;
  return Connection(c.top(), c.left(), c.bottom(), c.right(), c.mu(), cells, c.gamma1(), c.gamma2(), c.base());
}

inline CMatrix dense(const SparseCMatrix& m) { return CMatrix(m); }

/// Irreducibles of a builder spec, cached per process.
const Irreducibles& irreducibles(const std::string& spec);

}  // namespace pmpo::testing
