#include "pmpo/connection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pmpo {

Connection::Connection(LayeredGraph top, LayeredGraph left, LayeredGraph bottom, LayeredGraph right,
                       std::array<std::vector<double>, 4> mu, std::vector<CellValue> cells, double gamma1,
                       double gamma2, std::size_t base)
    : top_(std::move(top)),
      left_(std::move(left)),
      bottom_(std::move(bottom)),
      right_(std::move(right)),
      mu_(std::move(mu)),
      gamma1_(gamma1),
      gamma2_(gamma2),
      base_(base) {
  if (top_.source_vertices() != left_.source_vertices()) throw InputError("top and left graphs start at different vertices");
  if (top_.range_vertices() != right_.source_vertices()) throw InputError("top and right graphs do not meet");
  if (left_.range_vertices() != bottom_.source_vertices()) throw InputError("left and bottom graphs do not meet");
  if (bottom_.range_vertices() != right_.range_vertices()) throw InputError("bottom and right graphs end at different vertices");
  for (int c = 0; c < 4; ++c) {
    if (mu_[c].size() != vertices(static_cast<Corner>(c)).size()) {
      throw InputError("weights do not match the vertex count of corner " + std::to_string(c));
    }
  }
  std::map<std::array<std::size_t, 4>, bool> seen;
  for (const CellValue& cv : cells) {
    const Cell& c = cv.cell;
    if (!is_cell(c)) throw InputError("value given for an invalid cell");
    if (!seen.emplace(std::array{c.left, c.top, c.right, c.bottom}, true).second) {
      throw InputError("cell listed twice");
    }
    if (cv.value == cplx{}) continue;
    cells_.push_back(cv);
  }
  std::sort(cells_.begin(), cells_.end(), [](const CellValue& a, const CellValue& b) {
    return std::tie(a.cell.left, a.cell.top, a.cell.right, a.cell.bottom) <
           std::tie(b.cell.left, b.cell.top, b.cell.right, b.cell.bottom);
  });
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Cell& c = cells_[i].cell;
    by_left_top_[key(c.left, c.top)].push_back(i);
    by_top_bottom_[key(c.top, c.bottom)].push_back(i);
  }
}

const std::vector<std::string>& Connection::vertices(Corner c) const {
  switch (c) {
    case corner_x:
      return top_.source_vertices();
    case corner_y:
      return top_.range_vertices();
    case corner_z:
      return left_.range_vertices();
    case corner_w:
      return bottom_.range_vertices();
  }
  throw InputError("unknown corner");
}

bool Connection::is_cell(const Cell& c) const {
  if (c.left >= left_.num_edges() || c.top >= top_.num_edges() || c.right >= right_.num_edges() ||
      c.bottom >= bottom_.num_edges()) {
    return false;
  }
  const Edge& l = left_.edge(c.left);
  const Edge& t = top_.edge(c.top);
  const Edge& r = right_.edge(c.right);
  const Edge& b = bottom_.edge(c.bottom);
  return l.source == t.source && t.range == r.source && l.range == b.source && b.range == r.range;
}

cplx Connection::value(const Cell& c) const {
  if (!is_cell(c)) throw InputError("not a cell of this connection");
  return value_or_zero(c.left, c.top, c.right, c.bottom);
}

cplx Connection::value_or_zero(std::size_t l, std::size_t t, std::size_t r, std::size_t b) const {
  for (std::size_t i : cells_at_left_top(l, t)) {
    const Cell& c = cells_[i].cell;
    if (c.right == r && c.bottom == b) return cells_[i].value;
  }
  return {};
}

double Connection::renormalization_factor(const Cell& c) const {
  const double mx = mu_[corner_x][top_.edge(c.top).source];
  const double my = mu_[corner_y][top_.edge(c.top).range];
  const double mz = mu_[corner_z][bottom_.edge(c.bottom).source];
  const double mw = mu_[corner_w][bottom_.edge(c.bottom).range];
  return std::sqrt(mx * mw / (my * mz));
}

std::span<const std::size_t> Connection::cells_at_left_top(std::size_t l, std::size_t t) const {
  const auto it = by_left_top_.find(key(l, t));
  if (it == by_left_top_.end()) return {};
  return it->second;
}

std::span<const std::size_t> Connection::cells_at_top_bottom(std::size_t t, std::size_t b) const {
  const auto it = by_top_bottom_.find(key(t, b));
  if (it == by_top_bottom_.end()) return {};
  return it->second;
}

Connection Connection::rescaled(double factor) const {
  auto mu = mu_;
  for (auto& layer : mu) {
    for (double& m : layer) m *= factor;
  }
  return Connection(top_, left_, bottom_, right_, std::move(mu), cells_, gamma1_, gamma2_, base_);
}

cplx extended_value(const Connection& c, const OrientedCellQuery& q) {
  const auto& rev = q.reversed;
  if (rev[0] != rev[2] || rev[1] != rev[3]) {
    throw InputError("oriented cell: opposite edges must be traversed the same way");
  }
  cplx v = c.value(q.cell);
  if (rev[1]) v = std::conj(v);
  if (rev[0]) v *= c.renormalization_factor(q.cell);
  return v;
}

Connection renormalize(const Connection& c, Renormalization kind) {
  std::vector<CellValue> cells;
  cells.reserve(c.cells().size());
  const auto& mu = c.mu();
  switch (kind) {
    case Renormalization::prime: {
      for (const CellValue& cv : c.cells()) {
        const Cell& o = cv.cell;
        cells.push_back({{o.right, o.top, o.left, o.bottom}, c.renormalization_factor(o) * std::conj(cv.value)});
      }
      return Connection(reverse_graph(c.top()), c.right(), reverse_graph(c.bottom()), c.left(),
                        {mu[corner_y], mu[corner_w], mu[corner_z], mu[corner_x]}, std::move(cells), c.gamma1(),
                        c.gamma2());
    }
    case Renormalization::bar: {
      for (const CellValue& cv : c.cells()) {
        const Cell& o = cv.cell;
        cells.push_back({{o.left, o.bottom, o.right, o.top}, c.renormalization_factor(o) * std::conj(cv.value)});
      }
      return Connection(c.bottom(), reverse_graph(c.left()), c.top(), reverse_graph(c.right()),
                        {mu[corner_z], mu[corner_x], mu[corner_y], mu[corner_w]}, std::move(cells), c.gamma1(),
                        c.gamma2());
    }
    case Renormalization::bar_prime: {
      for (const CellValue& cv : c.cells()) {
        const Cell& o = cv.cell;
        cells.push_back({{o.right, o.bottom, o.left, o.top}, cv.value});
      }
      return Connection(reverse_graph(c.bottom()), reverse_graph(c.right()), reverse_graph(c.top()),
                        reverse_graph(c.left()), {mu[corner_w], mu[corner_y], mu[corner_x], mu[corner_z]},
                        std::move(cells), c.gamma1(), c.gamma2());
    }
  }
  throw InputError("unknown renormalization");
}

UnitarityReport check_unitarity(const Connection& c, double tol) {
  UnitarityReport rep;
  rep.tolerance = tol;
  const std::size_t nx = c.vertices(corner_x).size();
  const std::size_t nw = c.vertices(corner_w).size();
  // Row index of (t, r) and column index of (l, b) inside their (x, w) block.
  std::vector<std::size_t> block_rows(nx * nw, 0);
  std::vector<std::size_t> block_cols(nx * nw, 0);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> row_of;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> col_of;
  for (std::size_t t = 0; t < c.top().num_edges(); ++t) {
    const Edge& te = c.top().edge(t);
    for (std::size_t r : c.right().edges_from(te.range)) {
      row_of[{t, r}] = block_rows[te.source * nw + c.right().edge(r).range]++;
    }
  }
  for (std::size_t l = 0; l < c.left().num_edges(); ++l) {
    const Edge& le = c.left().edge(l);
    for (std::size_t b : c.bottom().edges_from(le.range)) {
      col_of[{l, b}] = block_cols[le.source * nw + c.bottom().edge(b).range]++;
    }
  }
  std::vector<CMatrix> blocks(nx * nw);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (block_rows[i] != block_cols[i]) {
      rep.dimensions_match = false;
      rep.issues.push_back("corner pair (" + c.vertices(corner_x)[i / nw] + ", " + c.vertices(corner_w)[i % nw] +
                           ") joins " + std::to_string(block_rows[i]) + " paths over the top and " +
                           std::to_string(block_cols[i]) + " over the left");
    }
    blocks[i] = CMatrix::Zero(static_cast<Eigen::Index>(block_rows[i]), static_cast<Eigen::Index>(block_cols[i]));
  }
  for (const CellValue& cv : c.cells()) {
    const Cell& cell = cv.cell;
    const std::size_t blk = c.top().edge(cell.top).source * nw + c.bottom().edge(cell.bottom).range;
    blocks[blk](static_cast<Eigen::Index>(row_of.at({cell.top, cell.right})),
                static_cast<Eigen::Index>(col_of.at({cell.left, cell.bottom}))) = cv.value;
  }
  for (const CMatrix& u : blocks) {
    if (u.size() == 0) continue;
    const CMatrix uu = u * u.adjoint() - CMatrix::Identity(u.rows(), u.rows());
    const CMatrix uu2 = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
    rep.residual_left = std::max(rep.residual_left, max_abs(uu));
    rep.residual_right = std::max(rep.residual_right, max_abs(uu2));
  }
  if (rep.residual() >= tol) rep.issues.push_back("unitarity residual " + std::to_string(rep.residual()));
  rep.passed = rep.dimensions_match && rep.residual() < tol;
  return rep;
}

BiunitarityReport check_biunitarity(const Connection& c, double tol) {
  BiunitarityReport rep;
  rep.original = check_unitarity(c, tol);
  rep.renormalized = check_unitarity(renormalize(c, Renormalization::prime), tol);
  rep.passed = rep.original.passed && rep.renormalized.passed;
  return rep;
}

namespace {

std::unordered_map<std::uint64_t, std::size_t> pair_index(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::unordered_map<std::uint64_t, std::size_t> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) out[(std::uint64_t{pairs[i].first} << 32) | pairs[i].second] = i;
  return out;
}

std::vector<CellValue> collect(const std::map<std::array<std::size_t, 4>, cplx>& acc) {
  std::vector<CellValue> out;
  for (const auto& [k, v] : acc) {
    if (std::abs(v) > 1e-14) out.push_back({{k[0], k[1], k[2], k[3]}, v});
  }
  return out;
}

}  // namespace

Connection vertical_product(const Connection& top, const Connection& bottom) {
  if (!(top.bottom() == bottom.top())) throw InputError("vertical_product: bottom graph of the upper factor differs from top graph of the lower");
  std::vector<std::pair<std::size_t, std::size_t>> lp, rp;
  LayeredGraph left = compose_graphs(top.left(), bottom.left(), &lp);
  LayeredGraph right = compose_graphs(top.right(), bottom.right(), &rp);
  const auto li = pair_index(lp);
  const auto ri = pair_index(rp);
  std::vector<std::vector<std::size_t>> lower_by_top(bottom.top().num_edges());
  for (std::size_t i = 0; i < bottom.cells().size(); ++i) lower_by_top[bottom.cells()[i].cell.top].push_back(i);

  std::map<std::array<std::size_t, 4>, cplx> acc;
  for (const CellValue& u : top.cells()) {
    for (std::size_t j : lower_by_top[u.cell.bottom]) {
      const CellValue& d = bottom.cells()[j];
      const std::size_t l = li.at((std::uint64_t{u.cell.left} << 32) | d.cell.left);
      const std::size_t r = ri.at((std::uint64_t{u.cell.right} << 32) | d.cell.right);
      acc[{l, u.cell.top, r, d.cell.bottom}] += u.value * d.value;
    }
  }
  std::array<std::vector<double>, 4> mu{top.mu(corner_x), bottom.mu(corner_z), bottom.mu(corner_w), top.mu(corner_y)};
  return Connection(top.top(), std::move(left), bottom.bottom(), std::move(right), std::move(mu), collect(acc),
                    top.gamma1(), top.gamma2() * bottom.gamma2(), top.base());
}

Connection horizontal_product(const Connection& leftc, const Connection& rightc) {
  if (!(leftc.right() == rightc.left())) throw InputError("horizontal_product: right graph of the left factor differs from left graph of the right");
  std::vector<std::pair<std::size_t, std::size_t>> tp, bp;
  LayeredGraph top = compose_graphs(leftc.top(), rightc.top(), &tp);
  LayeredGraph bottom = compose_graphs(leftc.bottom(), rightc.bottom(), &bp);
  const auto ti = pair_index(tp);
  const auto bi = pair_index(bp);
  std::vector<std::vector<std::size_t>> right_by_left(rightc.left().num_edges());
  for (std::size_t i = 0; i < rightc.cells().size(); ++i) right_by_left[rightc.cells()[i].cell.left].push_back(i);

  std::map<std::array<std::size_t, 4>, cplx> acc;
  for (const CellValue& a : leftc.cells()) {
    for (std::size_t j : right_by_left[a.cell.right]) {
      const CellValue& b = rightc.cells()[j];
      const std::size_t t = ti.at((std::uint64_t{a.cell.top} << 32) | b.cell.top);
      const std::size_t bo = bi.at((std::uint64_t{a.cell.bottom} << 32) | b.cell.bottom);
      acc[{a.cell.left, t, b.cell.right, bo}] += a.value * b.value;
    }
  }
  std::array<std::vector<double>, 4> mu{leftc.mu(corner_x), leftc.mu(corner_z), rightc.mu(corner_w),
                                        rightc.mu(corner_y)};
  return Connection(std::move(top), leftc.left(), std::move(bottom), rightc.right(), std::move(mu), collect(acc),
                    leftc.gamma1() * rightc.gamma1(), leftc.gamma2(), leftc.base());
}

bool is_a_type(const Connection& c) { return c.top() == c.bottom(); }

CMatrix cell_block(const Connection& c, std::size_t top, std::size_t bottom) {
  const Edge& t = c.top().edge(top);
  const Edge& b = c.bottom().edge(bottom);
  const auto rights = c.right().edges_between(t.range, b.range);
  const auto lefts = c.left().edges_between(t.source, b.source);
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(rights.size()), static_cast<Eigen::Index>(lefts.size()));
  for (std::size_t i : c.cells_at_top_bottom(top, bottom)) {
    const CellValue& cv = c.cells()[i];
    m(static_cast<Eigen::Index>(c.right().slot(cv.cell.right)), static_cast<Eigen::Index>(c.left().slot(cv.cell.left))) =
        cv.value;
  }
  return m;
}

}  // namespace pmpo
