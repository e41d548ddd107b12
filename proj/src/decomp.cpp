#include "pmpo/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "pmpo/builders.hpp"

namespace pmpo {

namespace {

template <class F>
IntertwinerFamily blockwise(const IntertwinerFamily& a, const IntertwinerFamily& b, F f) {
  IntertwinerFamily out;
  out.left.reserve(a.left.size());
  out.right.reserve(a.right.size());
  for (std::size_t i = 0; i < a.left.size(); ++i) out.left.push_back(f(a.left[i], b.left[i]));
  for (std::size_t i = 0; i < a.right.size(); ++i) out.right.push_back(f(a.right[i], b.right[i]));
  return out;
}

}  // namespace

IntertwinerFamily IntertwinerFamily::adjoint() const {
  IntertwinerFamily out;
  for (const CMatrix& m : left) out.left.push_back(m.adjoint());
  for (const CMatrix& m : right) out.right.push_back(m.adjoint());
  return out;
}

IntertwinerFamily IntertwinerFamily::operator*(const IntertwinerFamily& other) const {
  return blockwise(*this, other, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a * b; });
}

IntertwinerFamily IntertwinerFamily::operator+(const IntertwinerFamily& other) const {
  return blockwise(*this, other, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a + b; });
}

IntertwinerFamily IntertwinerFamily::operator-(const IntertwinerFamily& other) const {
  return blockwise(*this, other, [](const CMatrix& a, const CMatrix& b) -> CMatrix { return a - b; });
}

IntertwinerFamily IntertwinerFamily::scaled(cplx s) const {
  IntertwinerFamily out;
  for (const CMatrix& m : left) out.left.push_back(s * m);
  for (const CMatrix& m : right) out.right.push_back(s * m);
  return out;
}

double IntertwinerFamily::max_abs() const {
  double m = 0.0;
  for (const CMatrix& b : left) m = std::max(m, pmpo::max_abs(b));
  for (const CMatrix& b : right) m = std::max(m, pmpo::max_abs(b));
  return m;
}

std::size_t IntertwinerFamily::size() const {
  std::size_t n = 0;
  for (const CMatrix& b : left) n += static_cast<std::size_t>(b.size());
  for (const CMatrix& b : right) n += static_cast<std::size_t>(b.size());
  return n;
}

CVector IntertwinerFamily::flatten() const {
  CVector v(static_cast<Eigen::Index>(size()));
  Eigen::Index pos = 0;
  for (const auto* side : {&left, &right}) {
    for (const CMatrix& b : *side) {
      v.segment(pos, b.size()) = b.reshaped();
      pos += b.size();
    }
  }
  return v;
}

namespace {

// Shapes of the unknown blocks of Hom(src, dst), with offsets into the flat vector.
struct HomLayout {
  std::size_t n_left_range = 0;
  std::size_t n_right_range = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> left_shape, right_shape;  // (dst, src)
  std::vector<Eigen::Index> left_offset, right_offset;
  Eigen::Index unknowns = 0;
};

HomLayout layout_of(const Connection& src, const Connection& dst) {
  HomLayout h;
  const LayeredGraph& ls = src.left();
  const LayeredGraph& ld = dst.left();
  const LayeredGraph& rs = src.right();
  const LayeredGraph& rd = dst.right();
  h.n_left_range = ls.num_ranges();
  h.n_right_range = rs.num_ranges();
  for (std::size_t u = 0; u < ls.num_sources(); ++u) {
    for (std::size_t v = 0; v < ls.num_ranges(); ++v) {
      const auto s = static_cast<Eigen::Index>(ls.edges_between(u, v).size());
      const auto d = static_cast<Eigen::Index>(ld.edges_between(u, v).size());
      h.left_shape.emplace_back(d, s);
      h.left_offset.push_back(h.unknowns);
      h.unknowns += d * s;
    }
  }
  for (std::size_t u = 0; u < rs.num_sources(); ++u) {
    for (std::size_t v = 0; v < rs.num_ranges(); ++v) {
      const auto s = static_cast<Eigen::Index>(rs.edges_between(u, v).size());
      const auto d = static_cast<Eigen::Index>(rd.edges_between(u, v).size());
      h.right_shape.emplace_back(d, s);
      h.right_offset.push_back(h.unknowns);
      h.unknowns += d * s;
    }
  }
  return h;
}

IntertwinerFamily unflatten(const HomLayout& h, const CVector& v) {
  IntertwinerFamily t;
  for (std::size_t i = 0; i < h.left_shape.size(); ++i) {
    const auto [d, s] = h.left_shape[i];
    t.left.push_back(v.segment(h.left_offset[i], d * s).reshaped(d, s));
  }
  for (std::size_t i = 0; i < h.right_shape.size(); ++i) {
    const auto [d, s] = h.right_shape[i];
    t.right.push_back(v.segment(h.right_offset[i], d * s).reshaped(d, s));
  }
  return t;
}

void require_same_horizontals(const Connection& src, const Connection& dst) {
  if (!(src.top() == dst.top()) || !(src.bottom() == dst.bottom())) {
    throw InputError("intertwiners need connections on the same horizontal graphs");
  }
  if (src.left().range_vertices() != dst.left().range_vertices() ||
      src.right().range_vertices() != dst.right().range_vertices()) {
    throw InputError("intertwiners need connections on the same vertex sets");
  }
}

}  // namespace

IntertwinerFamily identity_family(const Connection& c) {
  const HomLayout h = layout_of(c, c);
  IntertwinerFamily t;
  for (auto [d, s] : h.left_shape) t.left.push_back(CMatrix::Identity(d, s));
  for (auto [d, s] : h.right_shape) t.right.push_back(CMatrix::Identity(d, s));
  return t;
}

double intertwining_residual(const Connection& src, const Connection& dst, const IntertwinerFamily& t) {
  require_same_horizontals(src, dst);
  const std::size_t nz = src.left().num_ranges();
  const std::size_t nw = src.right().num_ranges();
  double worst = 0.0;
  for (std::size_t a = 0; a < src.top().num_edges(); ++a) {
    const Edge& te = src.top().edge(a);
    for (std::size_t b = 0; b < src.bottom().num_edges(); ++b) {
      const Edge& be = src.bottom().edge(b);
      const CMatrix& tl = t.left[te.source * nz + be.source];
      const CMatrix& tr = t.right[te.range * nw + be.range];
      const CMatrix lhs = tr * cell_block(src, a, b);
      const CMatrix rhs = cell_block(dst, a, b) * tl;
      if (lhs.size()) worst = std::max(worst, max_abs(CMatrix(lhs - rhs)));
    }
  }
  return worst;
}

std::vector<IntertwinerFamily> hom_space(const Connection& src, const Connection& dst) {
  require_same_horizontals(src, dst);
  const HomLayout h = layout_of(src, dst);
  if (h.unknowns == 0) return {};
  std::vector<Triplet> entries;
  Eigen::Index row = 0;
  for (std::size_t a = 0; a < src.top().num_edges(); ++a) {
    const Edge& te = src.top().edge(a);
    for (std::size_t b = 0; b < src.bottom().num_edges(); ++b) {
      const Edge& be = src.bottom().edge(b);
      const std::size_t li = te.source * h.n_left_range + be.source;
      const std::size_t ri = te.range * h.n_right_range + be.range;
      const auto [ld, ls] = h.left_shape[li];
      const auto [rd, rs] = h.right_shape[ri];
      if (rd == 0 || ls == 0) continue;
      const CMatrix s = cell_block(src, a, b);  // rs x ls
      const CMatrix d = cell_block(dst, a, b);  // rd x ld
      // (T_R S - D T_L)(i, j) = 0
      for (Eigen::Index j = 0; j < ls; ++j) {
        for (Eigen::Index i = 0; i < rd; ++i) {
          for (Eigen::Index k = 0; k < rs; ++k) {
            if (s(k, j) != cplx{}) entries.emplace_back(row, h.right_offset[ri] + i + k * rd, s(k, j));
          }
          for (Eigen::Index k = 0; k < ld; ++k) {
            if (d(i, k) != cplx{}) entries.emplace_back(row, h.left_offset[li] + k + j * ld, -d(i, k));
          }
          ++row;
        }
      }
    }
  }
  SparseCMatrix system(row, h.unknowns);
  system.setFromTriplets(entries.begin(), entries.end());
  const CMatrix kernel = CMatrix(sparse_null_space(system));
  std::vector<IntertwinerFamily> out;
  out.reserve(static_cast<std::size_t>(kernel.cols()));
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) out.push_back(unflatten(h, kernel.col(c)));
  return out;
}

std::size_t hom_dimension(const Connection& src, const Connection& dst) { return hom_space(src, dst).size(); }

namespace {

CMatrix basis_matrix(const std::vector<IntertwinerFamily>& basis) {
  if (basis.empty()) return {};
  CMatrix m(static_cast<Eigen::Index>(basis.front().size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = basis[i].flatten();
  return m;
}

// Orthonormal basis of the span of the given families.
std::vector<IntertwinerFamily> span_basis(const std::vector<IntertwinerFamily>& families, const HomLayout& h) {
  if (families.empty()) return {};
  const CMatrix m = basis_matrix(families);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd s = svd.singularValues();
  const double thr = RankCut{}.threshold(s.size() ? s.maxCoeff() : 0.0);
  std::vector<IntertwinerFamily> out;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > thr) out.push_back(unflatten(h, svd.matrixU().col(i)));
  }
  return out;
}

double adjoint_deviation(const std::vector<IntertwinerFamily>& basis, const CMatrix& n) {
  double worst = 0.0;
  for (const auto& x : basis) {
    const CVector v = x.adjoint().flatten();
    const CVector r = v - n * (n.adjoint() * v);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

struct Split {
  std::vector<IntertwinerFamily> parts;
  bool ok = false;
};

// Spectral projections of a self-adjoint h = p h p inside the range of p.
Split spectral_split(const IntertwinerFamily& h, const IntertwinerFamily& p) {
  struct Eig {
    double value;
    bool right;
    std::size_t block;
    Eigen::Index index;
  };
  double scale = std::max(1.0, h.max_abs());
  const double shift = 10.0 * scale * static_cast<double>(h.left.size() + h.right.size() + 1);
  std::vector<Eig> eigs;
  std::vector<Eigen::SelfAdjointEigenSolver<CMatrix>> solvers;
  std::vector<std::pair<bool, std::size_t>> solver_block;
  for (bool right : {false, true}) {
    const auto& hs = right ? h.right : h.left;
    const auto& ps = right ? p.right : p.left;
    for (std::size_t b = 0; b < hs.size(); ++b) {
      if (hs[b].size() == 0) continue;
      const CMatrix comp = CMatrix::Identity(ps[b].rows(), ps[b].cols()) - ps[b];
      CMatrix m = ps[b] * hs[b] * ps[b] + shift * comp;
      m = 0.5 * (m + m.adjoint()).eval();
      solvers.emplace_back(m);
      solver_block.emplace_back(right, b);
      const auto& ev = solvers.back().eigenvalues();
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.5 * shift) eigs.push_back({ev(i), right, solvers.size() - 1, i});
      }
    }
  }
  Split out;
  if (eigs.empty()) return out;
  std::sort(eigs.begin(), eigs.end(), [](const Eig& a, const Eig& b) { return a.value < b.value; });
  const double gap = 1e-7 * scale;
  std::vector<std::vector<const Eig*>> clusters{{&eigs[0]}};
  for (std::size_t i = 1; i < eigs.size(); ++i) {
    if (eigs[i].value - eigs[i - 1].value > gap) clusters.emplace_back();
    clusters.back().push_back(&eigs[i]);
  }
  if (clusters.size() < 2) return out;
  for (const auto& cl : clusters) {
    IntertwinerFamily q = p.scaled(0.0);
    for (const Eig* e : cl) {
      const CVector v = solvers[e->block].eigenvectors().col(e->index);
      auto& target = e->right ? q.right : q.left;
      target[solver_block[e->block].second] += v * v.adjoint();
    }
    out.parts.push_back(std::move(q));
  }
  out.ok = true;
  return out;
}

}  // namespace

EndSplitting end_minimal_projections(const Connection& c, std::uint64_t seed, double tol) {
  EndSplitting result;
  const std::vector<IntertwinerFamily> basis = hom_space(c, c);
  result.end_dimension = basis.size();
  if (basis.empty()) throw NumericError("End(c) is empty");
  const HomLayout layout = layout_of(c, c);
  const CMatrix n = basis_matrix(basis);

  // The weighted adjoint D T^* D^{-1} (D = sqrt(mu_source / mu_range) per edge) is
  // constant on every block, so it coincides with the slot-wise one checked here.
  result.adjoint_deviation = adjoint_deviation(basis, n);
  if (result.adjoint_deviation >= tol) {
    throw NumericError("End is not closed under the adjoint (deviation " + std::to_string(result.adjoint_deviation) +
                       ")");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<IntertwinerFamily> work{identity_family(c)};
  while (!work.empty()) {
    IntertwinerFamily p = std::move(work.back());
    work.pop_back();
    std::vector<IntertwinerFamily> compressed;
    for (const auto& x : basis) compressed.push_back(p * x * p);
    const std::vector<IntertwinerFamily> sub = span_basis(compressed, layout);
    if (sub.size() == 1) {
      result.projections.push_back(std::move(p));
      continue;
    }
    bool split = false;
    for (std::size_t attempt = 0; attempt < 8 && !split; ++attempt) {
      if (attempt > 0) ++result.reseeds;
      IntertwinerFamily h = p.scaled(0.0);
      for (const auto& y : sub) h = h + y.scaled({normal(rng), normal(rng)});
      h = (h + h.adjoint()).scaled(0.5);
      Split s = spectral_split(h, p);
      if (!s.ok) continue;
      bool valid = true;
      for (const auto& q : s.parts) {
        if (intertwining_residual(c, c, q) >= tol || (q * p - q).max_abs() >= tol) valid = false;
      }
      if (!valid) continue;
      for (auto& q : s.parts) work.push_back(std::move(q));
      split = true;
    }
    if (!split) throw NumericError("no spectral gap in End after 8 reseeds");
  }
  // Deterministic order: by position of the first nonzero diagonal entry.
  auto first_support = [](const IntertwinerFamily& q) {
    std::size_t pos = 0;
    for (const auto* side : {&q.left, &q.right}) {
      for (const CMatrix& b : *side) {
        for (Eigen::Index i = 0; i < b.rows(); ++i, ++pos) {
          if (std::abs(b(i, i)) > 1e-6) return std::pair{pos, std::abs(b(i, i))};
        }
      }
    }
    return std::pair{pos, 0.0};
  };
  std::stable_sort(result.projections.begin(), result.projections.end(),
                   [&](const IntertwinerFamily& a, const IntertwinerFamily& b) {
                     return first_support(a) < first_support(b);
                   });
  return result;
}

Connection compress(const Connection& c, const IntertwinerFamily& p, double tol) {
  auto isometries = [](const std::vector<CMatrix>& blocks) {
    std::vector<CMatrix> out;
    for (const CMatrix& b : blocks) {
      if (b.size() == 0) {
        out.emplace_back(b.rows(), 0);
        continue;
      }
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (b + b.adjoint()));
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) > 0.5) keep.push_back(i);
      }
      CMatrix v(b.rows(), static_cast<Eigen::Index>(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
      out.push_back(std::move(v));
    }
    return out;
  };
  const std::vector<CMatrix> vl = isometries(p.left);
  const std::vector<CMatrix> vr = isometries(p.right);

  auto side = [](const LayeredGraph& g, const std::vector<CMatrix>& v) {
    std::vector<Edge> edges;
    std::vector<std::size_t> first(v.size(), 0);
    for (std::size_t u = 0; u < g.num_sources(); ++u) {
      for (std::size_t w = 0; w < g.num_ranges(); ++w) {
        const std::size_t i = u * g.num_ranges() + w;
        first[i] = edges.size();
        for (Eigen::Index k = 0; k < v[i].cols(); ++k) {
          edges.push_back({g.source_vertices()[u] + ">" + g.range_vertices()[w] + "#" + std::to_string(k), u, w});
        }
      }
    }
    return std::pair{LayeredGraph(g.source_layer(), g.source_vertices(), g.range_layer(), g.range_vertices(),
                                  std::move(edges)),
                     first};
  };
  auto [left, left_first] = side(c.left(), vl);
  auto [right, right_first] = side(c.right(), vr);

  std::vector<CellValue> cells;
  const std::size_t nz = c.left().num_ranges();
  const std::size_t nw = c.right().num_ranges();
  for (std::size_t a = 0; a < c.top().num_edges(); ++a) {
    const Edge& te = c.top().edge(a);
    for (std::size_t b = 0; b < c.bottom().num_edges(); ++b) {
      const Edge& be = c.bottom().edge(b);
      const std::size_t li = te.source * nz + be.source;
      const std::size_t ri = te.range * nw + be.range;
      if (vl[li].cols() == 0 || vr[ri].cols() == 0) continue;
      const CMatrix m = vr[ri].adjoint() * cell_block(c, a, b) * vl[li];
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          if (std::abs(m(i, j)) > 1e-14) {
            cells.push_back({{left_first[li] + static_cast<std::size_t>(j), a, right_first[ri] + static_cast<std::size_t>(i), b},
                             m(i, j)});
          }
        }
      }
    }
  }
  Connection out(c.top(), std::move(left), c.bottom(), std::move(right), c.mu(), std::move(cells), c.gamma1(),
                 c.gamma2(), c.base());
  const BiunitarityReport rep = check_biunitarity(out, std::max(tol, 1e-9));
  if (!rep.passed) {
    throw NumericError("compressed summand is not bi-unitary (residual " + std::to_string(rep.residual()) + ")");
  }
  return out;
}

std::vector<Summand> decompose(const Connection& c, std::uint64_t seed, double tol) {
  const EndSplitting split = end_minimal_projections(c, seed, tol);
  const std::vector<IntertwinerFamily> basis = hom_space(c, c);
  std::vector<int> klass(split.projections.size(), -1);
  std::vector<Summand> out;
  for (std::size_t i = 0; i < split.projections.size(); ++i) {
    if (klass[i] >= 0) continue;
    klass[i] = static_cast<int>(out.size());
    out.push_back({compress(c, split.projections[i], tol), 1});
    for (std::size_t j = i + 1; j < split.projections.size(); ++j) {
      if (klass[j] >= 0) continue;
      double link = 0.0;
      for (const auto& x : basis) link = std::max(link, (split.projections[j] * x * split.projections[i]).max_abs());
      if (link > 1e-6) {
        klass[j] = klass[i];
        ++out.back().multiplicity;
      }
    }
  }
  return out;
}

Eigen::MatrixXi vertical_multiplicities(const LayeredGraph& g) {
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(g.num_sources()),
                                            static_cast<Eigen::Index>(g.num_ranges()));
  for (const Edge& e : g.edges()) ++m(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.range));
  return m;
}

std::vector<std::uint64_t> FusionData::powers(std::size_t n) const {
  std::vector<std::uint64_t> l(size(), 0);
  if (n == 0) {
    l[0] = 1;
    return l;
  }
  for (std::size_t c = 0; c < size(); ++c) l[c] = product[0][c];
  for (std::size_t step = 1; step < n; ++step) {
    std::vector<std::uint64_t> next(size(), 0);
    for (std::size_t a = 0; a < size(); ++a) {
      for (std::size_t c = 0; c < size(); ++c) next[c] += l[a] * product[a][c];
    }
    l = std::move(next);
  }
  return l;
}

Connection product_connection(const Connection& w) { return vertical_product(w, renormalize(w, Renormalization::bar)); }

namespace {

bool lex_less(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
  return std::lexicographical_compare(a.reshaped<Eigen::RowMajor>().begin(), a.reshaped<Eigen::RowMajor>().end(),
                                      b.reshaped<Eigen::RowMajor>().begin(), b.reshaped<Eigen::RowMajor>().end());
}

}  // namespace

Irreducibles discover_irreducibles(const Connection& w, std::size_t max_depth, std::uint64_t seed, double tol) {
  const Connection w_tilde = product_connection(w);
  std::vector<Connection> reps{build_identity(w)};
  std::vector<std::size_t> power{0};
  std::vector<std::map<std::size_t, std::size_t>> product;
  std::uint64_t calls = 0;

  auto classify = [&](const Connection& s) -> std::size_t {
    const Eigen::MatrixXi ml = vertical_multiplicities(s.left());
    const Eigen::MatrixXi mr = vertical_multiplicities(s.right());
    for (std::size_t i = 0; i < reps.size(); ++i) {
      if (vertical_multiplicities(reps[i].left()) != ml || vertical_multiplicities(reps[i].right()) != mr) continue;
      if (hom_dimension(s, reps[i]) > 0) return i;
    }
    return reps.size();
  };

  for (std::size_t a = 0; a < reps.size(); ++a) {
    const Connection stacked = a == 0 ? w_tilde : vertical_product(reps[a], w_tilde);
    std::map<std::size_t, std::size_t> row;
    for (const Summand& s : decompose(stacked, seed + calls++, tol)) {
      const std::size_t idx = classify(s.connection);
      if (idx == reps.size()) {
        if (power[a] + 1 > max_depth) {
          throw NumericError("new irreducible connections keep appearing beyond depth " + std::to_string(max_depth));
        }
        reps.push_back(s.connection);
        power.push_back(power[a] + 1);
      }
      row[idx] += s.multiplicity;
    }
    product.push_back(std::move(row));
  }

  const std::size_t count = reps.size();
  std::vector<double> d(count);
  for (std::size_t a = 0; a < count; ++a) {
    d[a] = spectral_radius(vertical_multiplicities(reps[a].left()).cast<double>());
  }

  // Canonical order: identity first, then (d, first power, left and right multiplicities).
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) {
    if (std::abs(d[a] - d[b]) > 1e-9) return d[a] < d[b];
    if (power[a] != power[b]) return power[a] < power[b];
    const Eigen::MatrixXi la = vertical_multiplicities(reps[a].left()), lb = vertical_multiplicities(reps[b].left());
    if (la != lb) return lex_less(la, lb);
    return lex_less(vertical_multiplicities(reps[a].right()), vertical_multiplicities(reps[b].right()));
  });
  std::vector<std::size_t> rank_of(count);
  for (std::size_t i = 0; i < count; ++i) rank_of[order[i]] = i;

  double w_index = 0.0;
  for (double x : d) w_index += x * x;
  double mu_sq = 0.0;
  for (double m : w.mu(corner_x)) mu_sq += m * m;
  const double factor = std::sqrt(w_index / mu_sq);

  Irreducibles out;
  out.w = w.rescaled(factor);
  out.w_tilde = w_tilde.rescaled(factor);
  FusionData& fd = out.fusion;
  fd.w = w_index;
  fd.mu0 = out.w.mu(corner_x);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t a = order[i];
    out.reps.push_back(reps[a].rescaled(factor));
    fd.labels.push_back(std::to_string(i + 1));
    fd.d.push_back(d[a]);
    fd.m.push_back(vertical_multiplicities(reps[a].left()));
    fd.m_right.push_back(vertical_multiplicities(reps[a].right()));
    fd.first_power.push_back(power[a]);
    std::vector<std::size_t> row(count, 0);
    for (auto [c, mult] : product[a]) row[rank_of[c]] = mult;
    fd.product.push_back(std::move(row));
  }

  fd.n.assign(count, std::vector<std::vector<std::size_t>>(count, std::vector<std::size_t>(count, 0)));
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < count; ++b) {
      const Connection ab = vertical_product(out.reps[a], out.reps[b]);
      for (std::size_t c = 0; c < count; ++c) fd.n[a][b][c] = hom_dimension(out.reps[c], ab);
    }
  }
  fd.conj.assign(count, count);
  for (std::size_t a = 0; a < count; ++a) {
    const Connection bar = renormalize(out.reps[a], Renormalization::bar);
    for (std::size_t b = 0; b < count; ++b) {
      if (fd.m[b] == fd.m[a].transpose() && hom_dimension(out.reps[b], bar) > 0) {
        fd.conj[a] = b;
        break;
      }
    }
    if (fd.conj[a] == count) throw NumericError("no conjugate found for label " + fd.labels[a]);
  }
  return out;
}

SectorStatistics sector_statistics(const FusionData& fd, const Connection& w, std::size_t n) {
  SectorStatistics s;
  s.n = n;
  const std::array<LayeredGraph, 2> steps{w.left(), reverse_graph(w.left())};
  s.k = count_paths(steps, w.base(), 2 * n);
  double sum = 0.0;
  for (auto k : s.k) sum += static_cast<double>(k) * static_cast<double>(k);
  s.alpha = std::sqrt(sum);
  for (auto k : s.k) s.kappa.push_back(static_cast<double>(k) / s.alpha);
  s.l = fd.powers(n);
  sum = 0.0;
  for (auto l : s.l) sum += static_cast<double>(l) * static_cast<double>(l);
  s.beta = std::sqrt(sum);
  for (auto l : s.l) s.lambda.push_back(static_cast<double>(l) / s.beta);
  return s;
}

}  // namespace pmpo
