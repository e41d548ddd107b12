#include "pmpo/strings.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "pmpo/mpo.hpp"

namespace pmpo {
namespace {

double vertex_weight(const Connection& c, std::size_t steps, std::size_t v) {
  return steps % 2 == 1 ? c.mu(corner_y)[v] : c.mu(corner_x)[v];
}

double v0_square_sum(const Connection& c) {
  double s = 0.0;
  for (double m : c.mu(corner_x)) s += m * m;
  return s;
}

// Walks from x grouped by end vertex.
struct EndGroups {
  std::map<std::size_t, std::vector<std::size_t>> block;
};

EndGroups end_groups(const StringBasis& basis, std::size_t x) {
  EndGroups g;
  for (std::size_t p = 0; p < basis.walks(x).size(); ++p) g.block[basis.walk_end(x, p)].push_back(p);
  return g;
}

}  // namespace

StringTrace::StringTrace(const StringBasis& basis, const Connection& c) : basis_(&basis), w_(v0_square_sum(c)) {
  init(c);
}

StringTrace::StringTrace(const StringBasis& basis, const Connection& c, double w) : basis_(&basis), w_(w) {
  if (std::abs(v0_square_sum(c) - w) > 1e-9 * std::max(1.0, w)) {
    throw InputError("weights are not normalized: sum of mu_x^2 over V0 differs from w");
  }
  init(c);
}

void StringTrace::init(const Connection& c) {
  const std::size_t k = basis_->k();
  const double scale = std::pow(c.gamma1(), -static_cast<double>(k));
  diag_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_->size()));
  weights_ = diag_;
  for (std::size_t x = 0; x < basis_->num_bases(); ++x) block_weight_.push_back(c.mu(corner_x)[x] * c.mu(corner_x)[x] / w_);
  for (std::size_t i = 0; i < basis_->size(); ++i) {
    const auto& e = basis_->entry(i);
    const double mx = c.mu(corner_x)[e.x];
    const double ratio = scale * vertex_weight(c, k, e.end) / mx;
    if (e.p1 == e.p2) diag_(static_cast<Eigen::Index>(i)) = ratio;
    weights_(static_cast<Eigen::Index>(i)) = block_weight_[e.x] * ratio;
  }
}

cplx StringTrace::tr_x(std::size_t x, const Field& f) const {
  const auto [b, e] = basis_->block(x);
  cplx s{};
  for (std::size_t i = b; i < e; ++i) s += diag_(static_cast<Eigen::Index>(i)) * f(static_cast<Eigen::Index>(i));
  return s;
}

cplx StringTrace::tr(const Field& f) const {
  cplx s{};
  for (std::size_t x = 0; x < basis_->num_bases(); ++x) s += block_weight_[x] * tr_x(x, f);
  return s;
}

cplx StringTrace::inner(const Field& a, const Field& b) const {
  return (a.conjugate().array() * b.array() * weights_.cast<cplx>().array()).sum();
}

double StringTrace::norm(const Field& f) const { return std::sqrt(std::max(0.0, inner(f, f).real())); }

Field identity_field(const StringBasis& basis) {
  Field f = Field::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis.entry(i).p1 == basis.entry(i).p2) f(static_cast<Eigen::Index>(i)) = 1.0;
  }
  return f;
}

Field multiply(const StringBasis& basis, const Field& a, const Field& b) {
  Field out = Field::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t x = 0; x < basis.num_bases(); ++x) {
    const EndGroups g = end_groups(basis, x);
    for (const auto& [v, walks] : g.block) {
      const auto n = static_cast<Eigen::Index>(walks.size());
      CMatrix ma(n, n), mb(n, n);
      std::vector<std::size_t> idx(static_cast<std::size_t>(n * n));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const std::size_t s = *basis.find(x, walks[static_cast<std::size_t>(i)], walks[static_cast<std::size_t>(j)]);
          idx[static_cast<std::size_t>(i * n + j)] = s;
          ma(i, j) = a(static_cast<Eigen::Index>(s));
          mb(i, j) = b(static_cast<Eigen::Index>(s));
        }
      }
      const CMatrix prod = ma * mb;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i * n + j)])) = prod(i, j);
      }
    }
  }
  return out;
}

Field adjoint(const StringBasis& basis, const Field& a) {
  Field out(a.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& e = basis.entry(i);
    out(static_cast<Eigen::Index>(*basis.find(e.x, e.p2, e.p1))) = std::conj(a(static_cast<Eigen::Index>(i)));
  }
  return out;
}

Field restrict_to(const StringBasis& basis, const Field& f, std::size_t x) {
  Field out = Field::Zero(f.size());
  const auto [b, e] = basis.block(x);
  const auto n = static_cast<Eigen::Index>(e - b);
  out.segment(static_cast<Eigen::Index>(b), n) = f.segment(static_cast<Eigen::Index>(b), n);
  return out;
}

std::vector<HalfLadderTerm> half_ladder(const Connection& c, const Connection& c_prime, const StringBasis& basis,
                                        std::size_t zeta) {
  const Edge& z = c.left().edge(zeta);
  const std::array<const Connection*, 2> columns{&c, &c_prime};
  std::vector<HalfLadderTerm> out;
  const auto& walks = basis.walks(z.source);
  for (std::size_t p = 0; p < walks.size(); ++p) {
    for (const LadderTerm& t : ladder(columns, zeta, walks[p])) {
      const auto q = basis.find_walk(z.range, t.output);
      if (!q) throw NumericError("half ladder left the string basis");
      out.push_back({p, *q, t.bond, t.value});
    }
  }
  return out;
}

namespace {

using HalfByBond = std::map<std::size_t, std::vector<HalfLadderTerm>>;

HalfByBond by_bond(std::vector<HalfLadderTerm> terms) {
  HalfByBond out;
  for (auto& t : terms) out[t.beta].push_back(t);
  return out;
}

// Appends the triplets of T_{zeta1, zeta2} with rows shifted by row_shift and
// columns left in B_k numbering.  Rows are B_k indices minus row_base.
void append_transport(const StringBasis& basis, std::size_t x, std::size_t y, const HalfByBond& l1,
                      const HalfByBond& l2, Eigen::Index row_base, Eigen::Index row_shift, std::vector<Triplet>& out) {
  for (const auto& [beta, terms1] : l1) {
    const auto it = l2.find(beta);
    if (it == l2.end()) continue;
    for (const HalfLadderTerm& t1 : terms1) {
      for (const HalfLadderTerm& t2 : it->second) {
        const auto col = basis.find(x, t1.p, t2.p);
        const auto row = basis.find(y, t1.q, t2.q);
        if (!col || !row) throw NumericError("transport pairs walks with different ends");
        out.emplace_back(static_cast<Eigen::Index>(*row) - row_base + row_shift, static_cast<Eigen::Index>(*col),
                         t1.value * std::conj(t2.value));
      }
    }
  }
}

void require_a_type(const Connection& c, const StringBasis& basis) {
  if (!is_a_type(c)) throw InputError("transport needs a connection with equal top and bottom graphs");
  if (c.left().num_sources() != basis.num_bases()) throw InputError("string basis does not match the connection");
}

}  // namespace

SparseCMatrix transport_T(const Connection& c, const StringBasis& basis, std::size_t zeta1, std::size_t zeta2) {
  require_a_type(c, basis);
  const Edge& z1 = c.left().edge(zeta1);
  const Edge& z2 = c.left().edge(zeta2);
  if (z1.source != z2.source || z1.range != z2.range) {
    throw InputError("boundary edges of a transport must share their end points");
  }
  const Connection c_prime = renormalize(c, Renormalization::prime);
  std::vector<Triplet> t;
  append_transport(basis, z1.source, z1.range, by_bond(half_ladder(c, c_prime, basis, zeta1)),
                   by_bond(half_ladder(c, c_prime, basis, zeta2)), 0, 0, t);
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseCMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return pruned(m, 1e-14);
}

SparseCMatrix mpo_O_tilde_direct(const Connection& c, const StringBasis& basis) {
  require_a_type(c, basis);
  const Connection c_prime = renormalize(c, Renormalization::prime);
  std::vector<Triplet> t;
  for (std::size_t zeta = 0; zeta < c.left().num_edges(); ++zeta) {
    const Edge& z = c.left().edge(zeta);
    const HalfByBond l = by_bond(half_ladder(c, c_prime, basis, zeta));
    append_transport(basis, z.source, z.range, l, l, 0, 0, t);
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseCMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return pruned(m, 1e-14);
}

namespace {

// Orthonormalizes the columns of k in the diagonal inner product `weights`.
// Columns with overlapping supports are treated together; disjoint groups are
// already orthogonal.
SparseCMatrix orthonormalize(const SparseCMatrix& k, const Eigen::VectorXd& weights) {
  const Eigen::Index nc = k.cols();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(nc));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  std::vector<Eigen::Index> owner(static_cast<std::size_t>(k.rows()), -1);
  for (Eigen::Index c = 0; c < nc; ++c) {
    for (SparseCMatrix::InnerIterator it(k, c); it; ++it) {
      Eigen::Index& o = owner[static_cast<std::size_t>(it.row())];
      if (o < 0) {
        o = c;
      } else {
        const Eigen::Index a = find(o), b = find(c);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  std::map<Eigen::Index, std::vector<Eigen::Index>> groups;
  for (Eigen::Index c = 0; c < nc; ++c) groups[find(c)].push_back(c);

  std::vector<Triplet> out;
  for (const auto& [root, cols] : groups) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index c : cols) {
      for (SparseCMatrix::InnerIterator it(k, c); it; ++it) rows.push_back(it.row());
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::map<Eigen::Index, Eigen::Index> pos;
    for (std::size_t i = 0; i < rows.size(); ++i) pos[rows[i]] = static_cast<Eigen::Index>(i);
    CMatrix block = CMatrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (SparseCMatrix::InnerIterator it(k, cols[j]); it; ++it) {
        block(pos[it.row()], static_cast<Eigen::Index>(j)) = it.value() * std::sqrt(weights(it.row()));
      }
    }
    Eigen::HouseholderQR<CMatrix> qr(block);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(block.rows(), block.cols());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const cplx v = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / std::sqrt(weights(rows[i]));
        if (std::abs(v) > 1e-15) out.emplace_back(rows[i], cols[j], v);
      }
    }
  }
  SparseCMatrix m(k.rows(), nc);
  m.setFromTriplets(out.begin(), out.end());
  return m;
}

}  // namespace

FlatFields flat_fields(const Connection& w, std::size_t k, RankCut cut) {
  const Connection w_tilde = vertical_product(w, renormalize(w, Renormalization::bar));
  const Connection w_tilde_prime = renormalize(w_tilde, Renormalization::prime);
  const StringBasis basis(w.top(), k);
  const LayeredGraph& vert = w_tilde.left();

  std::vector<HalfByBond> halves;
  halves.reserve(vert.num_edges());
  for (std::size_t zeta = 0; zeta < vert.num_edges(); ++zeta) {
    halves.push_back(by_bond(half_ladder(w_tilde, w_tilde_prime, basis, zeta)));
  }

  FlatFields out;
  out.k = k;
  std::vector<Triplet> t;
  Eigen::Index rows = 0;
  for (std::size_t x = 0; x < vert.num_sources(); ++x) {
    for (std::size_t y = 0; y < vert.num_ranges(); ++y) {
      const auto edges = vert.edges_between(x, y);
      const auto [yb, ye] = basis.block(y);
      const auto height = static_cast<Eigen::Index>(ye - yb);
      for (std::size_t z1 : edges) {
        for (std::size_t z2 : edges) {
          append_transport(basis, x, y, halves[z1], halves[z2], static_cast<Eigen::Index>(yb), rows, t);
          if (z1 == z2) {
            for (Eigen::Index r = 0; r < height; ++r) {
              t.emplace_back(rows + r, static_cast<Eigen::Index>(yb) + r, cplx{-1.0, 0.0});
            }
          }
          rows += height;
          ++out.transports;
        }
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseCMatrix system(rows, n);
  system.setFromTriplets(t.begin(), t.end());
  system = pruned(system, 1e-14);
  out.equations = static_cast<std::size_t>(rows);

  const SparseCMatrix kernel = sparse_null_space(system, cut);
  const StringTrace trace(basis, w);
  const SparseCMatrix q = orthonormalize(kernel, trace.weights());
  out.dimension = static_cast<std::size_t>(q.cols());
  out.basis = q;
  return out;
}

double flatness_residual(const Connection& c, const StringBasis& basis, const SparseCMatrix& fields) {
  require_a_type(c, basis);
  const Connection c_prime = renormalize(c, Renormalization::prime);
  const LayeredGraph& vert = c.left();
  std::vector<HalfByBond> halves;
  for (std::size_t zeta = 0; zeta < vert.num_edges(); ++zeta) {
    halves.push_back(by_bond(half_ladder(c, c_prime, basis, zeta)));
  }
  double worst = 0.0;
  const auto n = static_cast<Eigen::Index>(basis.size());
  for (std::size_t x = 0; x < vert.num_sources(); ++x) {
    for (std::size_t y = 0; y < vert.num_ranges(); ++y) {
      const auto [yb, ye] = basis.block(y);
      for (std::size_t z1 : vert.edges_between(x, y)) {
        for (std::size_t z2 : vert.edges_between(x, y)) {
          std::vector<Triplet> t;
          append_transport(basis, x, y, halves[z1], halves[z2], 0, 0, t);
          if (z1 == z2) {
            for (std::size_t r = yb; r < ye; ++r) {
              t.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r), cplx{-1.0, 0.0});
            }
          }
          SparseCMatrix m(n, n);
          m.setFromTriplets(t.begin(), t.end());
          worst = std::max(worst, max_abs(SparseCMatrix(m * fields)));
        }
      }
    }
  }
  return worst;
}

Field jones_projection(const StringBasis& basis, const Connection& c, std::size_t i) {
  const std::size_t k = basis.k();
  if (i < 1 || i + 1 > k) throw InputError("Jones projection index must lie in 1..k-1");
  const LayeredGraph& g = c.top();
  Field e = Field::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t s = 0; s < basis.size(); ++s) {
    const auto& entry = basis.entry(s);
    const Word& p1 = basis.walks(entry.x)[entry.p1];
    const Word& p2 = basis.walks(entry.x)[entry.p2];
    bool ok = p1[i - 1] == p1[i] && p2[i - 1] == p2[i];
    for (std::size_t j = 0; ok && j < k; ++j) {
      if (j != i - 1 && j != i && p1[j] != p2[j]) ok = false;
    }
    if (!ok) continue;
    const Word alpha(p1.begin(), p1.begin() + static_cast<std::ptrdiff_t>(i - 1));
    const Word a1(p1.begin(), p1.begin() + static_cast<std::ptrdiff_t>(i));
    const Word a2(p2.begin(), p2.begin() + static_cast<std::ptrdiff_t>(i));
    const double m_alpha = vertex_weight(c, i - 1, *walk_end(g, entry.x, alpha));
    const double m1 = vertex_weight(c, i, *walk_end(g, entry.x, a1));
    const double m2 = vertex_weight(c, i, *walk_end(g, entry.x, a2));
    e(static_cast<Eigen::Index>(s)) = std::sqrt(m1 * m2) / (c.gamma1() * m_alpha);
  }
  return e;
}

TemperleyLiebReport temperley_lieb(const StringBasis& basis, const Connection& c, RankCut cut) {
  const std::size_t k = basis.k();
  const StringTrace trace(basis, c);
  std::vector<Field> e;
  for (std::size_t i = 1; i < k; ++i) e.push_back(jones_projection(basis, c, i));
  auto mx = [](const Field& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; };
  const double g2 = 1.0 / (c.gamma1() * c.gamma1());

  TemperleyLiebReport rep;
  for (std::size_t i = 0; i < e.size(); ++i) {
    rep.idempotent = std::max(rep.idempotent, mx(multiply(basis, e[i], e[i]) - e[i]));
    rep.self_adjoint = std::max(rep.self_adjoint, mx(adjoint(basis, e[i]) - e[i]));
    for (std::size_t j = 0; j < e.size(); ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap == 1) {
        const Field eje = multiply(basis, multiply(basis, e[i], e[j]), e[i]);
        rep.braid = std::max(rep.braid, mx(eje - g2 * e[i]));
      } else if (gap >= 2) {
        rep.commute = std::max(rep.commute, mx(multiply(basis, e[i], e[j]) - multiply(basis, e[j], e[i])));
      }
    }
  }

  // Closure of {1} under right multiplication by the e_i, kept st-2 orthonormal.
  std::vector<Field> ortho;
  std::vector<Field> queue{identity_field(basis)};
  while (!queue.empty()) {
    Field f = std::move(queue.back());
    queue.pop_back();
    const double size = trace.norm(f);
    Field r = f;
    for (const Field& q : ortho) r -= trace.inner(q, r) * q;
    for (const Field& q : ortho) r -= trace.inner(q, r) * q;
    const double rest = trace.norm(r);
    if (rest <= cut.threshold(size)) continue;
    ortho.push_back(r / rest);
    for (const Field& ei : e) queue.push_back(multiply(basis, f, ei));
  }
  rep.span_dimension = ortho.size();
  return rep;
}

}  // namespace pmpo
