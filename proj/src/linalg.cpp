#include "pmpo/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace pmpo {
namespace {

struct SvdParts {
  Eigen::VectorXd values;  // descending
  CMatrix v;               // full right factor (n x n), empty when not requested
};

// SVD of `a`, reducing tall inputs through a QR step first.  Only the right
// singular vectors are ever needed here.
SvdParts svd_right(const CMatrix& a, bool want_v) {
  SvdParts out;
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (n == 0) return out;
  if (m == 0) {
    out.values = Eigen::VectorXd::Zero(0);
    if (want_v) out.v = CMatrix::Identity(n, n);
    return out;
  }
  CMatrix reduced;
  if (m > n) {
    Eigen::HouseholderQR<CMatrix> qr(a);
    reduced = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    reduced = a;
  }
  const unsigned opts = want_v ? static_cast<unsigned>(Eigen::ComputeFullV) : 0u;
  Eigen::BDCSVD<CMatrix> svd(reduced, opts);
  out.values = svd.singularValues();
  if (want_v) out.v = svd.matrixV();
  if (!out.values.allFinite() || (want_v && !out.v.allFinite())) {
    Eigen::JacobiSVD<CMatrix> slow(reduced, opts);
    out.values = slow.singularValues();
    if (want_v) out.v = slow.matrixV();
  }
  return out;
}

struct Components {
  std::vector<std::vector<Eigen::Index>> columns;  // per component
  std::vector<std::vector<Eigen::Index>> rows;     // per component
  std::vector<Eigen::Index> free_columns;          // no stored entry at all
};

Eigen::Index find_root(std::vector<Eigen::Index>& parent, Eigen::Index i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

Components components_of(const SparseCMatrix& a) {
  const Eigen::Index n = a.cols();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<Eigen::Index> row_anchor(a.rows(), -1);
  std::vector<bool> touched(n, false);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (SparseCMatrix::InnerIterator it(a, c); it; ++it) {
      if (it.value() == cplx{}) continue;
      touched[c] = true;
      const Eigen::Index r = it.row();
      if (row_anchor[r] < 0) {
        row_anchor[r] = c;
      } else {
        const Eigen::Index ra = find_root(parent, row_anchor[r]);
        const Eigen::Index rc = find_root(parent, c);
        if (ra != rc) parent[std::max(ra, rc)] = std::min(ra, rc);
      }
    }
  }
  Components out;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index c = 0; c < n; ++c) {
    if (!touched[c]) {
      out.free_columns.push_back(c);
      continue;
    }
    const Eigen::Index root = find_root(parent, c);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(out.columns.size());
      out.columns.emplace_back();
      out.rows.emplace_back();
    }
    out.columns[slot[root]].push_back(c);
  }
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    if (row_anchor[r] < 0) continue;
    out.rows[slot[find_root(parent, row_anchor[r])]].push_back(r);
  }
  return out;
}

CMatrix dense_block(const SparseCMatrix& a, const std::vector<Eigen::Index>& rows,
                    const std::vector<Eigen::Index>& cols) {
  std::vector<Eigen::Index> row_pos(a.rows(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = static_cast<Eigen::Index>(i);
  CMatrix block = CMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (SparseCMatrix::InnerIterator it(a, cols[j]); it; ++it) {
      if (row_pos[it.row()] >= 0) block(row_pos[it.row()], static_cast<Eigen::Index>(j)) = it.value();
    }
  }
  return block;
}

}  // namespace

Eigen::VectorXd singular_values(const CMatrix& a) { return svd_right(a, false).values; }

std::size_t numerical_rank(const CMatrix& a, RankCut cut) {
  const Eigen::VectorXd s = singular_values(a);
  if (s.size() == 0) return 0;
  const double thr = cut.threshold(s.maxCoeff());
  return static_cast<std::size_t>((s.array() > thr).count());
}

CMatrix null_space(const CMatrix& a, RankCut cut) {
  const Eigen::Index n = a.cols();
  if (n == 0) return CMatrix(0, 0);
  SvdParts parts = svd_right(a, true);
  const double s_max = parts.values.size() ? parts.values.maxCoeff() : 0.0;
  const double thr = cut.threshold(s_max);
  const Eigen::Index rank = static_cast<Eigen::Index>((parts.values.array() > thr).count());
  return parts.v.rightCols(n - rank);
}

std::size_t sparse_rank(const SparseCMatrix& a, RankCut cut) {
  const Components comps = components_of(a);
  std::vector<Eigen::VectorXd> values;
  double s_max = 0.0;
  for (std::size_t i = 0; i < comps.columns.size(); ++i) {
    values.push_back(singular_values(dense_block(a, comps.rows[i], comps.columns[i])));
    if (values.back().size()) s_max = std::max(s_max, values.back().maxCoeff());
  }
  const double thr = cut.threshold(s_max);
  std::size_t rank = 0;
  for (const auto& s : values) rank += static_cast<std::size_t>((s.array() > thr).count());
  return rank;
}

SparseCMatrix sparse_null_space(const SparseCMatrix& a, RankCut cut) {
  const Components comps = components_of(a);
  std::vector<SvdParts> parts;
  double s_max = 0.0;
  for (std::size_t i = 0; i < comps.columns.size(); ++i) {
    parts.push_back(svd_right(dense_block(a, comps.rows[i], comps.columns[i]), true));
    if (parts.back().values.size()) s_max = std::max(s_max, parts.back().values.maxCoeff());
  }
  const double thr = cut.threshold(s_max);

  std::vector<Triplet> entries;
  Eigen::Index out_col = 0;
  // Free columns and component kernels are emitted in column order of their
  // smallest member, so the basis order does not depend on the traversal.
  struct Piece {
    Eigen::Index first;
    int component;  // -1: free column
  };
  std::vector<Piece> pieces;
  for (Eigen::Index c : comps.free_columns) pieces.push_back({c, -1});
  for (std::size_t i = 0; i < comps.columns.size(); ++i) {
    pieces.push_back({comps.columns[i].front(), static_cast<int>(i)});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& l, const Piece& r) { return l.first < r.first; });
  for (const Piece& piece : pieces) {
    if (piece.component < 0) {
      entries.emplace_back(piece.first, out_col++, cplx{1.0, 0.0});
      continue;
    }
    const auto& cols = comps.columns[piece.component];
    const SvdParts& p = parts[piece.component];
    const Eigen::Index n = static_cast<Eigen::Index>(cols.size());
    const Eigen::Index rank = static_cast<Eigen::Index>((p.values.array() > thr).count());
    for (Eigen::Index j = rank; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const cplx v = p.v(i, j);
        if (v != cplx{}) entries.emplace_back(cols[i], out_col, v);
      }
      ++out_col;
    }
  }
  SparseCMatrix out(a.cols(), out_col);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

double max_abs(const SparseCMatrix& a) {
  double m = 0.0;
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    for (SparseCMatrix::InnerIterator it(a, c); it; ++it) m = std::max(m, std::abs(it.value()));
  }
  return m;
}

double max_abs(const CMatrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

SparseCMatrix pruned(const SparseCMatrix& a, double cutoff) {
  SparseCMatrix out = a;
  out.prune([cutoff](const Eigen::Index&, const Eigen::Index&, const cplx& v) { return std::abs(v) > cutoff; });
  return out;
}

}  // namespace pmpo
