#include "pmpo/mpo.hpp"

#include <cmath>
#include <map>

namespace pmpo {
namespace {

constexpr double prune_cutoff = 1e-14;

SparseCMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& t) {
  SparseCMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return pruned(m, prune_cutoff);
}

void require_loop_graph(const Connection& a, const LoopBasis& basis) {
  if (!is_a_type(a)) throw InputError("matrix product operators need a connection with equal top and bottom graphs");
  const Word& probe = basis.size() ? basis.word(0) : Word{};
  if (basis.size() && !walk_end(a.top(), basis.base(0), probe)) {
    throw InputError("loop basis does not live on the horizontal graph of the connection");
  }
}

// Weight of the end vertex of a length-k walk from V0.
double end_weight(const Connection& w, std::size_t k, std::size_t v) {
  return k % 2 == 1 ? w.mu(corner_y)[v] : w.mu(corner_x)[v];
}

}  // namespace

std::vector<LadderTerm> ladder(std::span<const Connection* const> columns, std::size_t start_bond,
                               const Word& input) {
  std::map<std::pair<Word, std::size_t>, cplx> states{{{Word{}, start_bond}, cplx{1.0, 0.0}}};
  for (std::size_t j = 0; j < input.size(); ++j) {
    const Connection& c = *columns[j % columns.size()];
    std::map<std::pair<Word, std::size_t>, cplx> next;
    for (const auto& [key, amp] : states) {
      for (std::size_t i : c.cells_at_left_top(key.second, input[j])) {
        const CellValue& cv = c.cells()[i];
        Word out = key.first;
        out.push_back(static_cast<std::uint32_t>(cv.cell.bottom));
        next[{std::move(out), cv.cell.right}] += amp * cv.value;
      }
    }
    states = std::move(next);
  }
  std::vector<LadderTerm> terms;
  terms.reserve(states.size());
  for (auto& [key, v] : states) {
    if (v != cplx{}) terms.push_back({key.first, key.second, v});
  }
  return terms;
}

Connection four_tensor(const Connection& a) {
  const Connection joined = horizontal_product(a, renormalize(a, Renormalization::prime));
  std::vector<CellValue> cells;
  cells.reserve(joined.cells().size());
  for (const CellValue& cv : joined.cells()) {
    cells.push_back({cv.cell, std::sqrt(joined.renormalization_factor(cv.cell)) * cv.value});
  }
  return Connection(joined.top(), joined.left(), joined.bottom(), joined.right(), joined.mu(), std::move(cells),
                    joined.gamma1(), joined.gamma2(), joined.base());
}

MPOOperator mpo_O(const Connection& a, const LoopBasis& basis) {
  require_loop_graph(a, basis);
  const Connection a_prime = renormalize(a, Renormalization::prime);
  const std::array<const Connection*, 2> columns{&a, &a_prime};
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t zeta : a.left().edges_from(basis.base(i))) {
      for (const LadderTerm& term : ladder(columns, zeta, basis.word(i))) {
        if (term.bond != zeta) continue;
        const auto row = basis.find(term.output);
        if (!row) throw NumericError("ladder produced a word outside the loop basis");
        t.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(i), term.value);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  return {from_triplets(n, n, t), basis.k(), "O"};
}

MPOOperator mpo_O_from_four_tensor(const Connection& four, const Connection& a, const LoopBasis& basis) {
  require_loop_graph(a, basis);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  compose_graphs(a.top(), reverse_graph(a.top()), &pairs);
  if (pairs.size() != four.top().num_edges()) throw InputError("four-tensor does not match the connection");
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> pair_index;
  for (std::size_t i = 0; i < pairs.size(); ++i) pair_index[pairs[i]] = i;

  const std::array<const Connection*, 1> columns{&four};
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Word& w = basis.word(i);
    Word blocks;
    for (std::size_t j = 0; j < w.size(); j += 2) {
      blocks.push_back(static_cast<std::uint32_t>(pair_index.at({w[j], w[j + 1]})));
    }
    for (std::size_t zeta : four.left().edges_from(basis.base(i))) {
      for (const LadderTerm& term : ladder(columns, zeta, blocks)) {
        if (term.bond != zeta) continue;
        Word out;
        for (std::uint32_t p : term.output) {
          out.push_back(static_cast<std::uint32_t>(pairs[p].first));
          out.push_back(static_cast<std::uint32_t>(pairs[p].second));
        }
        const auto row = basis.find(out);
        if (!row) throw NumericError("ladder produced a word outside the loop basis");
        t.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(i), term.value);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  return {from_triplets(n, n, t), basis.k(), "O(four-tensor)"};
}

MPOOperator pmpo_P(const Irreducibles& irr, const std::vector<MPOOperator>& o) {
  const FusionData& fd = irr.fusion;
  if (o.size() != fd.size() || o.empty()) throw InputError("one operator per label is required");
  SparseCMatrix p = o[0].matrix * cplx{fd.d[0] / fd.w, 0.0};
  for (std::size_t a = 1; a < o.size(); ++a) p += o[a].matrix * cplx{fd.d[a] / fd.w, 0.0};
  return {pruned(p, prune_cutoff), o[0].k, "P"};
}

MPOOperator pmpo_P(const Irreducibles& irr, const LoopBasis& basis) {
  std::vector<MPOOperator> o;
  for (const Connection& rep : irr.reps) o.push_back(mpo_O(rep, basis));
  return pmpo_P(irr, o);
}

std::size_t operator_rank(const SparseCMatrix& m, RankCut cut) { return sparse_rank(m, cut); }

SparseCMatrix shift2(const LoopBasis& basis) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Word& w = basis.word(i);
    Word rotated(w.begin() + 2, w.end());
    rotated.push_back(w[0]);
    rotated.push_back(w[1]);
    const auto row = basis.find(rotated);
    if (!row) throw NumericError("rotated loop missing from the basis");
    t.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(i), cplx{1.0, 0.0});
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseCMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

namespace {

struct PhiEntry {
  std::size_t string_index;
  double factor;
};

std::vector<PhiEntry> phi_entries(const LoopBasis& loops, const StringBasis& strings, const Connection& w) {
  if (loops.k() != strings.k() || loops.size() != strings.size()) {
    throw InputError("loop and string bases have different lengths");
  }
  const std::size_t k = loops.k();
  std::vector<PhiEntry> out;
  out.reserve(loops.size());
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const Word& word = loops.word(i);
    const std::size_t x = loops.base(i);
    const Word first(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(k));
    const Word second(word.rbegin(), word.rbegin() + static_cast<std::ptrdiff_t>(k));
    const auto p1 = strings.find_walk(x, first);
    const auto p2 = strings.find_walk(x, second);
    if (!p1 || !p2) throw NumericError("loop halves are not walks of the string basis");
    const auto s = strings.find(x, *p1, *p2);
    if (!s) throw NumericError("loop halves end at different vertices");
    const double r = end_weight(w, k, strings.walk_end(x, *p1));
    out.push_back({*s, std::sqrt(w.mu(corner_x)[x] / r)});
  }
  return out;
}

}  // namespace

SparseCMatrix phi_map(const LoopBasis& loops, const StringBasis& strings, const Connection& w) {
  std::vector<Triplet> t;
  const auto entries = phi_entries(loops, strings, w);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    t.emplace_back(static_cast<Eigen::Index>(entries[i].string_index), static_cast<Eigen::Index>(i),
                   cplx{entries[i].factor, 0.0});
  }
  const auto n = static_cast<Eigen::Index>(loops.size());
  SparseCMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseCMatrix phi_inverse(const LoopBasis& loops, const StringBasis& strings, const Connection& w) {
  std::vector<Triplet> t;
  const auto entries = phi_entries(loops, strings, w);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    t.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(entries[i].string_index),
                   cplx{1.0 / entries[i].factor, 0.0});
  }
  const auto n = static_cast<Eigen::Index>(loops.size());
  SparseCMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

MPOOperator to_strings(const MPOOperator& o, const LoopBasis& loops, const StringBasis& strings,
                       const Connection& w) {
  SparseCMatrix m = phi_map(loops, strings, w) * o.matrix * phi_inverse(loops, strings, w);
  return {pruned(m, prune_cutoff), o.k, o.tag + "~"};
}

}  // namespace pmpo
