#pragma once

#include <span>
#include <string>
#include <vector>

#include "pmpo/connection.hpp"
#include "pmpo/decomp.hpp"
#include "pmpo/paths.hpp"

namespace pmpo {

/// One term of a ladder contraction: the output word read along the bottom,
/// the last vertical bond, and the summed product of cell values.
struct LadderTerm {
  Word output;
  std::size_t bond = 0;
  cplx value;
};

/// Contracts a row of cells over `input` (top edges, one per column), entering
/// through the left vertical edge `start_bond`.  Column j uses
/// columns[j % columns.size()]; bonds between columns are summed.  Terms are
/// sorted by (output, bond).
std::vector<LadderTerm> ladder(std::span<const Connection* const> columns, std::size_t start_bond,
                               const Word& input);

struct MPOOperator {
  SparseCMatrix matrix;
  std::size_t k = 0;
  std::string tag;
};

/// Two-cell block W_a W'_a with the weight factor (mu_x mu_w / (mu_y mu_z))^(1/4)
/// taken over its outer corners.  Horizontal edges pair two G-edges.
Connection four_tensor(const Connection& a);

/// O_a^k on the loop basis: periodic ladder of 2k cells alternating W_a and
/// W'_a, input on top, output on the bottom.
MPOOperator mpo_O(const Connection& a, const LoopBasis& basis);

/// The same operator contracted as a ring of k four-tensors.
MPOOperator mpo_O_from_four_tensor(const Connection& four, const Connection& a, const LoopBasis& basis);

/// P^k = sum_a (d_a / w) O_a^k.
MPOOperator pmpo_P(const Irreducibles& irr, const LoopBasis& basis);
MPOOperator pmpo_P(const Irreducibles& irr, const std::vector<MPOOperator>& o);

/// Singular values above cut.threshold(s_max), computed per connected block.
std::size_t operator_rank(const SparseCMatrix& m, RankCut cut = {});

/// Cyclic shift of every loop by two steps: (e1, ..., e2k) -> (e3, ..., e2k, e1, e2).
SparseCMatrix shift2(const LoopBasis& basis);

/// Phi^k: loop xi1.xi2 at x -> sqrt(mu_x / mu_r(xi1)) (xi1, reversed xi2).
/// Rows index the string basis, columns the loop basis.
SparseCMatrix phi_map(const LoopBasis& loops, const StringBasis& strings, const Connection& w);
SparseCMatrix phi_inverse(const LoopBasis& loops, const StringBasis& strings, const Connection& w);

/// Phi O Phi^-1 on B_k.
MPOOperator to_strings(const MPOOperator& o, const LoopBasis& loops, const StringBasis& strings,
                       const Connection& w);

}  // namespace pmpo
