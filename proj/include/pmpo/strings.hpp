#pragma once

#include <cstdint>
#include <vector>

#include "pmpo/connection.hpp"
#include "pmpo/paths.hpp"

namespace pmpo {

/// Fields on B_k are coefficient vectors in StringBasis order.
using Field = CVector;

/// Traces on B_k.  tr_x((p1, p2)) = delta(p1, p2) gamma1^-k mu_r / mu_x and
/// tr = sum_x (mu_x^2 / w) tr_x.  `w` defaults to sum over V0 of mu_x^2,
/// which makes tr(1) = 1 for any overall scale of mu.
class StringTrace {
 public:
  StringTrace(const StringBasis& basis, const Connection& c);
  /// Throws InputError unless sum over V0 of mu_x^2 equals w.
  StringTrace(const StringBasis& basis, const Connection& c, double w);

  cplx tr_x(std::size_t x, const Field& f) const;
  cplx tr(const Field& f) const;
  /// tr(a* b)
  cplx inner(const Field& a, const Field& b) const;
  double norm(const Field& f) const;
  /// Diagonal Gram weights of the basis: tr((p1,p2)* (p1,p2)).
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  void init(const Connection& c);

  const StringBasis* basis_;
  double w_ = 0.0;
  Eigen::VectorXd diag_;     // tr_x of each basis element (nonzero on p1 == p2)
  Eigen::VectorXd weights_;  // mu_x mu_r / (w gamma1^k)
  std::vector<double> block_weight_;  // mu_x^2 / w
};

Field identity_field(const StringBasis& basis);
Field multiply(const StringBasis& basis, const Field& a, const Field& b);
Field adjoint(const StringBasis& basis, const Field& a);
/// The field that equals `f` at x and vanishes elsewhere.
Field restrict_to(const StringBasis& basis, const Field& f, std::size_t x);

/// Half ladder from the left bond zeta along the walk p (input) to the walk q
/// (output), ending in the bond beta.  Columns alternate c and its prime
/// renormalization.
struct HalfLadderTerm {
  std::size_t p;
  std::size_t q;
  std::size_t beta;
  cplx value;
};
std::vector<HalfLadderTerm> half_ladder(const Connection& c, const Connection& c_prime, const StringBasis& basis,
                                        std::size_t zeta);

/// T_{zeta1, zeta2}: B_k -> B_k, nonzero only from Str_x to Str_y where
/// zeta1, zeta2: x -> y are left vertical edges of the a-type connection c.
/// Entry ((q1, q2), (p1, p2)) = sum_beta L(zeta1; p1, q1; beta) conj L(zeta2; p2, q2; beta).
SparseCMatrix transport_T(const Connection& c, const StringBasis& basis, std::size_t zeta1, std::size_t zeta2);

/// Sum over zeta of T_{zeta, zeta}.
SparseCMatrix mpo_O_tilde_direct(const Connection& c, const StringBasis& basis);

struct FlatFields {
  std::size_t k = 0;
  std::size_t dimension = 0;
  SparseCMatrix basis;  // columns: st-2 orthonormal flat fields
  std::size_t equations = 0;
  std::size_t transports = 0;  // number of (zeta1, zeta2) pairs imposed
};

/// Fields sigma with T_{zeta1,zeta2}(sigma_x) = delta(zeta1, zeta2) sigma_y for
/// all left vertical edges zeta1, zeta2: x -> y of W-tilde = W . W-bar.
FlatFields flat_fields(const Connection& w, std::size_t k, RankCut cut = {});

/// max over zeta1, zeta2: x -> y of |T_{zeta1,zeta2}(sigma_x) - delta sigma_y|
/// for the a-type connection c, over all columns of `fields`.
double flatness_residual(const Connection& c, const StringBasis& basis, const SparseCMatrix& fields);

/// Jones projection e_i in B_k (1 <= i <= k-1), built on the horizontal graph
/// of `c` with its weights and gamma1.
Field jones_projection(const StringBasis& basis, const Connection& c, std::size_t i);

struct TemperleyLiebReport {
  double idempotent = 0.0;    // max_i |e_i^2 - e_i|
  double self_adjoint = 0.0;  // max_i |e_i* - e_i|
  double braid = 0.0;         // max |e_i e_j e_i - gamma1^-2 e_i|, |i - j| = 1
  double commute = 0.0;       // max |e_i e_j - e_j e_i|, |i - j| >= 2
  std::size_t span_dimension = 0;
  double max() const { return std::max({idempotent, self_adjoint, braid, commute}); }
};

/// Checks the relations and the dimension of the algebra generated by
/// 1, e_1, ..., e_{k-1} (rank of its st-2 Gram matrix).
TemperleyLiebReport temperley_lieb(const StringBasis& basis, const Connection& c, RankCut cut = {});

}  // namespace pmpo
