#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmpo/connection.hpp"

namespace pmpo {

/// One matrix per ordered vertex pair on each vertical side, mapping the
/// source connection's vertical edges u->u' to the target's.
/// Pair (u, u') of the left side is stored at u * n_left + u'.
struct IntertwinerFamily {
  std::vector<CMatrix> left;
  std::vector<CMatrix> right;

  IntertwinerFamily adjoint() const;
  IntertwinerFamily operator*(const IntertwinerFamily& other) const;  // blockwise composition
  IntertwinerFamily operator+(const IntertwinerFamily& other) const;
  IntertwinerFamily operator-(const IntertwinerFamily& other) const;
  IntertwinerFamily scaled(cplx s) const;
  double max_abs() const;
  CVector flatten() const;
  std::size_t size() const;
};

/// The identity family of a connection.
IntertwinerFamily identity_family(const Connection& c);

/// max over cells of |T_R S - D T_L|.
double intertwining_residual(const Connection& src, const Connection& dst, const IntertwinerFamily& t);

/// Orthonormal basis of intertwiners src -> dst.  Both connections must share
/// their top and bottom graphs.  Rank decisions use 1e-8 * max(1, s_max).
std::vector<IntertwinerFamily> hom_space(const Connection& src, const Connection& dst);
std::size_t hom_dimension(const Connection& src, const Connection& dst);

struct EndSplitting {
  std::vector<IntertwinerFamily> projections;
  double adjoint_deviation = 0.0;
  std::size_t end_dimension = 0;
  std::size_t reseeds = 0;
};

/// Pairwise orthogonal minimal projections of End(c) summing to 1.
/// Throws NumericError when End is not closed under the adjoint or when no
/// spectral gap is found after 8 reseeds.
EndSplitting end_minimal_projections(const Connection& c, std::uint64_t seed, double tol = 1e-9);

/// The summand cut out by the projection p; checked for bi-unitarity.
Connection compress(const Connection& c, const IntertwinerFamily& p, double tol = 1e-9);

struct Summand {
  Connection connection;
  std::size_t multiplicity = 0;
};

std::vector<Summand> decompose(const Connection& c, std::uint64_t seed = 1, double tol = 1e-9);

/// Vertical multiplicity matrix of a side (rows = source, columns = range).
Eigen::MatrixXi vertical_multiplicities(const LayeredGraph& g);

struct FusionData {
  std::vector<std::string> labels;
  std::vector<double> d;
  double w = 0.0;
  /// n[a][b][c]: multiplicity of W_c in the vertical product (W_a above W_b).
  std::vector<std::vector<std::vector<std::size_t>>> n;
  /// m[a](x, y) = number of left vertical edges x -> y of W_a.
  std::vector<Eigen::MatrixXi> m;
  std::vector<Eigen::MatrixXi> m_right;
  std::vector<std::size_t> conj;
  /// product[a][c]: multiplicity of W_c in W_a stacked on W-tilde.
  std::vector<std::vector<std::size_t>> product;
  std::vector<std::size_t> first_power;
  std::vector<double> mu0;  // normalized weights on V0

  std::size_t size() const { return labels.size(); }
  /// L^n: multiplicities of the W_a in the n-th power of W-tilde.
  std::vector<std::uint64_t> powers(std::size_t n) const;
};

struct Irreducibles {
  FusionData fusion;
  std::vector<Connection> reps;  // W_a in label order, weights normalized
  Connection w;                  // original connection, weights normalized
  Connection w_tilde;
};

/// W-tilde = W stacked on its bar renormalization.
Connection product_connection(const Connection& w);

/// Breadth-first closure of the irreducible summands of powers of W-tilde.
/// Throws NumericError when new sectors still appear beyond `max_depth`.
Irreducibles discover_irreducibles(const Connection& w, std::size_t max_depth = 12, std::uint64_t seed = 1,
                                   double tol = 1e-9);

struct SectorStatistics {
  std::size_t n = 0;
  std::vector<std::uint64_t> k;  // K_x^n, x in V0
  double alpha = 0.0;
  std::vector<double> kappa;
  std::vector<std::uint64_t> l;  // L_a^n
  double beta = 0.0;
  std::vector<double> lambda;
};

SectorStatistics sector_statistics(const FusionData& fd, const Connection& w, std::size_t n);

}  // namespace pmpo
