#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pmpo/linalg.hpp"

namespace pmpo {

/// Two-level Bratteli diagram from a root *: k[v] edges * -> v on level 1,
/// m(v, u) edges v -> u from level 1 to level 2, and trace weights t[u] of the
/// minimal projections on level 2 (scaled so that tr(1) = 1).
struct TwoLevelBratteli {
  std::vector<std::size_t> k;
  Eigen::MatrixXi m;
  std::vector<double> t;
};

/// A full path * -> v -> u: level-1 edge xi (0 <= xi < k[v]) and level-2 edge eta.
struct BratteliPath {
  std::size_t v;
  std::size_t xi;
  std::size_t eta;
};

/// C = sum over u of the full matrix algebra on paths * -> u, and its level-1
/// subalgebra B embedded by (xi1, xi2) -> sum_eta (xi1.eta, xi2.eta).
class TwoLevelAlgebra {
 public:
  explicit TwoLevelAlgebra(TwoLevelBratteli diagram);

  using Element = std::vector<CMatrix>;  // one block per level-2 vertex

  const TwoLevelBratteli& diagram() const { return d_; }
  const std::vector<BratteliPath>& paths(std::size_t u) const { return paths_[u]; }
  std::size_t num_blocks() const { return paths_.size(); }

  Element zero() const;
  Element identity() const;
  Element random(std::mt19937_64& rng) const;
  /// Image of an element of B, given as one K_v x K_v block per level-1 vertex.
  Element embed(const std::vector<CMatrix>& b) const;
  std::vector<CMatrix> random_level_one(std::mt19937_64& rng) const;

  cplx trace(const Element& c) const;
  double norm2(const Element& c) const;  // sqrt(tr(c* c))

  /// E((xi1.eta1, xi2.eta2)) = delta(xi1, xi2) / K_r(xi1) sum_xi (xi.eta1, xi.eta2).
  Element expectation(const Element& c) const;

 private:
  TwoLevelBratteli d_;
  std::vector<std::vector<BratteliPath>> paths_;
};

TwoLevelAlgebra::Element operator*(const TwoLevelAlgebra::Element& a, const TwoLevelAlgebra::Element& b);
TwoLevelAlgebra::Element operator-(const TwoLevelAlgebra::Element& a, const TwoLevelAlgebra::Element& b);
TwoLevelAlgebra::Element operator+(const TwoLevelAlgebra::Element& a, const TwoLevelAlgebra::Element& b);
TwoLevelAlgebra::Element scaled(const TwoLevelAlgebra::Element& a, cplx s);
double max_abs(const TwoLevelAlgebra::Element& a);

/// Random connected diagram with 1..3 level-1 and 1..3 level-2 vertices, edge
/// multiplicities up to 3 and random positive trace weights.
TwoLevelBratteli random_bratteli(std::mt19937_64& rng);

}  // namespace pmpo
