#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "pmpo/mpo.hpp"
#include "pmpo/strings.hpp"
#include "support.hpp"

namespace pmpo {
namespace {

using testing::dense;
using testing::irreducibles;

std::vector<MPOOperator> all_O(const Irreducibles& irr, const LoopBasis& basis) {
  std::vector<MPOOperator> o;
  for (const Connection& a : irr.reps) o.push_back(mpo_O(a, basis));
  return o;
}

TEST(Paths, WalksAndLoops) {
  const LayeredGraph g = build_dynkin("D5").top();
  const std::vector<LayeredGraph> steps{g, reverse_graph(g)};
  for (std::size_t k = 1; k <= 4; ++k) {
    const LoopBasis basis(g, k);
    std::size_t total = 0;
    for (std::size_t x = 0; x < g.num_sources(); ++x) {
      const auto [b, e] = basis.block(x);
      EXPECT_EQ(e - b, count_loops(steps, x, 2 * k));
      total += e - b;
      for (std::size_t i = b; i < e; ++i) {
        EXPECT_EQ(basis.base(i), x);
        EXPECT_EQ(walk_end(g, x, basis.word(i)), x);
        EXPECT_EQ(basis.find(basis.word(i)), i);
      }
    }
    EXPECT_EQ(total, basis.size());
  }
}

TEST(Paths, StringBasisCountsMatchLoops) {
  for (const std::string name : {"A4", "E6"}) {
    const LayeredGraph g = build_dynkin(name).top();
    for (std::size_t k = 1; k <= 3; ++k) {
      EXPECT_EQ(StringBasis(g, k).size(), LoopBasis(g, k).size()) << name;
      const auto walks = walks_from(g, 0, k);
      EXPECT_TRUE(std::is_sorted(walks.begin(), walks.end()));
      const auto ends = count_paths(std::vector<LayeredGraph>{g, reverse_graph(g)}, 0, k);
      EXPECT_EQ(walks.size(), std::accumulate(ends.begin(), ends.end(), std::uint64_t{0}));
    }
  }
}

TEST(Mpo, RanksMatchKnownDimensions) {
  const std::vector<std::size_t> a3{1, 2, 4, 8}, a4{1, 2, 5, 13}, t2{4, 16, 64, 256};
  for (const auto& [spec, want] : {std::pair{"dynkin:A3", a3}, std::pair{"dynkin:A4", a4}, std::pair{"trivial:2", t2}}) {
    const Irreducibles& irr = irreducibles(spec);
    for (std::size_t k = 1; k <= 4; ++k) {
      const LoopBasis basis(irr.w.top(), k);
      EXPECT_EQ(operator_rank(pmpo_P(irr, basis).matrix), want[k - 1]) << spec << " k=" << k;
    }
  }
}

TEST(Mpo, IdentitySectorActsTrivially) {
  for (const auto& spec : testing::small_specs()) {
    const Irreducibles& irr = irreducibles(spec);
    const LoopBasis basis(irr.w.top(), 2);
    const CMatrix o = dense(mpo_O(irr.reps[0], basis).matrix);
    EXPECT_LT(max_abs(CMatrix(o - CMatrix::Identity(o.rows(), o.cols()))), 1e-12) << spec;
  }
}

TEST(Mpo, ProjectorAndFusion) {
  for (const auto& spec : testing::small_specs()) {
    const Irreducibles& irr = irreducibles(spec);
    const FusionData& fd = irr.fusion;
    for (std::size_t k = 1; k <= 3; ++k) {
      const LoopBasis basis(irr.w.top(), k);
      const auto o = all_O(irr, basis);
      const SparseCMatrix p = pmpo_P(irr, o).matrix;
      EXPECT_LT(max_abs(SparseCMatrix(p * p - p)), 1e-10) << spec << " k=" << k;
      EXPECT_LT(max_abs(SparseCMatrix(SparseCMatrix(p.adjoint()) - p)), 1e-10) << spec << " k=" << k;
      for (std::size_t a = 0; a < fd.size(); ++a) {
        for (std::size_t b = 0; b < fd.size(); ++b) {
          SparseCMatrix diff = o[a].matrix * o[b].matrix;
          for (std::size_t c = 0; c < fd.size(); ++c) {
            diff -= static_cast<double>(fd.n[b][a][c]) * o[c].matrix;
          }
          EXPECT_LT(max_abs(diff), 1e-10) << spec << " k=" << k << " a=" << a << " b=" << b;
        }
      }
    }
  }
}

TEST(Mpo, FourTensorRingMatchesLadder) {
  for (const std::string spec : {"dynkin:A4", "cyclic:3", "dynkin:D4"}) {
    const Irreducibles& irr = irreducibles(spec);
    for (std::size_t k = 1; k <= 3; ++k) {
      const LoopBasis basis(irr.w.top(), k);
      for (const Connection& a : irr.reps) {
        const Connection four = four_tensor(a);
        EXPECT_LT(max_abs(SparseCMatrix(mpo_O(a, basis).matrix - mpo_O_from_four_tensor(four, a, basis).matrix)),
                  1e-12)
            << spec;
      }
    }
  }
}

TEST(Mpo, ShiftCommutes) {
  for (const auto& spec : testing::small_specs()) {
    const Irreducibles& irr = irreducibles(spec);
    for (std::size_t k = 1; k <= 3; ++k) {
      const LoopBasis basis(irr.w.top(), k);
      const SparseCMatrix s = shift2(basis);
      const SparseCMatrix p = pmpo_P(irr, basis).matrix;
      EXPECT_LT(max_abs(SparseCMatrix(s * p - p * s)), 1e-12) << spec;
      // shift2 is a permutation of order k
      SparseCMatrix power = s;
      for (std::size_t i = 1; i < k; ++i) power = power * s;
      const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(basis.size()));
      EXPECT_LT(max_abs(CMatrix(dense(power) - id)), 1e-15);
    }
  }
}

TEST(Mpo, LadderSingleColumn) {
  const Connection c = build_trivial(2);
  const Connection* cols[] = {&c};
  const auto terms = ladder(cols, 0, Word{1});
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].output, Word{1});
  EXPECT_EQ(terms[0].bond, 0u);
  EXPECT_EQ(terms[0].value, cplx(1.0));
}

TEST(Phi, A3FactorAtK1) {
  const Connection w = build_dynkin("A3");
  const LoopBasis loops(w.top(), 1);
  const StringBasis strings(w.top(), 1);
  const CMatrix phi = dense(phi_map(loops, strings, w));
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const std::size_t x = loops.base(i);
    const auto j = strings.find_walk(x, Word{loops.word(i)[0]});
    ASSERT_TRUE(j.has_value());
    const auto s = strings.find(x, *j, *j);
    ASSERT_TRUE(s.has_value());
    EXPECT_NEAR(std::abs(phi(static_cast<Eigen::Index>(*s), static_cast<Eigen::Index>(i))), std::pow(2.0, -0.25), 1e-14);
  }
}

TEST(Phi, TrivialFactorsAreOne) {
  const Connection w = build_trivial(2);
  const LoopBasis loops(w.top(), 2);
  const StringBasis strings(w.top(), 2);
  const SparseCMatrix phi = phi_map(loops, strings, w);
  for (int k = 0; k < phi.outerSize(); ++k) {
    for (SparseCMatrix::InnerIterator it(phi, k); it; ++it) EXPECT_NEAR(std::abs(it.value()), 1.0, 1e-15);
  }
}

TEST(Phi, IsBijective) {
  const Connection w = build_dynkin("D5");
  for (std::size_t k = 1; k <= 3; ++k) {
    const LoopBasis loops(w.top(), k);
    const StringBasis strings(w.top(), k);
    const SparseCMatrix phi = phi_map(loops, strings, w);
    const SparseCMatrix inv = phi_inverse(loops, strings, w);
    EXPECT_EQ(operator_rank(phi), loops.size());
    const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(loops.size()), static_cast<Eigen::Index>(loops.size()));
    EXPECT_LT(max_abs(CMatrix(dense(SparseCMatrix(inv * phi)) - id)), 1e-14);
  }
}

// Phi O_a agrees with the string-side operator assembled from transports.
TEST(Phi, IntertwinesWithTransports) {
  for (const auto& spec : testing::small_specs()) {
    const Irreducibles& irr = irreducibles(spec);
    for (std::size_t k = 1; k <= 3; ++k) {
      const LoopBasis loops(irr.w.top(), k);
      const StringBasis strings(irr.w.top(), k);
      const SparseCMatrix phi = phi_map(loops, strings, irr.w);
      for (const Connection& a : irr.reps) {
        const SparseCMatrix o = mpo_O(a, loops).matrix;
        const SparseCMatrix ot = mpo_O_tilde_direct(a, strings);
        EXPECT_LT(max_abs(SparseCMatrix(phi * o - ot * phi)), 1e-10) << spec << " k=" << k;
      }
    }
  }
}

}  // namespace
}  // namespace pmpo
