#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pmpo/expectation.hpp"
#include "pmpo/mpo.hpp"
#include "pmpo/strings.hpp"
#include "support.hpp"

namespace pmpo {
namespace {

using testing::dense;
using testing::irreducibles;

Field random_field(const StringBasis& b, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Field f(static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = {n(rng), n(rng)};
  return f;
}

TEST(Strings, TraceNormalization) {
  for (const std::string spec : {"dynkin:A3", "dynkin:D5", "cyclic:3", "trivial:2"}) {
    const Connection w = build_from_spec(spec);
    for (std::size_t k = 1; k <= 3; ++k) {
      const StringBasis b(w.top(), k);
      const StringTrace tr(b, w);
      const Field one = identity_field(b);
      for (std::size_t x = 0; x < b.num_bases(); ++x) EXPECT_NEAR(std::abs(tr.tr_x(x, one) - 1.0), 0.0, 1e-13);
      EXPECT_NEAR(std::abs(tr.tr(one) - 1.0), 0.0, 1e-13) << spec;
    }
  }
}

TEST(Strings, TrivialMatrixUnitTrace) {
  const Connection w = build_trivial(2);
  const StringBasis b(w.top(), 1);
  const StringTrace tr(b, w);
  Field e = Field::Zero(static_cast<Eigen::Index>(b.size()));
  e(static_cast<Eigen::Index>(*b.find(0, 0, 0))) = 1.0;
  EXPECT_NEAR(tr.tr(e).real(), 0.5, 1e-15);
  Field off = Field::Zero(static_cast<Eigen::Index>(b.size()));
  off(static_cast<Eigen::Index>(*b.find(0, 0, 1))) = 1.0;
  EXPECT_NEAR(std::abs(tr.tr(off)), 0.0, 1e-15);
}

TEST(Strings, ExplicitIndexMustMatch) {
  const Connection w = build_dynkin("A3");
  const StringBasis b(w.top(), 1);
  double sum = 0.0;
  for (double m : w.mu(corner_x)) sum += m * m;
  EXPECT_NO_THROW(StringTrace(b, w, sum));
  EXPECT_THROW(StringTrace(b, w, sum + 1.0), InputError);
}

TEST(Strings, AlgebraLaws) {
  std::mt19937_64 rng(5);
  const Connection w = build_dynkin("E6");
  const StringBasis b(w.top(), 3);
  const StringTrace tr(b, w);
  const Field x = random_field(b, rng), y = random_field(b, rng), z = random_field(b, rng);
  const Field one = identity_field(b);
  EXPECT_LT((multiply(b, one, x) - x).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((multiply(b, x, one) - x).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((multiply(b, multiply(b, x, y), z) - multiply(b, x, multiply(b, y, z))).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((adjoint(b, adjoint(b, x)) - x).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((adjoint(b, multiply(b, x, y)) - multiply(b, adjoint(b, y), adjoint(b, x))).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(std::abs(tr.tr(multiply(b, x, y)) - tr.tr(multiply(b, y, x))), 1e-12);
  EXPECT_GT(tr.inner(x, x).real(), 0.0);
  EXPECT_NEAR(tr.inner(x, x).imag(), 0.0, 1e-12);
  EXPECT_NEAR(tr.norm(x), std::sqrt(tr.tr(multiply(b, adjoint(b, x), x)).real()), 1e-12);
  Field sum = Field::Zero(x.size());
  for (std::size_t v = 0; v < b.num_bases(); ++v) sum += restrict_to(b, x, v);
  EXPECT_LT((sum - x).cwiseAbs().maxCoeff(), 0.0 + 1e-15);
}

TEST(Strings, TransportSumIsOperatorOnStrings) {
  for (const auto& spec : testing::small_specs()) {
    const Irreducibles& irr = irreducibles(spec);
    for (std::size_t k = 1; k <= 3; ++k) {
      const LoopBasis loops(irr.w.top(), k);
      const StringBasis strings(irr.w.top(), k);
      for (const Connection& a : irr.reps) {
        SparseCMatrix sum(static_cast<Eigen::Index>(strings.size()), static_cast<Eigen::Index>(strings.size()));
        for (std::size_t z = 0; z < a.left().num_edges(); ++z) sum += transport_T(a, strings, z, z);
        const SparseCMatrix ot = to_strings(mpo_O(a, loops), loops, strings, irr.w).matrix;
        EXPECT_LT(max_abs(SparseCMatrix(sum - ot)), 1e-12) << spec << " k=" << k;
      }
    }
  }
}

TEST(Strings, TransportsCompose) {
  // T_{z1,z2} for the identity sector is diagonal in the base vertex.
  const Irreducibles& irr = irreducibles("dynkin:A4");
  const StringBasis b(irr.w.top(), 2);
  const Connection& unit = irr.reps[0];
  for (std::size_t z = 0; z < unit.left().num_edges(); ++z) {
    const CMatrix t = dense(transport_T(unit, b, z, z));
    const auto x = unit.left().edge(z).source;
    const auto [lo, hi] = b.block(x);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      const bool inside = static_cast<std::size_t>(i) >= lo && static_cast<std::size_t>(i) < hi;
      EXPECT_NEAR(std::abs(t(i, i)), inside ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(Strings, FlatFieldsAreOrthonormalAndFlat) {
  for (const auto& spec : testing::small_specs()) {
    const Irreducibles& irr = irreducibles(spec);
    for (std::size_t k = 1; k <= 3; ++k) {
      const FlatFields ff = flat_fields(irr.w, k);
      const StringBasis b(irr.w.top(), k);
      const StringTrace tr(b, irr.w);
      const CMatrix f = dense(ff.basis);
      ASSERT_EQ(static_cast<std::size_t>(f.cols()), ff.dimension);
      for (Eigen::Index i = 0; i < f.cols(); ++i) {
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
          EXPECT_LT(std::abs(tr.inner(f.col(i), f.col(j)) - (i == j ? 1.0 : 0.0)), 1e-10) << spec;
        }
      }
      EXPECT_LT(flatness_residual(irr.w_tilde, b, ff.basis), 1e-9) << spec;
      const LoopBasis loops(irr.w.top(), k);
      EXPECT_EQ(ff.dimension, operator_rank(pmpo_P(irr, loops).matrix)) << spec << " k=" << k;
    }
  }
}

TEST(Strings, FlatFieldsContainUnit) {
  const Irreducibles& irr = irreducibles("dynkin:D4");
  const FlatFields ff = flat_fields(irr.w, 2);
  const StringBasis b(irr.w.top(), 2);
  const StringTrace tr(b, irr.w);
  const Field one = identity_field(b);
  const CMatrix f = dense(ff.basis);
  // The weighted unit (mu_x 1_x) is flat; its projection onto the span keeps its norm.
  Field mu_one = Field::Zero(one.size());
  for (std::size_t x = 0; x < b.num_bases(); ++x) mu_one += irr.w.mu(corner_x)[x] * restrict_to(b, one, x);
  Field proj = Field::Zero(one.size());
  for (Eigen::Index i = 0; i < f.cols(); ++i) proj += tr.inner(f.col(i), mu_one) * f.col(i);
  EXPECT_LT((proj - mu_one).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Strings, JonesProjectionsA3Trace) {
  const Connection w = build_dynkin("A3");
  const StringBasis b(w.top(), 2);
  const StringTrace tr(b, w);
  const Field e = jones_projection(b, w, 1);
  EXPECT_NEAR(tr.tr(e).real(), 0.5, 1e-13);
  EXPECT_LT((multiply(b, e, e) - e).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Strings, TemperleyLiebA4) {
  const Connection w = build_dynkin("A4");
  const std::vector<std::size_t> dims{1, 2, 5, 13};
  for (std::size_t k = 1; k <= 4; ++k) {
    const StringBasis b(w.top(), k);
    const TemperleyLiebReport r = temperley_lieb(b, w);
    EXPECT_LT(r.max(), 1e-10);
    EXPECT_EQ(r.span_dimension, dims[k - 1]);
  }
}

TEST(Strings, JonesIndexOutOfRange) {
  const Connection w = build_dynkin("A3");
  const StringBasis b(w.top(), 2);
  EXPECT_THROW(jones_projection(b, w, 0), InputError);
  EXPECT_THROW(jones_projection(b, w, 2), InputError);
}

class ConditionalExpectation : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(ConditionalExpectation, ProjectionProperties) {
  std::mt19937_64 rng(GetParam());
  const TwoLevelAlgebra alg(random_bratteli(rng));
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = alg.random(rng);
    const auto e = alg.expectation(c);
    EXPECT_LT(max_abs(alg.expectation(e) - e), 1e-12);
    EXPECT_LT(std::abs(alg.trace(e) - alg.trace(c)), 1e-12);
    const auto b = alg.embed(alg.random_level_one(rng));
    EXPECT_LT(max_abs(e * b - b * e), 1e-11);
    // tr(E(c) d) = tr(c d) for d in the commutant.
    const auto d = alg.expectation(alg.random(rng));
    EXPECT_LT(std::abs(alg.trace(e * d) - alg.trace(c * d)), 1e-11);
  }
  EXPECT_LT(max_abs(alg.expectation(alg.identity()) - alg.identity()), 1e-14);
  EXPECT_NEAR(alg.trace(alg.identity()).real(), 1.0, 1e-14);
}

TEST_P(ConditionalExpectation, NearFixedPointsAreClose) {
  std::mt19937_64 rng(GetParam() + 100);
  const TwoLevelAlgebra alg(random_bratteli(rng));
  std::uniform_real_distribution<double> scale(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto fixed = alg.expectation(alg.random(rng));
    const auto sigma = fixed + scaled(alg.random(rng), scale(rng));
    const double n = alg.norm2(sigma);
    const double eps = std::abs(n - alg.norm2(alg.expectation(sigma))) / n + 1e-15;
    if (eps >= 1.0) continue;
    EXPECT_LT(alg.norm2(sigma - alg.expectation(sigma)), std::sqrt(2.0 * eps) * n);
  }
}

INSTANTIATE_TEST_SUITE_P(RandomDiagrams, ConditionalExpectation, ::testing::Values(1u, 2u, 3u, 4u, 5u));

}  // namespace
}  // namespace pmpo
