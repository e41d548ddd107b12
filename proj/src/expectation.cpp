#include "pmpo/expectation.hpp"

#include <cmath>

namespace pmpo {

TwoLevelAlgebra::TwoLevelAlgebra(TwoLevelBratteli diagram) : d_(std::move(diagram)) {
  const auto n1 = static_cast<Eigen::Index>(d_.k.size());
  if (d_.m.rows() != n1) throw InputError("level-2 multiplicities do not match level 1");
  const auto n2 = static_cast<std::size_t>(d_.m.cols());
  if (d_.t.size() != n2) throw InputError("one trace weight per level-2 vertex is required");
  paths_.resize(n2);
  for (std::size_t u = 0; u < n2; ++u) {
    for (Eigen::Index v = 0; v < n1; ++v) {
      const int mult = d_.m(v, static_cast<Eigen::Index>(u));
      if (mult < 0) throw InputError("negative edge multiplicity");
      for (std::size_t xi = 0; xi < d_.k[static_cast<std::size_t>(v)]; ++xi) {
        for (int eta = 0; eta < mult; ++eta) paths_[u].push_back({static_cast<std::size_t>(v), xi, static_cast<std::size_t>(eta)});
      }
    }
    if (paths_[u].empty()) throw InputError("level-2 vertex without incoming paths");
  }
  double total = 0.0;
  for (std::size_t u = 0; u < n2; ++u) total += d_.t[u] * static_cast<double>(paths_[u].size());
  if (!(total > 0.0)) throw InputError("trace weights must be positive");
  for (double& t : d_.t) t /= total;
}

TwoLevelAlgebra::Element TwoLevelAlgebra::zero() const {
  Element e;
  for (const auto& p : paths_) {
    const auto n = static_cast<Eigen::Index>(p.size());
    e.push_back(CMatrix::Zero(n, n));
  }
  return e;
}

TwoLevelAlgebra::Element TwoLevelAlgebra::identity() const {
  Element e;
  for (const auto& p : paths_) {
    const auto n = static_cast<Eigen::Index>(p.size());
    e.push_back(CMatrix::Identity(n, n));
  }
  return e;
}

namespace {

CMatrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = {normal(rng), normal(rng)};
  }
  return m;
}

}  // namespace

TwoLevelAlgebra::Element TwoLevelAlgebra::random(std::mt19937_64& rng) const {
  Element e;
  for (const auto& p : paths_) e.push_back(random_matrix(static_cast<Eigen::Index>(p.size()), rng));
  return e;
}

std::vector<CMatrix> TwoLevelAlgebra::random_level_one(std::mt19937_64& rng) const {
  std::vector<CMatrix> b;
  for (std::size_t kv : d_.k) b.push_back(random_matrix(static_cast<Eigen::Index>(kv), rng));
  return b;
}

TwoLevelAlgebra::Element TwoLevelAlgebra::embed(const std::vector<CMatrix>& b) const {
  Element e = zero();
  for (std::size_t u = 0; u < paths_.size(); ++u) {
    const auto& p = paths_[u];
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[i].v == p[j].v && p[i].eta == p[j].eta) {
          e[u](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              b[p[i].v](static_cast<Eigen::Index>(p[i].xi), static_cast<Eigen::Index>(p[j].xi));
        }
      }
    }
  }
  return e;
}

cplx TwoLevelAlgebra::trace(const Element& c) const {
  cplx s{};
  for (std::size_t u = 0; u < c.size(); ++u) s += d_.t[u] * c[u].trace();
  return s;
}

double TwoLevelAlgebra::norm2(const Element& c) const {
  double s = 0.0;
  for (std::size_t u = 0; u < c.size(); ++u) s += d_.t[u] * c[u].squaredNorm();
  return std::sqrt(s);
}

TwoLevelAlgebra::Element TwoLevelAlgebra::expectation(const Element& c) const {
  Element e = zero();
  for (std::size_t u = 0; u < paths_.size(); ++u) {
    const auto& p = paths_[u];
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        const cplx coeff = c[u](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (coeff == cplx{} || p[i].v != p[j].v || p[i].xi != p[j].xi) continue;
        const double inv_k = 1.0 / static_cast<double>(d_.k[p[i].v]);
        // sum over xi of (xi.eta_i, xi.eta_j)
        for (std::size_t a = 0; a < p.size(); ++a) {
          if (p[a].v != p[i].v || p[a].eta != p[i].eta) continue;
          for (std::size_t b = 0; b < p.size(); ++b) {
            if (p[b].v != p[j].v || p[b].eta != p[j].eta || p[b].xi != p[a].xi) continue;
            e[u](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += inv_k * coeff;
          }
        }
      }
    }
  }
  return e;
}

TwoLevelAlgebra::Element operator*(const TwoLevelAlgebra::Element& a, const TwoLevelAlgebra::Element& b) {
  TwoLevelAlgebra::Element out;
  for (std::size_t u = 0; u < a.size(); ++u) out.push_back(a[u] * b[u]);
  return out;
}

TwoLevelAlgebra::Element operator-(const TwoLevelAlgebra::Element& a, const TwoLevelAlgebra::Element& b) {
  TwoLevelAlgebra::Element out;
  for (std::size_t u = 0; u < a.size(); ++u) out.push_back(a[u] - b[u]);
  return out;
}

TwoLevelAlgebra::Element operator+(const TwoLevelAlgebra::Element& a, const TwoLevelAlgebra::Element& b) {
  TwoLevelAlgebra::Element out;
  for (std::size_t u = 0; u < a.size(); ++u) out.push_back(a[u] + b[u]);
  return out;
}

TwoLevelAlgebra::Element scaled(const TwoLevelAlgebra::Element& a, cplx s) {
  TwoLevelAlgebra::Element out;
  for (const CMatrix& m : a) out.push_back(m * s);
  return out;
}

double max_abs(const TwoLevelAlgebra::Element& a) {
  double m = 0.0;
  for (const CMatrix& b : a) m = std::max(m, max_abs(b));
  return m;
}

TwoLevelBratteli random_bratteli(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_int_distribution<int> mult(0, 3);
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  TwoLevelBratteli d;
  const int n1 = count(rng);
  const int n2 = count(rng);
  for (int v = 0; v < n1; ++v) d.k.push_back(static_cast<std::size_t>(count(rng)));
  d.m = Eigen::MatrixXi::Zero(n1, n2);
  for (int v = 0; v < n1; ++v) {
    for (int u = 0; u < n2; ++u) d.m(v, u) = mult(rng);
  }
  // Every vertex on both levels needs an edge between the levels.
  for (int u = 0; u < n2; ++u) {
    if (d.m.col(u).sum() == 0) d.m(u % n1, u) = 1;
  }
  for (int v = 0; v < n1; ++v) {
    if (d.m.row(v).sum() == 0) d.m(v, v % n2) = 1;
  }
  for (int u = 0; u < n2; ++u) d.t.push_back(weight(rng));
  return d;
}

}  // namespace pmpo
