#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pmpo/builders.hpp"
#include "pmpo/expectation.hpp"
#include "pmpo/mpo.hpp"
#include "pmpo/report.hpp"
#include "pmpo/strings.hpp"

namespace {

using namespace pmpo;

struct Builder {
  std::string spec;
  std::size_t k_max;
};

const std::vector<Builder> builders{
    {"dynkin:A3", 4}, {"dynkin:A4", 4}, {"dynkin:A5", 4}, {"dynkin:A6", 4}, {"dynkin:A7", 4},
    {"dynkin:D4", 4}, {"dynkin:D5", 2}, {"dynkin:E6", 2}, {"trivial:2", 4}, {"trivial:3", 4},
    {"cyclic:2", 4},  {"cyclic:3", 4},  {"cyclic:4", 4},  {"cyclic:5", 4}};

constexpr std::size_t mpo_k_max = 3;

std::map<std::string, Irreducibles> sectors;
std::map<std::pair<std::string, std::size_t>, std::size_t> ranks;
std::map<std::pair<std::string, std::size_t>, std::size_t> flat_dims;

// Worst values seen by the theorem sweep, reported by criteria 6 and 7.
struct Sweep {
  double fusion = 0.0, idempotent = 0.0, phi = 0.0, shift = 0.0, transport_sum = 0.0;
  double flatness = 0.0, sector_action = 0.0, weighted = 0.0;
  std::string failure;
} sweep;

class Acceptance {
 public:
  void check(int id, const std::string& name, const std::function<bool(std::ostringstream&)>& body) {
    std::ostringstream detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %-24s %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.str().c_str(), secs);
    std::fflush(stdout);
    failures_ += ok ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

void note(std::string& first, const std::string& what) {
  if (first.empty()) first = what;
}

double field_diff(const CVector& a, const CVector& b) { return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0; }

void theorem_sweep(const std::string& spec, std::size_t k_max) {
  const Irreducibles& irr = sectors.at(spec);
  const FusionData& fd = irr.fusion;
  const std::size_t n = fd.size();
  for (std::size_t k = 1; k <= k_max; ++k) {
    const LoopBasis loops(irr.w.top(), k);
    const StringBasis strings(irr.w.top(), k);
    std::vector<MPOOperator> o;
    for (const Connection& a : irr.reps) o.push_back(mpo_O(a, loops));
    const SparseCMatrix p = pmpo_P(irr, o).matrix;
    ranks[{spec, k}] = operator_rank(p);
    const FlatFields ff = flat_fields(irr.w, k);
    flat_dims[{spec, k}] = ff.dimension;

    std::vector<SparseCMatrix> o_tilde;
    for (const Connection& a : irr.reps) o_tilde.push_back(mpo_O_tilde_direct(a, strings));

    if (k <= mpo_k_max) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          SparseCMatrix diff = o[a].matrix * o[b].matrix;
          for (std::size_t c = 0; c < n; ++c) diff -= static_cast<double>(fd.n[b][a][c]) * o[c].matrix;
          sweep.fusion = std::max(sweep.fusion, max_abs(diff));
        }
      }
      sweep.idempotent = std::max(sweep.idempotent, max_abs(SparseCMatrix(p * p - p)));
      const SparseCMatrix s = shift2(loops);
      sweep.shift = std::max(sweep.shift, max_abs(SparseCMatrix(s * p - p * s)));
      const SparseCMatrix phi = phi_map(loops, strings, irr.w);
      for (std::size_t a = 0; a < n; ++a) {
        sweep.phi = std::max(sweep.phi, max_abs(SparseCMatrix(phi * o[a].matrix - o_tilde[a] * phi)));
        const SparseCMatrix conj = to_strings(o[a], loops, strings, irr.w).matrix;
        sweep.transport_sum = std::max(sweep.transport_sum, max_abs(SparseCMatrix(o_tilde[a] - conj)));
      }
    }

    sweep.flatness = std::max(sweep.flatness, flatness_residual(irr.w_tilde, strings, ff.basis));
    for (Eigen::Index col = 0; col < ff.basis.cols(); ++col) {
      const CVector sigma = ff.basis.col(col);
      std::vector<CVector> parts;
      for (std::size_t x = 0; x < strings.num_bases(); ++x) parts.push_back(restrict_to(strings, sigma, x));
      CVector weighted = CVector::Zero(sigma.size());
      for (std::size_t x = 0; x < parts.size(); ++x) weighted += fd.mu0[x] * parts[x];
      CVector p_tilde = CVector::Zero(sigma.size());
      for (std::size_t a = 0; a < n; ++a) {
        p_tilde += (fd.d[a] / fd.w) * (o_tilde[a] * weighted);
        for (std::size_t x = 0; x < parts.size(); ++x) {
          CVector want = CVector::Zero(sigma.size());
          for (std::size_t y = 0; y < parts.size(); ++y) {
            want += static_cast<double>(fd.m[a](static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y))) * parts[y];
          }
          sweep.sector_action = std::max(sweep.sector_action, field_diff(o_tilde[a] * parts[x], want));
        }
      }
      sweep.weighted = std::max(sweep.weighted, field_diff(p_tilde, weighted));
    }
    if (ranks[{spec, k}] != flat_dims[{spec, k}]) {
      note(sweep.failure, spec + " k=" + std::to_string(k) + ": rank " + std::to_string(ranks[{spec, k}]) +
                              " vs flat " + std::to_string(flat_dims[{spec, k}]));
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

}  // namespace

int main() {
  Acceptance acc;
  const auto start = std::chrono::steady_clock::now();

  acc.check(1, "biunitarity", [](std::ostringstream& out) {
    double worst = 0.0;
    std::string bad;
    for (const Builder& b : builders) {
      const BiunitarityReport r = check_biunitarity(build_from_spec(b.spec), 1e-10);
      worst = std::max(worst, r.residual());
      if (!r.passed || !(r.residual() < 1e-10)) note(bad, b.spec);
    }
    out << builders.size() << " builders, max residual " << fmt(worst) << " < 1e-10";
    if (!bad.empty()) out << "; failing " << bad;
    return bad.empty();
  });

  acc.check(2, "rank_equals_flat_dim", [](std::ostringstream& out) {
    for (const Builder& b : builders) {
      sectors.emplace(b.spec, discover_irreducibles(build_from_spec(b.spec)));
      theorem_sweep(b.spec, b.k_max);
    }
    out << ranks.size() << " (builder, k) cases, exact equality";
    if (!sweep.failure.empty()) out << "; " << sweep.failure;
    return sweep.failure.empty() && ranks.size() == flat_dims.size();
  });

  acc.check(3, "oracle_dimensions", [](std::ostringstream& out) {
    const std::map<std::string, std::vector<std::size_t>> want{
        {"dynkin:A3", {1, 2, 4, 8}}, {"dynkin:A4", {1, 2, 5, 13}}, {"trivial:2", {4, 16, 64, 256}}};
    bool ok = true;
    for (const auto& [spec, dims] : want) {
      const Connection w = build_from_spec(spec);
      const std::vector<LayeredGraph> steps{w.top(), reverse_graph(w.top())};
      for (std::size_t k = 1; k <= 4; ++k) {
        ok &= ranks.at({spec, k}) == dims[k - 1] && flat_dims.at({spec, k}) == dims[k - 1];
        // Dynkin A_n: dimensions equal loop counts at the base vertex.
        if (spec.rfind("dynkin", 0) == 0) ok &= count_loops(steps, w.base(), 2 * k) == dims[k - 1];
      }
    }
    out << "A3 1,2,4,8; A4 1,2,5,13; trivial:2 4,16,64,256 (rank, flat dim, loop count)";
    return ok;
  });

  acc.check(4, "global_index", [](std::ostringstream& out) {
    const std::vector<std::pair<std::string, double>> want{
        {"dynkin:A3", 2.0},
        {"dynkin:A4", 3.6180340},
        {"dynkin:A5", 6.0 / (4.0 * std::pow(std::sin(M_PI / 6.0), 2))},
        {"trivial:2", 1.0},
        {"trivial:3", 1.0},
        {"cyclic:2", 2.0},
        {"cyclic:3", 3.0},
        {"cyclic:4", 4.0},
        {"cyclic:5", 5.0}};
    double worst = 0.0;
    for (const auto& [spec, w] : want) worst = std::max(worst, std::abs(sectors.at(spec).fusion.w - w));
    out << "max |w - expected| " << fmt(worst) << " <= 1e-6";
    return worst <= 1e-6;
  });

  acc.check(5, "fusion_algebra", [](std::ostringstream& out) {
    std::size_t integer_violations = 0;
    double dim_hom = 0.0, powers = 0.0, weight = 0.0;
    for (const Builder& b : builders) {
      const Irreducibles& irr = sectors.at(b.spec);
      const FusionData& fd = irr.fusion;
      const std::size_t n = fd.size();
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t c = 0; c < n; ++c) {
          integer_violations += fd.n[0][a][c] != (a == c ? 1u : 0u);
          integer_violations += fd.n[a][0][c] != (a == c ? 1u : 0u);
        }
        integer_violations += fd.m[a] != fd.m[fd.conj[a]].transpose();
        for (std::size_t bb = 0; bb < n; ++bb) {
          double s = 0.0;
          for (std::size_t c = 0; c < n; ++c) {
            s += static_cast<double>(fd.n[a][bb][c]) * fd.d[c];
            for (std::size_t f = 0; f < n; ++f) {
              std::size_t left = 0, right = 0;
              for (std::size_t e = 0; e < n; ++e) {
                left += fd.n[a][bb][e] * fd.n[e][c][f];
                right += fd.n[bb][c][e] * fd.n[a][e][f];
              }
              integer_violations += left != right;
            }
          }
          dim_hom = std::max(dim_hom, std::abs(fd.d[a] * fd.d[bb] - s));
        }
      }
      for (std::size_t p = 1; p <= 4; ++p) {
        const auto l = fd.powers(p);
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a) s += static_cast<double>(l[a]) * fd.d[a];
        powers = std::max(powers, std::abs(s - std::pow(irr.w.gamma2(), 2.0 * static_cast<double>(p))));
      }
      for (std::size_t y = 0; y < fd.mu0.size(); ++y) {
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t x = 0; x < fd.mu0.size(); ++x) {
            s += fd.d[a] * fd.mu0[x] * fd.m[a](static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
          }
        }
        weight = std::max(weight, std::abs(s - fd.w * fd.mu0[y]));
      }
    }
    out << "integer law violations " << integer_violations << ", d-homomorphism " << fmt(dim_hom)
        << " <= 1e-8, sum L d - gamma2^2n " << fmt(powers) << " <= 1e-6, weight relation " << fmt(weight)
        << " <= 1e-8";
    return integer_violations == 0 && dim_hom <= 1e-8 && powers <= 1e-6 && weight <= 1e-8;
  });

  acc.check(6, "mpo_identities", [](std::ostringstream& out) {
    out << "k<=3: fusion " << fmt(sweep.fusion) << " < 1e-8, P^2-P " << fmt(sweep.idempotent) << " < 1e-8, Phi "
        << fmt(sweep.phi) << " < 1e-10, shift2 " << fmt(sweep.shift) << " < 1e-12, sum T " << fmt(sweep.transport_sum)
        << " <= 1e-12";
    return sweep.fusion < 1e-8 && sweep.idempotent < 1e-8 && sweep.phi < 1e-10 && sweep.shift < 1e-12 &&
           sweep.transport_sum <= 1e-12;
  });

  acc.check(7, "flatness_relations", [](std::ostringstream& out) {
    out << "T residual " << fmt(sweep.flatness) << ", sector action " << fmt(sweep.sector_action)
        << ", weighted projector " << fmt(sweep.weighted) << " (all <= 1e-9)";
    return sweep.flatness <= 1e-9 && sweep.sector_action <= 1e-9 && sweep.weighted <= 1e-9;
  });

  acc.check(8, "convergence", [](std::ostringstream& out) {
    double a3 = 0.0;
    const Irreducibles& i3 = sectors.at("dynkin:A3");
    for (std::size_t n = 1; n <= 6; ++n) {
      const SectorStatistics st = sector_statistics(i3.fusion, i3.w, n);
      for (double v : st.kappa) a3 = std::max(a3, std::abs(v - 1.0 / std::sqrt(2.0)));
      for (double v : st.lambda) a3 = std::max(a3, std::abs(v - 1.0 / std::sqrt(2.0)));
    }
    const Irreducibles& i4 = sectors.at("dynkin:A4");
    const FusionData& fd = i4.fusion;
    double kappa = 0.0, lambda = 0.0;
    const SectorStatistics s10 = sector_statistics(fd, i4.w, 10);
    for (std::size_t x = 0; x < s10.kappa.size(); ++x) {
      kappa = std::max(kappa, std::abs(s10.kappa[x] - fd.mu0[x] / std::sqrt(fd.w)));
    }
    const SectorStatistics s6 = sector_statistics(fd, i4.w, 6);
    for (std::size_t a = 0; a < s6.lambda.size(); ++a) {
      lambda = std::max(lambda, std::abs(s6.lambda[a] - fd.d[a] / std::sqrt(fd.w)));
    }
    out << "A3 |kappa,lambda - 1/sqrt2| " << fmt(a3) << " <= 1e-12; A4 kappa^10 " << fmt(kappa) << " < 1e-3, lambda^6 "
        << fmt(lambda) << " < 1e-2";
    return a3 <= 1e-12 && kappa < 1e-3 && lambda < 1e-2;
  });

  acc.check(9, "jones_projections", [](std::ostringstream& out) {
    double worst = 0.0;
    std::string bad;
    for (const std::string name : {"A3", "A4", "A5", "A6", "A7"}) {
      const Connection w = build_dynkin(name);
      for (std::size_t k = 1; k <= 4; ++k) {
        const StringBasis b(w.top(), k);
        const TemperleyLiebReport r = temperley_lieb(b, w);
        worst = std::max(worst, r.max());
        if (r.span_dimension != ranks.at({"dynkin:" + name, k})) note(bad, name + " k=" + std::to_string(k));
      }
    }
    out << "A3..A7 k<=4: TL relations " << fmt(worst) << " <= 1e-10, span dim == rank";
    if (!bad.empty()) out << "; mismatch " << bad;
    return worst <= 1e-10 && bad.empty();
  });

  acc.check(10, "conditional_expectation", [](std::ostringstream& out) {
    std::mt19937_64 rng(2024);
    double idem = 0.0, comm = 0.0, trace = 0.0;
    std::size_t elements = 0, near_cases = 0, near_failures = 0;
    std::uniform_real_distribution<double> scale(0.0, 1.5);
    for (int d = 0; d < 5; ++d) {
      const TwoLevelAlgebra alg(random_bratteli(rng));
      for (int i = 0; i < 20; ++i, ++elements) {
        const auto c = alg.random(rng);
        const auto e = alg.expectation(c);
        idem = std::max(idem, max_abs(alg.expectation(e) - e));
        const auto b = alg.embed(alg.random_level_one(rng));
        comm = std::max(comm, max_abs(e * b - b * e));
        trace = std::max(trace, std::abs(alg.trace(e) - alg.trace(c)));
        // Closeness bound for sigma = fixed point + perturbation.
        const auto sigma = alg.expectation(alg.random(rng)) + scaled(c, scale(rng));
        const double norm = alg.norm2(sigma);
        const double eps = std::abs(norm - alg.norm2(alg.expectation(sigma))) / norm + 1e-15;
        if (eps < 1.0) {
          ++near_cases;
          near_failures += !(alg.norm2(sigma - alg.expectation(sigma)) < std::sqrt(2.0) * std::sqrt(eps) * norm);
        }
      }
    }
    out << elements << " elements on 5 diagrams: E^2-E " << fmt(idem) << ", [E(c),B] " << fmt(comm) << ", tr(E)-tr "
        << fmt(trace) << " (<= 1e-10); inequality " << near_cases - near_failures << "/" << near_cases;
    return idem <= 1e-10 && comm <= 1e-10 && trace <= 1e-10 && near_failures == 0 && near_cases > 0;
  });

  acc.check(11, "determinism", [](std::ostringstream& out) {
    std::size_t runs = 0;
    std::string bad;
    for (const Builder& b : builders) {
      const Connection w = build_from_spec(b.spec);
      RunSettings s;
      s.input = "builtin:" + b.spec;
      std::string ref_decompose, ref_verify;
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        s.seed = seed;
        const Irreducibles irr = discover_irreducibles(w, s.max_depth, seed, s.tol);
        const auto dec = document("decompose", s, decompose_report(irr, 4, s));
        const auto ver = document("verify-theorem", s, verify_report(irr, 1, std::min<std::size_t>(b.k_max, 2), s));
        // A repeated run with the same seed reproduces the full document.
        const Irreducibles again = discover_irreducibles(w, s.max_depth, seed, s.tol);
        if (document("decompose", s, decompose_report(again, 4, s)).dump() != dec.dump()) note(bad, b.spec + " rerun");
        runs += 2;
        if (seed == 1) {
          ref_decompose = dec["result"].dump();
          ref_verify = ver["result"].dump();
        } else {
          if (dec["result"].dump() != ref_decompose) note(bad, b.spec + " decompose seed " + std::to_string(seed));
          if (ver["result"].dump() != ref_verify) note(bad, b.spec + " verify seed " + std::to_string(seed));
        }
      }
    }
    out << runs << " reports, result sections byte-identical across seeds 1..3";
    if (!bad.empty()) out << "; differs: " << bad;
    return bad.empty();
  });

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d/11 criteria passed in %.1fs\n", 11 - acc.failures(), total);
  return acc.failures() == 0 ? 0 : 1;
}
