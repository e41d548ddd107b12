#include "pmpo/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pmpo/interchange.hpp"
#include "pmpo/mpo.hpp"
#include "pmpo/strings.hpp"

namespace pmpo {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json check_entry(double residual, double tolerance, json& diagnostics, const std::string& name) {
  diagnostics[name] = {{"residual", residual}, {"tolerance", tolerance}};
  return {{"passed", residual <= tolerance}, {"tolerance", tolerance}};
}

json int_matrix(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

double sparse_diff(const SparseCMatrix& a, const SparseCMatrix& b) { return max_abs(SparseCMatrix(a - b)); }

struct FusionChecks {
  double unit = 0.0;
  double associativity = 0.0;
  double frobenius = 0.0;
  double dimension = 0.0;
  double powers = 0.0;
  double weights = 0.0;
  double conj_involution = 0.0;
  double conj_unit = 0.0;
};

FusionChecks fusion_checks(const Irreducibles& irr, std::size_t n_max) {
  const FusionData& fd = irr.fusion;
  const std::size_t n = fd.size();
  FusionChecks c;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      c.unit = std::max(c.unit, std::abs(static_cast<double>(fd.n[0][a][b]) - (a == b ? 1.0 : 0.0)));
      c.unit = std::max(c.unit, std::abs(static_cast<double>(fd.n[a][0][b]) - (a == b ? 1.0 : 0.0)));
      c.conj_unit = std::max(c.conj_unit, std::abs(static_cast<double>(fd.n[a][b][0]) - (b == fd.conj[a] ? 1.0 : 0.0)));
      double dd = 0.0;
      for (std::size_t e = 0; e < n; ++e) dd += static_cast<double>(fd.n[a][b][e]) * fd.d[e];
      c.dimension = std::max(c.dimension, std::abs(fd.d[a] * fd.d[b] - dd));
      for (std::size_t cc = 0; cc < n; ++cc) {
        for (std::size_t d = 0; d < n; ++d) {
          double lhs = 0.0, rhs = 0.0;
          for (std::size_t e = 0; e < n; ++e) {
            lhs += static_cast<double>(fd.n[a][b][e] * fd.n[e][cc][d]);
            rhs += static_cast<double>(fd.n[b][cc][e] * fd.n[a][e][d]);
          }
          c.associativity = std::max(c.associativity, std::abs(lhs - rhs));
        }
      }
    }
    c.conj_involution = std::max(c.conj_involution, fd.conj[fd.conj[a]] == a ? 0.0 : 1.0);
    const Eigen::MatrixXi diff = fd.m[a] - fd.m[fd.conj[a]].transpose();
    c.frobenius = std::max(c.frobenius, static_cast<double>(diff.cwiseAbs().maxCoeff()));
  }
  const double gamma2 = irr.w.gamma2();
  for (std::size_t p = 1; p <= n_max; ++p) {
    const auto l = fd.powers(p);
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a) s += static_cast<double>(l[a]) * fd.d[a];
    const double target = std::pow(gamma2, 2.0 * static_cast<double>(p));
    c.powers = std::max(c.powers, std::abs(s - target) / std::max(1.0, target));
  }
  const auto& mu = fd.mu0;
  for (std::size_t y = 0; y < mu.size(); ++y) {
    double s = 0.0;
    for (std::size_t x = 0; x < mu.size(); ++x) {
      for (std::size_t a = 0; a < n; ++a) {
        s += fd.d[a] * mu[x] * fd.m[a](static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      }
    }
    c.weights = std::max(c.weights, std::abs(s - fd.w * mu[y]));
  }
  return c;
}

}  // namespace

json provenance(const RunSettings& s) {
  return {{"input", s.input},
          {"input_fnv1a", hex64(fnv1a(s.input_document))},
          {"seed", s.seed},
          {"tolerances", {{"check", s.tol}, {"rank_relative", s.rank_cut}}},
          {"max_depth", s.max_depth},
          {"versions", {{"library", library_version}, {"interchange", interchange_version}, {"report", report_version}}}};
}

json document(const std::string& name, const RunSettings& s, const Report& r) {
  return {{"report", name},
          {"version", report_version},
          {"provenance", provenance(s)},
          {"result", r.result},
          {"diagnostics", r.diagnostics},
          {"passed", r.passed}};
}

Report check_report(const Connection& w, const RunSettings& s) {
  Report r;
  const SquareReport sq = validate_square(scheme_of(w), s.tol);
  const BiunitarityReport bu = check_biunitarity(w, s.tol);
  double square_max = 0.0;
  for (double v : sq.residuals) square_max = std::max(square_max, v);
  r.result["square"] = {{"passed", sq.passed}, {"tolerance", s.tol}, {"issues", sq.issues}};
  r.result["unitarity"] = check_entry(bu.original.residual(), s.tol, r.diagnostics, "unitarity");
  r.result["unitarity_renormalized"] = check_entry(bu.renormalized.residual(), s.tol, r.diagnostics,
                                                   "unitarity_renormalized");
  r.result["gamma"] = {w.gamma1(), w.gamma2()};
  r.result["cells"] = w.cells().size();
  r.diagnostics["eigenvalue_equations"] = {{"residuals", sq.residuals}, {"max", square_max}, {"tolerance", s.tol}};
  r.passed = sq.passed && bu.passed;
  return r;
}

Report decompose_report(const Irreducibles& irr, std::size_t n_max, const RunSettings& s) {
  Report r;
  const FusionData& fd = irr.fusion;
  const std::size_t n = fd.size();
  json& res = r.result;
  res["labels"] = fd.labels;
  res["d"] = fd.d;
  res["w"] = fd.w;
  res["first_power"] = fd.first_power;
  json conj = json::object();
  for (std::size_t a = 0; a < n; ++a) conj[fd.labels[a]] = fd.labels[fd.conj[a]];
  res["conj"] = conj;
  json nt = json::object();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      json row = json::array();
      for (std::size_t c = 0; c < n; ++c) row.push_back(fd.n[a][b][c]);
      nt[fd.labels[a] + "," + fd.labels[b]] = row;
    }
  }
  res["N"] = nt;
  json m = json::object();
  for (std::size_t a = 0; a < n; ++a) m[fd.labels[a]] = int_matrix(fd.m[a]);
  res["M"] = m;
  res["V0"] = irr.w.vertices(corner_x);
  res["mu_V0"] = fd.mu0;
  json l = json::object();
  for (std::size_t p = 1; p <= n_max; ++p) l[std::to_string(p)] = fd.powers(p);
  res["L"] = l;

  const FusionChecks c = fusion_checks(irr, n_max);
  json inv = json::object();
  inv["unit"] = check_entry(c.unit, 0.0, r.diagnostics, "unit");
  inv["associativity"] = check_entry(c.associativity, 0.0, r.diagnostics, "associativity");
  inv["frobenius_reciprocity"] = check_entry(c.frobenius, 0.0, r.diagnostics, "frobenius_reciprocity");
  inv["conjugation_involutive"] = check_entry(c.conj_involution, 0.0, r.diagnostics, "conjugation_involutive");
  inv["conjugate_unit"] = check_entry(c.conj_unit, 0.0, r.diagnostics, "conjugate_unit");
  inv["dimension_homomorphism"] = check_entry(c.dimension, 1e-8, r.diagnostics, "dimension_homomorphism");
  inv["power_dimensions"] = check_entry(c.powers, 1e-6, r.diagnostics, "power_dimensions");
  inv["weight_relation"] = check_entry(c.weights, 1e-8, r.diagnostics, "weight_relation");
  res["invariants"] = inv;
  res["splitting_tolerance"] = s.tol;
  for (const auto& [k, v] : inv.items()) r.passed = r.passed && v.at("passed").get<bool>();
  return r;
}

Report pmpo_report(const Irreducibles& irr, std::size_t k_min, std::size_t k_max, const RunSettings& s) {
  Report r;
  const FusionData& fd = irr.fusion;
  const RankCut cut{s.rank_cut, true};
  json rows = json::array();
  json diag = json::array();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const LoopBasis loops(irr.w.top(), k);
    std::vector<MPOOperator> o;
    for (const Connection& rep : irr.reps) o.push_back(mpo_O(rep, loops));
    const MPOOperator p = pmpo_P(irr, o);
    const double idem = sparse_diff(SparseCMatrix(p.matrix * p.matrix), p.matrix);
    double fusion = 0.0;
    for (std::size_t a = 0; a < fd.size(); ++a) {
      for (std::size_t b = 0; b < fd.size(); ++b) {
        SparseCMatrix rhs(p.matrix.rows(), p.matrix.cols());
        for (std::size_t c = 0; c < fd.size(); ++c) {
          if (fd.n[b][a][c]) rhs += o[c].matrix * cplx{static_cast<double>(fd.n[b][a][c]), 0.0};
        }
        fusion = std::max(fusion, sparse_diff(SparseCMatrix(o[a].matrix * o[b].matrix), rhs));
      }
    }
    const SparseCMatrix shift = shift2(loops);
    const double commute = sparse_diff(SparseCMatrix(shift * p.matrix), SparseCMatrix(p.matrix * shift));
    json d = json::object();
    json row = {{"k", k}, {"loop_dimension", loops.size()}, {"rank", operator_rank(p.matrix, cut)}};
    row["idempotent"] = check_entry(idem, 1e-8, d, "idempotency");
    row["fusion"] = check_entry(fusion, 1e-8, d, "fusion");
    row["shift_invariant"] = check_entry(commute, 1e-12, d, "shift2_commutator");
    r.passed = r.passed && idem < 1e-8 && fusion < 1e-8 && commute < 1e-12;
    d["k"] = k;
    rows.push_back(row);
    diag.push_back(d);
  }
  r.result["pmpo"] = rows;
  r.diagnostics["pmpo"] = diag;
  return r;
}

Report relcomm_report(const Connection& w, std::size_t k_min, std::size_t k_max, const RunSettings& s) {
  Report r;
  const RankCut cut{s.rank_cut, true};
  json rows = json::array();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const FlatFields ff = flat_fields(w, k, cut);
    rows.push_back({{"k", k},
                    {"string_dimension", ff.basis.rows()},
                    {"flat_dimension", ff.dimension},
                    {"transports", ff.transports},
                    {"equations", ff.equations}});
  }
  r.result["relative_commutants"] = rows;
  return r;
}

Report verify_report(const Irreducibles& irr, std::size_t k_min, std::size_t k_max, const RunSettings& s) {
  Report r;
  const RankCut cut{s.rank_cut, true};
  json rows = json::array();
  json diag = json::array();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const LoopBasis loops(irr.w.top(), k);
    const MPOOperator p = pmpo_P(irr, loops);
    const std::size_t rank = operator_rank(p.matrix, cut);
    const FlatFields ff = flat_fields(irr.w, k, cut);
    const StringBasis strings(irr.w.top(), k);
    const double flat_res = ff.dimension ? flatness_residual(irr.w_tilde, strings, ff.basis) : 0.0;
    json d = json::object();
    json row = {{"k", k}, {"rank", rank}, {"flat_dimension", ff.dimension}, {"equal", rank == ff.dimension}};
    row["flatness"] = check_entry(flat_res, 1e-9, d, "flatness");
    d["k"] = k;
    r.passed = r.passed && rank == ff.dimension && flat_res < 1e-9;
    rows.push_back(row);
    diag.push_back(d);
  }
  r.result["theorem"] = rows;
  r.result["verdict"] = r.passed ? "PASS" : "FAIL";
  r.diagnostics["theorem"] = diag;
  return r;
}

Report stats_report(const Irreducibles& irr, std::size_t n_max, const RunSettings& s) {
  (void)s;
  Report r;
  const FusionData& fd = irr.fusion;
  json rows = json::array();
  for (std::size_t n = 1; n <= n_max; ++n) {
    const SectorStatistics st = sector_statistics(fd, irr.w, n);
    rows.push_back({{"n", n},
                    {"K", st.k},
                    {"alpha", st.alpha},
                    {"kappa", st.kappa},
                    {"L", st.l},
                    {"beta", st.beta},
                    {"lambda", st.lambda}});
  }
  std::vector<double> kappa_limit, lambda_limit;
  for (double m : fd.mu0) kappa_limit.push_back(m / std::sqrt(fd.w));
  for (double d : fd.d) lambda_limit.push_back(d / std::sqrt(fd.w));
  r.result["statistics"] = rows;
  r.result["limits"] = {{"kappa", kappa_limit}, {"lambda", lambda_limit}};
  return r;
}

namespace {

void render(std::ostringstream& out, const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render(out, v, prefix.empty() ? k : prefix + "." + k);
    return;
  }
  if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    bool nested_scalars = true;
    for (const auto& row : j) {
      for (const auto& x : row) nested_scalars = nested_scalars && x.is_primitive();
      nested_scalars = nested_scalars && row.is_array();
    }
    if (!nested_scalars) {
      for (std::size_t i = 0; i < j.size(); ++i) render(out, j[i], prefix + "[" + std::to_string(i) + "]");
      return;
    }
  }
  out << prefix << " = " << j.dump() << '\n';
}

}  // namespace

std::string render_table(const json& doc) {
  std::ostringstream out;
  out << "# " << doc.value("report", std::string{"report"}) << '\n';
  render(out, doc.at("provenance"), "provenance");
  render(out, doc.at("result"), "");
  render(out, doc.at("diagnostics"), "diagnostics");
  out << (doc.value("passed", false) ? "PASS" : "FAIL") << '\n';
  return out.str();
}

}  // namespace pmpo
