#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pmpo/decomp.hpp"

namespace pmpo {

inline constexpr const char* library_version = "1.0.0";
inline constexpr int report_version = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

struct RunSettings {
  std::string input;           // path or builtin spec
  std::string input_document;  // connection document the run was computed from
  std::uint64_t seed = 1;
  double tol = 1e-9;
  double rank_cut = 1e-8;
  std::size_t max_depth = 12;
};

/// A report document: {report, version, provenance, result, diagnostics}.
/// `result` holds exact and pass/fail content that does not depend on the
/// seed; floating residuals go to `diagnostics`.
struct Report {
  nlohmann::json result = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();
  bool passed = true;
};

nlohmann::json provenance(const RunSettings& s);
nlohmann::json document(const std::string& name, const RunSettings& s, const Report& r);

Report check_report(const Connection& w, const RunSettings& s);
Report decompose_report(const Irreducibles& irr, std::size_t n_max, const RunSettings& s);
Report pmpo_report(const Irreducibles& irr, std::size_t k_min, std::size_t k_max, const RunSettings& s);
Report relcomm_report(const Connection& w, std::size_t k_min, std::size_t k_max, const RunSettings& s);
Report verify_report(const Irreducibles& irr, std::size_t k_min, std::size_t k_max, const RunSettings& s);
Report stats_report(const Irreducibles& irr, std::size_t n_max, const RunSettings& s);

/// Plain-text rendering of a report document.
std::string render_table(const nlohmann::json& doc);

}  // namespace pmpo
