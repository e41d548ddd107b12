#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pmpo/builders.hpp"
#include "pmpo/interchange.hpp"
#include "pmpo/report.hpp"

namespace {

using namespace pmpo;

constexpr int exit_pass = 0;
constexpr int exit_numeric = 1;
constexpr int exit_input = 2;

struct RunConfig {
  std::string input;
  std::string k_range = "1:4";
  std::size_t n = 6;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::size_t max_depth = 12;
  std::string format = "table";
  std::string out;
};

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || v < 1) throw InputError("-k expects K or K1:K2 with K >= 1, got '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const std::size_t k = number(text);
    return {k, k};
  }
  const std::size_t a = number(text.substr(0, colon));
  const std::size_t b = number(text.substr(colon + 1));
  if (a > b) throw InputError("-k range is empty: '" + text + "'");
  return {a, b};
}

void validate(const RunConfig& cfg) {
  if (!(cfg.tol > 0.0 && cfg.tol <= 1e-2)) throw InputError("--tol must lie in (0, 1e-2]");
  if (cfg.max_depth < 1) throw InputError("--max-depth must be at least 1");
  if (cfg.n < 1) throw InputError("-n must be at least 1");
  if (cfg.format != "table" && cfg.format != "json") throw InputError("--format must be 'table' or 'json'");
}

// Reads a connection from a path or a "builtin:<spec>" reference and returns it
// with the document text it was computed from.
std::pair<Connection, std::string> load(const std::string& input) {
  if (input.rfind("builtin:", 0) == 0) {
    const Connection c = build_from_spec(input.substr(8));
    return {c, write_connection(c)};
  }
  std::ifstream in(input);
  if (!in) throw InputError("cannot open '" + input + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return {read_connection(ss.str()), ss.str()};
}

void emit(const std::string& text, const RunConfig& cfg) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out);
  if (!out) throw InputError("cannot write '" + cfg.out + "'");
  out << text;
}

int run(const std::string& command, const RunConfig& cfg, const std::vector<std::string>& builtin_words) {
  validate(cfg);
  if (command == "builtin") {
    std::string spec;
    for (const auto& w : builtin_words) spec += (spec.empty() ? "" : ":") + w;
    emit(write_connection(build_from_spec(spec)) + "\n", cfg);
    return exit_pass;
  }

  const auto [w, text] = load(cfg.input);
  RunSettings s;
  s.input = cfg.input;
  s.input_document = text;
  s.seed = cfg.seed;
  s.tol = cfg.tol;
  s.max_depth = cfg.max_depth;
  const auto [k_min, k_max] = parse_range(cfg.k_range);

  Report r;
  if (command == "check") {
    r = check_report(w, s);
  } else if (command == "relcomm") {
    r = relcomm_report(w, k_min, k_max, s);
  } else {
    const BiunitarityReport bu = check_biunitarity(w, cfg.tol);
    if (!bu.passed) throw NumericError("connection is not bi-unitary (residual " + std::to_string(bu.residual()) + ")");
    const Irreducibles irr = discover_irreducibles(w, cfg.max_depth, cfg.seed, cfg.tol);
    if (command == "decompose") {
      r = decompose_report(irr, 4, s);
    } else if (command == "pmpo") {
      r = pmpo_report(irr, k_min, k_max, s);
    } else if (command == "verify-theorem") {
      r = verify_report(irr, k_min, k_max, s);
    } else {
      r = stats_report(irr, cfg.n, s);
    }
  }
  const nlohmann::json doc = document(command, s, r);
  emit(cfg.format == "json" ? doc.dump(2) + "\n" : render_table(doc), cfg);
  return r.passed ? exit_pass : exit_numeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-unitary connections, projector matrix product operators and flat fields"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::string> builtin_words;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) {
      sub->add_option("input", cfg.input, "connection document, or builtin:<family>:<parameter>")->required();
    }
    sub->add_option("--tol", cfg.tol, "check tolerance")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed for the endomorphism splitting")->capture_default_str();
    sub->add_option("--max-depth", cfg.max_depth, "largest power of W-tilde searched for sectors")->capture_default_str();
    sub->add_option("-k", cfg.k_range, "k or k1:k2")->capture_default_str();
    sub->add_option("-n", cfg.n, "largest power for statistics")->capture_default_str();
    sub->add_option("--format", cfg.format, "table or json")->capture_default_str();
    sub->add_option("--out", cfg.out, "write the report to this file");
  };

  CLI::App* builtin = app.add_subcommand("builtin", "write a built-in connection document");
  builtin->add_option("spec", builtin_words, "e.g. 'dynkin A3', 'trivial 2', 'cyclic 3'")->required();
  add_common(builtin, false);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"check", "bi-unitarity and eigenvalue-equation residuals"},
      {"decompose", "irreducible sectors and fusion data"},
      {"pmpo", "rank and identities of the projector MPO"},
      {"relcomm", "dimensions of flat fields of strings"},
      {"verify-theorem", "compare rank of P^k with the flat-field dimension"},
      {"stats", "path and sector statistics"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_input;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, cfg, builtin_words);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return exit_input;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return exit_numeric;
  }
}
