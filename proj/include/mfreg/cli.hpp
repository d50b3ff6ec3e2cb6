#pragma once

// Command-line front end. run_cli parses flags, runs either the built-in
// corpus or checks on a grid loaded from JSON, and writes one JSON report.
// Standard output receives only the report path.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mfreg/corpus.hpp"
#include "mfreg/regmoduli.hpp"
#include "mfreg/report.hpp"

namespace mfreg {

constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitInput = 3, kExitMismatch = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string corpus;  // "all" or comma-separated ids
  std::vector<std::string> checks;
  std::string point;
  std::optional<double> L;
  std::vector<double> resolutions;
  std::optional<double> window;
  std::optional<double> tolerance;
  int N = 30;
  bool N_set = false;
  std::uint64_t seed = 0;
  std::string report = "mfreg_report.json";

  json to_json() const {
    json j = json::object();
    if (!input.empty()) j["input"] = input;
    if (!corpus.empty()) j["corpus"] = corpus;
    if (!checks.empty()) j["checks"] = checks;
    if (!point.empty()) j["point"] = point;
    if (L) j["L"] = num(*L);
    if (!resolutions.empty()) j["resolutions"] = mfreg::to_json(resolutions, true);
    if (window) j["window"] = num(*window);
    if (tolerance) j["tolerance"] = num(*tolerance);
    if (!corpus.empty()) j["N"] = N;
    j["seed"] = seed;
    return j;
  }
};

namespace cli {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

inline Point parse_point(const std::string& s) {
  Point p;
  for (const auto& tok : split(s, ',')) {
    size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("--point: '" + tok + "' is not a number");
    }
    if (used != tok.size()) throw ConfigError("--point: '" + tok + "' is not a number");
    p.push_back(v);
  }
  if (p.empty()) throw ConfigError("--point is empty");
  return snap(p);
}

inline std::vector<std::string> corpus_selection(const std::string& s) {
  if (s == "all") return corpus_ids();
  auto ids = split(s, ',');
  if (ids.empty()) throw ConfigError("--corpus is empty");
  for (const auto& id : ids)
    if (!is_corpus_id(id)) throw ConfigError("unknown builtin '" + id + "'");
  return ids;
}

inline NbhdConfig nbhd(const RunConfig& rc) {
  NbhdConfig nb;
  if (rc.window) {
    if (!(*rc.window > 0)) throw ConfigError("--window must be positive");
    nb.r_U = nb.r_V = nb.r_W = *rc.window;
    nb.eps = *rc.window / 2;
  }
  if (rc.tolerance) {
    if (!(*rc.tolerance >= 0)) throw ConfigError("--tolerance must be nonnegative");
    nb.tol = *rc.tolerance;
  }
  return nb;
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

struct Problem {
  std::string kind;
  std::optional<FiniteMultifunction> F;
  std::optional<ParametricMultifunction> H;
};

inline Problem load_problem(const std::string& path) {
  json j = load_json(path);
  try {
    if (!j.is_object()) throw std::invalid_argument("problem must be a JSON object");
    if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
      throw std::invalid_argument("unsupported schema_version");
    Problem p;
    p.kind = j.value("kind", std::string("multifunction"));
    if (p.kind == "multifunction")
      p.F = multifunction_from_json(j);
    else if (p.kind == "parametric")
      p.H = parametric_from_json(j);
    else
      throw std::invalid_argument("kind must be 'multifunction' or 'parametric'");
    return p;
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("schema violation in '") + path + "': " + e.what());
  } catch (const json::exception& e) {
    throw InputError(std::string("schema violation in '") + path + "': " + e.what());
  }
}

inline double require_L(const RunConfig& rc, const std::string& check) {
  if (!rc.L) throw ConfigError("check '" + check + "' needs --L");
  if (!(*rc.L > 0)) throw ConfigError("--L must be positive");
  return *rc.L;
}

// Parametric check ids read <kind>_<direction>, e.g. calm_x_unif_p.
inline std::optional<std::pair<ParamKind, Direction>> parse_param_check(const std::string& s) {
  for (ParamKind k : {ParamKind::open, ParamKind::aubin, ParamKind::mreg, ParamKind::calm})
    for (Direction d : {Direction::x_unif_p, Direction::p_unif_x})
      if (s == std::string(param_kind_name(k)) + "_" + direction_name(d)) return std::make_pair(k, d);
  return std::nullopt;
}

inline json run_multifunction_check(const FiniteMultifunction& F, const std::string& check, const Point& xbar,
                                    const Point& ybar, const RunConfig& rc, const NbhdConfig& nb) {
  const bool estimate = check.rfind("estimate:", 0) == 0;
  const std::string name = estimate ? check.substr(9) : check;
  if (name == "around" || name == "at1" || name == "at2") {
    if (estimate) throw ConfigError("triads have no estimate form");
    double L = require_L(rc, check);
    if (name == "around") return check_around_triad(F, xbar, ybar, L, nb).to_json();
    if (name == "at1") return check_at1_triad(F, xbar, ybar, L, nb).to_json();
    return check_at2_triad(F, xbar, ybar, L, nb).to_json();
  }
  auto prop = parse_property(name);
  if (!prop) throw ConfigError("unknown check '" + check + "'");
  if (estimate) return estimate_modulus(F, xbar, ybar, *prop, nb).to_json();
  return check_property(F, xbar, ybar, *prop, require_L(rc, check), nb).to_json();
}

inline json run_parametric_check(const ParametricMultifunction& H, const std::string& check, const Point& xbar,
                                 const Point& pbar, const Point& ybar, const RunConfig& rc, const NbhdConfig& nb) {
  const bool estimate = check.rfind("estimate:", 0) == 0;
  auto kd = parse_param_check(estimate ? check.substr(9) : check);
  if (!kd) throw ConfigError("unknown parametric check '" + check + "'");
  if (estimate) return estimate_parametric(H, kd->second, kd->first, xbar, pbar, ybar, nb).to_json();
  return check_parametric(H, kd->second, kd->first, xbar, pbar, ybar, require_L(rc, check), nb).to_json();
}

inline json run_input(const RunConfig& rc, std::ostream& err) {
  if (!rc.resolutions.empty()) throw ConfigError("--resolution applies to --corpus; grid inputs carry their own");
  if (rc.N_set) throw ConfigError("--N applies to --corpus");
  if (rc.checks.empty()) throw ConfigError("--input needs at least one --check");
  if (rc.point.empty()) throw ConfigError("--input needs --point");
  const NbhdConfig nb = nbhd(rc);
  const Point pt = parse_point(rc.point);
  Problem prob = load_problem(rc.input);
  json results = json::array();
  for (const auto& check : rc.checks) {
    err << "running " << check << "\n";
    json r;
    try {
      if (prob.F) {
        const size_t dx = prob.F->domain[0].size(), dy = prob.F->meta.window.dim();
        if (pt.size() != dx + dy)
          throw ConfigError("--point needs " + std::to_string(dx + dy) + " coordinates (x then y)");
        Point xbar(pt.begin(), pt.begin() + dx), ybar(pt.begin() + dx, pt.end());
        r = run_multifunction_check(*prob.F, check, xbar, ybar, rc, nb);
      } else {
        const size_t dx = prob.H->x_grid[0].size(), dp = prob.H->p_grid[0].size(), dy = prob.H->meta.window.dim();
        if (pt.size() != dx + dp + dy)
          throw ConfigError("--point needs " + std::to_string(dx + dp + dy) + " coordinates (x, p, then y)");
        Point xbar(pt.begin(), pt.begin() + dx), pbar(pt.begin() + dx, pt.begin() + dx + dp),
            ybar(pt.begin() + dx + dp, pt.end());
        r = run_parametric_check(*prob.H, check, xbar, pbar, ybar, rc, nb);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("check '" + check + "': " + e.what());
    }
    results.push_back({{"check", check}, {"result", r}});
  }
  return {{"schema_version", kSchemaVersion},
          {"mode", "input"},
          {"problem_kind", prob.kind},
          {"config", rc.to_json()},
          {"results", results}};
}

inline json run_corpus_mode(const RunConfig& rc, std::ostream& err, bool& mismatch) {
  if (!rc.checks.empty() || !rc.point.empty() || rc.L) throw ConfigError("--check/--point/--L apply to --input");
  if (rc.window || rc.tolerance) throw ConfigError("--window/--tolerance apply to --input");
  if (rc.N < 5) throw ConfigError("--N must be at least 5");
  auto ids = corpus_selection(rc.corpus);
  std::vector<double> res = rc.resolutions.empty() ? std::vector<double>{1e-2} : rc.resolutions;
  for (double h : res)
    if (!(h > 0)) throw ConfigError("--resolution values must be positive");
  auto M = run_corpus(res, rc.N, ids, {}, [&](const std::string& s) { err << "running " << s << "\n"; });
  const std::string table = M.table();
  err << table;
  mismatch = !M.pass();
  json cfg = rc.to_json();
  cfg["corpus_ids"] = ids;
  cfg["resolutions"] = mfreg::to_json(res, true);
  return {{"schema_version", kSchemaVersion}, {"mode", "corpus"}, {"config", cfg},
          {"matrix", M.to_json()},            {"table", table}};
}

// Written to a sibling temporary and renamed, so a failed run leaves no
// partial report behind.
inline void write_report(const json& j, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw InputError("cannot write '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot write '" + path + "'");
  }
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig rc;
  CLI::App app{"Sampled checks of regularity properties of set-valued maps", "mfreg"};
  auto* in = app.add_option("--input", rc.input, "problem JSON (grid interchange format)");
  auto* co = app.add_option("--corpus", rc.corpus, "built-in examples: 'all' or comma-separated ids (E1..E7)");
  in->excludes(co);
  co->excludes(in);
  app.add_option("--check", rc.checks,
                 "check id, repeatable: a property (lop, lip, reg, plop, psdclm, hemreg, lpo, clm, subreg), a triad "
                 "(around, at1, at2), <kind>_<direction> for parametric inputs, or estimate:<id>");
  app.add_option("--point", rc.point, "base point, comma-separated: x then y (parametric: x, p, y)");
  app.add_option("--L", rc.L, "constant for the check");
  app.add_option("--resolution", rc.resolutions, "corpus grid steps, comma-separated")->delimiter(',');
  app.add_option("--window", rc.window, "neighborhood radius r_U = r_V = r_W (eps = half)");
  app.add_option("--tolerance", rc.tolerance, "comparison tolerance");
  auto* nopt = app.add_option("--N", rc.N, "truncation of sequence examples");
  app.add_option("--seed", rc.seed, "seed recorded in the report");
  app.add_option("--report", rc.report, "report path");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  rc.N_set = nopt->count() > 0;
  try {
    if (rc.input.empty() == rc.corpus.empty()) throw ConfigError("give exactly one of --input and --corpus");
    bool mismatch = false;
    json report = rc.input.empty() ? cli::run_corpus_mode(rc, err, mismatch) : cli::run_input(rc, err);
    cli::write_report(report, rc.report);
    out << rc.report << "\n";
    return mismatch ? kExitMismatch : kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace mfreg
