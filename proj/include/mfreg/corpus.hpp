#pragma once

// Built-in examples with their asserted verdicts, and the classification
// matrix comparing them with what the checkers measure on the grid.

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfreg/implicit.hpp"
#include "mfreg/regmoduli.hpp"
#include "mfreg/report.hpp"
#include "mfreg/sumstab.hpp"
#include "mfreg/theorem.hpp"

namespace mfreg {

struct CorpusConfig {
  double L_cap = 5;          // qualitative "holds"/"fails" is decided at this constant
  double slack = 0.05;       // "with constant c" means the estimate is at most c (1 + slack)
  bool growth_checks = true;  // rebuild sequence examples at smaller N to test monotone growth
};

struct CorpusItem {
  std::string entry;
  std::string property;
  std::string point;
  std::optional<double> constant;
  bool expected = true;
  bool measured = false;
  std::string claim;
  json evidence;

  bool agree() const { return expected == measured; }
  json to_json() const {
    return {{"entry", entry},
            {"property", property},
            {"point", point},
            {"constant", constant ? num(*constant) : json(nullptr)},
            {"expected", expected ? "holds" : "fails"},
            {"measured", measured ? "holds" : "fails"},
            {"agree", agree()},
            {"claim", claim},
            {"evidence", evidence}};
  }
};

struct EntryRun {
  std::string id;
  std::string description;
  std::vector<CorpusItem> items;
  std::vector<TheoremReport> theorems;

  json to_json() const {
    json it = json::array(), th = json::array();
    for (const auto& i : items) it.push_back(i.to_json());
    for (const auto& t : theorems) th.push_back(t.to_json());
    return {{"id", id}, {"description", description}, {"items", it}, {"theorems", th}};
  }
};

namespace corpus {

// Verdict helpers. "holds with constant c": the check passes at c (1 + slack)
// and the estimate does not exceed it.
inline CorpusItem qualitative(std::string entry, std::string prop, std::string point, bool expected,
                              std::string claim, const CheckReport& r) {
  CorpusItem it{std::move(entry), std::move(prop), std::move(point), std::nullopt, expected, r.holds,
                std::move(claim), r.to_json()};
  return it;
}

inline CorpusItem with_constant(std::string entry, std::string prop, std::string point, double c, std::string claim,
                                const CheckReport& r, const ModulusEstimate& e, double slack) {
  bool ok = r.holds && within_bound(e.value, ExtReal(c), slack);
  return {std::move(entry), std::move(prop), std::move(point), c, true, ok, std::move(claim),
          {{"check", r.to_json()}, {"estimate", e.to_json()}}};
}

inline bool strictly_increasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

inline std::vector<int> growth_ladder(int N) { return {std::max(2, N / 3), std::max(3, 2 * N / 3), N}; }

inline NbhdConfig exact_nb() {
  NbhdConfig nb;
  nb.cover_tol = 0;
  return nb;
}

// First example: 0 for |x| >= |p|, sqrt|p| otherwise.
inline SetDescription e1_h(const Point& x, const Point& p) {
  if (std::abs(x[0]) >= std::abs(p[0])) return SetDescription::singleton({0});
  return SetDescription::singleton({std::sqrt(std::abs(p[0]))});
}

inline SetDescription e2_h(const Point& x, const Point& p) {
  return SetDescription::interval(0, 1, std::abs(x[0]) < std::abs(p[0]), false);
}

inline SetDescription e3_h(const Point& x, const Point& p) {
  if (x[0] == 0) return SetDescription::singleton({std::abs(p[0])});
  if (p[0] == 0) return SetDescription::singleton({0});
  return SetDescription::singleton({std::abs(x[0]) / std::abs(p[0])});
}

inline ParametricMultifunction sample_square(const ParamOracle& f, double h, double r, double w) {
  return sample_parametric(f, grid_1d(-r, r, h), grid_1d(-r, r, h), Window::box(1, -w, w), h);
}

inline std::vector<Point> sequence_grid(int N) {
  std::vector<Point> g{{0.0}};
  for (int n = 1; n <= N; ++n) {
    g.push_back({1.0 / n});
    g.push_back({-1.0 / n});
  }
  return g;
}

inline EntryRun run_e1(double h, int N, const CorpusConfig& cc) {
  EntryRun run{"E1", "H(x,p) = {0} if |x| >= |p|, {sqrt|p|} otherwise; S(p) = R minus (-|p|, |p|)", {}, {}};
  auto H = sample_square(e1_h, h, 0.5, 2);
  TheoremConfig cfg;
  cfg.L_cap = cc.L_cap;
  auto mi = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::i, cfg);
  auto mii = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::ii, cfg);
  auto S = solve_implicit(H, cfg.tau_for(h));
  auto nb = exact_nb();
  const double c = 1 + cc.slack;
  run.items.push_back(with_constant("E1", "subreg S", "(0,0)", 1, "S is metrically subregular with constant 1",
                                    check_property(S, {0.0}, {0.0}, Property::subreg, c, nb),
                                    estimate_modulus(S, {0.0}, {0.0}, Property::subreg, nb), cc.slack));
  run.items.push_back(with_constant("E1", "clm S", "(0,0)", 1, "S is calm with constant 1",
                                    check_property(S, {0.0}, {0.0}, Property::clm, c, nb),
                                    estimate_modulus(S, {0.0}, {0.0}, Property::clm, nb), cc.slack));
  run.items.push_back(qualitative("E1", "lpo H(xbar,.)", "(0,0)", true, "H(0,.) is linearly pseudo-open",
                                  mii.premise_checks.at(0)));
  run.items.push_back(qualitative("E1", "lpo H(.,pbar)", "(0,0)", true, "H(.,0) is linearly pseudo-open",
                                  mi.premise_checks.at(0)));
  run.items.push_back(qualitative("E1", "calm_x_unif_p H", "((0,0),0)", false,
                                  "H is not calm in x uniformly in p", mii.premise_checks.at(1)));
  run.items.push_back(qualitative("E1", "calm_p_unif_x H", "((0,0),0)", false,
                                  "H is not calm in p uniformly in x", mi.premise_checks.at(1)));
  if (cc.growth_checks) {
    // sqrt(1/n) against L/n: the partial calmness ratio is sqrt(N) on the
    // grid of points +-1/n, n <= N.
    std::vector<double> ratios;
    json ev = json::array();
    for (int k : growth_ladder(N)) {
      auto Hk = sample_parametric(e1_h, sequence_grid(k), sequence_grid(k), Window::box(1, -2, 2), h);
      auto e = estimate_parametric(Hk, Direction::x_unif_p, ParamKind::calm, {0.0}, {0.0}, {0.0}, nb);
      ratios.push_back(e.value.value());
      ev.push_back({{"N", k}, {"ratio", num(e.value)}});
    }
    run.items.push_back({"E1", "calm_x_unif_p ratio grows with N", "((0,0),0)", std::nullopt, true,
                         strictly_increasing(ratios), "violation sqrt(1/n) > L/n diverges", ev});
  }
  run.theorems.push_back(std::move(mi));
  run.theorems.push_back(std::move(mii));
  return run;
}

inline EntryRun run_e2(double h, int, const CorpusConfig& cc) {
  EntryRun run{"E2", "H(x,p) = [0,1] if |x| >= |p|, (0,1] otherwise", {}, {}};
  const double r = 0.25;
  auto H = sample_parametric(e2_h, grid_1d(-r, r, h), grid_1d(-r, r, h), Window::box(1, -0.5, 0.5), h);
  TheoremConfig cfg;
  cfg.L_cap = cc.L_cap;
  cfg.nb.r_U = cfg.nb.r_V = cfg.nb.r_W = r;
  cfg.nb.eps = r / 2;
  // The rate is left free: the pseudo-openness failure holds for every c > 0,
  // so it is checked at the small rate 1 / L_cap.
  auto mii = verify_thm_main(H, {0.0}, {0.0}, 1 / cc.L_cap, MainDirection::ii, cfg);
  auto S = solve_implicit(H, cfg.tau_for(h));
  auto nb = exact_nb();
  nb.r_U = nb.r_V = nb.r_W = r;
  nb.eps = r / 2;
  run.items.push_back(qualitative("E2", "subreg S", "(0,0)", true, "S is metrically subregular",
                                  check_property(S, {0.0}, {0.0}, Property::subreg, cc.L_cap, nb)));
  run.items.push_back(qualitative("E2", "lpo H(xbar,.)", "(0,0)", false, "H(0,.) is not linearly pseudo-open",
                                  mii.premise_checks.at(0)));
  auto cnb = cfg.nb;
  cnb.cover_tol = cfg.tau_for(h);
  run.items.push_back(qualitative(
      "E2", "calm_x_unif_p H", "((0,0),0)", true, "H is calm in x uniformly in p",
      check_parametric(H, Direction::x_unif_p, ParamKind::calm, {0.0}, {0.0}, {0.0}, cc.L_cap, cnb)));
  run.theorems.push_back(std::move(mii));
  return run;
}

inline EntryRun run_e3(double h, int, const CorpusConfig& cc) {
  EntryRun run{"E3", "H(x,p) = {|x|/|p|} for x, p nonzero, {0} for p = 0, {|p|} for x = 0", {}, {}};
  auto H = sample_square(e3_h, h, 0.5, 2);
  TheoremConfig cfg;
  cfg.L_cap = cc.L_cap;
  auto mii = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::ii, cfg);
  auto mc = check_M_condition(H, {0.0}, {0.0}, 1, 1, MainDirection::ii, cfg);
  auto S = solve_implicit(H, cfg.tau_for(h));
  auto nb = exact_nb();
  run.items.push_back(qualitative("E3", "lpo H(xbar,.)", "(0,0)", true, "H(0,.) is linearly pseudo-open with c = 1",
                                  mii.premise_checks.at(0)));
  {
    CorpusItem it{"E3", "M condition (subregularity form)", "(0,0)", 1.0, true, mc.premises_hold,
                  "the gap condition holds with M = 1", mc.to_json()};
    run.items.push_back(std::move(it));
  }
  run.items.push_back(with_constant("E3", "subreg S", "(0,0)", 1, "S is metrically subregular",
                                    check_property(S, {0.0}, {0.0}, Property::subreg, 1 + cc.slack, nb),
                                    estimate_modulus(S, {0.0}, {0.0}, Property::subreg, nb), cc.slack));
  run.items.push_back(qualitative("E3", "calm_x_unif_p H", "((0,0),0)", false, "H is not calm in x uniformly in p",
                                  mii.premise_checks.at(1)));
  run.theorems.push_back(std::move(mii));
  run.theorems.push_back(std::move(mc));
  return run;
}

inline FiniteMultifunction sample_line(const ImageOracle& f, double h, double r = 1, double w = 4) {
  return sample_multifunction(f, grid_1d(-r, r, h), Window::box(1, -w, w), h);
}

struct SumPair {
  FiniteMultifunction F, G;
  Point ybar, zbar;
};

inline SumPair e4_pair(double h) {
  return {sample_line(
              [](const Point& x) {
                auto d = SetDescription::interval(0, 1);
                if (x[0] != 0) d |= SetDescription::singleton({2});
                return d;
              },
              h),
          sample_line([](const Point&) { return SetDescription::interval(0, 1); }, h), {1.0}, {1.0}};
}

inline SumPair e5_pair(double h) {
  return {sample_line([](const Point& x) { return SetDescription::interval(0, x[0] != 0 ? 2 : 1); }, h),
          sample_line([](const Point& x) { return SetDescription::interval(x[0] != 0 ? 0 : 1, 2); }, h), {1.0}, {1.0}};
}

inline SumPair e6_pair(double h) {
  return {sample_line(
              [](const Point& x) {
                double v = x[0];
                if (v < 0) return SetDescription::interval(0, v + 1);
                if (v > 0) return SetDescription::interval(0, 1 - v);
                return SetDescription::singleton({0}) | SetDescription::interval(0.5, 1);
              },
              h),
          sample_line(
              [](const Point& x) {
                double v = x[0];
                if (v == 0) return SetDescription::interval(-1, 0);
                return SetDescription::list({{-1 + std::abs(v)}, {0}});
              },
              h),
          {0.0}, {0.0}};
}

inline void sum_items(EntryRun& run, const SumPair& P, bool F_calm, bool G_calm, bool sum_calm,
                      std::optional<bool> stable, const std::string& yz, const std::string& w,
                      const CorpusConfig& cc) {
  NbhdConfig nb;
  const Point x0{0.0};
  const std::string& id = run.id;
  auto verdict = [](bool b) { return std::string(b ? "" : "not "); };
  run.items.push_back(qualitative(id, "clm F", "(0," + yz + ")", F_calm, "F is " + verdict(F_calm) + "calm",
                                  check_property(P.F, x0, P.ybar, Property::clm, cc.L_cap, nb)));
  run.items.push_back(qualitative(id, "clm G", "(0," + yz + ")", G_calm, "G is " + verdict(G_calm) + "calm",
                                  check_property(P.G, x0, P.zbar, Property::clm, cc.L_cap, nb)));
  auto sum = minkowski_sum(restrict_domain(P.F, x0, nb.r_U), restrict_domain(P.G, x0, nb.r_U));
  run.items.push_back(qualitative(id, "clm F+G", "(0," + w + ")", sum_calm, "F+G is " + verdict(sum_calm) + "calm",
                                  check_property(sum, x0, add(P.ybar, P.zbar), Property::clm, cc.L_cap, nb)));
  if (stable)
    run.items.push_back(qualitative(id, "sum_stable (F,G)", "(0," + yz + "," + yz + ")", *stable,
                                    std::string("(F,G) is ") + verdict(*stable) + "locally sum-stable",
                                    check_sum_stability(P.F, P.G, x0, P.ybar, P.zbar)));
  CalmSumConfig cs;
  cs.L_cap = cc.L_cap;
  run.theorems.push_back(verify_calm_sum(P.F, P.G, x0, P.ybar, P.zbar, cs));
}

inline EntryRun run_e4(double h, int, const CorpusConfig& cc) {
  EntryRun run{"E4", "F = [0,1] u {2} off 0, [0,1] at 0; G = [0,1]", {}, {}};
  sum_items(run, e4_pair(h), true, true, false, std::nullopt, "1", "2", cc);
  return run;
}

inline EntryRun run_e5(double h, int, const CorpusConfig& cc) {
  EntryRun run{"E5", "F = [0,2] off 0, [0,1] at 0; G = [0,2] off 0, [1,2] at 0", {}, {}};
  auto P = e5_pair(h);
  sum_items(run, P, false, false, true, std::nullopt, "1", "2", cc);
  run.theorems.push_back(verify_calm_sum_decomposable(P.F, P.G, {0.0}, P.ybar, P.zbar, 1, 1));
  return run;
}

inline EntryRun run_e6(double h, int, const CorpusConfig& cc) {
  EntryRun run{"E6", "F = [0,1-|x|] off 0, {0} u [1/2,1] at 0; G = {-1+|x|, 0} off 0, [-1,0] at 0", {}, {}};
  sum_items(run, e6_pair(h), false, true, true, false, "0", "0", cc);
  return run;
}

// Sequence example in R^2 with the additive norm, truncated at N.
struct E7Data {
  ParametricMultifunction F;
  FiniteMultifunction G;
  FiniteMultifunction S;
};

constexpr double kE7Window = 0.2;

inline E7Data e7_build(double h, int N) {
  const double r = kE7Window;
  std::vector<Point> xs = grid_1d(-r, r, h), ps = grid_1d(-r, r, h);
  auto keep = [r](double v) { return std::abs(v) <= r; };
  for (int n = 1; n <= N; ++n) {
    const double n2 = 1.0 / (double(n) * n), n3 = n2 / n;
    for (double v : {-n2, -n3})
      if (keep(v)) xs.push_back({v});
    for (double v : {n2, -1.0 / n})
      if (keep(v)) ps.push_back({v});
    for (int m = 1; m <= N; ++m) {
      const double m2 = 1.0 / (double(m) * m);
      if (keep(-n3 - m2)) xs.push_back({-n3 - m2});
      if (keep(m2 - 1.0 / n)) ps.push_back({m2 - 1.0 / n});
    }
  }
  const Window W = Window::box(2, -0.5, 0.5);
  auto F = sample_parametric(
      [N](const Point&, const Point& p) {
        std::vector<Point> pts{{0.0, p[0]}};
        for (int n = 1; n <= N; ++n) {
          double n2 = 1.0 / (double(n) * n);
          pts.push_back({n2, p[0] - n2});
        }
        return SetDescription::list(std::move(pts));
      },
      xs, ps, W, h, Dependence::p_only, Norm::max, Norm::max, Norm::sum);
  auto G = sample_multifunction(
      [N](const Point& x) {
        std::vector<Point> pts{{x[0], 0.0}};
        for (int n = 1; n <= N; ++n) pts.push_back({x[0] + 1.0 / (double(n) * n * n), 1.0 / n});
        return SetDescription::list(std::move(pts));
      },
      F.x_grid, W, h, 0, Norm::max, Norm::sum);
  G.meta.h_x = h;
  F.meta.h_x = F.meta.h_p = h;
  auto S = solve_sum(F, G, 1e-9);
  return {std::move(F), std::move(G), std::move(S)};
}

inline double e7_ratio(const FiniteMultifunction& S) {
  auto Sinv = invert(S, false);
  return estimate_modulus(Sinv, {0.0}, {0.0}, Property::clm, exact_nb()).value.value();
}

inline EntryRun run_e7(double h, int N, const CorpusConfig& cc) {
  EntryRun run{"E7", "F(x,p) = {(0,p)} u {(1/n^2, p-1/n^2)}, G(x) = {(x,0)} u {(x+1/n^3, 1/n)}, n <= N", {}, {}};
  auto d = e7_build(h, N);
  const Point o1{0.0}, o2{0.0, 0.0};
  auto nb = exact_nb();
  nb.targets = TargetMode::graph_only;

  run.items.push_back(qualitative("E7", "subreg S", "(0,0)", false, "S is not metrically subregular",
                                  check_property(d.S, o1, o1, Property::subreg, cc.L_cap, nb)));
  {
    const double bound = (N - 1.0) * N / (N + 1.0);
    const double ratio = e7_ratio(d.S);
    run.items.push_back({"E7", "clm S^-1 ratio >= (N-1)N/(N+1)", "(0,0)", bound, true,
                         ratio >= bound * (1 - cc.slack), "S^-1 calmness ratio at least (N-1)N/(N+1)",
                         {{"ratio", num(ratio)}, {"bound", num(bound)}}});
  }
  auto F0 = d.F.slice_x(*d.F.find_x(o1));
  run.items.push_back(with_constant("E7", "subreg F(xbar,.)", "(0,(0,0))", 1, "F(0,.) is metrically subregular",
                                    check_property(F0, o1, o2, Property::subreg, 1 + cc.slack, nb),
                                    estimate_modulus(F0, o1, o2, Property::subreg, nb), cc.slack));
  NbhdConfig lat;
  run.items.push_back(qualitative("E7", "reg F(xbar,.)", "(0,(0,0))", false,
                                  "F(0,.) is not metrically regular around the point",
                                  check_property(F0, o1, o2, Property::reg, cc.L_cap, lat)));
  run.items.push_back(with_constant(
      "E7", "calm_x_unif_p F", "((0,0),(0,0))", 1, "F is calm in x uniformly in p with modulus 1",
      check_parametric(d.F, Direction::x_unif_p, ParamKind::calm, o1, o1, o2, 1 + cc.slack, nb),
      estimate_parametric(d.F, Direction::x_unif_p, ParamKind::calm, o1, o1, o2, nb), cc.slack));
  run.items.push_back(with_constant("E7", "clm G", "(0,(0,0))", 1, "G is calm with modulus 1",
                                    check_property(d.G, o1, o2, Property::clm, 1 + cc.slack, nb),
                                    estimate_modulus(d.G, o1, o2, Property::clm, nb), cc.slack));
  // delta(eps) is about eps / 4 here; a floor of 2h would cut off the eps = 0.1
  // level at h = 1e-2. infer_step on the merged grids is far below h.
  SumStabilityConfig ss;
  ss.delta_floor = h;
  run.items.push_back(qualitative("E7", "sum_stable_param (F,G)", "((0,0),(0,0),(0,0))", true,
                                  "(F,G) is locally sum-stable",
                                  check_sum_stability_param(d.F, d.G, o1, o1, o2, o2, ss, kE7Window)));
  if (cc.growth_checks) {
    std::vector<double> ratios;
    json ev = json::array();
    for (int k : growth_ladder(N)) {
      double v = k == N ? e7_ratio(d.S) : e7_ratio(e7_build(h, k).S);
      ratios.push_back(v);
      ev.push_back({{"N", k}, {"ratio", num(v)}});
    }
    run.items.push_back({"E7", "clm S^-1 ratio grows with N", "(0,0)", std::nullopt, true,
                         strictly_increasing(ratios), "violation (n-1)n/(n+1) < l diverges", ev});
  }
  TheoremConfig tc;
  tc.L_cap = cc.L_cap;
  tc.tau = 1e-9;
  tc.ss = ss;
  run.theorems.push_back(verify_variational_system(d.F, d.G, o1, o1, o2, VariationalMode::msubreg_sol, tc));
  return run;
}

using EntryRunner = std::function<EntryRun(double, int, const CorpusConfig&)>;

inline const std::vector<std::pair<std::string, EntryRunner>>& registry() {
  static const std::vector<std::pair<std::string, EntryRunner>> r{
      {"E1", run_e1}, {"E2", run_e2}, {"E3", run_e3}, {"E4", run_e4},
      {"E5", run_e5}, {"E6", run_e6}, {"E7", run_e7}};
  return r;
}

}  // namespace corpus

inline std::vector<std::string> corpus_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : corpus::registry()) ids.push_back(id);
  return ids;
}

inline bool is_corpus_id(const std::string& id) {
  for (const auto& [k, fn] : corpus::registry())
    if (k == id) return true;
  return false;
}

inline EntryRun run_corpus_entry(const std::string& id, double h, int N, const CorpusConfig& cc = {}) {
  for (const auto& [k, fn] : corpus::registry())
    if (k == id) return fn(h, N, cc);
  throw std::invalid_argument("unknown corpus entry '" + id + "'");
}

struct ClassificationMatrix {
  std::vector<double> resolutions;  // as given; the finest is the smallest
  int N = 30;
  std::vector<std::vector<EntryRun>> runs;  // runs[r][entry]

  bool agree_at(size_t r) const {
    for (const auto& e : runs[r])
      for (const auto& it : e.items)
        if (!it.agree()) return false;
    return true;
  }
  size_t finest() const {
    size_t k = 0;
    for (size_t i = 1; i < resolutions.size(); ++i)
      if (resolutions[i] < resolutions[k]) k = i;
    return k;
  }
  bool pass() const { return !runs.empty() && agree_at(finest()); }
  bool all_agree() const {
    for (size_t r = 0; r < runs.size(); ++r)
      if (!agree_at(r)) return false;
    return true;
  }
  // No measured verdict differs between the two finest resolutions.
  bool stable() const {
    if (runs.size() < 2) return true;
    std::vector<size_t> order(runs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return resolutions[a] < resolutions[b]; });
    const auto& a = runs[order[0]];
    const auto& b = runs[order[1]];
    for (size_t e = 0; e < a.size(); ++e)
      for (size_t i = 0; i < a[e].items.size() && i < b[e].items.size(); ++i)
        if (a[e].items[i].measured != b[e].items[i].measured) return false;
    return true;
  }
  size_t item_count(size_t r) const {
    size_t n = 0;
    for (const auto& e : runs[r]) n += e.items.size();
    return n;
  }
  size_t agree_count(size_t r) const {
    size_t n = 0;
    for (const auto& e : runs[r])
      for (const auto& it : e.items) n += it.agree();
    return n;
  }

  json to_json() const {
    json res = json::array();
    for (size_t r = 0; r < runs.size(); ++r) {
      json entries = json::array();
      for (const auto& e : runs[r]) entries.push_back(e.to_json());
      res.push_back({{"h", num(resolutions[r])},
                     {"agreement", std::to_string(agree_count(r)) + "/" + std::to_string(item_count(r))},
                     {"all_agree", agree_at(r)},
                     {"entries", entries}});
    }
    return {{"N", N}, {"pass", pass()}, {"all_resolutions_agree", all_agree()}, {"stable", stable()},
            {"resolutions", res}};
  }

  std::string table() const {
    std::ostringstream os;
    if (runs.empty()) return "";
    os << "entry  property                              point              expected";
    for (double h : resolutions) os << "  h=" << h;
    os << "\n";
    const auto& first = runs[0];
    for (size_t e = 0; e < first.size(); ++e)
      for (size_t i = 0; i < first[e].items.size(); ++i) {
        const auto& it = first[e].items[i];
        char line[160];
        std::snprintf(line, sizeof line, "%-6s %-37s %-18s %-8s", it.entry.c_str(), it.property.c_str(),
                      it.point.c_str(), it.expected ? "holds" : "fails");
        os << line;
        for (const auto& run : runs) {
          const auto& m = run[e].items[i];
          os << "  " << (m.measured ? "holds" : "fails") << (m.agree() ? "  " : " !");
        }
        os << "\n";
      }
    for (size_t r = 0; r < runs.size(); ++r)
      os << "h=" << resolutions[r] << ": " << agree_count(r) << "/" << item_count(r) << " agree\n";
    os << (pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
  }
};

inline ClassificationMatrix run_corpus(const std::vector<double>& resolutions, int N,
                                       const std::vector<std::string>& ids = corpus_ids(),
                                       const CorpusConfig& cc = {},
                                       const std::function<void(const std::string&)>& progress = {}) {
  if (N < 5) throw std::invalid_argument("N must be at least 5");
  if (resolutions.empty()) throw std::invalid_argument("no resolutions");
  for (double h : resolutions)
    if (!(h > 0)) throw std::invalid_argument("resolutions must be positive");
  for (const auto& id : ids)
    if (!is_corpus_id(id)) throw std::invalid_argument("unknown corpus entry '" + id + "'");
  ClassificationMatrix M;
  M.resolutions = resolutions;
  M.N = N;
  for (double h : resolutions) {
    std::vector<EntryRun> row;
    for (const auto& id : ids) {
      if (progress) progress(id + " at h=" + std::to_string(h));
      row.push_back(run_corpus_entry(id, h, N, cc));
    }
    M.runs.push_back(std::move(row));
  }
  return M;
}

}  // namespace mfreg
