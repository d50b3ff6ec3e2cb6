#pragma once

// Minkowski sums of sampled multifunctions, local sum-stability (plain and
// parametric) and the calmness-of-sums verifiers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfreg/regmoduli.hpp"
#include "mfreg/report.hpp"
#include "mfreg/setcore.hpp"
#include "mfreg/theorem.hpp"

namespace mfreg {

inline FiniteSet set_sum(const FiniteSet& A, const FiniteSet& B) {
  std::vector<Point> out;
  out.reserve(A.size() * B.size());
  for (const auto& a : A)
    for (const auto& b : B) out.push_back(snap(add(a, b)));
  return FiniteSet(std::move(out));
}

inline Window window_sum(const Window& a, const Window& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("window dimensions differ");
  return {add(a.lo, b.lo), add(a.hi, b.hi)};
}

// Nodes within distance r of center, for checks that only look at a ball.
inline FiniteMultifunction restrict_domain(const FiniteMultifunction& F, const Point& center, double r) {
  FiniteMultifunction R;
  R.meta = F.meta;
  for (size_t i = 0; i < F.size(); ++i)
    if (dist(F.domain[i], center, F.meta.nx) <= r + 1e-12) {
      R.domain.push_back(F.domain[i]);
      R.images.push_back(F.images[i]);
    }
  return R;
}

inline FiniteMultifunction minkowski_sum(const FiniteMultifunction& F, const FiniteMultifunction& G) {
  if (F.domain != G.domain) throw std::invalid_argument("minkowski_sum needs identical domain grids");
  FiniteMultifunction S;
  S.domain = F.domain;
  S.meta = F.meta;
  S.meta.window = window_sum(F.meta.window, G.meta.window);
  S.images.reserve(F.size());
  for (size_t i = 0; i < F.size(); ++i) S.images.push_back(set_sum(F.images[i], G.images[i]));
  return S;
}

struct SumStabilityConfig {
  std::vector<double> eps_grid;     // decreasing; empty: {r, r/2, r/4} with r supplied by the caller (default 0.25)
  std::vector<double> delta_fracs;  // delta = eps * frac, tried largest first; empty: 2^-1 .. 2^-12
  double tol_w = -1;                // decomposition tolerance; negative: h_y
  double delta_floor = -1;          // smallest delta tried; negative: 2 max(h_x, h_y)

  std::vector<double> eps(double r = 0.25) const {
    if (!eps_grid.empty()) return eps_grid;
    return {r, r / 2, r / 4};
  }
  std::vector<double> fracs() const {
    if (!delta_fracs.empty()) return delta_fracs;
    std::vector<double> f;
    for (int k = 1; k <= 12; ++k) f.push_back(std::ldexp(1.0, -k));
    return f;
  }
  void validate() const {
    for (double e : eps_grid)
      if (!(e > 0)) throw std::invalid_argument("eps_grid values must be positive");
    for (double f : delta_fracs)
      if (!(f > 0 && f < 1)) throw std::invalid_argument("delta fractions must lie in (0, 1)");
  }
};

namespace detail {

// Lowest level max(d(x, xbar), d(w, ybar + zbar)[, d(p, pbar)]) at which some
// w in (F + G)(x) has no decomposition y + z within tol_w with y, z in the
// eps-balls; infinity when every sampled w decomposes.
struct Violation {
  double level = std::numeric_limits<double>::infinity();
  json witness;
};

// fx: F(x) (or F(x, p)), gx: G(x); base distance d0 from the frozen
// variables. Only w with level below cutoff are examined.
inline void scan_decompositions(const FiniteSet& fx, const FiniteSet& gx, const Point& ybar, const Point& zbar,
                                double eps, double tol_w, double d0, double cutoff, Norm ny, Violation& best,
                                const json& where) {
  if (fx.empty() || gx.empty() || d0 >= best.level || d0 > cutoff) return;
  const Point c = add(ybar, zbar);
  const auto& gpts = gx.points();
  std::vector<char> g_in(gpts.size());
  std::vector<Point> ge;
  for (size_t k = 0; k < gpts.size(); ++k)
    if ((g_in[k] = dist(gpts[k], zbar, ny) <= eps + 1e-12)) ge.push_back(gpts[k]);
  std::vector<Point> fe;
  for (const auto& y : fx)
    if (dist(y, ybar, ny) <= eps + 1e-12) fe.push_back(y);
  // Built on first need: w = y + z with both summands in their eps-balls
  // decomposes trivially, which is the common case.
  std::optional<FiniteSet> good;
  for (const auto& y : fx) {
    const bool y_in = dist(y, ybar, ny) <= eps + 1e-12;
    // z must satisfy |y0 + z0 - c0| <= cutoff, a window on the sorted first coordinate
    double lo = c[0] - y[0] - cutoff - 1e-12, hi = c[0] - y[0] + cutoff + 1e-12;
    for (size_t k = first_at_least(gpts, lo); k < gpts.size() && gpts[k][0] <= hi; ++k) {
      if (y_in && g_in[k]) continue;
      Point w = snap(add(y, gpts[k]));
      double lvl = std::max(d0, dist(w, c, ny));
      if (lvl > cutoff || lvl >= best.level) continue;
      if (!good) good = set_sum(FiniteSet(fe), FiniteSet(ge));
      if (dist_point_set_raw(w, *good, ny) > tol_w + 1e-12) {
        best.level = lvl;
        best.witness = where;
        best.witness["w"] = to_json(w);
        best.witness["eps"] = num(eps);
        best.witness["level"] = num(lvl);
      }
    }
  }
}

struct StabilitySweep {
  bool holds = true;
  json per_eps = json::array();
  json witness;
  double delta_at_first_eps = 0;  // largest passing delta for the largest eps
  std::vector<double> skipped;
};

template <class ScanFn>
StabilitySweep sweep_eps(const std::vector<double>& eps_list, const std::vector<double>& fracs, double floor,
                         ScanFn&& scan) {
  StabilitySweep out;
  bool first = true;
  for (double eps : eps_list) {
    std::vector<double> deltas;
    for (double f : fracs)
      if (eps * f >= floor) deltas.push_back(eps * f);
    if (deltas.empty()) {
      out.skipped.push_back(eps);  // below the grid resolution
      continue;
    }
    Violation v = scan(eps, deltas.front());
    double passing = 0;
    for (double d : deltas)
      if (d < v.level) {
        passing = d;
        break;
      }
    out.per_eps.push_back({{"eps", num(eps)}, {"largest_delta", num(passing)}});
    if (first) out.delta_at_first_eps = passing;
    first = false;
    if (passing == 0) {
      out.holds = false;
      out.witness = v.witness;
      out.witness["smallest_delta_tried"] = num(deltas.back());
      break;
    }
  }
  if (first) {
    out.holds = false;
    out.witness = {{"reason", "no eps in the grid admits a delta above the resolution floor"}};
  }
  return out;
}

inline double resolved_tol(const SumStabilityConfig& cfg, double h_y) { return cfg.tol_w >= 0 ? cfg.tol_w : h_y; }
inline double resolved_floor(const SumStabilityConfig& cfg, double h_x, double h_y) {
  return cfg.delta_floor >= 0 ? cfg.delta_floor : 2 * std::max(h_x, h_y);
}

inline CheckReport stability_report(const char* name, const StabilitySweep& s, const std::vector<double>& eps,
                                    double tol_w, double floor) {
  CheckReport r;
  r.property = name;
  r.holds = s.holds;
  r.L = 0;
  r.witness = s.holds ? json(nullptr) : s.witness;
  r.config = {{"eps_grid", to_json(eps, true)}, {"tol_w", num(tol_w)}, {"delta_floor", num(floor)},
              {"largest_delta_per_eps", s.per_eps}, {"delta_at_largest_eps", num(s.delta_at_first_eps)}};
  r.notes.push_back("holds means: for every swept eps some delta in the grid works");
  if (!s.skipped.empty())
    r.notes.push_back(std::to_string(s.skipped.size()) + " eps values below the resolution floor were skipped");
  return r;
}

}  // namespace detail

inline CheckReport check_sum_stability(const FiniteMultifunction& F, const FiniteMultifunction& G, const Point& xbar,
                                       const Point& ybar, const Point& zbar, const SumStabilityConfig& cfg = {},
                                       double eps_scale = 0.25) {
  cfg.validate();
  auto ix = F.find(xbar);
  auto jx = G.find(xbar);
  if (!ix || !jx) throw std::invalid_argument("xbar is not a domain node of both maps");
  if (!F.images[*ix].contains(snap(ybar))) throw std::invalid_argument("ybar is not in F(xbar)");
  if (!G.images[*jx].contains(snap(zbar))) throw std::invalid_argument("zbar is not in G(xbar)");
  const double h_y = std::max(F.meta.h_y, G.meta.h_y);
  const double tol_w = detail::resolved_tol(cfg, h_y);
  const double floor = detail::resolved_floor(cfg, F.meta.h_x, h_y);
  const auto eps = cfg.eps(eps_scale);
  auto sweep = detail::sweep_eps(eps, cfg.fracs(), floor, [&](double e, double cutoff) {
    detail::Violation v;
    for (size_t i = 0; i < F.size(); ++i) {
      double dx = dist(F.domain[i], xbar, F.meta.nx);
      if (dx > cutoff) continue;
      auto j = G.find(F.domain[i]);
      if (!j) continue;
      detail::scan_decompositions(F.images[i], G.images[*j], ybar, zbar, e, tol_w, dx, cutoff, F.meta.ny, v,
                                  {{"x", to_json(F.domain[i])}});
    }
    return v;
  });
  return detail::stability_report("sum_stability", sweep, eps, tol_w, floor);
}

// Parametric variant: (x, p) ranges over the product ball, G depends on x only.
inline CheckReport check_sum_stability_param(const ParametricMultifunction& F, const FiniteMultifunction& G,
                                             const Point& xbar, const Point& pbar, const Point& ybar,
                                             const Point& zbar, const SumStabilityConfig& cfg = {},
                                             double eps_scale = 0.25) {
  cfg.validate();
  auto ix = F.find_x(xbar);
  auto ip = F.find_p(pbar);
  auto jx = G.find(xbar);
  if (!ix || !ip || !jx) throw std::invalid_argument("base point is not a grid node");
  if (!F.image(*ix, *ip).contains(snap(ybar))) throw std::invalid_argument("ybar is not in F(xbar, pbar)");
  if (!G.images[*jx].contains(snap(zbar))) throw std::invalid_argument("zbar is not in G(xbar)");
  const double h_y = std::max(F.meta.h_y, G.meta.h_y);
  const double tol_w = detail::resolved_tol(cfg, h_y);
  const double floor = detail::resolved_floor(cfg, std::max(F.meta.h_x, F.meta.h_p), h_y);
  const auto eps = cfg.eps(eps_scale);
  auto sweep = detail::sweep_eps(eps, cfg.fracs(), floor, [&](double e, double cutoff) {
    detail::Violation v;
    for (size_t a = 0; a < F.nx(); ++a) {
      double dx = dist(F.x_grid[a], xbar, F.meta.nx);
      if (dx > cutoff) continue;
      auto j = G.find(F.x_grid[a]);
      if (!j) continue;
      for (size_t b = 0; b < F.np(); ++b) {
        double dp = dist(F.p_grid[b], pbar, F.meta.np);
        if (dp > cutoff) continue;
        detail::scan_decompositions(F.image(a, b), G.images[*j], ybar, zbar, e, tol_w, std::max(dx, dp), cutoff,
                                    F.meta.ny, v, {{"x", to_json(F.x_grid[a])}, {"p", to_json(F.p_grid[b])}});
      }
    }
    return v;
  });
  return detail::stability_report("sum_stability_param", sweep, eps, tol_w, floor);
}

// Decomposition hypothesis: every w in (F + G)(x) near ybar + zbar splits as
// y + z with d(y, F(xbar)) <= L_F d(x, xbar) and d(z, G(xbar)) <= L_G d(x, xbar).
inline CheckReport check_decomposable(const FiniteMultifunction& F, const FiniteMultifunction& G, const Point& xbar,
                                      const Point& ybar, const Point& zbar, double L_F, double L_G,
                                      const NbhdConfig& nb) {
  auto ix = F.find(xbar);
  auto jx = G.find(xbar);
  if (!ix || !jx) throw std::invalid_argument("xbar is not a domain node of both maps");
  const FiniteSet& Fb = F.images[*ix];
  const FiniteSet& Gb = G.images[*jx];
  const Point c = add(ybar, zbar);
  const Norm ny = F.meta.ny;
  for (size_t i = 0; i < F.size(); ++i) {
    double dx = dist(F.domain[i], xbar, F.meta.nx);
    if (dx > nb.r_U + 1e-12) continue;
    auto j = G.find(F.domain[i]);
    if (!j) continue;
    std::vector<const Point*> ys, zs;
    for (const auto& y : F.images[i])
      if (dist_point_set_raw(y, Fb, ny) <= L_F * dx + nb.tol) ys.push_back(&y);
    std::vector<Point> zgood;
    for (const auto& z : G.images[*j])
      if (dist_point_set_raw(z, Gb, ny) <= L_G * dx + nb.tol) zgood.push_back(z);
    FiniteSet Zg(std::move(zgood));
    for (const auto& w : set_sum(F.images[i], G.images[*j])) {
      if (dist(w, c, ny) > nb.r_V + 1e-12) continue;
      bool ok = false;
      for (const Point* y : ys)
        if (dist_point_set_raw(snap(sub(w, *y)), Zg, ny) <= 1e-12) {
          ok = true;
          break;
        }
      if (!ok)
        return custom_check("decomposable", false, L_F + L_G,
                            {{"x", to_json(F.domain[i])}, {"w", to_json(w)}, {"L_F", num(L_F)}, {"L_G", num(L_G)}},
                            nb.to_json());
    }
  }
  return custom_check("decomposable", true, L_F + L_G, nullptr, nb.to_json());
}

struct CalmSumConfig {
  NbhdConfig nb;
  SumStabilityConfig ss;
  double L_cap = 5;  // "calm" premise: the check passes at this constant
  double bound_slack = 0.05;
  bool falsification = false;
};

// Calmness of F + G from calm components and local sum-stability. The
// conclusion is checked on the neighborhoods B(xbar, delta) x B(ybar + zbar,
// delta) with delta the sum-stability radius found for eps = min(r_U, r_V).
inline TheoremReport verify_calm_sum(const FiniteMultifunction& F, const FiniteMultifunction& G, const Point& xbar,
                                     const Point& ybar, const Point& zbar, const CalmSumConfig& cfg = {}) {
  TheoremReport rep;
  rep.theorem_id = "calm_sum";
  rep.falsification = cfg.falsification;
  const double r = std::min(cfg.nb.r_U, cfg.nb.r_V);
  rep.premise_checks.push_back(check_property(F, xbar, ybar, Property::clm, cfg.L_cap, cfg.nb));
  rep.premise_checks.push_back(check_property(G, xbar, zbar, Property::clm, cfg.L_cap, cfg.nb));
  auto ss = check_sum_stability(F, G, xbar, ybar, zbar, cfg.ss, r);
  double delta = ss.config["delta_at_largest_eps"].get<double>();
  rep.premise_checks.push_back(ss);
  rep.premises_hold = all_hold(rep.premise_checks);
  auto cF = estimate_modulus(F, xbar, ybar, Property::clm, cfg.nb);
  auto cG = estimate_modulus(G, xbar, zbar, Property::clm, cfg.nb);
  rep.bound_claimed = cF.value + cG.value;
  rep.details = {{"clm_F", num(cF.value)}, {"clm_G", num(cG.value)}};
  if (!rep.premises_hold && !cfg.falsification) return rep;
  NbhdConfig cn = cfg.nb;
  if (delta > 0) {
    cn.r_U = delta;
    cn.r_V = delta;
    cn.eps = std::min(cn.eps, delta);
    cn.rho_grid.clear();
  }
  auto S = minkowski_sum(restrict_domain(F, xbar, cn.r_U), restrict_domain(G, xbar, cn.r_U));
  const Point w = snap(add(ybar, zbar));
  double L = rep.premises_hold ? check_constant(rep.bound_claimed, cfg.bound_slack) : cfg.L_cap;
  rep.conclusion_check = check_property(S, xbar, w, Property::clm, L, cn);
  rep.conclusion_holds = rep.conclusion_check->holds;
  rep.bound_measured = estimate_modulus(S, xbar, w, Property::clm, cn).value;
  rep.bound_holds = within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  rep.details["conclusion_radius"] = num(cn.r_U);
  return rep;
}

// Variant with the decomposition hypothesis as the premise; the conclusion
// is (L_F + L_G)-calmness of F + G on the same neighborhoods.
inline TheoremReport verify_calm_sum_decomposable(const FiniteMultifunction& F, const FiniteMultifunction& G,
                                                  const Point& xbar, const Point& ybar, const Point& zbar, double L_F,
                                                  double L_G, const CalmSumConfig& cfg = {}) {
  TheoremReport rep;
  rep.theorem_id = "calm_sum_decomposable";
  rep.falsification = cfg.falsification;
  rep.premise_checks.push_back(check_decomposable(F, G, xbar, ybar, zbar, L_F, L_G, cfg.nb));
  rep.premises_hold = all_hold(rep.premise_checks);
  rep.bound_claimed = ExtReal(L_F + L_G);
  if (!rep.premises_hold && !cfg.falsification) return rep;
  auto S = minkowski_sum(restrict_domain(F, xbar, cfg.nb.r_U), restrict_domain(G, xbar, cfg.nb.r_U));
  const Point w = snap(add(ybar, zbar));
  rep.conclusion_check = check_property(S, xbar, w, Property::clm, check_constant(rep.bound_claimed, 0), cfg.nb);
  rep.conclusion_holds = rep.conclusion_check->holds;
  rep.bound_measured = estimate_modulus(S, xbar, w, Property::clm, cfg.nb).value;
  rep.bound_holds = within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  return rep;
}

}  // namespace mfreg
