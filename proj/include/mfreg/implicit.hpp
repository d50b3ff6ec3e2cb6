#pragma once

// Implicit multifunction S(p) = {x : 0 in H(x, p)} on sampled data, and the
// verifiers for the implicit-map, difference-openness, fixed-point and
// parametric variational-system results.
//
// Membership 0 in H(x, p) is decided with the zero tolerance tau:
// d(0, H(x, p)) <= tau. Every verifier records the tau it used.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mfreg/regmoduli.hpp"
#include "mfreg/report.hpp"
#include "mfreg/setcore.hpp"
#include "mfreg/sumstab.hpp"
#include "mfreg/theorem.hpp"

namespace mfreg {

namespace detail {

constexpr double kInfD = std::numeric_limits<double>::infinity();

inline Point zero_of(const Window& w) { return Point(w.dim(), 0.0); }

// d(0, A + B) = min over a in A of d(-a, B).
inline double zero_dist_sum(const FiniteSet& A, const FiniteSet& B, Norm n) {
  double best = kInfD;
  if (B.empty()) return best;
  for (const auto& a : A) {
    best = std::min(best, dist_point_set_raw(negate(a), B, n));
    if (best == 0) break;
  }
  return best;
}

inline void require_tau(double tau) {
  if (!(tau >= 0)) throw std::invalid_argument("tau_zero must be nonnegative");
}

inline GridMeta solution_meta(const std::vector<Point>& x_grid, const ParametricMeta& m) {
  return {m.h_p, m.h_x, bounding_box(x_grid), m.np, m.nx};
}

}  // namespace detail

// S(p) = {x in x_grid : d(0, H(x, p)) <= tau}, as a map on p_grid.
inline FiniteMultifunction solve_implicit(const ParametricMultifunction& H, double tau) {
  detail::require_tau(tau);
  const Point zero = detail::zero_of(H.meta.window);
  FiniteMultifunction S;
  S.domain = H.p_grid;
  S.meta = detail::solution_meta(H.x_grid, H.meta);
  S.images.reserve(H.np());
  for (size_t ip = 0; ip < H.np(); ++ip) {
    std::vector<Point> xs;
    for (size_t ix = 0; ix < H.nx(); ++ix)
      if (dist_point_set_raw(zero, H.image(ix, ip), H.meta.ny) <= tau + 1e-12) xs.push_back(H.x_grid[ix]);
    S.images.emplace_back(std::move(xs));
  }
  return S;
}

// S(p) = {x : 0 in F(x, p) + G(x)} without forming the sum: for each y in
// F(x, p) look up -y in G(x).
inline FiniteMultifunction solve_sum(const ParametricMultifunction& F, const FiniteMultifunction& G, double tau) {
  detail::require_tau(tau);
  std::vector<const FiniteSet*> gx(F.nx());
  for (size_t ix = 0; ix < F.nx(); ++ix) {
    auto j = G.find(F.x_grid[ix]);
    if (!j) throw std::invalid_argument("x grid node missing from the domain of G");
    gx[ix] = &G.images[*j];
  }
  FiniteMultifunction S;
  S.domain = F.p_grid;
  S.meta = detail::solution_meta(F.x_grid, F.meta);
  S.images.reserve(F.np());
  for (size_t ip = 0; ip < F.np(); ++ip) {
    std::vector<Point> xs;
    for (size_t ix = 0; ix < F.nx(); ++ix)
      if (detail::zero_dist_sum(F.image(ix, ip), *gx[ix], F.meta.ny) <= tau + 1e-12) xs.push_back(F.x_grid[ix]);
    S.images.emplace_back(std::move(xs));
  }
  return S;
}

// S(p) = {x : Phi(x, p) meets Psi(x)} within tau.
inline FiniteMultifunction solve_fixed(const ParametricMultifunction& Phi, const FiniteMultifunction& Psi,
                                       double tau) {
  return solve_sum(Phi, negate_images(Psi), tau);
}

// H(x, p) = F(x, p) + G(x), materialized. Only for small instances.
inline ParametricMultifunction param_sum(const ParametricMultifunction& F, const FiniteMultifunction& G) {
  ParametricMultifunction H;
  H.x_grid = F.x_grid;
  H.p_grid = F.p_grid;
  H.meta = F.meta;
  H.meta.window = window_sum(F.meta.window, G.meta.window);
  H.index.resize(F.nx() * F.np());
  for (size_t ix = 0; ix < F.nx(); ++ix) {
    auto j = G.find(F.x_grid[ix]);
    if (!j) throw std::invalid_argument("x grid node missing from the domain of G");
    for (size_t ip = 0; ip < F.np(); ++ip) {
      H.index[ix * F.np() + ip] = static_cast<uint32_t>(H.pool.size());
      H.pool.push_back(set_sum(F.image(ix, ip), G.images[*j]));
    }
  }
  return H;
}

// Exchanges the roles of x and p.
inline ParametricMultifunction transpose_param(const ParametricMultifunction& H) {
  ParametricMultifunction T;
  T.x_grid = H.p_grid;
  T.p_grid = H.x_grid;
  T.pool = H.pool;
  T.index.resize(H.index.size());
  for (size_t ix = 0; ix < H.nx(); ++ix)
    for (size_t ip = 0; ip < H.np(); ++ip) T.index[ip * H.nx() + ix] = H.index[ix * H.np() + ip];
  T.meta = H.meta;
  std::swap(T.meta.h_x, T.meta.h_p);
  std::swap(T.meta.nx, T.meta.np);
  return T;
}

struct TheoremConfig {
  NbhdConfig nb;
  SumStabilityConfig ss;
  double L_cap = 5;  // constant at which qualitative premises ("calm", "regular") are checked
  double bound_slack = 0.05;
  double tau = -1;  // zero tolerance; negative: h_y / 4
  bool falsification = false;
  int radius_steps = 8;  // alpha, beta searched over r 2^-k, k < radius_steps

  double tau_for(double h_y) const { return tau >= 0 ? tau : h_y / 4; }
};

enum class MainDirection { i, ii };
enum class VariationalMode { msubreg_sol, clm_sol };

namespace detail {

inline std::vector<double> radius_grid(double r, int steps, double floor) {
  std::vector<double> out{r};
  for (int k = 1; k < steps; ++k) {
    double v = std::ldexp(r, -k);
    if (v < floor) break;
    out.push_back(v);
  }
  return out;
}

inline void record_tau(TheoremReport& rep, double tau, double h_y) {
  rep.tau_zero = tau;
  if (tau >= h_y / 2) rep.notes.push_back("tau_zero >= h_y/2: zero membership is coarser than the codomain grid");
}

// One sampled instance of an inequality lhs <= K d(0, A cap B(0, beta)),
// where zero_dist = d(0, A) and radius locates the sample in the alpha-ball.
struct GapSample {
  double lhs = 0, radius = 0, zero_dist = kInfD;
  json where;
};

inline double restricted(double zero_dist, double beta) { return zero_dist <= beta + 1e-12 ? zero_dist : kInfD; }

struct RadiusSearch {
  bool holds = false;
  double alpha = 0, beta = 0;
  double measured = 0;  // sup lhs / d(0, A cap B(0, beta)) at the accepted radii
  json witness;
};

inline bool gap_violated(const GapSample& s, double K, double beta, double tol) {
  double b = restricted(s.zero_dist, beta);
  if (std::isinf(b)) return false;
  return s.lhs > K * b * (1 + 1e-8) + tol;
}

// Largest alpha, then largest beta, at which every sample passes. The
// witness of a failed search comes from the smallest radii tried.
inline RadiusSearch search_radii(const std::vector<GapSample>& samples, double K, const std::vector<double>& alphas,
                                 const std::vector<double>& betas, double tol) {
  RadiusSearch out;
  for (double a : alphas) {
    for (double b : betas) {
      const GapSample* bad = nullptr;
      for (const auto& s : samples) {
        if (s.radius > a + 1e-12) continue;
        if (gap_violated(s, K, b, tol)) {
          bad = &s;
          break;
        }
      }
      if (!bad) {
        out.holds = true;
        out.alpha = a;
        out.beta = b;
        for (const auto& s : samples) {
          if (s.radius > a + 1e-12) continue;
          double rb = restricted(s.zero_dist, b);
          if (std::isinf(rb) || s.lhs == 0) continue;
          out.measured = rb > 0 ? std::max(out.measured, s.lhs / rb) : kInfD;
        }
        return out;
      }
      out.witness = bad->where;
      out.witness["alpha"] = num(a);
      out.witness["beta"] = num(b);
      out.witness["lhs"] = num(bad->lhs);
      out.witness["zero_distance"] = num(bad->zero_dist);
    }
  }
  return out;
}

inline CheckReport search_report(const char* name, const RadiusSearch& s, double K, const char* inequality) {
  json cfg = {{"constant", num(K)}, {"inequality", inequality}};
  if (s.holds) {
    cfg["alpha"] = num(s.alpha);
    cfg["beta"] = num(s.beta);
    cfg["measured_ratio"] = num(s.measured);
  }
  json w = s.witness;
  if (!s.holds) w["inequality"] = inequality;
  return custom_check(name, s.holds, K, w, cfg);
}

// First part of the implicit-map result for H at (xbar, pbar, 0): linear
// pseudo-openness of H(., pbar) and the distance inequality for S(pbar).
struct FirstPart {
  double tau = 0;
  NbhdConfig nb;
  FiniteMultifunction S;
  CheckReport lpo;
  CheckReport inequality;
  RadiusSearch search;
};

inline FirstPart main_first_part(const ParametricMultifunction& H, const Point& xbar, const Point& pbar, double c,
                                 const TheoremConfig& cfg) {
  if (!(c > 0)) throw std::invalid_argument("modulus c must be positive");
  FirstPart fp;
  fp.tau = cfg.tau_for(H.meta.h_y);
  fp.nb = cfg.nb;
  fp.nb.cover_tol = fp.tau;
  fp.nb.validate();
  const Point zero = zero_of(H.meta.window);
  require_param_base(H, xbar, pbar, zero, fp.tau);
  fp.S = solve_implicit(H, fp.tau);
  const FiniteSet& Sbar = fp.S.image_at(pbar);
  const size_t ip = *H.find_p(pbar);
  const FiniteMultifunction Hp = H.slice_p(ip);

  // The rho grid gets every sampled d(x, S(pbar)) below eps, which makes the
  // pseudo-openness check exact over all rho in (0, eps).
  NbhdConfig lp = fp.nb;
  std::vector<double> rhos = fp.nb.rhos();
  std::vector<GapSample> samples;
  for (size_t ix = 0; ix < H.nx(); ++ix) {
    double r = dist(H.x_grid[ix], xbar, H.meta.nx);
    if (r > fp.nb.r_U + 1e-12) continue;
    double d = dist_point_set_raw(H.x_grid[ix], Sbar, H.meta.nx);
    if (d > 0 && d < fp.nb.eps) rhos.push_back(d);
    samples.push_back({d, r, dist_point_set_raw(zero, H.image(ix, ip), H.meta.ny), {{"x", to_json(H.x_grid[ix])}}});
  }
  std::sort(rhos.begin(), rhos.end());
  rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());
  lp.rho_grid = rhos;
  fp.lpo = check_property(Hp, xbar, zero, Property::lpo, c, lp);
  fp.lpo.config["rho_grid"] = "default grid plus the sampled distances d(x, S(pbar))";

  auto alphas = radius_grid(fp.nb.r_U, cfg.radius_steps, 2 * H.meta.h_x);
  auto betas = radius_grid(fp.nb.r_V, cfg.radius_steps, 2 * H.meta.h_y);
  fp.search = search_radii(samples, 1 / c, alphas, betas, fp.nb.tol);
  fp.inequality = search_report("distance_inequality", fp.search, 1 / c,
                                "d(x, S(pbar)) <= c^-1 d(0, H(x, pbar) cap B(0, beta))");
  return fp;
}

inline json first_part_json(const FirstPart& fp) {
  return {{"premise", fp.lpo.holds},
          {"inequality_holds", fp.search.holds},
          {"alpha", num(fp.search.alpha)},
          {"beta", num(fp.search.beta)},
          {"measured_ratio", num(fp.search.measured)},
          {"check", fp.inequality.to_json()}};
}

inline TheoremReport main_direction_i(const ParametricMultifunction& H, const Point& xbar, const Point& pbar,
                                      double c, const TheoremConfig& cfg) {
  TheoremReport rep;
  rep.falsification = cfg.falsification;
  FirstPart fp = main_first_part(H, xbar, pbar, c, cfg);
  record_tau(rep, fp.tau, H.meta.h_y);
  const Point zero = zero_of(H.meta.window);
  rep.premise_checks.push_back(fp.lpo);
  rep.premise_checks.push_back(
      check_parametric(H, Direction::p_unif_x, ParamKind::calm, xbar, pbar, zero, cfg.L_cap, fp.nb));
  rep.premises_hold = all_hold(rep.premise_checks);
  auto l = estimate_parametric(H, Direction::p_unif_x, ParamKind::calm, xbar, pbar, zero, fp.nb);
  rep.bound_claimed = (1 / c) * l.value;
  rep.details = {{"first_part", first_part_json(fp)}, {"partial_calmness_estimate", num(l.value)}};
  if (!rep.premises_hold && !cfg.falsification) return rep;

  // S(p) cap B(xbar, alpha) for p within (beta - tau) / l of pbar.
  NbhdConfig cn = fp.nb;
  cn.cover_tol = 0;
  double lv = l.value.value();
  double beta = fp.search.holds ? fp.search.beta : fp.nb.r_V;
  double alpha = fp.search.holds ? fp.search.alpha : fp.nb.r_U;
  cn.r_U = lv > 0 && std::isfinite(lv) ? std::min(fp.nb.r_W, std::max(beta - fp.tau, 0.0) / lv) : fp.nb.r_W;
  if (!(cn.r_U > 0)) cn.r_U = fp.nb.r_W;
  cn.r_V = alpha;
  double L = rep.premises_hold ? check_constant(rep.bound_claimed, cfg.bound_slack) : cfg.L_cap;
  rep.conclusion_check = check_property(fp.S, pbar, xbar, Property::clm, L, cn);
  rep.conclusion_holds = rep.conclusion_check->holds;
  rep.bound_measured = estimate_modulus(fp.S, pbar, xbar, Property::clm, cn).value;
  rep.bound_holds = within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  rep.details["conclusion_radii"] = {{"p", num(cn.r_U)}, {"x", num(cn.r_V)}};
  return rep;
}

}  // namespace detail

// Direction i: pseudo-openness of H(., pbar) gives the distance inequality
// for S(pbar); with calmness of H in p uniformly in x, S is calm at
// (pbar, xbar) with modulus at most c^-1 times the partial calmness modulus.
// Direction ii runs direction i on the transposed map, whose solution map is
// S^-1; its calmness at (xbar, pbar) is subregularity of S at (pbar, xbar).
inline TheoremReport verify_thm_main(const ParametricMultifunction& H, const Point& xbar, const Point& pbar, double c,
                                     MainDirection dir, const TheoremConfig& cfg = {}) {
  if (dir == MainDirection::i) {
    auto rep = detail::main_direction_i(H, xbar, pbar, c, cfg);
    rep.theorem_id = "main_i";
    rep.details["conclusion"] = "S calm at (pbar, xbar)";
    return rep;
  }
  auto rep = detail::main_direction_i(transpose_param(H), pbar, xbar, c, cfg);
  rep.theorem_id = "main_ii";
  rep.details["conclusion"] = "S^-1 calm at (xbar, pbar), i.e. S metrically subregular at (pbar, xbar)";
  return rep;
}

// The gap condition: for x near xbar and p near pbar with
// d(p, pbar) < M d(0, H(x, pbar) cap B(0, beta)), 0 must not lie in H(x, p).
// Together with the distance inequality it makes S calm with constant
// c^-1 M^-1. Direction ii works on the transposed map.
inline TheoremReport check_M_condition(const ParametricMultifunction& H0, const Point& xbar0, const Point& pbar0,
                                       double c, double M, MainDirection dir, const TheoremConfig& cfg = {}) {
  if (!(M > 0)) throw std::invalid_argument("M must be positive");
  const bool tr = dir == MainDirection::ii;
  const ParametricMultifunction Ht = tr ? transpose_param(H0) : ParametricMultifunction{};
  const ParametricMultifunction& H = tr ? Ht : H0;
  const Point& xbar = tr ? pbar0 : xbar0;
  const Point& pbar = tr ? xbar0 : pbar0;

  TheoremReport rep;
  rep.theorem_id = tr ? "M_condition_ii" : "M_condition_i";
  rep.falsification = cfg.falsification;
  auto fp = detail::main_first_part(H, xbar, pbar, c, cfg);
  detail::record_tau(rep, fp.tau, H.meta.h_y);
  rep.premise_checks.push_back(fp.inequality);
  rep.details = {{"first_part", detail::first_part_json(fp)}};
  rep.bound_claimed = ExtReal(1 / (c * M));
  if (!fp.search.holds) {
    rep.notes.push_back("distance inequality not verified; gap condition not scanned");
    return rep;
  }
  const Point zero = detail::zero_of(H.meta.window);
  const size_t ipb = *H.find_p(pbar);
  json witness;
  bool ok = true;
  for (size_t ix = 0; ix < H.nx() && ok; ++ix) {
    if (dist(H.x_grid[ix], xbar, H.meta.nx) > fp.search.alpha + 1e-12) continue;
    double g = detail::restricted(dist_point_set_raw(zero, H.image(ix, ipb), H.meta.ny), fp.search.beta);
    for (size_t ip = 0; ip < H.np(); ++ip) {
      double dp = dist(H.p_grid[ip], pbar, H.meta.np);
      if (dp > fp.nb.r_W + 1e-12 || !(dp < M * g)) continue;
      double z = dist_point_set_raw(zero, H.image(ix, ip), H.meta.ny);
      if (z <= fp.tau + 1e-12) {
        ok = false;
        witness = {{"x", to_json(H.x_grid[ix])}, {"p", to_json(H.p_grid[ip])}, {"gap", num(g)},
                   {"reason", "0 in H(x, p) although d(p, pbar) < M d(0, H(x, pbar) cap B(0, beta))"}};
        break;
      }
    }
  }
  if (tr && !ok) {
    std::swap(witness["x"], witness["p"]);
  }
  rep.premise_checks.push_back(custom_check("gap_condition", ok, M, witness,
                                            {{"M", num(M)}, {"alpha", num(fp.search.alpha)},
                                             {"beta", num(fp.search.beta)}, {"p_radius", num(fp.nb.r_W)}}));
  rep.premises_hold = all_hold(rep.premise_checks);
  if (!rep.premises_hold && !cfg.falsification) return rep;
  NbhdConfig cn = fp.nb;
  cn.cover_tol = 0;
  cn.r_U = fp.nb.r_W;
  cn.r_V = fp.search.alpha;
  double L = rep.premises_hold ? check_constant(rep.bound_claimed, cfg.bound_slack) : cfg.L_cap;
  rep.conclusion_check = check_property(fp.S, pbar, xbar, Property::clm, L, cn);
  rep.conclusion_holds = rep.conclusion_check->holds;
  rep.bound_measured = estimate_modulus(fp.S, pbar, xbar, Property::clm, cn).value;
  rep.bound_holds = within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  rep.details["conclusion"] = tr ? "S metrically subregular at (pbar, xbar)" : "S calm at (pbar, xbar)";
  return rep;
}

// D(x) = F1(x) - F2^-1(x) on the domain of F1, with F2 : Y => X.
inline FiniteMultifunction difference_map(const FiniteMultifunction& F1, const FiniteMultifunction& F2) {
  FiniteMultifunction F2inv = invert(F2, false);
  FiniteMultifunction D;
  D.domain = F1.domain;
  D.meta = F1.meta;
  D.meta.h_y = std::max(F1.meta.h_y, F2.meta.h_x);
  Window box = bounding_box(F2.domain);
  D.meta.window = window_sum(F1.meta.window, Window{negate(box.hi), negate(box.lo)});
  D.images.reserve(F1.size());
  for (size_t i = 0; i < F1.size(); ++i) {
    std::vector<Point> neg;
    for (const auto& z : F2inv.image_at(F1.domain[i])) neg.push_back(negate(z));
    D.images.push_back(set_sum(F1.images[i], FiniteSet(std::move(neg))));
  }
  return D;
}

// Openness of F1 - F2^-1 at rate L - 1/M from L-openness of F1 and
// M-openness of F2 around the base points, provided LM > 1.
inline TheoremReport verify_difference_openness(const FiniteMultifunction& F1, const FiniteMultifunction& F2,
                                                const Point& xbar, const Point& ybar, const Point& zbar, double L,
                                                double M, const TheoremConfig& cfg = {}) {
  if (!(L > 0 && M > 0)) throw std::invalid_argument("L and M must be positive");
  if (!F1.in_graph(snap(xbar), snap(ybar))) throw std::invalid_argument("(xbar, ybar) is not on the graph of F1");
  if (!F2.in_graph(snap(zbar), snap(xbar))) throw std::invalid_argument("(zbar, xbar) is not on the graph of F2");
  TheoremReport rep;
  rep.theorem_id = "main_const";
  rep.falsification = cfg.falsification;
  rep.premise_checks.push_back(custom_check("LM_greater_than_1", L * M > 1, L * M,
                                            {{"L", num(L)}, {"M", num(M)}, {"reason", "LM <= 1"}}));
  rep.bound_claimed = ExtReal(std::max(L - 1 / M, 0.0));
  if (!rep.premise_checks[0].holds) {
    rep.notes.push_back("premise LM > 1 violated; no conclusion check");
    return rep;
  }
  rep.premise_checks.push_back(check_property(F1, xbar, ybar, Property::lop, L, cfg.nb));
  rep.premise_checks.push_back(check_property(F2, zbar, xbar, Property::lop, M, cfg.nb));
  rep.premises_hold = all_hold(rep.premise_checks);
  if (!rep.premises_hold && !cfg.falsification) return rep;
  auto D = difference_map(F1, F2);
  const Point w = snap(sub(ybar, zbar));
  const double rate = L - 1 / M;
  rep.conclusion_check = check_property(D, xbar, w, Property::plop, rate, cfg.nb);
  rep.conclusion_holds = rep.conclusion_check->holds;
  rep.bound_measured = estimate_modulus(D, xbar, w, Property::plop, cfg.nb).value;
  // a rate: the measured openness rate must reach the claimed one
  rep.bound_holds = rep.bound_measured.value() >= rate * (1 - cfg.bound_slack) - 1e-9;
  rep.details = {{"rate", num(rate)}, {"bound_kind", "lower bound on the openness rate"}};
  return rep;
}

namespace detail {

// Samples of d(x, S(p)) against d(0, A(x, p)) over the product ball, with
// zero_dist(ix, ip) giving d(0, A(x, p)).
template <class ZeroDist>
std::vector<GapSample> product_samples(const std::vector<Point>& xs, const std::vector<Point>& ps, const Point& xbar,
                                       const Point& pbar, Norm nx, Norm np, double r_x, double r_p,
                                       const FiniteMultifunction& S, ZeroDist&& zero_dist) {
  std::vector<GapSample> out;
  for (size_t ip = 0; ip < ps.size(); ++ip) {
    double dp = dist(ps[ip], pbar, np);
    if (dp > r_p + 1e-12) continue;
    const FiniteSet& Sp = S.image_at(ps[ip]);
    for (size_t ix = 0; ix < xs.size(); ++ix) {
      double dx = dist(xs[ix], xbar, nx);
      if (dx > r_x + 1e-12) continue;
      out.push_back({dist_point_set_raw(xs[ix], Sp, nx), std::max(dx, dp), zero_dist(ix, ip),
                     {{"x", to_json(xs[ix])}, {"p", to_json(ps[ip])}}});
    }
  }
  return out;
}

inline std::vector<const FiniteSet*> images_on(const FiniteMultifunction& G, const std::vector<Point>& xs) {
  std::vector<const FiniteSet*> out;
  for (const auto& x : xs) {
    auto j = G.find(x);
    if (!j) throw std::invalid_argument("x grid node missing from the domain of the single-argument map");
    out.push_back(&G.images[*j]);
  }
  return out;
}

}  // namespace detail

// (Phi, -Psi) sum-stable, Phi Aubin in x uniformly in p with constant l, Psi
// metrically regular with constant m and lm < 1 give
// d(x, S(p)) <= (1/m - l)^-1 d(0, [Phi(x, p) - Psi(x)] cap B(0, beta)).
inline TheoremReport verify_fixp(const ParametricMultifunction& Phi, const FiniteMultifunction& Psi,
                                 const Point& xbar, const Point& pbar, const Point& ybar, double l, double m,
                                 const TheoremConfig& cfg = {}) {
  if (!(l >= 0 && m > 0)) throw std::invalid_argument("need l >= 0 and m > 0");
  TheoremReport rep;
  rep.theorem_id = "fixp";
  rep.falsification = cfg.falsification;
  const double h_y = std::max(Phi.meta.h_y, Psi.meta.h_y);
  const double tau = cfg.tau_for(h_y);
  detail::record_tau(rep, tau, h_y);
  NbhdConfig nb = cfg.nb;
  nb.cover_tol = tau;
  detail::require_param_base(Phi, xbar, pbar, ybar, tau);
  detail::require_on_graph(detail::MFView{Psi}, xbar, ybar, tau);
  rep.premise_checks.push_back(
      custom_check("lm_less_than_1", l * m < 1, l * m, {{"l", num(l)}, {"m", num(m)}, {"reason", "lm >= 1"}}));
  rep.bound_claimed = l * m < 1 ? ExtReal(1 / (1 / m - l)) : ExtReal::infinity();
  if (!rep.premise_checks[0].holds) {
    rep.notes.push_back("premise lm < 1 violated; no conclusion check");
    return rep;
  }
  const FiniteMultifunction negPsi = negate_images(Psi);
  rep.premise_checks.push_back(check_sum_stability_param(Phi, negPsi, xbar, pbar, ybar, negate(ybar), cfg.ss,
                                                         std::min(nb.r_U, nb.r_V)));
  rep.premise_checks.push_back(check_parametric(Phi, Direction::x_unif_p, ParamKind::aubin, xbar, pbar, ybar,
                                                std::max(l, 1e-9), nb));
  rep.premise_checks.push_back(check_property(Psi, xbar, ybar, Property::reg, m, nb));
  rep.premises_hold = all_hold(rep.premise_checks);
  if (!rep.premises_hold && !cfg.falsification) return rep;

  auto S = solve_fixed(Phi, Psi, tau);
  auto psi_x = detail::images_on(Psi, Phi.x_grid);
  auto samples = detail::product_samples(
      Phi.x_grid, Phi.p_grid, xbar, pbar, Phi.meta.nx, Phi.meta.np, nb.r_U, nb.r_W, S, [&](size_t ix, size_t ip) {
        double best = detail::kInfD;
        for (const auto& y : Phi.image(ix, ip)) best = std::min(best, dist_point_set_raw(y, *psi_x[ix], Phi.meta.ny));
        return best;
      });
  const double K = rep.premises_hold ? check_constant(rep.bound_claimed, cfg.bound_slack) : cfg.L_cap;
  auto alphas = detail::radius_grid(std::min(nb.r_U, nb.r_W), cfg.radius_steps, 2 * std::max(Phi.meta.h_x, Phi.meta.h_p));
  auto betas = detail::radius_grid(nb.r_V, cfg.radius_steps, 2 * h_y);
  auto search = detail::search_radii(samples, K, alphas, betas, nb.tol);
  rep.conclusion_check = detail::search_report("fixed_point_distance", search, K,
                                               "d(x, S(p)) <= K d(0, [Phi(x, p) - Psi(x)] cap B(0, beta))");
  rep.conclusion_holds = search.holds;
  rep.bound_measured = ExtReal(search.measured);
  rep.bound_holds = search.holds && within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  return rep;
}

// H(x, p) = F(x, p) + G(x) and S(p) = {x : 0 in H(x, p)}.
// msubreg_sol: sum-stability, calmness of F in x uniformly in p, metric
// regularity of F(xbar, .) and calmness of G give subregularity of S with
// modulus at most reg F(xbar, .) (clm_x F + clm G).
// clm_sol: sum-stability, Aubin property of F in x, calmness of F in p,
// metric regularity of G and lip_x F reg G < 1 give calmness of S with
// modulus at most reg G clm_p F / (1 - lip_x F reg G).
// Qualitative premises are checked at L_cap; the claimed bound uses moduli
// estimated on graph targets.
inline TheoremReport verify_variational_system(const ParametricMultifunction& F, const FiniteMultifunction& G,
                                               const Point& xbar, const Point& pbar, const Point& ybar,
                                               VariationalMode mode, const TheoremConfig& cfg = {}) {
  TheoremReport rep;
  rep.theorem_id = mode == VariationalMode::msubreg_sol ? "msubreg_sol" : "clm_sol";
  rep.falsification = cfg.falsification;
  const double h_y = std::max(F.meta.h_y, G.meta.h_y);
  const double tau = cfg.tau_for(h_y);
  detail::record_tau(rep, tau, h_y);
  NbhdConfig nb = cfg.nb;
  nb.cover_tol = tau;
  const Point zbar = snap(negate(ybar));
  detail::require_param_base(F, xbar, pbar, ybar, tau);
  detail::require_on_graph(detail::MFView{G}, xbar, zbar, tau);
  NbhdConfig est = nb;
  est.targets = TargetMode::graph_only;
  est.cover_tol = 0;

  auto ss = check_sum_stability_param(F, G, xbar, pbar, ybar, zbar, cfg.ss, std::min(nb.r_U, nb.r_V));
  const double delta = ss.config["delta_at_largest_eps"].get<double>();
  rep.premise_checks.push_back(ss);
  json moduli = json::object();
  if (mode == VariationalMode::msubreg_sol) {
    const FiniteMultifunction Fx = F.slice_x(*F.find_x(xbar));
    NbhdConfig nbp = nb;
    nbp.r_U = nb.r_W;
    NbhdConfig estp = est;
    estp.r_U = nb.r_W;
    rep.premise_checks.push_back(
        check_parametric(F, Direction::x_unif_p, ParamKind::calm, xbar, pbar, ybar, cfg.L_cap, nb));
    rep.premise_checks.push_back(check_property(Fx, pbar, ybar, Property::reg, cfg.L_cap, nbp));
    rep.premise_checks.push_back(check_property(G, xbar, zbar, Property::clm, cfg.L_cap, nb));
    auto reg = estimate_modulus(Fx, pbar, ybar, Property::reg, estp).value;
    auto cx = estimate_parametric(F, Direction::x_unif_p, ParamKind::calm, xbar, pbar, ybar, est).value;
    auto cg = estimate_modulus(G, xbar, zbar, Property::clm, est).value;
    rep.bound_claimed = reg.value() * (cx + cg).value();
    if (reg.value() == 0 || (cx + cg).value() == 0) rep.bound_claimed = ExtReal(0.0);
    moduli = {{"reg_F_xbar", num(reg)}, {"clm_x_F", num(cx)}, {"clm_G", num(cg)}};
  } else {
    rep.notes.push_back("premise (i) is checked as parametric local sum-stability");
    rep.premise_checks.push_back(
        check_parametric(F, Direction::x_unif_p, ParamKind::aubin, xbar, pbar, ybar, cfg.L_cap, nb));
    rep.premise_checks.push_back(
        check_parametric(F, Direction::p_unif_x, ParamKind::calm, xbar, pbar, ybar, cfg.L_cap, nb));
    rep.premise_checks.push_back(check_property(G, xbar, zbar, Property::reg, cfg.L_cap, nb));
    auto lip = estimate_parametric(F, Direction::x_unif_p, ParamKind::aubin, xbar, pbar, ybar, est).value;
    auto cp = estimate_parametric(F, Direction::p_unif_x, ParamKind::calm, xbar, pbar, ybar, est).value;
    auto reg = estimate_modulus(G, xbar, zbar, Property::reg, est).value;
    double prod = lip.value() * reg.value();
    if (lip.value() == 0 || reg.value() == 0) prod = 0;
    rep.premise_checks.push_back(custom_check("lip_times_reg_below_1", prod < 1, prod,
                                              {{"lip_x_F", num(lip)}, {"reg_G", num(reg)}, {"product", num(prod)}}));
    double top = reg.value() * cp.value();
    if (reg.value() == 0 || cp.value() == 0) top = 0;
    rep.bound_claimed = prod < 1 ? ExtReal(top / (1 - prod)) : ExtReal::infinity();
    moduli = {{"lip_x_F", num(lip)}, {"clm_p_F", num(cp)}, {"reg_G", num(reg)}};
  }
  rep.premises_hold = all_hold(rep.premise_checks);
  rep.details = {{"moduli", moduli}};
  if (!rep.premises_hold && !cfg.falsification) return rep;

  auto S = solve_sum(F, G, tau);
  NbhdConfig cn = nb;
  cn.cover_tol = 0;
  cn.r_U = delta > 0 ? std::min(nb.r_W, delta) : nb.r_W;
  cn.r_V = nb.r_U;
  const Property prop = mode == VariationalMode::msubreg_sol ? Property::subreg : Property::clm;
  double L = rep.premises_hold ? check_constant(rep.bound_claimed, cfg.bound_slack) : cfg.L_cap;
  rep.conclusion_check = check_property(S, pbar, xbar, prop, L, cn);
  rep.conclusion_holds = rep.conclusion_check->holds;
  auto measured = estimate_modulus(S, pbar, xbar, prop, cn);
  rep.bound_measured = measured.value;
  rep.bound_holds = within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  rep.details["conclusion_radius_p"] = num(cn.r_U);
  rep.details["measured_witness"] = measured.witness;
  return rep;
}

}  // namespace mfreg
