#pragma once

// Solid vector optimization: polyhedral cones, the Gerstewitz scalarizing
// functional, weak Pareto checks, the epigraphical constraint map, exact
// penalization, strong slopes and error bounds.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfreg/regmoduli.hpp"
#include "mfreg/report.hpp"
#include "mfreg/setcore.hpp"
#include "mfreg/sumstab.hpp"
#include "mfreg/theorem.hpp"

namespace mfreg {

inline double dot(const Point& a, const Point& b) {
  require_same_dim(a, b);
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Norm dual_norm(Norm n) {
  switch (n) {
    case Norm::max: return Norm::sum;
    case Norm::sum: return Norm::max;
    case Norm::euclid: return Norm::euclid;
  }
  return n;
}

namespace detail {

constexpr double kConeTol = 1e-12;

inline double determinant(std::vector<std::vector<double>> m) {
  const size_t n = m.size();
  double det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    for (size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      double f = m[r][c] / m[c][c];
      for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

inline size_t rank(std::vector<Point> m) {
  size_t r = 0;
  const size_t cols = m.empty() ? 0 : m[0].size();
  for (size_t c = 0; c < cols && r < m.size(); ++c) {
    size_t piv = r;
    for (size_t i = r + 1; i < m.size(); ++i)
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    if (std::abs(m[piv][c]) < 1e-12) continue;
    std::swap(m[piv], m[r]);
    for (size_t i = r + 1; i < m.size(); ++i) {
      double f = m[i][c] / m[r][c];
      for (size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    ++r;
  }
  return r;
}

// Generalized cross product of n-1 vectors in R^n: orthogonal to all of them,
// zero iff they are linearly dependent.
inline Point cross(const std::vector<Point>& rows, size_t n) {
  Point r(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::vector<double>> m;
    for (const auto& row : rows) {
      std::vector<double> sub;
      for (size_t k = 0; k < n; ++k)
        if (k != i) sub.push_back(row[k]);
      m.push_back(std::move(sub));
    }
    r[i] = ((i % 2) ? -1.0 : 1.0) * determinant(std::move(m));
  }
  return r;
}

inline Point normalized(Point v) {
  double s = norm(v, Norm::max);
  for (auto& c : v) c = snap(c / s);
  return v;
}

// Extreme rays of {z : w.z >= 0 for all w in W} in R^n. The same routine
// maps primal generators to facet normals, since both are the extreme rays
// of the respective dual cone.
inline std::vector<Point> extreme_rays(const std::vector<Point>& W, size_t n) {
  std::vector<Point> rays;
  auto admit = [&](const Point& r) {
    double s = norm(r, Norm::max);
    if (!(s > 1e-12)) return;
    for (double sign : {1.0, -1.0}) {
      Point cand = r;
      for (auto& c : cand) c *= sign / s;
      bool ok = true;
      for (const auto& w : W)
        if (dot(w, cand) < -1e-9) ok = false;
      if (ok) rays.push_back(normalized(cand));
    }
  };
  if (n == 1) {
    admit({1.0});
  } else {
    std::vector<size_t> pick(n - 1);
    for (size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    if (W.size() >= n - 1) {
      while (true) {
        std::vector<Point> rows;
        for (size_t k : pick) rows.push_back(W[k]);
        admit(cross(rows, n));
        size_t i = pick.size();
        while (i-- > 0 && pick[i] == W.size() - pick.size() + i) {}
        if (i == static_cast<size_t>(-1)) break;
        ++pick[i];
        for (size_t k = i + 1; k < pick.size(); ++k) pick[k] = pick[k - 1] + 1;
      }
    }
  }
  std::sort(rays.begin(), rays.end());
  rays.erase(std::unique(rays.begin(), rays.end()), rays.end());
  return rays;
}

}  // namespace detail

// K = cone(primal) = {z : w.z >= 0 for every dual generator w}. Both lists
// are canonical: extreme rays scaled to unit max-norm.
struct PolyhedralCone {
  std::vector<Point> primal_generators;
  std::vector<Point> dual_generators;
  bool solid = false;
  size_t dimension = 0;

  static PolyhedralCone from_dual(const std::vector<Point>& dual) {
    if (dual.empty()) throw std::invalid_argument("cone needs at least one dual generator");
    size_t n = dual[0].size();
    for (const auto& w : dual) {
      if (w.size() != n) throw std::invalid_argument("dual generators differ in dimension");
      if (!(norm(w, Norm::max) > 0)) throw std::invalid_argument("zero dual generator");
    }
    // A lineality direction would be a common null vector of all w.
    if (detail::rank(dual) < n) throw std::invalid_argument("cone is not pointed");
    PolyhedralCone K;
    K.dimension = n;
    K.primal_generators = detail::extreme_rays(dual, n);
    // Facet normals only describe K when it is full-dimensional; otherwise
    // the supplied inequalities are kept as given.
    if (detail::rank(K.primal_generators) == n) {
      K.dual_generators = detail::extreme_rays(K.primal_generators, n);
    } else {
      for (const auto& w : dual) K.dual_generators.push_back(detail::normalized(w));
      std::sort(K.dual_generators.begin(), K.dual_generators.end());
      K.dual_generators.erase(std::unique(K.dual_generators.begin(), K.dual_generators.end()), K.dual_generators.end());
    }
    K.validate();
    return K;
  }

  static PolyhedralCone from_primal(const std::vector<Point>& primal) {
    if (primal.empty()) throw std::invalid_argument("cone needs at least one generator");
    size_t n = primal[0].size();
    for (const auto& p : primal)
      if (p.size() != n) throw std::invalid_argument("generators differ in dimension");
    if (detail::rank(primal) < n) throw std::invalid_argument("primal description needs a solid cone; give dual generators");
    return from_dual(detail::extreme_rays(primal, n));
  }

  static PolyhedralCone orthant(size_t n) {
    std::vector<Point> dual;
    for (size_t i = 0; i < n; ++i) {
      Point w(n, 0.0);
      w[i] = 1;
      dual.push_back(w);
    }
    return from_dual(dual);
  }

  bool contains(const Point& z, double tol = detail::kConeTol) const {
    for (const auto& w : dual_generators)
      if (dot(w, z) < -tol) return false;
    return true;
  }

  bool interior(const Point& z) const {
    for (const auto& w : dual_generators)
      if (!(dot(w, z) > detail::kConeTol)) return false;
    return true;
  }

  Point interior_point() const {
    Point c(dimension, 0.0);
    for (const auto& g : primal_generators) c = add(c, g);
    return c;
  }

  // Pointed and proper means the extreme rays of K span a pointed cone that
  // is neither {0} nor the whole space.
  void validate() {
    if (primal_generators.empty()) throw std::invalid_argument("cone is {0} or not pointed");
    if (dual_generators.empty()) throw std::invalid_argument("cone is the whole space");
    for (const auto& g : primal_generators)
      if (!contains(g, 1e-9)) throw std::invalid_argument("primal and dual descriptions disagree");
    solid = interior(interior_point());
  }

  json to_json() const {
    json p = json::array(), d = json::array();
    for (const auto& g : primal_generators) p.push_back(mfreg::to_json(g));
    for (const auto& w : dual_generators) d.push_back(mfreg::to_json(w));
    return {{"primal_generators", p}, {"dual_generators", d}, {"solid", solid}, {"dimension", dimension}};
  }
};

struct GerstewitzFunctional {
  PolyhedralCone cone;
  Point e;
  Norm ny = Norm::max;
  double L_e = 0;
};

// L_e = 1/d(e, bd K). For interior e the distance to the complement of K is
// the smallest distance to one of the half-space boundaries, w.e/|w|_*.
inline double gerstewitz_lipschitz(const PolyhedralCone& K, const Point& e, Norm ny) {
  if (e.size() != K.dimension) throw std::invalid_argument("e has the wrong dimension");
  double d = std::numeric_limits<double>::infinity();
  for (const auto& w : K.dual_generators) {
    double we = dot(w, e);
    if (!(we > detail::kConeTol)) throw std::invalid_argument("e is not interior to K");
    d = std::min(d, we / norm(w, dual_norm(ny)));
  }
  return 1 / d;
}

inline double gerstewitz_lipschitz(const GerstewitzFunctional& s) { return gerstewitz_lipschitz(s.cone, s.e, s.ny); }

inline GerstewitzFunctional make_gerstewitz(PolyhedralCone K, Point e, Norm ny = Norm::max) {
  if (!K.solid) throw std::invalid_argument("cone is not solid");
  double L = gerstewitz_lipschitz(K, e, ny);
  return {std::move(K), std::move(e), ny, L};
}

// lambda*e - z lies in K iff every dual inequality holds, so the infimum is
// attained at the largest ratio.
inline double gerstewitz_value(const GerstewitzFunctional& s, const Point& z) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& w : s.cone.dual_generators) v = std::max(v, dot(w, z) / dot(w, s.e));
  return v;
}

// Vertices of {v in K* : v.e = 1, v.u = s_e(u)}: the normalized dual
// generators attaining the maximum. Canonical dual generators are extreme
// rays of K*, so none of them is a combination of the others.
inline std::vector<Point> gerstewitz_subdiff(const GerstewitzFunctional& s, const Point& u) {
  double su = gerstewitz_value(s, u);
  double scale = std::max(1.0, std::abs(su));
  std::vector<Point> out;
  for (const auto& w : s.cone.dual_generators) {
    double we = dot(w, s.e);
    if (std::abs(dot(w, u) / we - su) > 1e-12 * scale) continue;
    Point v = w;
    for (auto& c : v) c /= we;
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// (A - ybar) misses -int K. The report config carries min s_e(a - ybar) as a
// cross-check: the set is weak Pareto iff that minimum is nonnegative.
inline CheckReport check_weak_pareto(const FiniteSet& A, const Point& ybar, const PolyhedralCone& K,
                                     double tol = detail::kConeTol) {
  if (!K.solid) throw std::invalid_argument("cone is not solid");
  if (!A.contains(snap(ybar))) throw std::invalid_argument("ybar is not in A");
  auto s = make_gerstewitz(K, K.interior_point());
  double min_s = std::numeric_limits<double>::infinity();
  std::optional<Point> bad;
  for (const auto& a : A) {
    Point d = sub(a, ybar);
    min_s = std::min(min_s, gerstewitz_value(s, d));
    bool strictly_below = true;
    for (const auto& w : K.dual_generators)
      if (!(dot(w, d) < -tol)) strictly_below = false;
    if (strictly_below && !bad) bad = a;
  }
  json wit = bad ? json{{"a", to_json(*bad)}, {"a_minus_ybar", to_json(sub(*bad, ybar))}} : json(nullptr);
  return custom_check("weak_pareto", !bad, 0, wit,
                      {{"ybar", to_json(ybar)}, {"e", to_json(s.e)}, {"min_scalarized", num(min_s)}});
}

using VectorOracle = std::function<Point(const Point&)>;
using SetOracle = std::function<FiniteSet(const Point&)>;
using ScalarOracle = std::function<double(const Point&)>;

// Lookup oracle over a sampled multifunction; off-grid points have empty image.
inline SetOracle as_oracle(const FiniteMultifunction& G) {
  return [&G](const Point& x) {
    auto i = G.find(snap(x));
    return i ? G.image(*i) : FiniteSet();
  };
}

// minimize f subject to 0 in G(x) + Q, sampled on x_grid x q_grid. An empty
// q_grid is filled from Q near the base point by the verifier.
struct VectorProblem {
  VectorOracle f;
  double L = 1;
  SetOracle G;
  PolyhedralCone K, Q;
  double M = 1;
  std::vector<Point> x_grid;
  std::vector<Point> q_grid;
  Norm ny = Norm::max;
  Norm nz = Norm::max;
};

inline bool feasible(const VectorProblem& prob, const Point& x, double tol = detail::kConeTol) {
  for (const auto& g : prob.G(x))
    if (prob.Q.contains(negate(g), tol)) return true;
  return false;
}

// Samples of (x, q) -> G(x) + q for q in Q. The domain norm is the additive
// one on X x Z.
inline FiniteMultifunction epigraphical_map(const SetOracle& G, const PolyhedralCone& Q,
                                            const std::vector<Point>& x_grid, const std::vector<Point>& q_grid,
                                            double h) {
  std::vector<Point> dom;
  std::vector<FiniteSet> imgs;
  std::vector<Point> all;
  for (const auto& x : x_grid) {
    FiniteSet gx = G(x);
    for (const auto& q : q_grid) {
      if (!Q.contains(q)) continue;
      std::vector<Point> pts;
      for (const auto& g : gx) pts.push_back(snap(add(g, q)));
      all.insert(all.end(), pts.begin(), pts.end());
      dom.push_back(snap(concat(x, q)));
      imgs.emplace_back(std::move(pts));
    }
  }
  if (dom.empty()) throw std::invalid_argument("empty epigraphical sample");
  Window w = all.empty() ? Window::box(q_grid.at(0).size(), -1, 1) : bounding_box(all);
  for (size_t i = 0; i < w.dim(); ++i) {
    w.lo[i] -= h;
    w.hi[i] += h;
  }
  GridMeta meta{h, h, w, Norm::sum, Norm::max};
  return make_multifunction(std::move(dom), std::move(imgs), std::move(meta));
}

// Nodes of Q on the lattice hZ^m within max-distance r of c.
inline std::vector<Point> cone_grid(const PolyhedralCone& Q, const Point& c, double r, double h) {
  Window w{c, c};
  for (size_t i = 0; i < c.size(); ++i) {
    w.lo[i] -= r;
    w.hi[i] += r;
  }
  std::vector<Point> out;
  for (auto& q : lattice_nodes(w, h))
    if (Q.contains(q)) out.push_back(std::move(q));
  return out;
}

struct PenalizedObjective {
  GerstewitzFunctional s;
  VectorOracle f;
  Point fbar;
  double weight = 0;  // L * L_e * M
  Norm nz = Norm::max;

  double operator()(const Point& x, const Point& /*q*/, const Point& z) const {
    return gerstewitz_value(s, sub(f(x), fbar)) + weight * norm(z, nz);
  }
};

// M = 0 is accepted here so the unpenalized control can be evaluated.
inline PenalizedObjective penalized_objective(const VectorProblem& prob, const Point& xbar, const Point& e) {
  if (!feasible(prob, xbar, 1e-9)) throw std::invalid_argument("xbar is infeasible");
  if (!(prob.L > 0) || prob.M < 0) throw std::invalid_argument("need L > 0 and M >= 0");
  auto s = make_gerstewitz(prob.K, e, prob.ny);
  double w = prob.L * s.L_e * prob.M;
  Point fbar = prob.f(xbar);
  return {std::move(s), prob.f, std::move(fbar), w, prob.nz};
}

struct VecoptConfig {
  NbhdConfig nb;
  double tol = 1e-12;
  double bound_slack = 0.05;
  bool falsification = false;
  double h = 1.0 / 64;               // sampling step of the error-bound and mreg grids
  double eta = 1;                    // error-bound neighborhood diameter
  std::vector<double> slope_radii;   // empty: 2^-6, 2^-8
  int slope_steps = 4;
  std::vector<double> phi_radii;     // empty: 2^-10, 2^-20, 2^-30
  int phi_steps = 4;
  bool report_lpo = true;

  std::vector<double> slopes() const { return slope_radii.empty() ? std::vector<double>{0x1p-6, 0x1p-8} : slope_radii; }
  std::vector<double> phis() const {
    return phi_radii.empty() ? std::vector<double>{0x1p-10, 0x1p-20, 0x1p-30} : phi_radii;
  }
};

inline TheoremReport verify_penalization(const VectorProblem& prob, const Point& xbar, const Point& qbar,
                                         const Point& e, const VecoptConfig& cfg) {
  if (!(prob.M > 0)) throw std::invalid_argument("M must be positive");
  auto obj = penalized_objective(prob, xbar, e);
  TheoremReport rep;
  rep.theorem_id = "thm_scal";
  rep.falsification = cfg.falsification;
  rep.notes.push_back("subregularity constant < M is checked as <= M");
  const auto& nb = cfg.nb;
  double h = prob.x_grid.size() > 1 ? infer_step(prob.x_grid) : cfg.h;
  std::vector<Point> xs;
  for (const auto& x : prob.x_grid)
    if (dist(x, xbar, Norm::max) <= nb.r_U + 1e-12) xs.push_back(x);
  std::vector<Point> qs = prob.q_grid.empty() ? cone_grid(prob.Q, qbar, nb.r_V, h) : prob.q_grid;

  std::vector<Point> values;
  for (const auto& x : xs)
    if (feasible(prob, x)) values.push_back(snap(prob.f(x)));
  rep.premise_checks.push_back(check_weak_pareto(FiniteSet(values), snap(prob.f(xbar)), prob.K));

  auto E = epigraphical_map(prob.G, prob.Q, xs, qs, h);
  E.meta.ny = prob.nz;
  Point zero(prob.Q.dimension, 0.0);
  rep.premise_checks.push_back(check_property(E, snap(concat(xbar, qbar)), zero, Property::subreg, prob.M, nb));
  rep.premises_hold = all_hold(rep.premise_checks);
  rep.bound_claimed = ExtReal(0.0);
  rep.details["weight"] = num(obj.weight);
  rep.details["L_e"] = num(obj.s.L_e);
  rep.details["norm"] = norm_name(prob.nz);
  if (!rep.premises_hold && !cfg.falsification) return rep;

  double lowest = std::numeric_limits<double>::infinity();
  json where = nullptr;
  for (size_t i = 0; i < E.size(); ++i) {
    const Point& xq = E.point(i);
    Point x(xq.begin(), xq.begin() + static_cast<long>(xbar.size()));
    Point q(xq.begin() + static_cast<long>(xbar.size()), xq.end());
    if (dist(q, qbar, Norm::max) > nb.r_V + 1e-12) continue;
    for (const auto& z : E.image(i)) {
      if (norm(z, prob.nz) > nb.r_W + 1e-12) continue;
      double v = obj(x, q, z);
      if (v < lowest) {
        lowest = v;
        where = {{"x", to_json(x)}, {"q", to_json(q)}, {"z", to_json(z)}, {"value", num(v)}};
      }
    }
  }
  bool ok = !(lowest < -cfg.tol);
  rep.conclusion_check = custom_check("local_min", ok, 0, where, {{"min_value", num(lowest)}, {"tol", num(cfg.tol)}});
  rep.conclusion_holds = ok;
  rep.bound_measured = ExtReal(std::max(0.0, -lowest));
  rep.bound_holds = ok;
  rep.details["min_value"] = num(lowest);
  return rep;
}

namespace detail {

// Lattice x + k*(r/steps) restricted to the n-ball of radius r.
inline std::vector<Point> ball_samples(const Point& x, double r, int steps, Norm n) {
  if (!(r > 0) || steps < 1) throw std::invalid_argument("sample ball needs r > 0 and steps >= 1");
  const size_t d = x.size();
  std::vector<int> idx(d, -steps);
  std::vector<Point> out;
  double step = r / steps;
  while (true) {
    Point y = x, off(d);
    for (size_t i = 0; i < d; ++i) {
      off[i] = idx[i] * step;
      y[i] += off[i];
    }
    if (norm(off, n) <= r * (1 + 1e-12)) out.push_back(std::move(y));
    size_t ax = d;
    while (ax-- > 0) {
      if (++idx[ax] <= steps) break;
      idx[ax] = -steps;
    }
    if (ax == static_cast<size_t>(-1)) break;
  }
  return out;
}

}  // namespace detail

struct SlopeEstimate {
  double value = 0;
  std::vector<double> radii;
  std::vector<double> per_radius;

  json to_json() const {
    return {{"value", num(value)}, {"radii", mfreg::to_json(radii, true)},
            {"per_radius", mfreg::to_json(per_radius, true)}};
  }
};

// max (fn(x) - fn(y))_+ / d(x, y) over y sampled in B(x, r) \ {x}, for each
// radius; the value is the one at the smallest radius.
inline SlopeEstimate strong_slope(const ScalarOracle& fn, const Point& x, std::vector<double> radii, int steps = 4,
                                  Norm n = Norm::max) {
  if (radii.empty()) throw std::invalid_argument("no slope radii");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  SlopeEstimate est;
  est.radii = radii;
  double fx = fn(x);
  if (std::isinf(fx)) {
    est.value = std::numeric_limits<double>::infinity();
    est.per_radius.assign(radii.size(), est.value);
    return est;
  }
  for (double r : radii) {
    double best = 0;
    for (const auto& y : detail::ball_samples(x, r, steps, n)) {
      double d = dist(x, y, n);
      if (d == 0) continue;
      double fy = fn(y);
      if (fy < fx) best = std::max(best, (fx - fy) / d);
    }
    est.per_radius.push_back(best);
  }
  est.value = est.per_radius.back();
  return est;
}

namespace detail {

struct ErrorBoundScan {
  bool holds = true;
  double worst_ratio = 0;  // sup d(x, S) / [fn(x)]_+ over fn(x) > 0
  json witness = nullptr;
  json worst = nullptr;
};

inline std::vector<Point> box_grid(const Point& c, double r, double h) {
  Window w{c, c};
  for (size_t i = 0; i < c.size(); ++i) {
    w.lo[i] -= r;
    w.hi[i] += r;
  }
  return lattice_nodes(w, h);
}

// Checks d(x, S) <= tau [fn(x)]_+ on grid points of B(xbar, eta/2) with
// [fn(x)]_+ < cap; S is the sampled zero sublevel set of B(xbar, eta). The
// reported witness is the violating point closest to xbar.
inline ErrorBoundScan scan_error_bound(const ScalarOracle& fn, const Point& xbar, double tau, double eta, double h,
                                       double cap, double tol) {
  auto grid = box_grid(xbar, eta, h);
  std::vector<double> vals(grid.size());
  std::vector<Point> level;
  for (size_t i = 0; i < grid.size(); ++i) {
    vals[i] = fn(grid[i]);
    if (vals[i] <= 0) level.push_back(grid[i]);
  }
  FiniteSet S(level);
  ErrorBoundScan out;
  double best_wd = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    double r = dist(grid[i], xbar, Norm::max);
    if (r > eta / 2 + 1e-12 || !(vals[i] > 0) || !(vals[i] < cap)) continue;
    double d = dist_point_set_raw(grid[i], S, Norm::max);
    double ratio = d / vals[i];
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst = {{"x", to_json(grid[i])}, {"ratio", num(ratio)}};
    }
    if (d > tau * vals[i] + tol && r < best_wd) {
      best_wd = r;
      out.holds = false;
      out.witness = {{"x", to_json(grid[i])}, {"dist_to_S", num(d)}, {"fn", num(vals[i])},
                     {"tau_times_fn", num(tau * vals[i])}};
    }
  }
  return out;
}

}  // namespace detail

inline CheckReport check_error_bound(const ScalarOracle& fn, const Point& xbar, double tau, double eta,
                                     const VecoptConfig& cfg = {}) {
  if (!(fn(xbar) <= 0)) throw std::invalid_argument("xbar is not in the zero sublevel set");
  if (!(tau > 0) || !(eta > 0)) throw std::invalid_argument("need tau > 0 and eta > 0");
  auto scan = detail::scan_error_bound(fn, xbar, tau, eta, cfg.h, std::numeric_limits<double>::infinity(), cfg.tol);
  return custom_check("error_bound", scan.holds, tau, scan.witness,
                      {{"eta", num(eta)}, {"h", num(cfg.h)}, {"sup_ratio", num(scan.worst_ratio)}});
}

// Slope premise on B(xbar, eta) where fn is in (0, gamma), then
// m d(x, S) <= [fn(x)]_+ on B(xbar, eta/2) where fn(x) < gamma.
inline TheoremReport verify_slope_error_bound(const ScalarOracle& fn, const Point& xbar, double m, double gamma,
                                              const VecoptConfig& cfg = {}) {
  if (!(fn(xbar) <= 0)) throw std::invalid_argument("xbar is not in the zero sublevel set");
  if (!(m > 0) || !(gamma > 0)) throw std::invalid_argument("need m > 0 and gamma > 0");
  TheoremReport rep;
  rep.theorem_id = "Slope1";
  rep.falsification = cfg.falsification;
  const double slope_tol = 1e-9;
  json wit = nullptr;
  double min_slope = std::numeric_limits<double>::infinity();
  double best_r = std::numeric_limits<double>::infinity();
  for (const auto& x : detail::box_grid(xbar, cfg.eta, cfg.h)) {
    double v = fn(x);
    if (!(v > 0 && v < gamma)) continue;
    auto sl = strong_slope(fn, x, cfg.slopes(), cfg.slope_steps);
    min_slope = std::min(min_slope, sl.value);
    double r = dist(x, xbar, Norm::max);
    if (sl.value < m - slope_tol && r < best_r) {
      best_r = r;
      wit = {{"x", to_json(x)}, {"fn", num(v)}, {"slope", sl.to_json()}};
    }
  }
  rep.premise_checks.push_back(custom_check("slope_lower_bound", wit.is_null(), m, wit,
                                            {{"gamma", num(gamma)}, {"eta", num(cfg.eta)}, {"min_slope", num(min_slope)}}));
  if (std::isinf(min_slope)) rep.notes.push_back("slope premise vacuous: fn not in (0, gamma) on the sample");
  rep.premises_hold = all_hold(rep.premise_checks);
  rep.bound_claimed = ExtReal(1 / m);
  if (!rep.premises_hold && !cfg.falsification) return rep;

  auto scan = detail::scan_error_bound(fn, xbar, 1 / m, cfg.eta, cfg.h, gamma, cfg.tol);
  rep.conclusion_check = custom_check("error_bound", scan.holds, 1 / m, scan.witness,
                                      {{"eta", num(cfg.eta)}, {"h", num(cfg.h)}, {"gamma", num(gamma)}});
  rep.conclusion_holds = scan.holds;
  rep.bound_measured = ExtReal(scan.worst_ratio);
  rep.bound_holds = within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  rep.details["worst_ratio"] = scan.worst;
  return rep;
}

// liminf over u -> x of d(z, G(u) + q), approximated by the minimum over
// sampled balls of shrinking radius; the value is the one at the smallest.
struct PhiEstimate {
  ExtReal value = ExtReal::infinity();
  std::vector<double> radii;
  std::vector<double> per_radius;
};

inline PhiEstimate phi_EG_trace(const SetOracle& G, const PolyhedralCone& Q, const Point& x, const Point& q,
                                const Point& z, const VecoptConfig& cfg, Norm nz = Norm::max) {
  PhiEstimate est;
  est.radii = cfg.phis();
  std::sort(est.radii.begin(), est.radii.end(), std::greater<>());
  if (!Q.contains(q)) {
    est.per_radius.assign(est.radii.size(), std::numeric_limits<double>::infinity());
    return est;
  }
  Point zq = sub(z, q);
  for (double r : est.radii) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : detail::ball_samples(x, r, cfg.phi_steps, Norm::max)) {
      FiniteSet gu = G(u);
      if (!gu.empty()) best = std::min(best, dist_point_set_raw(zq, gu, nz));
    }
    est.per_radius.push_back(best);
  }
  est.value = ExtReal(est.per_radius.back());
  return est;
}

inline ExtReal phi_EG(const SetOracle& G, const PolyhedralCone& Q, const Point& x, const Point& q, const Point& z,
                      const VecoptConfig& cfg = {}, Norm nz = Norm::max) {
  return phi_EG_trace(G, Q, x, q, z, cfg, nz).value;
}

// Slope premise for phi((.,.), zbar) where phi is in (0, gamma), then
// d((x,q), E^-1(zbar)) <= (1/m) d(zbar, G(x)+q) on the sampled region. The
// metric on X x Z is additive.
inline TheoremReport verify_mreg_EF(const SetOracle& G, const PolyhedralCone& Q, const Point& xbar, const Point& qbar,
                                    const Point& zbar, double m, double gamma, const VecoptConfig& cfg = {},
                                    Norm nz = Norm::max) {
  if (!(m > 0) || !(gamma > 0)) throw std::invalid_argument("need m > 0 and gamma > 0");
  if (!Q.contains(qbar, 1e-9)) throw std::invalid_argument("qbar is not in Q");
  {
    FiniteSet g = G(xbar);
    if (g.empty() || dist_point_set_raw(sub(zbar, qbar), g, nz) > 1e-9)
      throw std::invalid_argument("zbar is not in G(xbar) + qbar");
  }
  TheoremReport rep;
  rep.theorem_id = "mreg_EF";
  rep.falsification = cfg.falsification;
  const auto& nb = cfg.nb;
  const size_t n = xbar.size();
  auto split = [n](const Point& xq) {
    return std::pair<Point, Point>{Point(xq.begin(), xq.begin() + static_cast<long>(n)),
                                   Point(xq.begin() + static_cast<long>(n), xq.end())};
  };
  ScalarOracle phi = [&](const Point& xq) {
    auto [x, q] = split(xq);
    return phi_EG(G, Q, x, q, zbar, cfg, nz).value();
  };

  auto xs_in = detail::box_grid(xbar, nb.r_U, cfg.h);
  auto qs_in = cone_grid(Q, qbar, nb.r_V, cfg.h);
  const double slope_tol = 1e-9;
  json wit = nullptr;
  double min_slope = std::numeric_limits<double>::infinity();
  for (const auto& x : xs_in)
    for (const auto& q : qs_in) {
      Point xq = concat(x, q);
      double v = phi(xq);
      if (!(v > 0 && v < gamma)) continue;
      auto sl = strong_slope(phi, xq, cfg.slopes(), cfg.slope_steps, Norm::sum);
      min_slope = std::min(min_slope, sl.value);
      if (sl.value < m - slope_tol && wit.is_null())
        wit = {{"x", to_json(x)}, {"q", to_json(q)}, {"phi", num(v)}, {"slope", sl.to_json()}};
    }
  rep.premise_checks.push_back(custom_check("phi_slope_lower_bound", wit.is_null(), m, wit,
                                            {{"gamma", num(gamma)}, {"min_slope", num(min_slope)}}));
  rep.premises_hold = all_hold(rep.premise_checks);
  rep.bound_claimed = ExtReal(1 / m);
  rep.details["phi_radii"] = to_json(cfg.phis(), true);
  if (!rep.premises_hold && !cfg.falsification) return rep;

  // Preimage of zbar sampled on a doubled region so nearest points near the
  // edge of the check region are not cut off.
  auto xs_out = detail::box_grid(xbar, 2 * nb.r_U, cfg.h);
  auto qs_out = cone_grid(Q, qbar, 2 * nb.r_V, cfg.h);
  auto E = epigraphical_map(G, Q, xs_out, qs_out, cfg.h);
  E.meta.ny = nz;
  std::vector<Point> pre;
  for (size_t i = 0; i < E.size(); ++i)
    if (!E.image(i).empty() && dist_point_set_raw(zbar, E.image(i), nz) <= 1e-12) pre.push_back(E.point(i));
  FiniteSet P(pre);
  double slack = cfg.phis().back() / m + 1e-9;
  double worst = 0;
  json cwit = nullptr;
  for (const auto& x : xs_in)
    for (const auto& q : qs_in) {
      Point xq = snap(concat(x, q));
      FiniteSet img = E.image_at(xq);
      double rhs = img.empty() ? std::numeric_limits<double>::infinity() : dist_point_set_raw(zbar, img, nz);
      double lhs = P.empty() ? std::numeric_limits<double>::infinity() : dist_point_set_raw(xq, P, Norm::sum);
      if (rhs > 0 && std::isfinite(rhs)) worst = std::max(worst, lhs / rhs);
      if (lhs > rhs / m + slack && cwit.is_null())
        cwit = {{"x", to_json(x)}, {"q", to_json(q)}, {"dist_to_preimage", num(lhs)}, {"dist_zbar_image", num(rhs)}};
    }
  rep.conclusion_check = custom_check("mregG", cwit.is_null(), 1 / m, cwit, {{"slack", num(slack)}});
  rep.conclusion_holds = cwit.is_null();
  rep.bound_measured = ExtReal(worst);
  rep.bound_holds = within_bound(rep.bound_measured, rep.bound_claimed, cfg.bound_slack);
  if (rep.conclusion_holds && cfg.report_lpo) {
    NbhdConfig lnb = nb;
    lnb.targets = TargetMode::graph_only;
    auto lpo = estimate_modulus(restrict_domain(E, concat(xbar, qbar), nb.r_U + nb.r_V), snap(concat(xbar, qbar)),
                                zbar, Property::lpo, lnb);
    rep.details["lpo"] = lpo.to_json();
  }
  return rep;
}

}  // namespace mfreg
