#pragma once

// Checkers and modulus estimators for the nine regularity properties and
// their parametric variants on sampled relations.
//
// Every property is reduced to a stream of constraint tuples enumerated in a
// fixed lexicographic order:
//   ratio kinds (lip, reg, psdclm, hemreg, clm, subreg): a <= L * b;
//   rate kinds (lop, plop, lpo): the tuple is violated once L exceeds a
//   threshold, i.e. the property at rate L needs threshold + tol >= L.
// A check stops at the first violated tuple, which becomes the witness. An
// estimate consumes the whole stream.
//
// Radii: r_U bounds the domain ball, r_V the codomain ball and r_W the
// parameter ball of parametric maps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfreg/report.hpp"
#include "mfreg/setcore.hpp"

namespace mfreg {

enum class Property { lop, lip, reg, plop, psdclm, hemreg, lpo, clm, subreg };

inline const char* property_name(Property p) {
  switch (p) {
    case Property::lop: return "lop";
    case Property::lip: return "lip";
    case Property::reg: return "reg";
    case Property::plop: return "plop";
    case Property::psdclm: return "psdclm";
    case Property::hemreg: return "hemreg";
    case Property::lpo: return "lpo";
    case Property::clm: return "clm";
    case Property::subreg: return "subreg";
  }
  return "?";
}

inline std::optional<Property> parse_property(const std::string& s) {
  for (auto p : {Property::lop, Property::lip, Property::reg, Property::plop, Property::psdclm, Property::hemreg,
                 Property::lpo, Property::clm, Property::subreg})
    if (s == property_name(p)) return p;
  return std::nullopt;
}

inline bool is_rate(Property p) { return p == Property::lop || p == Property::plop || p == Property::lpo; }

enum class TargetMode { lattice_and_graph, graph_only };

struct NbhdConfig {
  double r_U = 0.5;
  double r_V = 0.5;
  double r_W = 0.5;
  double eps = 0.25;
  std::vector<double> rho_grid;  // empty: eps * 2^-k for k = 1..6
  double L_min = 1.0 / 1024;
  double L_max = 1024;
  int bisect_steps = 20;
  double tol = 1e-9;
  // Covering tolerance when deciding t in F(x); negative picks h_y/2 with
  // lattice targets and exact membership with graph-only targets.
  double cover_tol = -1;
  TargetMode targets = TargetMode::lattice_and_graph;

  std::vector<double> rhos() const {
    if (!rho_grid.empty()) return rho_grid;
    std::vector<double> r;
    for (int k = 1; k <= 6; ++k) r.push_back(eps * std::ldexp(1.0, -k));
    return r;
  }
  double cover(double h_y) const {
    if (cover_tol >= 0) return cover_tol;
    return targets == TargetMode::graph_only ? 0.0 : h_y / 2;
  }
  void validate() const {
    if (!(r_U > 0 && r_V > 0 && r_W > 0 && eps > 0)) throw std::invalid_argument("radii must be positive");
    if (tol < 0) throw std::invalid_argument("tol must be nonnegative");
    for (double r : rhos())
      if (!(r > 0 && r < eps)) throw std::invalid_argument("rho_grid must lie in (0, eps)");
  }
  NbhdConfig swapped() const {
    NbhdConfig c = *this;
    std::swap(c.r_U, c.r_V);
    return c;
  }
  json to_json() const {
    return {{"r_U", num(r_U)},
            {"r_V", num(r_V)},
            {"r_W", num(r_W)},
            {"eps", num(eps)},
            {"rho_grid", mfreg::to_json(rhos(), true)},
            {"L_min", num(L_min)},
            {"L_max", num(L_max)},
            {"bisect_steps", bisect_steps},
            {"tol", num(tol)},
            {"cover_tol", num(cover_tol)},
            {"targets", targets == TargetMode::graph_only ? "graph_only" : "lattice_and_graph"}};
  }
};

struct CheckReport {
  std::string property;
  bool holds = true;
  double L = 0;
  json witness;  // null when holds
  json config;
  std::vector<std::string> notes;

  const char* verdict() const { return holds ? "holds_at_resolution" : "fails"; }
  json to_json() const {
    json j = {{"property", property}, {"verdict", verdict()}, {"L", num(L)}, {"witness", witness}, {"config", config}};
    if (!notes.empty()) j["notes"] = notes;
    return j;
  }
};

struct ModulusEstimate {
  std::string kind;
  ExtReal value;
  double h_x = 0, h_y = 0;
  json witness;
  bool empty_sample = false;
  bool capped = false;

  json to_json() const {
    json j = {{"kind", kind},
              {"estimate", num(value)},
              {"resolution", {num(h_x), num(h_y)}},
              {"argmax_witness", witness}};
    if (empty_sample) j["empty_sample"] = true;
    if (capped) j["capped"] = true;
    return j;
  }
};

struct TriadReport {
  std::string triad;
  CheckReport open, lipschitz, regular;
  bool consistent = true;
  json to_json() const {
    return {{"triad", triad},
            {"checks", {open.to_json(), lipschitz.to_json(), regular.to_json()}},
            {"consistent", consistent}};
  }
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Read-only relation views so parametric slices need no copies.
struct MFView {
  const FiniteMultifunction& F;
  size_t size() const { return F.size(); }
  const Point& point(size_t i) const { return F.domain[i]; }
  const FiniteSet& image(size_t i) const { return F.images[i]; }
  std::optional<size_t> find(const Point& x) const { return F.find(x); }
  double h_y() const { return F.meta.h_y; }
  const Window& window() const { return F.meta.window; }
  Norm nx() const { return F.meta.nx; }
  Norm ny() const { return F.meta.ny; }
};

struct PSliceView {  // H(., p)
  const ParametricMultifunction& H;
  size_t ip;
  size_t size() const { return H.nx(); }
  const Point& point(size_t i) const { return H.x_grid[i]; }
  const FiniteSet& image(size_t i) const { return H.image(i, ip); }
  std::optional<size_t> find(const Point& x) const { return H.find_x(x); }
  double h_y() const { return H.meta.h_y; }
  const Window& window() const { return H.meta.window; }
  Norm nx() const { return H.meta.nx; }
  Norm ny() const { return H.meta.ny; }
};

struct XSliceView {  // H(x, .)
  const ParametricMultifunction& H;
  size_t ix;
  size_t size() const { return H.np(); }
  const Point& point(size_t i) const { return H.p_grid[i]; }
  const FiniteSet& image(size_t i) const { return H.image(ix, i); }
  std::optional<size_t> find(const Point& p) const { return H.find_p(p); }
  double h_y() const { return H.meta.h_y; }
  const Window& window() const { return H.meta.window; }
  Norm nx() const { return H.meta.np; }
  Norm ny() const { return H.meta.ny; }
};

// Graph pairs sorted by value, for preimage queries.
template <class View>
class GraphIndex {
 public:
  explicit GraphIndex(const View& v) : v_(v) {
    for (size_t i = 0; i < v.size(); ++i)
      for (const auto& y : v.image(i)) pairs_.emplace_back(&y, i);
    std::sort(pairs_.begin(), pairs_.end(), [](const auto& a, const auto& b) {
      if (*a.first != *b.first) return *a.first < *b.first;
      return a.second < b.second;
    });
  }

  // Domain indices i with d(t, F(i)) <= cov, ascending.
  std::vector<size_t> preimage_indices(const Point& t, double cov) const {
    std::vector<size_t> out;
    auto lo = std::lower_bound(pairs_.begin(), pairs_.end(), t[0] - cov,
                               [](const auto& pr, double v) { return (*pr.first)[0] < v; });
    for (auto it = lo; it != pairs_.end() && (*it->first)[0] <= t[0] + cov; ++it)
      if (dist(*it->first, t, v_.ny()) <= cov) out.push_back(it->second);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  FiniteSet preimage(const Point& t, double cov) const {
    std::vector<Point> pts;
    for (size_t i : preimage_indices(t, cov)) pts.push_back(v_.point(i));
    return FiniteSet(std::move(pts));
  }

  std::vector<Point> values() const {
    std::vector<Point> out;
    for (const auto& pr : pairs_)
      if (out.empty() || out.back() != *pr.first) out.push_back(*pr.first);
    return out;
  }

 private:
  const View& v_;
  std::vector<std::pair<const Point*, size_t>> pairs_;
};

// Codomain test points: graph values plus (in lattice mode) the h_y-lattice
// of the window, restricted to the max-norm box of the given radius.
template <class View>
std::vector<Point> target_points(const View& v, const GraphIndex<View>& gi, const Point& center, double radius,
                                 TargetMode mode) {
  std::vector<Point> out;
  auto in_box = [&](const Point& p) {
    for (size_t k = 0; k < p.size(); ++k)
      if (std::abs(p[k] - center[k]) > radius + 1e-12) return false;
    return true;
  };
  for (auto& y : gi.values())
    if (in_box(y)) out.push_back(y);
  if (mode == TargetMode::lattice_and_graph && v.window().dim() > 0) {
    Window w = v.window();
    for (size_t k = 0; k < w.dim(); ++k) {
      w.lo[k] = std::max(w.lo[k], center[k] - radius);
      w.hi[k] = std::min(w.hi[k], center[k] + radius);
      if (w.lo[k] > w.hi[k]) return out;
    }
    for (auto& n : lattice_nodes(w, v.h_y(), 2000000)) out.push_back(std::move(n));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline FiniteSet clip(const FiniteSet& s, const Point& c, double r, Norm n) {
  if (s.empty()) return s;
  std::vector<Point> pts;
  for (const auto& y : s)
    if (dist(y, c, n) <= r + 1e-12) pts.push_back(y);
  if (pts.size() == s.size()) return s;
  return FiniteSet(std::move(pts));
}

struct Tuple {
  double a = 0, b = 0;
  size_t i = SIZE_MAX, j = SIZE_MAX;
  const Point* y = nullptr;
  const Point* t = nullptr;
  double rho = 0;
};

inline bool violates_ratio(double a, double b, double L, double tol) {
  if (std::isinf(b)) return false;
  if (std::isinf(a)) return true;
  return a > L * b + tol;
}

inline bool violates_rate(double threshold, double L, double tol) { return threshold + tol < L; }

struct Counters {
  size_t empty_excess = 0;  // times e(empty, B) = 0 was used
};

// Enumerators. Each calls cb(Tuple) until cb returns false.

template <class View, class CB>
void each_psdclm(const View& v, const Point& xbar, const Point& ybar, double r_dom, CB&& cb) {
  for (size_t i = 0; i < v.size(); ++i) {
    double b = dist(v.point(i), xbar, v.nx());
    if (b > r_dom + 1e-12) continue;
    Tuple t{dist_point_set_raw(ybar, v.image(i), v.ny()), b, i};
    if (!cb(t)) return;
  }
}

template <class View, class CB>
void each_clm(const View& v, const Point& xbar, const Point& ybar, double r_dom, double r_cod, Counters& ctr,
              CB&& cb) {
  auto ib = v.find(xbar);
  static const FiniteSet kEmpty;
  const FiniteSet& Fbar = ib ? v.image(*ib) : kEmpty;
  for (size_t i = 0; i < v.size(); ++i) {
    double b = dist(v.point(i), xbar, v.nx());
    if (b > r_dom + 1e-12) continue;
    FiniteSet A = clip(v.image(i), ybar, r_cod, v.ny());
    if (A.empty()) ++ctr.empty_excess;
    Tuple t{excess(A, Fbar, v.ny()).value(), b, i};
    if (!cb(t)) return;
  }
}

template <class View, class CB>
void each_subreg(const View& v, const GraphIndex<View>& gi, const Point& xbar, const Point& ybar, double r_dom,
                 double cov, CB&& cb) {
  FiniteSet C = gi.preimage(ybar, cov);
  for (size_t i = 0; i < v.size(); ++i) {
    if (dist(v.point(i), xbar, v.nx()) > r_dom + 1e-12) continue;
    Tuple t{dist_point_set_raw(v.point(i), C, v.nx()), dist_point_set_raw(ybar, v.image(i), v.ny()), i};
    if (!cb(t)) return;
  }
}

template <class View, class CB>
void each_hemreg(const View& v, const GraphIndex<View>& gi, const std::vector<Point>& targets, const Point& xbar,
                 const Point& ybar, double r_cod, double cov, CB&& cb) {
  for (const auto& tp : targets) {
    double b = dist(tp, ybar, v.ny());
    if (b > r_cod + 1e-12) continue;
    Tuple t{dist_point_set_raw(xbar, gi.preimage(tp, cov), v.nx()), b};
    t.t = &tp;
    if (!cb(t)) return;
  }
}

template <class View, class CB>
void each_lip(const View& v, const Point& xbar, const Point& ybar, double r_dom, double r_cod, Counters& ctr,
              CB&& cb) {
  std::vector<size_t> U;
  std::vector<FiniteSet> clipped;
  for (size_t i = 0; i < v.size(); ++i)
    if (dist(v.point(i), xbar, v.nx()) <= r_dom + 1e-12) {
      U.push_back(i);
      clipped.push_back(clip(v.image(i), ybar, r_cod, v.ny()));
    }
  for (size_t a = 0; a < U.size(); ++a) {
    if (clipped[a].empty()) {
      ctr.empty_excess += U.size() - 1;
      continue;  // e(empty, .) = 0 never violates
    }
    for (size_t b = 0; b < U.size(); ++b) {
      if (a == b) continue;
      Tuple t{excess(clipped[a], v.image(U[b]), v.ny()).value(), dist(v.point(U[a]), v.point(U[b]), v.nx()), U[a],
              U[b]};
      if (!cb(t)) return;
    }
  }
}

template <class View, class CB>
void each_reg(const View& v, const GraphIndex<View>& gi, const std::vector<Point>& targets, const Point& xbar,
              const Point& ybar, double r_dom, double r_cod, double cov, CB&& cb) {
  std::vector<const Point*> T;
  std::vector<FiniteSet> pre;
  for (const auto& tp : targets)
    if (dist(tp, ybar, v.ny()) <= r_cod + 1e-12) {
      T.push_back(&tp);
      pre.push_back(gi.preimage(tp, cov));
    }
  for (size_t i = 0; i < v.size(); ++i) {
    if (dist(v.point(i), xbar, v.nx()) > r_dom + 1e-12) continue;
    for (size_t k = 0; k < T.size(); ++k) {
      Tuple t{dist_point_set_raw(v.point(i), pre[k], v.nx()), dist_point_set_raw(*T[k], v.image(i), v.ny()), i};
      t.t = T[k];
      if (!cb(t)) return;
    }
  }
}

// Pseudo-openness: x in U with d(ybar, F(x)) < L rho must have d(x, C) < rho,
// C = F^{-1}(ybar). Violated iff d(x, C) >= rho and L > d(ybar, F(x)) / rho.
template <class View, class CB>
void each_lpo(const View& v, const GraphIndex<View>& gi, const Point& xbar, const Point& ybar, double r_dom,
              double cov, const std::vector<double>& rhos, CB&& cb) {
  FiniteSet C = gi.preimage(ybar, cov);
  for (size_t i = 0; i < v.size(); ++i) {
    if (dist(v.point(i), xbar, v.nx()) > r_dom + 1e-12) continue;
    double dc = dist_point_set_raw(v.point(i), C, v.nx());
    double dy = dist_point_set_raw(ybar, v.image(i), v.ny());
    for (double rho : rhos) {
      if (dc < rho) continue;
      Tuple t{dy / rho, 0, i};
      t.rho = rho;
      if (!cb(t)) return;
    }
  }
}

// Openness at the point: each target t with d(t, ybar) < L rho needs a
// covering x' with d(x', xbar) < rho.
template <class View, class CB>
void each_plop(const View& v, const GraphIndex<View>& gi, const std::vector<Point>& targets, const Point& xbar,
               const Point& ybar, double cov, const std::vector<double>& rhos, CB&& cb) {
  for (const auto& tp : targets) {
    double m = dist_point_set_raw(xbar, gi.preimage(tp, cov), v.nx());
    double d = dist(tp, ybar, v.ny());
    for (double rho : rhos) {
      if (m < rho) continue;
      Tuple t{d / rho, 0};
      t.t = &tp;
      t.rho = rho;
      if (!cb(t)) return;
    }
  }
}

// Openness around the point: the same covering requirement at every graph
// point (x, y) in U x V.
template <class View, class CB>
void each_lop(const View& v, const GraphIndex<View>& gi, const std::vector<Point>& targets, const Point& xbar,
              const Point& ybar, double r_dom, double r_cod, double cov, const std::vector<double>& rhos, CB&& cb) {
  std::vector<FiniteSet> pre;
  pre.reserve(targets.size());
  for (const auto& tp : targets) pre.push_back(gi.preimage(tp, cov));
  for (size_t i = 0; i < v.size(); ++i) {
    if (dist(v.point(i), xbar, v.nx()) > r_dom + 1e-12) continue;
    for (const auto& y : v.image(i)) {
      if (dist(y, ybar, v.ny()) > r_cod + 1e-12) continue;
      for (size_t k = 0; k < targets.size(); ++k) {
        double m = dist_point_set_raw(v.point(i), pre[k], v.nx());
        double d = dist(targets[k], y, v.ny());
        for (double rho : rhos) {
          if (m < rho) continue;
          Tuple t{d / rho, 0, i};
          t.y = &y;
          t.t = &targets[k];
          t.rho = rho;
          if (!cb(t)) return;
        }
      }
    }
  }
}

inline const char* inequality_text(Property p) {
  switch (p) {
    case Property::lop: return "B(y, rho L) subset F(B(x, rho))";
    case Property::lip: return "e(F(x) cap V, F(u)) <= L d(x, u)";
    case Property::reg: return "d(x, F^-1(t)) <= L d(t, F(x))";
    case Property::plop: return "B(ybar, rho L) subset F(B(xbar, rho))";
    case Property::psdclm: return "d(ybar, F(x)) <= L d(x, xbar)";
    case Property::hemreg: return "d(xbar, F^-1(t)) <= L d(t, ybar)";
    case Property::lpo: return "x in F^-1(B(ybar, L rho)) implies ybar in F(B(x, rho))";
    case Property::clm: return "e(F(x) cap V, F(xbar)) <= L d(x, xbar)";
    case Property::subreg: return "d(x, F^-1(ybar)) <= L d(ybar, F(x))";
  }
  return "";
}

template <class View>
json witness_json(const View& v, Property kind, const Tuple& t) {
  json w = json::object();
  if (t.i != SIZE_MAX) w["x"] = to_json(v.point(t.i));
  if (t.j != SIZE_MAX) w["u"] = to_json(v.point(t.j));
  if (t.y) w["y"] = to_json(*t.y);
  if (t.t) w["target"] = to_json(*t.t);
  if (is_rate(kind)) {
    w["rho"] = num(t.rho);
    w["rate_threshold"] = num(t.a);
    if (t.t) w["reason"] = "target not reached within the open rho-ball";
    else w["reason"] = "ybar not reached within the open rho-ball";
  } else {
    w["lhs"] = num(t.a);
    w["distance_factor"] = num(t.b);
  }
  w["inequality"] = inequality_text(kind);
  return w;
}

// Runs the enumerator for kind on a view; cb(Tuple) -> bool.
template <class View, class CB>
void each_tuple(const View& v, Property kind, const Point& xbar, const Point& ybar, double r_dom, double r_cod,
                const NbhdConfig& cfg, Counters& ctr, CB&& cb) {
  const double cov = cfg.cover(v.h_y());
  const auto rhos = cfg.rhos();
  switch (kind) {
    case Property::psdclm: each_psdclm(v, xbar, ybar, r_dom, cb); return;
    case Property::clm: each_clm(v, xbar, ybar, r_dom, r_cod, ctr, cb); return;
    case Property::lip: each_lip(v, xbar, ybar, r_dom, r_cod, ctr, cb); return;
    default: break;
  }
  GraphIndex<View> gi(v);
  switch (kind) {
    case Property::subreg: each_subreg(v, gi, xbar, ybar, r_dom, cov, cb); return;
    case Property::lpo: each_lpo(v, gi, xbar, ybar, r_dom, cov, rhos, cb); return;
    default: break;
  }
  double reach = (kind == Property::hemreg || kind == Property::reg) ? r_cod : kInf;
  auto targets = target_points(v, gi, ybar, reach, cfg.targets);
  switch (kind) {
    case Property::hemreg: each_hemreg(v, gi, targets, xbar, ybar, r_cod, cov, cb); return;
    case Property::reg: each_reg(v, gi, targets, xbar, ybar, r_dom, r_cod, cov, cb); return;
    case Property::plop: each_plop(v, gi, targets, xbar, ybar, cov, rhos, cb); return;
    case Property::lop: each_lop(v, gi, targets, xbar, ybar, r_dom, r_cod, cov, rhos, cb); return;
    default: break;
  }
}

struct CheckResult {
  bool holds = true;
  json witness;
};

template <class View>
CheckResult run_check(const View& v, Property kind, const Point& xbar, const Point& ybar, double L, double r_dom,
                      double r_cod, const NbhdConfig& cfg, Counters& ctr) {
  CheckResult r;
  each_tuple(v, kind, xbar, ybar, r_dom, r_cod, cfg, ctr, [&](const Tuple& t) {
    bool bad = is_rate(kind) ? violates_rate(t.a, L, cfg.tol) : violates_ratio(t.a, t.b, L, cfg.tol);
    if (bad) {
      r.holds = false;
      r.witness = witness_json(v, kind, t);
      return false;
    }
    return true;
  });
  return r;
}

// Sup of a/b over tuples with b > tol (ratio kinds).
template <class View>
ModulusEstimate run_ratio_estimate(const View& v, Property kind, const Point& xbar, const Point& ybar, double r_dom,
                                   double r_cod, const NbhdConfig& cfg) {
  Counters ctr;
  ModulusEstimate est;
  est.kind = property_name(kind);
  double best = 0;
  bool any = false;
  bool have_arg = false;
  // Tuples point into enumerator-local storage, so the witness is
  // serialized while the tuple is alive.
  each_tuple(v, kind, xbar, ybar, r_dom, r_cod, cfg, ctr, [&](const Tuple& t) {
    if (!(t.b > cfg.tol)) return true;
    if (std::isinf(t.b)) return true;
    any = true;
    double q = std::isinf(t.a) ? kInf : t.a / t.b;
    if (q > best || (!have_arg && q == best)) {
      best = q;
      est.witness = witness_json(v, kind, t);
      have_arg = true;
    }
    return !std::isinf(best);
  });
  est.value = ExtReal(best);
  est.empty_sample = !any;
  return est;
}

// Largest passing rate, by doubling from L_min then bisection (rate kinds).
template <class View>
ModulusEstimate run_rate_estimate(const View& v, Property kind, const Point& xbar, const Point& ybar, double r_dom,
                                  double r_cod, const NbhdConfig& cfg) {
  Counters ctr;
  ModulusEstimate est;
  est.kind = property_name(kind);
  std::vector<double> thr;
  double arg_a = kInf;
  bool have_arg = false;
  json arg_w;
  each_tuple(v, kind, xbar, ybar, r_dom, r_cod, cfg, ctr, [&](const Tuple& t) {
    thr.push_back(t.a);
    if (!have_arg || t.a < arg_a) {
      arg_a = t.a;
      arg_w = witness_json(v, kind, t);
      have_arg = true;
    }
    return true;
  });
  if (thr.empty()) {
    est.value = ExtReal::infinity();
    est.empty_sample = true;
    return est;
  }
  double tmin = *std::min_element(thr.begin(), thr.end());
  auto passes = [&](double L) { return !violates_rate(tmin, L, cfg.tol); };
  est.witness = std::move(arg_w);
  if (!passes(cfg.L_min)) {
    est.value = ExtReal(0.0);
    return est;
  }
  double lo = cfg.L_min, hi = lo * 2;
  while (passes(hi)) {
    lo = hi;
    if (lo >= cfg.L_max) {
      est.value = ExtReal(cfg.L_max);
      est.capped = true;
      return est;
    }
    hi = std::min(hi * 2, cfg.L_max * 2);
  }
  for (int s = 0; s < cfg.bisect_steps; ++s) {
    double mid = 0.5 * (lo + hi);
    if (passes(mid)) lo = mid;
    else hi = mid;
  }
  est.value = ExtReal(lo);
  return est;
}

template <class View>
void require_on_graph(const View& v, const Point& xbar, const Point& ybar, double cov) {
  auto i = v.find(xbar);
  if (!i) throw std::invalid_argument("base point xbar is not a domain grid node");
  if (!(dist_point_set_raw(ybar, v.image(*i), v.ny()) <= std::max(cov, 1e-12)))
    throw std::invalid_argument("base point (xbar, ybar) is not on the sampled graph");
}

inline void require_positive(double L) {
  if (!(L > 0)) throw std::invalid_argument("L must be positive");
}

}  // namespace detail

inline CheckReport check_property(const FiniteMultifunction& F, const Point& xbar, const Point& ybar, Property kind,
                                  double L, const NbhdConfig& cfg) {
  cfg.validate();
  detail::require_positive(L);
  detail::MFView v{F};
  detail::require_on_graph(v, xbar, ybar, cfg.cover(F.meta.h_y));
  detail::Counters ctr;
  auto r = detail::run_check(v, kind, xbar, ybar, L, cfg.r_U, cfg.r_V, cfg, ctr);
  CheckReport rep{property_name(kind), r.holds, L, r.witness, cfg.to_json(), {}};
  if (ctr.empty_excess > 0)
    rep.notes.push_back("e(empty, B) = 0 convention used " + std::to_string(ctr.empty_excess) + " times");
  return rep;
}

inline ModulusEstimate estimate_modulus(const FiniteMultifunction& F, const Point& xbar, const Point& ybar,
                                        Property kind, const NbhdConfig& cfg) {
  cfg.validate();
  detail::MFView v{F};
  detail::require_on_graph(v, xbar, ybar, cfg.cover(F.meta.h_y));
  ModulusEstimate e = is_rate(kind) ? detail::run_rate_estimate(v, kind, xbar, ybar, cfg.r_U, cfg.r_V, cfg)
                                    : detail::run_ratio_estimate(v, kind, xbar, ybar, cfg.r_U, cfg.r_V, cfg);
  e.h_x = F.meta.h_x;
  e.h_y = F.meta.h_y;
  return e;
}

// Transposed relation whose images use the covering tolerance: the image of a
// codomain point t is {x : d(t, F(x)) <= cov}. With cov = 0 and no lattice
// this is the exact inverse. The domain holds the graph values and, in
// lattice mode, the codomain lattice of the window.
inline FiniteMultifunction invert_covered(const FiniteMultifunction& F, double cov, TargetMode mode) {
  detail::MFView v{F};
  detail::GraphIndex<detail::MFView> gi(v);
  Point c(F.meta.window.dim(), 0.0);
  std::vector<Point> dom;
  if (mode == TargetMode::lattice_and_graph && F.meta.window.dim() > 0) {
    dom = lattice_nodes(F.meta.window, F.meta.h_y, 2000000);
    dom = merge_grids(std::move(dom), gi.values());
  } else {
    dom = gi.values();
  }
  std::vector<FiniteSet> imgs;
  imgs.reserve(dom.size());
  for (const auto& t : dom) imgs.push_back(gi.preimage(t, cov));
  GridMeta meta{F.meta.h_y, F.meta.h_x, bounding_box(F.domain), F.meta.ny, F.meta.nx};
  return make_multifunction(std::move(dom), std::move(imgs), std::move(meta));
}

namespace detail {
inline TriadReport make_triad(const char* name, CheckReport a, CheckReport b, CheckReport c) {
  TriadReport t{name, std::move(a), std::move(b), std::move(c), true};
  t.consistent = t.open.holds == t.lipschitz.holds && t.lipschitz.holds == t.regular.holds;
  return t;
}
}  // namespace detail

// Openness at rate L, Aubin property of F^-1 and metric regularity of F,
// the latter two with constant 1/L.
inline TriadReport check_around_triad(const FiniteMultifunction& F, const Point& xbar, const Point& ybar, double L,
                                      const NbhdConfig& cfg) {
  detail::require_positive(L);
  auto Finv = invert_covered(F, cfg.cover(F.meta.h_y), cfg.targets);
  NbhdConfig inv = cfg.swapped();
  inv.cover_tol = 0;
  return detail::make_triad("around", check_property(F, xbar, ybar, Property::lop, L, cfg),
                            check_property(Finv, ybar, xbar, Property::lip, 1 / L, inv),
                            check_property(F, xbar, ybar, Property::reg, 1 / L, cfg));
}

inline TriadReport check_at1_triad(const FiniteMultifunction& F, const Point& xbar, const Point& ybar, double L,
                                   const NbhdConfig& cfg) {
  detail::require_positive(L);
  auto Finv = invert_covered(F, cfg.cover(F.meta.h_y), cfg.targets);
  NbhdConfig inv = cfg.swapped();
  inv.cover_tol = 0;
  return detail::make_triad("at_type1", check_property(F, xbar, ybar, Property::plop, L, cfg),
                            check_property(Finv, ybar, xbar, Property::psdclm, 1 / L, inv),
                            check_property(F, xbar, ybar, Property::hemreg, 1 / L, cfg));
}

inline TriadReport check_at2_triad(const FiniteMultifunction& F, const Point& xbar, const Point& ybar, double L,
                                   const NbhdConfig& cfg) {
  detail::require_positive(L);
  auto Finv = invert_covered(F, cfg.cover(F.meta.h_y), cfg.targets);
  NbhdConfig inv = cfg.swapped();
  inv.cover_tol = 0;
  return detail::make_triad("at_type2", check_property(F, xbar, ybar, Property::lpo, L, cfg),
                            check_property(Finv, ybar, xbar, Property::clm, 1 / L, inv),
                            check_property(F, xbar, ybar, Property::subreg, 1 / L, cfg));
}

// ---------------------------------------------------------------------------
// Parametric variants.

enum class Direction { x_unif_p, p_unif_x };
enum class ParamKind { open, aubin, mreg, calm };

inline const char* direction_name(Direction d) { return d == Direction::x_unif_p ? "x_unif_p" : "p_unif_x"; }

inline const char* param_kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::open: return "open";
    case ParamKind::aubin: return "aubin";
    case ParamKind::mreg: return "mreg";
    case ParamKind::calm: return "calm";
  }
  return "?";
}

inline Property param_property(ParamKind k) {
  switch (k) {
    case ParamKind::open: return Property::lop;
    case ParamKind::aubin: return Property::lip;
    case ParamKind::mreg: return Property::reg;
    case ParamKind::calm: return Property::clm;
  }
  return Property::clm;
}

namespace detail {

// Calls fn(view, frozen_value, r_dom) for each slice whose frozen variable lies
// in its ball; fn returns false to stop.
template <class Fn>
void each_slice(const ParametricMultifunction& H, Direction dir, const Point& xbar, const Point& pbar,
                const NbhdConfig& cfg, Fn&& fn) {
  if (dir == Direction::x_unif_p) {
    for (size_t ip = 0; ip < H.np(); ++ip) {
      if (dist(H.p_grid[ip], pbar, H.meta.np) > cfg.r_W + 1e-12) continue;
      PSliceView v{H, ip};
      if (!fn(v, H.p_grid[ip], cfg.r_U)) return;
    }
  } else {
    for (size_t ix = 0; ix < H.nx(); ++ix) {
      if (dist(H.x_grid[ix], xbar, H.meta.nx) > cfg.r_U + 1e-12) continue;
      XSliceView v{H, ix};
      if (!fn(v, H.x_grid[ix], cfg.r_W)) return;
    }
  }
}

inline void require_param_base(const ParametricMultifunction& H, const Point& xbar, const Point& pbar,
                               const Point& ybar, double cov) {
  auto ix = H.find_x(xbar);
  auto ip = H.find_p(pbar);
  if (!ix || !ip) throw std::invalid_argument("base point is not a grid node");
  if (!(dist_point_set_raw(ybar, H.image(*ix, *ip), H.meta.ny) <= std::max(cov, 1e-12)))
    throw std::invalid_argument("base point ((xbar, pbar), ybar) is not on the sampled graph");
}

}  // namespace detail

// In direction x_unif_p the inequality of `kind` is checked in x for every
// slice H(., p) with p in the parameter ball; p_unif_x exchanges the roles.
// Calmness compares against H_p(xbar) without requiring ybar in it.
inline CheckReport check_parametric(const ParametricMultifunction& H, Direction dir, ParamKind kind,
                                    const Point& xbar, const Point& pbar, const Point& ybar, double L,
                                    const NbhdConfig& cfg) {
  cfg.validate();
  detail::require_positive(L);
  detail::require_param_base(H, xbar, pbar, ybar, cfg.cover(H.meta.h_y));
  const Property prop = param_property(kind);
  const Point& center = dir == Direction::x_unif_p ? xbar : pbar;
  CheckReport rep{std::string(param_kind_name(kind)) + "_" + direction_name(dir), true, L, nullptr, cfg.to_json(), {}};
  detail::Counters ctr;
  detail::each_slice(H, dir, xbar, pbar, cfg, [&](const auto& v, const Point& frozen, double r_dom) {
    auto r = detail::run_check(v, prop, center, ybar, L, r_dom, cfg.r_V, cfg, ctr);
    if (!r.holds) {
      rep.holds = false;
      rep.witness = r.witness;
      rep.witness[dir == Direction::x_unif_p ? "p" : "x_frozen"] = to_json(frozen);
      return false;
    }
    return true;
  });
  if (ctr.empty_excess > 0)
    rep.notes.push_back("e(empty, B) = 0 convention used " + std::to_string(ctr.empty_excess) + " times");
  return rep;
}

// Supremum over slices of the slice estimates (ratio kinds), or the infimum
// of the slice rates (open).
inline ModulusEstimate estimate_parametric(const ParametricMultifunction& H, Direction dir, ParamKind kind,
                                           const Point& xbar, const Point& pbar, const Point& ybar,
                                           const NbhdConfig& cfg) {
  cfg.validate();
  detail::require_param_base(H, xbar, pbar, ybar, cfg.cover(H.meta.h_y));
  const Property prop = param_property(kind);
  const Point& center = dir == Direction::x_unif_p ? xbar : pbar;
  ModulusEstimate out;
  out.kind = std::string(param_kind_name(kind)) + "_" + direction_name(dir);
  bool first = true;
  detail::each_slice(H, dir, xbar, pbar, cfg, [&](const auto& v, const Point& frozen, double r_dom) {
    ModulusEstimate e = is_rate(prop) ? detail::run_rate_estimate(v, prop, center, ybar, r_dom, cfg.r_V, cfg)
                                      : detail::run_ratio_estimate(v, prop, center, ybar, r_dom, cfg.r_V, cfg);
    bool better = first || (is_rate(prop) ? e.value < out.value : e.value > out.value);
    if (better && !e.empty_sample) {
      out.value = e.value;
      out.witness = e.witness;
      out.witness[dir == Direction::x_unif_p ? "p" : "x_frozen"] = to_json(frozen);
      out.capped = e.capped;
      first = false;
    }
    return !(!is_rate(prop) && out.value.is_inf());
  });
  out.empty_sample = first;
  if (first) out.value = is_rate(prop) ? ExtReal::infinity() : ExtReal(0.0);
  out.h_x = dir == Direction::x_unif_p ? H.meta.h_x : H.meta.h_p;
  out.h_y = H.meta.h_y;
  return out;
}

}  // namespace mfreg
