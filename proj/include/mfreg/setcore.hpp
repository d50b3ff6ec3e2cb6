#pragma once

// Metric primitives and sampled multifunctions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfreg {

using Point = std::vector<double>;

enum class Norm { max, sum, euclid };

inline const char* norm_name(Norm n) {
  switch (n) {
    case Norm::max: return "max";
    case Norm::sum: return "sum";
    case Norm::euclid: return "euclid";
  }
  return "max";
}

inline Norm parse_norm(const std::string& s) {
  if (s == "max") return Norm::max;
  if (s == "sum") return Norm::sum;
  if (s == "euclid") return Norm::euclid;
  throw std::invalid_argument("unknown norm '" + s + "'");
}

// Coordinates are rounded to a 1e-12 lattice so that grid nodes produced by
// different arithmetic paths compare equal.
inline double snap(double v) {
  if (!std::isfinite(v)) return v;
  double r = std::nearbyint(v * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

inline Point snap(Point p) {
  for (auto& v : p) v = snap(v);
  return p;
}

// Nonnegative real or +inf, with saturating arithmetic.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(double v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v) || v < 0) throw std::invalid_argument("ExtReal must be nonnegative");
    if (std::isinf(v)) {
      inf_ = true;
    } else {
      v_ = v;
    }
  }
  static ExtReal infinity() {
    ExtReal r;
    r.inf_ = true;
    return r;
  }

  bool is_inf() const { return inf_; }
  double value() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.inf_ || b.inf_) return infinity();
    return ExtReal(a.v_ + b.v_);
  }
  // 0 * inf = 0.
  friend ExtReal operator*(double s, ExtReal a) {
    if (s < 0 || std::isnan(s)) throw std::invalid_argument("negative scale");
    if (s == 0) return ExtReal(0.0);
    if (a.inf_ || std::isinf(s)) return infinity();
    return ExtReal(s * a.v_);
  }
  friend bool operator==(ExtReal a, ExtReal b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
  }
  friend bool operator<(ExtReal a, ExtReal b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator>(ExtReal a, ExtReal b) { return b < a; }
  friend bool operator<=(ExtReal a, ExtReal b) { return !(b < a); }
  friend bool operator>=(ExtReal a, ExtReal b) { return !(a < b); }

 private:
  double v_ = 0.0;
  bool inf_ = false;
};

inline ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }
inline ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }

inline void require_same_dim(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
}

inline double norm(const Point& v, Norm n) {
  double r = 0;
  switch (n) {
    case Norm::max:
      for (double c : v) r = std::max(r, std::abs(c));
      return r;
    case Norm::sum:
      for (double c : v) r += std::abs(c);
      return r;
    case Norm::euclid:
      for (double c : v) r += c * c;
      return std::sqrt(r);
  }
  return r;
}

inline double dist(const Point& a, const Point& b, Norm n) {
  require_same_dim(a, b);
  double r = 0;
  switch (n) {
    case Norm::max:
      for (size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
      return r;
    case Norm::sum:
      for (size_t i = 0; i < a.size(); ++i) r += std::abs(a[i] - b[i]);
      return r;
    case Norm::euclid:
      for (size_t i = 0; i < a.size(); ++i) r += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(r);
  }
  return r;
}

inline Point add(const Point& a, const Point& b) {
  require_same_dim(a, b);
  Point r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Point sub(const Point& a, const Point& b) {
  require_same_dim(a, b);
  Point r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Point negate(Point a) {
  for (auto& v : a) v = v == 0.0 ? 0.0 : -v;
  return a;
}

inline Point concat(const Point& a, const Point& b) {
  Point r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

// Finite point set, kept sorted and free of duplicates.
class FiniteSet {
 public:
  FiniteSet() = default;
  explicit FiniteSet(std::vector<Point> pts) : pts_(std::move(pts)) { normalize(); }
  FiniteSet(std::initializer_list<Point> pts) : pts_(pts) { normalize(); }

  bool empty() const { return pts_.empty(); }
  size_t size() const { return pts_.size(); }
  size_t dim() const { return pts_.empty() ? 0 : pts_.front().size(); }
  const std::vector<Point>& points() const { return pts_; }
  const Point& operator[](size_t i) const { return pts_[i]; }
  auto begin() const { return pts_.begin(); }
  auto end() const { return pts_.end(); }

  bool contains(const Point& p) const { return std::binary_search(pts_.begin(), pts_.end(), p); }

  bool operator==(const FiniteSet& o) const { return pts_ == o.pts_; }

 private:
  void normalize() {
    for (size_t i = 1; i < pts_.size(); ++i) require_same_dim(pts_[0], pts_[i]);
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
  }
  std::vector<Point> pts_;
};

namespace detail {
// Points are sorted lexicographically, so the first coordinate is sorted and
// every norm dominates |difference of first coordinates|.
inline size_t first_at_least(const std::vector<Point>& pts, double v) {
  auto it = std::lower_bound(pts.begin(), pts.end(), v,
                             [](const Point& p, double val) { return p[0] < val; });
  return static_cast<size_t>(it - pts.begin());
}
}  // namespace detail

inline double dist_point_set_raw(const Point& x, const FiniteSet& A, Norm n) {
  if (A.empty()) return std::numeric_limits<double>::infinity();
  require_same_dim(x, A[0]);
  const auto& pts = A.points();
  if (x.size() == 1) {
    size_t k = detail::first_at_least(pts, x[0]);
    double best = std::numeric_limits<double>::infinity();
    if (k < pts.size()) best = std::abs(pts[k][0] - x[0]);
    if (k > 0) best = std::min(best, std::abs(pts[k - 1][0] - x[0]));
    return best;
  }
  // Walk outward from the first-coordinate insertion point; stop once the
  // first-coordinate gap alone exceeds the best distance.
  size_t k = detail::first_at_least(pts, x[0]);
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = k; i < pts.size(); ++i) {
    if (pts[i][0] - x[0] > best) break;
    best = std::min(best, dist(x, pts[i], n));
  }
  for (size_t i = k; i-- > 0;) {
    if (x[0] - pts[i][0] > best) break;
    best = std::min(best, dist(x, pts[i], n));
  }
  return best;
}

inline ExtReal dist_point_set(const Point& x, const FiniteSet& A, Norm n) {
  return ExtReal(dist_point_set_raw(x, A, n));
}

// sup_{a in A} d(a,B); 0 for empty A, +inf for nonempty A and empty B.
inline ExtReal excess(const FiniteSet& A, const FiniteSet& B, Norm n) {
  if (A.empty()) return ExtReal(0.0);
  if (B.empty()) return ExtReal::infinity();
  require_same_dim(A[0], B[0]);
  double r = 0;
  for (const auto& a : A) r = std::max(r, dist_point_set_raw(a, B, n));
  return ExtReal(r);
}

// min d(a,b) over a in A, b in B.
inline double set_gap(const FiniteSet& A, const FiniteSet& B, Norm n) {
  if (A.empty() || B.empty()) return std::numeric_limits<double>::infinity();
  const FiniteSet& small = A.size() <= B.size() ? A : B;
  const FiniteSet& big = A.size() <= B.size() ? B : A;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : small) best = std::min(best, dist_point_set_raw(a, big, n));
  return best;
}

struct Window {
  Point lo, hi;

  size_t dim() const { return lo.size(); }
  void validate() const {
    if (lo.size() != hi.size()) throw std::invalid_argument("window bounds differ in dimension");
    for (size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i])) throw std::invalid_argument("degenerate window (lo > hi)");
  }
  bool contains(const Point& p) const {
    if (p.size() != lo.size()) return false;
    for (size_t i = 0; i < p.size(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  static Window box(size_t dim, double lo, double hi) { return {Point(dim, lo), Point(dim, hi)}; }
};

inline Window bounding_box(const std::vector<Point>& pts) {
  if (pts.empty()) return {};
  Window w{pts[0], pts[0]};
  for (const auto& p : pts)
    for (size_t i = 0; i < p.size(); ++i) {
      w.lo[i] = std::min(w.lo[i], p[i]);
      w.hi[i] = std::max(w.hi[i], p[i]);
    }
  return w;
}

// Nodes k*h (k integer) along one axis inside [lo, hi].
inline std::vector<double> axis_nodes(double lo, double hi, double h) {
  if (!(h > 0)) throw std::invalid_argument("grid step must be positive");
  std::vector<double> out;
  if (!(lo <= hi)) return out;
  auto k0 = static_cast<long long>(std::ceil(lo / h - 1e-9));
  auto k1 = static_cast<long long>(std::floor(hi / h + 1e-9));
  for (long long k = k0; k <= k1; ++k) {
    double v = snap(static_cast<double>(k) * h);
    if (v >= lo - 1e-12 && v <= hi + 1e-12) out.push_back(v);
  }
  return out;
}

inline std::vector<Point> lattice_nodes(const Window& w, double h, size_t cap = 4000000) {
  w.validate();
  std::vector<std::vector<double>> axes;
  size_t count = 1;
  for (size_t i = 0; i < w.dim(); ++i) {
    axes.push_back(axis_nodes(w.lo[i], w.hi[i], h));
    count *= axes.back().size();
    if (count > cap) throw std::length_error("lattice too large");
  }
  std::vector<Point> out;
  if (w.dim() == 0 || count == 0) return out;
  out.reserve(count);
  std::vector<size_t> idx(w.dim(), 0);
  while (true) {
    Point p(w.dim());
    for (size_t i = 0; i < w.dim(); ++i) p[i] = axes[i][idx[i]];
    out.push_back(std::move(p));
    size_t ax = w.dim();
    while (ax-- > 0) {
      if (++idx[ax] < axes[ax].size()) break;
      idx[ax] = 0;
    }
    if (ax == static_cast<size_t>(-1)) break;
  }
  return out;
}

// 1-D grid of nodes k*h in [lo, hi], as points.
inline std::vector<Point> grid_1d(double lo, double hi, double h) {
  std::vector<Point> out;
  for (double v : axis_nodes(lo, hi, h)) out.push_back({v});
  return out;
}

inline std::vector<Point> merge_grids(std::vector<Point> a, const std::vector<Point>& b) {
  for (const auto& p : b) a.push_back(snap(p));
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

struct GridMeta {
  double h_x = 0;
  double h_y = 0;
  Window window;  // codomain truncation box
  Norm nx = Norm::max;
  Norm ny = Norm::max;
};

// Sampled relation: sorted domain grid, one finite image per node.
struct FiniteMultifunction {
  std::vector<Point> domain;
  std::vector<FiniteSet> images;
  GridMeta meta;

  size_t size() const { return domain.size(); }
  const Point& point(size_t i) const { return domain[i]; }
  const FiniteSet& image(size_t i) const { return images[i]; }

  std::optional<size_t> find(const Point& x) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), x);
    if (it == domain.end() || *it != x) return std::nullopt;
    return static_cast<size_t>(it - domain.begin());
  }

  const FiniteSet& image_at(const Point& x) const {
    static const FiniteSet kEmpty;
    auto i = find(x);
    return i ? images[*i] : kEmpty;
  }

  bool in_graph(const Point& x, const Point& y) const { return image_at(x).contains(y); }

  std::vector<std::pair<Point, Point>> graph() const {
    std::vector<std::pair<Point, Point>> g;
    for (size_t i = 0; i < domain.size(); ++i)
      for (const auto& y : images[i]) g.emplace_back(domain[i], y);
    return g;
  }

  size_t graph_size() const {
    size_t n = 0;
    for (const auto& s : images) n += s.size();
    return n;
  }
};

// Sorts the domain and merges repeated nodes.
inline FiniteMultifunction make_multifunction(std::vector<Point> domain, std::vector<FiniteSet> images,
                                              GridMeta meta) {
  if (domain.size() != images.size()) throw std::invalid_argument("domain and images differ in length");
  std::vector<size_t> order(domain.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return domain[a] < domain[b]; });
  FiniteMultifunction F;
  F.meta = std::move(meta);
  for (size_t k : order) {
    if (!F.domain.empty() && F.domain.back() == domain[k]) {
      std::vector<Point> u = F.images.back().points();
      u.insert(u.end(), images[k].begin(), images[k].end());
      F.images.back() = FiniteSet(std::move(u));
    } else {
      F.domain.push_back(domain[k]);
      F.images.push_back(images[k]);
    }
  }
  return F;
}

// Smallest positive gap between consecutive sorted 1-D nodes, 0 otherwise.
inline double infer_step(const std::vector<Point>& grid) {
  if (grid.empty() || grid[0].size() != 1) return 0;
  std::vector<double> v;
  for (const auto& p : grid) v.push_back(p[0]);
  std::sort(v.begin(), v.end());
  double h = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    double d = v[i] - v[i - 1];
    if (d > 0 && (h == 0 || d < h)) h = d;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Analytic image descriptions and their discretization.

struct Piece {
  enum class Kind { point, box, interval, list };
  Kind kind = Kind::point;
  Point lo, hi;  // point uses lo; box/interval use both
  bool lo_open = false, hi_open = false;
  std::vector<Point> pts;
};

struct SetDescription {
  std::vector<Piece> pieces;

  bool empty() const { return pieces.empty(); }

  static SetDescription nothing() { return {}; }
  static SetDescription singleton(Point p) {
    SetDescription d;
    d.pieces.push_back({Piece::Kind::point, std::move(p), {}, false, false, {}});
    return d;
  }
  static SetDescription box(Point lo, Point hi) {
    SetDescription d;
    d.pieces.push_back({Piece::Kind::box, std::move(lo), std::move(hi), false, false, {}});
    return d;
  }
  static SetDescription interval(double a, double b, bool a_open = false, bool b_open = false) {
    SetDescription d;
    d.pieces.push_back({Piece::Kind::interval, {a}, {b}, a_open, b_open, {}});
    return d;
  }
  static SetDescription list(std::vector<Point> pts) {
    SetDescription d;
    d.pieces.push_back({Piece::Kind::list, {}, {}, false, false, std::move(pts)});
    return d;
  }
  static SetDescription everything(size_t dim) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return box(Point(dim, -inf), Point(dim, inf));
  }

  SetDescription& operator|=(const SetDescription& o) {
    pieces.insert(pieces.end(), o.pieces.begin(), o.pieces.end());
    return *this;
  }
  friend SetDescription operator|(SetDescription a, const SetDescription& b) { return a |= b; }
};

using ImageOracle = std::function<SetDescription(const Point&)>;

namespace detail {

// Nodes of one closed/open interval axis clipped to [wlo, whi].
inline std::vector<double> interval_nodes(double a, double b, bool a_open, bool b_open, double wlo, double whi,
                                          double h) {
  std::vector<double> out;
  if (a > b || (a == b && (a_open || b_open))) return out;
  double lo = std::max(a, wlo), hi = std::min(b, whi);
  if (lo > hi) return out;
  bool a_in = std::isfinite(a) && a >= wlo;  // endpoint a lies in the window
  bool b_in = std::isfinite(b) && b <= whi;
  double cut_lo = lo, cut_hi = hi;  // lattice nodes kept inside [cut_lo, cut_hi]
  if (a_in && a_open) cut_lo = a + h;
  if (b_in && b_open) cut_hi = b - h;
  for (double v : axis_nodes(cut_lo, cut_hi, h)) out.push_back(v);
  if (a_in && !a_open) out.push_back(snap(a));
  if (b_in && !b_open) out.push_back(snap(b));
  if (a_in && a_open && a + h <= hi + 1e-12) out.push_back(snap(a + h));
  if (b_in && b_open && b - h >= lo - 1e-12) out.push_back(snap(b - h));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// Closed endpoints are always kept; an open endpoint a is replaced by a + h
// (b by b - h), with no node strictly between a and a + h.
inline FiniteSet discretize(const SetDescription& d, const Window& w, double h_y) {
  w.validate();
  if (!(h_y > 0)) throw std::invalid_argument("h_y must be positive");
  std::vector<Point> out;
  for (const auto& pc : d.pieces) {
    switch (pc.kind) {
      case Piece::Kind::point:
        if (w.contains(pc.lo)) out.push_back(snap(pc.lo));
        break;
      case Piece::Kind::list:
        for (const auto& p : pc.pts)
          if (w.contains(p)) out.push_back(snap(p));
        break;
      case Piece::Kind::interval: {
        if (w.dim() != 1) throw std::invalid_argument("interval pieces are one-dimensional");
        for (double v : detail::interval_nodes(pc.lo[0], pc.hi[0], pc.lo_open, pc.hi_open, w.lo[0], w.hi[0], h_y))
          out.push_back({v});
        break;
      }
      case Piece::Kind::box: {
        if (pc.lo.size() != w.dim() || pc.hi.size() != w.dim()) throw std::invalid_argument("dimension mismatch");
        std::vector<std::vector<double>> axes;
        bool any_empty = false;
        for (size_t i = 0; i < w.dim(); ++i) {
          axes.push_back(detail::interval_nodes(pc.lo[i], pc.hi[i], false, false, w.lo[i], w.hi[i], h_y));
          any_empty = any_empty || axes.back().empty();
        }
        if (any_empty) break;
        std::vector<size_t> idx(w.dim(), 0);
        while (true) {
          Point p(w.dim());
          for (size_t i = 0; i < w.dim(); ++i) p[i] = axes[i][idx[i]];
          out.push_back(std::move(p));
          size_t ax = w.dim();
          while (ax-- > 0) {
            if (++idx[ax] < axes[ax].size()) break;
            idx[ax] = 0;
          }
          if (ax == static_cast<size_t>(-1)) break;
        }
        break;
      }
    }
  }
  return FiniteSet(std::move(out));
}

inline FiniteMultifunction sample_multifunction(const ImageOracle& oracle, std::vector<Point> grid,
                                                const Window& window, double h_y, double h_x = 0,
                                                Norm nx = Norm::max, Norm ny = Norm::max) {
  if (!(h_y > 0)) throw std::invalid_argument("h_y must be positive");
  if (grid.empty()) throw std::invalid_argument("empty grid");
  window.validate();
  for (auto& g : grid) g = snap(g);
  std::vector<FiniteSet> images;
  images.reserve(grid.size());
  for (const auto& x : grid) images.push_back(discretize(oracle(x), window, h_y));
  GridMeta meta{h_x > 0 ? h_x : infer_step(grid), h_y, window, nx, ny};
  return make_multifunction(std::move(grid), std::move(images), std::move(meta));
}

// Transposed graph. The new domain is the set of graph values together with
// the codomain lattice nodes inside the window (skipped when that lattice is
// too large), so points with empty preimage stay visible.
inline FiniteMultifunction invert(const FiniteMultifunction& F, bool with_lattice = true) {
  std::vector<std::pair<Point, Point>> tg;
  for (size_t i = 0; i < F.size(); ++i)
    for (const auto& y : F.images[i]) tg.emplace_back(y, F.domain[i]);
  std::sort(tg.begin(), tg.end());
  std::vector<Point> dom;
  std::vector<FiniteSet> imgs;
  for (size_t k = 0; k < tg.size();) {
    size_t e = k;
    std::vector<Point> xs;
    while (e < tg.size() && tg[e].first == tg[k].first) xs.push_back(tg[e++].second);
    dom.push_back(tg[k].first);
    imgs.emplace_back(std::move(xs));
    k = e;
  }
  if (with_lattice && F.meta.h_y > 0 && F.meta.window.dim() > 0) {
    std::vector<Point> nodes;
    try {
      nodes = lattice_nodes(F.meta.window, F.meta.h_y, 200000);
    } catch (const std::length_error&) {
      nodes.clear();
    }
    for (auto& n : nodes) {
      if (!std::binary_search(dom.begin(), dom.end(), n)) {
        dom.push_back(std::move(n));
        imgs.emplace_back();
      }
    }
  }
  GridMeta meta{F.meta.h_y, F.meta.h_x, bounding_box(F.domain), F.meta.ny, F.meta.nx};
  return make_multifunction(std::move(dom), std::move(imgs), std::move(meta));
}

// Pointwise image transform, e.g. negation.
inline FiniteMultifunction map_images(const FiniteMultifunction& F, const std::function<Point(const Point&)>& f,
                                      Window window) {
  FiniteMultifunction G;
  G.domain = F.domain;
  G.meta = F.meta;
  G.meta.window = std::move(window);
  for (const auto& s : F.images) {
    std::vector<Point> v;
    for (const auto& y : s) v.push_back(snap(f(y)));
    G.images.emplace_back(std::move(v));
  }
  return G;
}

inline FiniteMultifunction negate_images(const FiniteMultifunction& F) {
  Window w{negate(F.meta.window.hi), negate(F.meta.window.lo)};
  return map_images(F, [](const Point& y) { return negate(y); }, w);
}

// ---------------------------------------------------------------------------
// Sampled H : X x P => Y. Images are pooled so that maps depending on one
// argument only do not store a copy per grid pair.

struct ParametricMeta {
  double h_x = 0, h_p = 0, h_y = 0;
  Window window;
  Norm nx = Norm::max, np = Norm::max, ny = Norm::max;
};

struct ParametricMultifunction {
  std::vector<Point> x_grid, p_grid;
  std::vector<FiniteSet> pool;
  std::vector<uint32_t> index;  // index[ix * p_grid.size() + ip] into pool
  ParametricMeta meta;

  size_t nx() const { return x_grid.size(); }
  size_t np() const { return p_grid.size(); }
  const FiniteSet& image(size_t ix, size_t ip) const { return pool[index[ix * p_grid.size() + ip]]; }

  std::optional<size_t> find_x(const Point& x) const { return find_in(x_grid, x); }
  std::optional<size_t> find_p(const Point& p) const { return find_in(p_grid, p); }

  // H_p as a map of x.
  FiniteMultifunction slice_p(size_t ip) const {
    FiniteMultifunction F;
    F.domain = x_grid;
    F.images.reserve(nx());
    for (size_t ix = 0; ix < nx(); ++ix) F.images.push_back(image(ix, ip));
    F.meta = {meta.h_x, meta.h_y, meta.window, meta.nx, meta.ny};
    return F;
  }
  // H_x as a map of p.
  FiniteMultifunction slice_x(size_t ix) const {
    FiniteMultifunction F;
    F.domain = p_grid;
    F.images.reserve(np());
    for (size_t ip = 0; ip < np(); ++ip) F.images.push_back(image(ix, ip));
    F.meta = {meta.h_p, meta.h_y, meta.window, meta.np, meta.ny};
    return F;
  }

 private:
  static std::optional<size_t> find_in(const std::vector<Point>& g, const Point& v) {
    auto it = std::lower_bound(g.begin(), g.end(), v);
    if (it == g.end() || *it != v) return std::nullopt;
    return static_cast<size_t>(it - g.begin());
  }
};

enum class Dependence { both, x_only, p_only };

using ParamOracle = std::function<SetDescription(const Point& x, const Point& p)>;

inline std::vector<Point> sorted_grid(std::vector<Point> g) {
  for (auto& p : g) p = snap(p);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline ParametricMultifunction sample_parametric(const ParamOracle& oracle, std::vector<Point> x_grid,
                                                 std::vector<Point> p_grid, const Window& window, double h_y,
                                                 Dependence dep = Dependence::both, Norm nx = Norm::max,
                                                 Norm np = Norm::max, Norm ny = Norm::max) {
  if (!(h_y > 0)) throw std::invalid_argument("h_y must be positive");
  if (x_grid.empty() || p_grid.empty()) throw std::invalid_argument("empty grid");
  window.validate();
  ParametricMultifunction H;
  H.x_grid = sorted_grid(std::move(x_grid));
  H.p_grid = sorted_grid(std::move(p_grid));
  H.meta = {infer_step(H.x_grid), infer_step(H.p_grid), h_y, window, nx, np, ny};
  const size_t NX = H.nx(), NP = H.np();
  H.index.resize(NX * NP);
  switch (dep) {
    case Dependence::both:
      H.pool.reserve(NX * NP);
      for (size_t ix = 0; ix < NX; ++ix)
        for (size_t ip = 0; ip < NP; ++ip) {
          H.index[ix * NP + ip] = static_cast<uint32_t>(H.pool.size());
          H.pool.push_back(discretize(oracle(H.x_grid[ix], H.p_grid[ip]), window, h_y));
        }
      break;
    case Dependence::x_only:
      for (size_t ix = 0; ix < NX; ++ix) {
        H.pool.push_back(discretize(oracle(H.x_grid[ix], H.p_grid[0]), window, h_y));
        for (size_t ip = 0; ip < NP; ++ip) H.index[ix * NP + ip] = static_cast<uint32_t>(ix);
      }
      break;
    case Dependence::p_only:
      for (size_t ip = 0; ip < NP; ++ip) H.pool.push_back(discretize(oracle(H.x_grid[0], H.p_grid[ip]), window, h_y));
      for (size_t ix = 0; ix < NX; ++ix)
        for (size_t ip = 0; ip < NP; ++ip) H.index[ix * NP + ip] = static_cast<uint32_t>(ip);
      break;
  }
  return H;
}

}  // namespace mfreg
