#pragma once

// JSON helpers shared by every report type.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfreg/setcore.hpp"

namespace mfreg {

using json = nlohmann::ordered_json;

// +inf is written as the string "inf"; JSON has no infinity literal.
inline json num(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  if (std::isnan(v)) return json("nan");
  return json(v);
}

inline json num(ExtReal v) { return num(v.value()); }

inline json to_json(const Point& p) {
  json a = json::array();
  for (double v : p) a.push_back(num(v));
  return a;
}

inline json to_json(const std::vector<double>& v, bool) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline json to_json(const FiniteSet& s) {
  json a = json::array();
  for (const auto& p : s) a.push_back(to_json(p));
  return a;
}

inline json to_json(const Window& w) { return {{"lo", to_json(w.lo)}, {"hi", to_json(w.hi)}}; }

inline double read_num(const json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw std::invalid_argument("expected a number, got string '" + s + "'");
  }
  if (!j.is_number()) throw std::invalid_argument("expected a number");
  return j.get<double>();
}

inline Point read_point(const json& j) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw std::invalid_argument("expected a point (array of numbers)");
  Point p;
  for (const auto& v : j) p.push_back(read_num(v));
  return p;
}

inline Window read_window(const json& j) {
  if (j.is_array()) {
    if (j.size() != 2) throw std::invalid_argument("window must be [lo, hi]");
    return {read_point(j[0]), read_point(j[1])};
  }
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
    throw std::invalid_argument("window must have lo and hi");
  Window w{read_point(j.at("lo")), read_point(j.at("hi"))};
  w.validate();
  return w;
}

inline json to_json(const FiniteMultifunction& F) {
  json dom = json::array(), imgs = json::array();
  for (size_t i = 0; i < F.size(); ++i) {
    dom.push_back(to_json(F.domain[i]));
    imgs.push_back(to_json(F.images[i]));
  }
  return {{"domain", dom},           {"images", imgs},  {"window", to_json(F.meta.window)},
          {"h_x", num(F.meta.h_x)},  {"h_y", num(F.meta.h_y)}, {"norm", norm_name(F.meta.ny)},
          {"norm_x", norm_name(F.meta.nx)}};
}

// Grid interchange format; throws std::invalid_argument on schema violations.
inline FiniteMultifunction multifunction_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("multifunction must be a JSON object");
  for (const char* key : {"domain", "images", "window", "h_y"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  const auto& dom = j.at("domain");
  const auto& imgs = j.at("images");
  if (!dom.is_array() || !imgs.is_array() || dom.size() != imgs.size())
    throw std::invalid_argument("domain and images must be arrays of equal length");
  if (dom.empty()) throw std::invalid_argument("empty domain");
  std::vector<Point> d;
  std::vector<FiniteSet> im;
  for (size_t i = 0; i < dom.size(); ++i) {
    d.push_back(snap(read_point(dom[i])));
    if (!imgs[i].is_array()) throw std::invalid_argument("each image must be an array of points");
    std::vector<Point> pts;
    for (const auto& y : imgs[i]) pts.push_back(snap(read_point(y)));
    im.emplace_back(std::move(pts));
  }
  for (const auto& p : d)
    if (p.size() != d[0].size()) throw std::invalid_argument("domain points differ in dimension");
  GridMeta meta;
  meta.window = read_window(j.at("window"));
  meta.h_y = read_num(j.at("h_y"));
  if (!(meta.h_y > 0)) throw std::invalid_argument("h_y must be positive");
  meta.h_x = j.contains("h_x") ? read_num(j.at("h_x")) : infer_step(d);
  if (j.contains("norm")) meta.ny = parse_norm(j.at("norm").get<std::string>());
  meta.nx = j.contains("norm_x") ? parse_norm(j.at("norm_x").get<std::string>()) : meta.ny;
  for (const auto& s : im)
    for (const auto& y : s) {
      if (y.size() != meta.window.dim()) throw std::invalid_argument("image point dimension differs from window");
      if (!meta.window.contains(y)) throw std::invalid_argument("image point outside window");
    }
  return make_multifunction(std::move(d), std::move(im), std::move(meta));
}

inline json to_json(const ParametricMultifunction& H) {
  json xs = json::array(), ps = json::array(), rows = json::array();
  for (const auto& x : H.x_grid) xs.push_back(to_json(x));
  for (const auto& p : H.p_grid) ps.push_back(to_json(p));
  for (size_t ix = 0; ix < H.nx(); ++ix) {
    json row = json::array();
    for (size_t ip = 0; ip < H.np(); ++ip) row.push_back(to_json(H.image(ix, ip)));
    rows.push_back(std::move(row));
  }
  return {{"x_grid", xs}, {"p_grid", ps}, {"images", rows}, {"window", to_json(H.meta.window)},
          {"h_y", num(H.meta.h_y)}, {"norm", norm_name(H.meta.ny)}};
}

inline ParametricMultifunction parametric_from_json(const json& j) {
  for (const char* key : {"x_grid", "p_grid", "images", "window", "h_y"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  std::vector<Point> xs, ps;
  for (const auto& v : j.at("x_grid")) xs.push_back(snap(read_point(v)));
  for (const auto& v : j.at("p_grid")) ps.push_back(snap(read_point(v)));
  if (xs.empty() || ps.empty()) throw std::invalid_argument("empty grid");
  const auto& imgs = j.at("images");
  if (!imgs.is_array() || imgs.size() != xs.size()) throw std::invalid_argument("images must have one row per x");
  std::vector<std::vector<FiniteSet>> rows(xs.size());
  for (size_t ix = 0; ix < xs.size(); ++ix) {
    if (!imgs[ix].is_array() || imgs[ix].size() != ps.size())
      throw std::invalid_argument("each images row must have one entry per p");
    for (const auto& s : imgs[ix]) {
      if (!s.is_array()) throw std::invalid_argument("each image must be an array of points");
      std::vector<Point> pts;
      for (const auto& y : s) pts.push_back(snap(read_point(y)));
      rows[ix].emplace_back(std::move(pts));
    }
  }
  Window w = read_window(j.at("window"));
  for (const auto& row : rows)
    for (const auto& s : row)
      for (const auto& y : s) {
        if (y.size() != w.dim()) throw std::invalid_argument("image point dimension differs from window");
        if (!w.contains(y)) throw std::invalid_argument("image point outside window");
      }
  double h_y = read_num(j.at("h_y"));
  if (!(h_y > 0)) throw std::invalid_argument("h_y must be positive");
  Norm ny = j.contains("norm") ? parse_norm(j.at("norm").get<std::string>()) : Norm::max;
  // Route through the sampler so grids are sorted consistently with images.
  std::vector<Point> xs0 = xs, ps0 = ps;
  auto lookup = [&](const Point& x, const Point& p) {
    size_t ix = static_cast<size_t>(std::find(xs0.begin(), xs0.end(), x) - xs0.begin());
    size_t ip = static_cast<size_t>(std::find(ps0.begin(), ps0.end(), p) - ps0.begin());
    return SetDescription::list(rows[ix][ip].points());
  };
  return sample_parametric(lookup, xs, ps, w, h_y, Dependence::both, ny, ny, ny);
}

}  // namespace mfreg
