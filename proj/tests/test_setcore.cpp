#include <gtest/gtest.h>

#include <random>

#include "mfreg/report.hpp"
#include "mfreg/setcore.hpp"

using namespace mfreg;

TEST(Distance, PointToFiniteSet) {
  EXPECT_EQ(dist_point_set({0.0}, FiniteSet{{1.0}, {2.0}}, Norm::max), ExtReal(1.0));
  EXPECT_TRUE(dist_point_set({0.3}, FiniteSet{}, Norm::max).is_inf());
  // additive metric on R x R
  EXPECT_EQ(dist_point_set({0.0, 0.0}, FiniteSet{{1.0, 1.0}}, Norm::sum), ExtReal(2.0));
  EXPECT_THROW(dist_point_set({0.0}, FiniteSet{{1.0, 1.0}}, Norm::max), std::invalid_argument);
}

TEST(Distance, NormsAgreeWithHandComputation) {
  Point a{1, -2, 2}, b{0, 0, 0};
  EXPECT_DOUBLE_EQ(dist(a, b, Norm::max), 2);
  EXPECT_DOUBLE_EQ(dist(a, b, Norm::sum), 5);
  EXPECT_DOUBLE_EQ(dist(a, b, Norm::euclid), 3);
}

TEST(Excess, Conventions) {
  EXPECT_EQ(excess(FiniteSet{{0.0}, {2.0}}, FiniteSet{{0.0}}, Norm::max), ExtReal(2.0));
  EXPECT_TRUE(excess(FiniteSet{{0.5}}, FiniteSet{}, Norm::max).is_inf());
  EXPECT_EQ(excess(FiniteSet{}, FiniteSet{}, Norm::max), ExtReal(0.0));
  EXPECT_EQ(excess(FiniteSet{{1.0}}, FiniteSet{{0.0}, {1.0}}, Norm::max), ExtReal(0.0));
}

TEST(ExtRealArith, Saturates) {
  auto inf = ExtReal::infinity();
  EXPECT_TRUE((inf + ExtReal(3.0)).is_inf());
  EXPECT_EQ(0.0 * inf, ExtReal(0.0));
  EXPECT_TRUE(ExtReal(1e308) < inf);
  EXPECT_FALSE(inf < inf);
  EXPECT_THROW(ExtReal(-1.0), std::invalid_argument);
}

TEST(Sampling, ClosedIntervalOnGrid) {
  auto F = sample_multifunction([](const Point&) { return SetDescription::interval(0, 1); }, {{0.0}},
                                Window::box(1, -2, 2), 0.5);
  EXPECT_EQ(F.images[0], (FiniteSet{{0.0}, {0.5}, {1.0}}));
}

TEST(Sampling, OpenEndpointStartsOneStepInside) {
  auto F = sample_multifunction([](const Point&) { return SetDescription::interval(0, 1, true, false); }, {{0.0}},
                                Window::box(1, -2, 2), 0.25);
  EXPECT_EQ(F.images[0], (FiniteSet{{0.25}, {0.5}, {0.75}, {1.0}}));
}

TEST(Sampling, UnboundedImageIsTruncatedByWindow) {
  auto F = sample_multifunction([](const Point&) { return SetDescription::everything(1); }, {{0.0}},
                                Window::box(1, -1, 1), 1.0);
  EXPECT_EQ(F.images[0], (FiniteSet{{-1.0}, {0.0}, {1.0}}));
}

TEST(Sampling, DegenerateWindowRejected) {
  Window w{{1.0}, {0.0}};
  EXPECT_THROW(sample_multifunction([](const Point&) { return SetDescription::singleton({0}); }, {{0.0}}, w, 0.1),
               std::invalid_argument);
}

TEST(Sampling, RefinementGivesSuperset) {
  auto oracle = [](const Point& x) { return SetDescription::interval(-std::abs(x[0]), 0.5); };
  auto grid = grid_1d(-1, 1, 0.25);
  auto A = sample_multifunction(oracle, grid, Window::box(1, -1, 1), 0.25);
  auto B = sample_multifunction(oracle, grid, Window::box(1, -1, 1), 0.125);
  for (size_t i = 0; i < A.size(); ++i)
    for (const auto& y : A.images[i]) EXPECT_TRUE(B.images[i].contains(y));
}

TEST(Invert, TransposesGraph) {
  auto F = make_multifunction({{0.0}}, {FiniteSet{{1.0}}}, GridMeta{1, 1, Window::box(1, 0, 1)});
  auto G = invert(F, false);
  ASSERT_EQ(G.graph().size(), 1u);
  EXPECT_EQ(G.graph()[0].first, Point{1.0});
  EXPECT_EQ(G.graph()[0].second, Point{0.0});
}

TEST(Invert, LinearMap) {
  auto F = sample_multifunction([](const Point& x) { return SetDescription::singleton({2 * x[0]}); },
                                {{-1.0}, {0.0}, {1.0}}, Window::box(1, -2, 2), 1.0);
  auto G = invert(F, false);
  ASSERT_EQ(G.size(), 3u);
  for (size_t i = 0; i < G.size(); ++i) EXPECT_EQ(G.images[i], FiniteSet{{G.domain[i][0] / 2}});
}

TEST(Invert, IsAnInvolutionOnGraphs) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> k(-8, 8);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Point> dom;
    std::vector<FiniteSet> imgs;
    for (int i = -5; i <= 5; ++i) {
      dom.push_back({i * 0.125});
      std::vector<Point> ys;
      int n = rep % 3 + (i & 1);
      for (int j = 0; j < n; ++j) ys.push_back({k(rng) * 0.125});
      imgs.emplace_back(ys);
    }
    auto F = make_multifunction(dom, imgs, GridMeta{0.125, 0.125, Window::box(1, -1, 1)});
    auto FF = invert(invert(F));
    auto g1 = F.graph(), g2 = FF.graph();
    std::sort(g1.begin(), g1.end());
    std::sort(g2.begin(), g2.end());
    EXPECT_EQ(g1, g2);
  }
}

TEST(Properties, DistanceZeroIffMemberAndTriangleTransfer) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Norm n : {Norm::max, Norm::sum, Norm::euclid}) {
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<Point> pts;
      for (int i = 0; i < 6; ++i) pts.push_back(snap(Point{u(rng), u(rng)}));
      FiniteSet A(pts);
      Point x = snap(Point{u(rng), u(rng)}), y = snap(Point{u(rng), u(rng)});
      EXPECT_GT(dist_point_set_raw(x, A, n), 0.0);
      EXPECT_EQ(dist_point_set_raw(A[0], A, n), 0.0);
      EXPECT_LE(dist_point_set_raw(x, A, n), dist(x, y, n) + dist_point_set_raw(y, A, n) + 1e-12);
      // brute force agrees with the pruned search
      double best = INFINITY;
      for (const auto& a : A) best = std::min(best, dist(x, a, n));
      EXPECT_DOUBLE_EQ(dist_point_set_raw(x, A, n), best);
      std::vector<Point> sub(pts.begin(), pts.begin() + 3);
      EXPECT_EQ(excess(FiniteSet(sub), A, n), ExtReal(0.0));
      EXPECT_GT(excess(FiniteSet{x}, FiniteSet(sub), n), ExtReal(0.0));
    }
  }
}

TEST(Parametric, SlicesShareImages) {
  auto H = sample_parametric([](const Point& x, const Point&) { return SetDescription::singleton({x[0]}); },
                             grid_1d(-1, 1, 0.5), grid_1d(-1, 1, 0.5), Window::box(1, -1, 1), 0.5,
                             Dependence::x_only);
  EXPECT_EQ(H.pool.size(), 5u);
  auto Hp = H.slice_p(2);
  auto Hx = H.slice_x(1);
  EXPECT_EQ(Hp.images[3], FiniteSet{{0.5}});
  for (const auto& s : Hx.images) EXPECT_EQ(s, FiniteSet{{-0.5}});
}

TEST(Json, RoundTripMultifunction) {
  auto F = sample_multifunction([](const Point& x) { return SetDescription::interval(0, std::abs(x[0])); },
                                grid_1d(-1, 1, 0.5), Window::box(1, -1, 1), 0.5);
  auto G = multifunction_from_json(to_json(F));
  EXPECT_EQ(G.domain, F.domain);
  EXPECT_EQ(G.images, F.images);
  EXPECT_EQ(G.meta.h_y, F.meta.h_y);
}

TEST(Json, SchemaViolationsThrow) {
  EXPECT_THROW(multifunction_from_json(json::parse(R"({"domain": [[0]]})")), std::invalid_argument);
  EXPECT_THROW(multifunction_from_json(json::parse(
                   R"({"domain": [[0]], "images": [[[5]]], "window": {"lo": [0], "hi": [1]}, "h_y": 0.1})")),
               std::invalid_argument);
}
