#include <gtest/gtest.h>

#include <random>

#include "mfreg/implicit.hpp"
#include "support/affine.hpp"

using namespace mfreg;

namespace {

ParametricMultifunction sample_h(const ParamOracle& f, double h, double xr = 1, double pr = 0.5, double w = 4,
                                 Dependence dep = Dependence::both) {
  return sample_parametric(f, grid_1d(-xr, xr, h), grid_1d(-pr, pr, h), Window::box(1, -w, w), h, dep);
}

FiniteMultifunction sample_f(const ImageOracle& f, double h, double r = 1, double w = 4) {
  return sample_multifunction(f, grid_1d(-r, r, h), Window::box(1, -w, w), h);
}

SetDescription e1(const Point& x, const Point& p) {
  if (std::abs(x[0]) >= std::abs(p[0])) return SetDescription::singleton({0});
  return SetDescription::singleton({std::sqrt(std::abs(p[0]))});
}

SetDescription remark_h(const Point& x, const Point& p) {
  if (x[0] == 0) return SetDescription::singleton({std::abs(p[0])});
  if (p[0] == 0) return SetDescription::singleton({0});
  return SetDescription::singleton({std::abs(x[0]) / std::abs(p[0])});
}

}  // namespace

TEST(SolveImplicit, CorpusE1) {
  auto H = sample_h(e1, 0.05);
  auto S = solve_implicit(H, 0.05 / 4);
  for (size_t ip = 0; ip < S.size(); ++ip) {
    std::vector<Point> expect;
    for (const auto& x : H.x_grid)
      if (std::abs(x[0]) >= std::abs(S.domain[ip][0])) expect.push_back(x);
    EXPECT_EQ(S.images[ip], FiniteSet(expect)) << S.domain[ip][0];
  }
}

TEST(SolveImplicit, ShiftSolvesToIdentity) {
  auto H = sample_h([](const Point& x, const Point& p) { return SetDescription::singleton({x[0] - p[0]}); }, 0.1);
  auto S = solve_implicit(H, 0.1 / 4);
  for (size_t ip = 0; ip < S.size(); ++ip) EXPECT_EQ(S.images[ip], FiniteSet{S.domain[ip]});
}

TEST(SolveImplicit, ToleranceRule) {
  const double h = 0.1;
  auto H = sample_h([h](const Point&, const Point&) { return SetDescription::singleton({0.4 * h}); }, h);
  EXPECT_EQ(solve_implicit(H, 0.5 * h).image_at({0.0}).size(), H.nx());
  EXPECT_TRUE(solve_implicit(H, 0.3 * h).image_at({0.0}).empty());
  EXPECT_THROW(solve_implicit(H, -1), std::invalid_argument);
}

TEST(SolveImplicit, InverseConsistency) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> k(-3, 3);
  auto H = sample_h([&](const Point&, const Point&) { return SetDescription::singleton({k(rng) * 0.25}); }, 0.25);
  auto S = solve_implicit(H, 0.01);
  auto Sinv = invert(S, false);
  for (const auto& p : S.domain)
    for (const auto& x : H.x_grid) EXPECT_EQ(S.in_graph(p, x), Sinv.in_graph(x, p));
}

TEST(SolveImplicit, SumWithoutMaterializingAgrees) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> k(-4, 4);
  for (int rep = 0; rep < 5; ++rep) {
    auto F = sample_h(
        [&](const Point&, const Point&) {
          return SetDescription::list({{k(rng) * 0.25}, {k(rng) * 0.25}});
        },
        0.25, 1, 0.5, 2);
    auto G = sample_f([&](const Point&) { return SetDescription::singleton({k(rng) * 0.25}); }, 0.25, 1, 2);
    auto a = solve_sum(F, G, 0.01);
    auto b = solve_implicit(param_sum(F, G), 0.01);
    EXPECT_EQ(a.images, b.images);
  }
}

TEST(SolveImplicit, TransposeIsAnInvolution) {
  auto H = sample_h(e1, 0.1);
  auto T = transpose_param(H);
  EXPECT_EQ(T.x_grid, H.p_grid);
  for (size_t ix = 0; ix < H.nx(); ++ix)
    for (size_t ip = 0; ip < H.np(); ++ip) EXPECT_EQ(T.image(ip, ix), H.image(ix, ip));
  auto TT = transpose_param(T);
  EXPECT_EQ(TT.index, H.index);
}

TEST(ThmMain, ShiftDirectionIiIsTight) {
  auto H = sample_h([](const Point& x, const Point& p) { return SetDescription::singleton({x[0] - p[0]}); }, 0.02,
                    0.5, 0.5);
  auto r = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::ii);
  EXPECT_TRUE(r.details["first_part"]["inequality_holds"].get<bool>());
  EXPECT_NEAR(r.details["first_part"]["measured_ratio"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(r.premises_hold);
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_NEAR(r.bound_claimed.value(), 1.0, 1e-9);
  EXPECT_NEAR(r.bound_measured.value(), 1.0, 1e-9);
  EXPECT_TRUE(r.implication_ok());
}

TEST(ThmMain, CorpusE1DirectionI) {
  auto H = sample_h(e1, 0.01, 0.5, 0.5);
  TheoremConfig cfg;
  auto r = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::i, cfg);
  EXPECT_TRUE(r.premise_checks[0].holds);   // pseudo-openness of H(., 0)
  EXPECT_TRUE(r.details["first_part"]["inequality_holds"].get<bool>());
  EXPECT_FALSE(r.premise_checks[1].holds);  // not calm in p uniformly in x
  EXPECT_FALSE(r.premises_hold);
  EXPECT_FALSE(r.conclusion_check.has_value());
  EXPECT_DOUBLE_EQ(r.tau_zero, 0.01 / 4);
  cfg.falsification = true;
  auto f = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::i, cfg);
  ASSERT_TRUE(f.conclusion_check.has_value());
  EXPECT_TRUE(f.conclusion_holds);  // S(p) lies inside S(0)
}

TEST(ThmMain, CorpusE1DirectionIiFirstPart) {
  auto H = sample_h(e1, 0.01, 0.5, 0.5);
  auto r = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::ii);
  EXPECT_TRUE(r.premise_checks[0].holds);
  EXPECT_TRUE(r.details["first_part"]["inequality_holds"].get<bool>());
  EXPECT_FALSE(r.premise_checks[1].holds);  // not calm in x uniformly in p
}

TEST(MCondition, RemarkExample) {
  auto H = sample_h(remark_h, 0.01, 0.5, 0.5);
  auto S = solve_implicit(H, 0.01 / 4);
  EXPECT_EQ(S.image_at({0.0}).size(), H.nx());
  EXPECT_TRUE(S.image_at({0.1}).empty());
  auto main = verify_thm_main(H, {0.0}, {0.0}, 1, MainDirection::ii);
  EXPECT_FALSE(main.premise_checks[1].holds);  // the theorem itself does not apply
  EXPECT_NEAR(main.details["first_part"]["measured_ratio"].get<double>(), 1.0, 1e-12);
  auto r = check_M_condition(H, {0.0}, {0.0}, 1, 1, MainDirection::ii);
  EXPECT_TRUE(r.premises_hold) << r.to_json().dump();
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_TRUE(r.bound_holds);
}

TEST(MCondition, ZeroOnlyAtBaseParameterPassesEveryM) {
  auto H = sample_h(
      [](const Point& x, const Point& p) { return SetDescription::singleton({std::abs(x[0]) + std::abs(p[0])}); },
      0.02, 0.5, 0.5);
  for (double M : {0.1, 1.0, 100.0}) {
    auto r = check_M_condition(H, {0.0}, {0.0}, 1, M, MainDirection::i);
    EXPECT_TRUE(r.premises_hold) << M;
    EXPECT_TRUE(r.implication_ok());
  }
}

TEST(MCondition, CorpusE1) {
  auto H = sample_h(e1, 0.01, 0.5, 0.5);
  // H(x, 0) = {0}: the gap region is empty and the condition holds vacuously
  EXPECT_TRUE(check_M_condition(H, {0.0}, {0.0}, 1, 50, MainDirection::i).premises_hold);
  auto r = check_M_condition(H, {0.0}, {0.0}, 1, 50, MainDirection::ii);
  ASSERT_EQ(r.premise_checks.size(), 2u);
  EXPECT_FALSE(r.premise_checks[1].holds);
  const auto& w = r.premise_checks[1].witness;
  double x = w["x"][0].get<double>(), p = w["p"][0].get<double>();
  EXPECT_GE(std::abs(x), std::abs(p));  // 0 in H(x, p)
  EXPECT_LT(std::abs(x), 50 * std::sqrt(std::abs(p)));
}

TEST(DifferenceOpenness, DoubleMinusIdentity) {
  const double h = 0.01;
  auto F1 = sample_multifunction([](const Point& x) { return SetDescription::singleton({2 * x[0]}); },
                                 grid_1d(-1, 1, h), Window::box(1, -2, 2), 2 * h);
  auto F2 = sample_f([](const Point& y) { return SetDescription::singleton({y[0]}); }, h, 1, 1);
  auto D = difference_map(F1, F2);
  for (size_t i = 0; i < D.size(); ++i) EXPECT_EQ(D.images[i], FiniteSet{D.domain[i]});
  auto r = verify_difference_openness(F1, F2, {0.0}, {0.0}, {0.0}, 1.9, 0.9);
  EXPECT_TRUE(r.premises_hold) << r.to_json().dump();
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_NEAR(r.bound_claimed.value(), 1.9 - 1 / 0.9, 1e-12);
  EXPECT_GE(r.bound_measured.value(), 0.99);
  EXPECT_TRUE(r.implication_ok());
}

TEST(DifferenceOpenness, ConstantInverse) {
  const double h = 0.02;
  auto F1 = sample_f([](const Point& x) { return SetDescription::singleton({x[0]}); }, h, 1, 1);
  auto F2 = sample_f(
      [](const Point& y) { return y[0] == 0 ? SetDescription::interval(-1, 1) : SetDescription::nothing(); }, h, 1,
      1);
  auto r = verify_difference_openness(F1, F2, {0.0}, {0.0}, {0.0}, 0.9, 100);
  EXPECT_TRUE(r.premises_hold) << r.to_json().dump();
  EXPECT_TRUE(r.conclusion_holds);
}

TEST(DifferenceOpenness, PremiseGate) {
  auto F = sample_f([](const Point& x) { return SetDescription::singleton({x[0]}); }, 0.05, 1, 1);
  auto r = verify_difference_openness(F, F, {0.0}, {0.0}, {0.0}, 1, 1);
  EXPECT_FALSE(r.premises_hold);
  EXPECT_FALSE(r.conclusion_check.has_value());
  EXPECT_EQ(r.premise_checks.size(), 1u);
}

TEST(Fixp, ParameterEqualsIdentity) {
  auto Phi = sample_h([](const Point&, const Point& p) { return SetDescription::singleton({p[0]}); }, 0.02, 0.5,
                      0.5, 2, Dependence::p_only);
  auto Psi = sample_f([](const Point& x) { return SetDescription::singleton({x[0]}); }, 0.02, 0.5, 2);
  auto r = verify_fixp(Phi, Psi, {0.0}, {0.0}, {0.0}, 0, 1);
  EXPECT_TRUE(r.premises_hold) << r.to_json().dump();
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_NEAR(r.bound_claimed.value(), 1.0, 1e-12);
  EXPECT_NEAR(r.bound_measured.value(), 1.0, 1e-9);
}

TEST(Fixp, HalfContractionIsTight) {
  auto Phi = sample_h([](const Point& x, const Point& p) { return SetDescription::singleton({x[0] / 2 + p[0]}); },
                      0.02, 1, 0.5, 2);
  auto Psi = sample_f([](const Point& x) { return SetDescription::singleton({x[0]}); }, 0.02, 1, 2);
  auto r = verify_fixp(Phi, Psi, {0.0}, {0.0}, {0.0}, 0.5, 1);
  EXPECT_TRUE(r.premises_hold) << r.to_json().dump();
  EXPECT_TRUE(r.conclusion_holds);
  EXPECT_NEAR(r.bound_claimed.value(), 2.0, 1e-12);
  EXPECT_NEAR(r.bound_measured.value(), 2.0, 1e-9);
}

TEST(Fixp, PremiseGate) {
  auto Phi = sample_h([](const Point& x, const Point&) { return SetDescription::singleton({x[0]}); }, 0.1, 1, 0.5,
                      2);
  auto Psi = sample_f([](const Point& x) { return SetDescription::singleton({x[0]}); }, 0.1, 1, 2);
  auto r = verify_fixp(Phi, Psi, {0.0}, {0.0}, {0.0}, 1, 1);
  EXPECT_FALSE(r.premises_hold);
  EXPECT_FALSE(r.conclusion_check.has_value());
}

TEST(Fixp, RandomAffineTight) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 6; ++rep) {
    auto inst = testsupport::random_fixp_instance(rng);
    TheoremConfig cfg;
    cfg.nb.targets = TargetMode::graph_only;
    cfg.tau = 0;
    auto r = verify_fixp(inst.F, inst.G, {0.0}, {0.0}, {0.0}, std::abs(inst.a), 1 / std::abs(inst.c), cfg);
    EXPECT_TRUE(r.premises_hold) << inst.a << " " << inst.b << " " << inst.c << " " << r.to_json().dump();
    EXPECT_TRUE(r.conclusion_holds);
    EXPECT_NEAR(r.bound_claimed.value(), 1 / (std::abs(inst.c) - std::abs(inst.a)), 1e-12);
    EXPECT_NEAR(r.bound_measured.value(), r.bound_claimed.value(), 1e-9);
  }
}

TEST(VariationalSystem, ParameterMinusState) {
  auto F = sample_h([](const Point&, const Point& p) { return SetDescription::singleton({p[0]}); }, 0.02, 0.5, 0.5,
                    2, Dependence::p_only);
  auto G = sample_f([](const Point& x) { return SetDescription::singleton({-x[0]}); }, 0.02, 0.5, 2);
  auto m = verify_variational_system(F, G, {0.0}, {0.0}, {0.0}, VariationalMode::msubreg_sol);
  EXPECT_TRUE(m.premises_hold) << m.to_json().dump();
  EXPECT_TRUE(m.conclusion_holds);
  EXPECT_NEAR(m.bound_claimed.value(), 1.0, 1e-12);
  EXPECT_NEAR(m.bound_measured.value(), 1.0, 1e-9);
  auto c = verify_variational_system(F, G, {0.0}, {0.0}, {0.0}, VariationalMode::clm_sol);
  EXPECT_TRUE(c.premises_hold) << c.to_json().dump();
  EXPECT_TRUE(c.conclusion_holds);
  EXPECT_NEAR(c.bound_claimed.value(), 1.0, 1e-12);
  EXPECT_NEAR(c.bound_measured.value(), 1.0, 1e-9);
}

TEST(VariationalSystem, RandomAffineSubregBoundIsTight) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 6; ++rep) {
    auto inst = testsupport::random_variational_instance(rng);
    TheoremConfig cfg;
    cfg.nb.targets = TargetMode::graph_only;
    cfg.tau = 0;
    auto r = verify_variational_system(inst.F, inst.G, {0.0}, {0.0}, {0.0}, VariationalMode::msubreg_sol, cfg);
    double expect = (std::abs(inst.a) + std::abs(inst.c)) / std::abs(inst.b);
    EXPECT_TRUE(r.premises_hold) << r.to_json().dump();
    EXPECT_TRUE(r.conclusion_holds);
    EXPECT_NEAR(r.bound_claimed.value(), expect, 1e-9);
    EXPECT_NEAR(r.bound_measured.value(), expect, 1e-9);
  }
}

TEST(VariationalSystem, BaseMembershipChecked) {
  auto F = sample_h([](const Point&, const Point& p) { return SetDescription::singleton({p[0]}); }, 0.1, 0.5, 0.5);
  auto G = sample_f([](const Point& x) { return SetDescription::singleton({1 - x[0]}); }, 0.1, 0.5);
  EXPECT_THROW(verify_variational_system(F, G, {0.0}, {0.0}, {0.0}, VariationalMode::msubreg_sol),
               std::invalid_argument);
}
