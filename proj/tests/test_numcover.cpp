#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "covfam/fixtures.hpp"
#include "covfam/nielsen.hpp"
#include "covfam/numcover.hpp"

using namespace covfam::numcover;
using covfam::permgrp::CycleType;
using covfam::permgrp::Perm;
using covfam::permgrp::cycle_type;
using covfam::exactalg::QRat;

static CPoly cpoly(std::vector<double> cs, int prec = kDefaultPrec) {
  std::vector<BigComplex> out;
  for (double x : cs) out.emplace_back(x, 0.0, prec);
  return CPoly(std::move(out));
}

static CPoly to_cpoly(const covfam::exactalg::QPoly& p, int prec) {
  std::vector<BigComplex> out;
  for (const auto& q : p.c) {
    BigFloat r(prec);
    mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
    out.emplace_back(std::move(r), BigFloat(prec));
  }
  return CPoly(std::move(out));
}

// degree-3 family: double zero, simple pinned zero at 0, double pole at 1,
// simple pole at infinity, double points over 1 +- sqrt(lambda)
static RamShape toy3_shape() {
  RamShape s;
  s.degree = 3;
  s.branches = {{BranchLoc::Zero, CycleType::parse("2^1.1^1"), {}, {}},
                {BranchLoc::Infinity, CycleType::parse("2^1.1^1"), {}, {}},
                {BranchLoc::OnePlusSqrtLambda, CycleType::parse("2^1.1^1"), {}, {}},
                {BranchLoc::OneMinusSqrtLambda, CycleType::parse("2^1.1^1"), {}, {}}};
  s.inf_mult = 1;
  s.traces = {{0, 1, QRat(0)}, {1, 2, QRat(1)}};
  return s;
}

// exact member of the toy family with double zero at a = 3: the critical
// points away from the prescribed fibers are the roots of x^2 + (a-3)x + a,
// and the scale c0 is fixed by requiring the two critical values to sum to 2
static CoverModel toy3_model(int prec = kDefaultPrec) {
  BigComplex a(3, prec);
  BigComplex i3(0.0, 1.0, prec);
  i3 = bc_scale(i3, bf_sqrt(BigFloat(3.0, prec)));
  BigComplex rp = i3, rm = -i3;  // roots of x^2 + 3

  CPoly N0 = cp_mul(cp_mul(cpoly({-3, 1}, prec), cpoly({-3, 1}, prec)), cpoly({0, 1}, prec));
  CPoly D = cp_mul(cpoly({-1, 1}, prec), cpoly({-1, 1}, prec));
  BigComplex wp = cp_eval(N0, rp) / cp_eval(D, rp);
  BigComplex wm = cp_eval(N0, rm) / cp_eval(D, rm);
  BigComplex c0 = BigComplex(2, prec) / (wp + wm);
  BigComplex vp = c0 * wp, vm = c0 * wm;
  BigComplex two_a = a + a;
  BigComplex sp = two_a + wp - rp - rp;  // remaining simple root over vp
  BigComplex sm = two_a + wm - rm - rm;

  CoverModel m;
  m.shape = toy3_shape();
  m.prec = prec;
  m.sqrt_lambda = vp - BigComplex(1, prec);
  m.lambda = m.sqrt_lambda * m.sqrt_lambda;
  m.c0 = c0;
  BigComplex one(1, prec);
  m.factors[{0, 2}] = CPoly({-a, one});
  m.factors[{0, 1}] = cpoly({0, 1}, prec);
  m.factors[{1, 2}] = cpoly({-1, 1}, prec);
  m.factors[{2, 2}] = CPoly({-rp, one});
  m.factors[{2, 1}] = CPoly({-sp, one});
  m.factors[{3, 2}] = CPoly({-rm, one});
  m.factors[{3, 1}] = CPoly({-sm, one});
  return m;
}

static BigFloat vec_dist(const std::vector<BigComplex>& a, const std::vector<BigComplex>& b) {
  BigFloat m(a[0].prec());
  for (std::size_t i = 0; i < a.size(); ++i) m = bf_max(m, bc_abs(a[i] - b[i]));
  return m;
}

TEST_CASE("generic newton on small systems") {
  const int prec = kDefaultPrec;
  BigFloat tol = bf_pow2(-300, prec);

  SUBCASE("square root of two") {
    auto f = [&](const std::vector<BigComplex>& x) {
      return std::vector<BigComplex>{x[0] * x[0] - BigComplex(2, prec)};
    };
    auto j = [&](const std::vector<BigComplex>& x) {
      return std::vector<std::vector<BigComplex>>{{x[0] + x[0]}};
    };
    auto r = newton_generic(f, j, {BigComplex(1.5, 0.0, prec)}, tol);
    CHECK(bc_abs(r[0] - BigComplex(bf_sqrt(BigFloat(2.0, prec)), BigFloat(prec))) <
          bf_pow2(-290, prec));
  }

  SUBCASE("two by two system") {
    auto f = [&](const std::vector<BigComplex>& x) {
      return std::vector<BigComplex>{x[0] + x[1] - BigComplex(3, prec),
                                     x[0] * x[1] - BigComplex(2, prec)};
    };
    auto j = [&](const std::vector<BigComplex>& x) {
      return std::vector<std::vector<BigComplex>>{{BigComplex(1, prec), BigComplex(1, prec)},
                                                  {x[1], x[0]}};
    };
    auto r = newton_generic(f, j, {BigComplex(2.5, 0.0, prec), BigComplex(0.9, 0.0, prec)}, tol);
    CHECK(bc_abs(r[0] - BigComplex(2, prec)) < bf_pow2(-290, prec));
    CHECK(bc_abs(r[1] - BigComplex(1, prec)) < bf_pow2(-290, prec));
  }

  SUBCASE("vanishing jacobian is reported") {
    auto f = [&](const std::vector<BigComplex>& x) {
      return std::vector<BigComplex>{x[0] * x[0] - BigComplex(2, prec)};
    };
    auto j = [&](const std::vector<BigComplex>& x) {
      return std::vector<std::vector<BigComplex>>{{x[0] + x[0]}};
    };
    CHECK_THROWS_AS(newton_generic(f, j, {BigComplex(prec)}, tol), SingularJacobian);
  }
}

TEST_CASE("simultaneous root finding") {
  const int prec = kDefaultPrec;

  SUBCASE("x^2 + 1") {
    auto r = roots_all(cpoly({1, 0, 1}));
    REQUIRE(r.size() == 2);
    BigFloat tol = bf_pow2(-290, prec);
    bool plus_first = r[0].im.sign() > 0;
    const BigComplex& zp = plus_first ? r[0] : r[1];
    const BigComplex& zm = plus_first ? r[1] : r[0];
    CHECK(bc_abs(zp - BigComplex(0.0, 1.0, prec)) < tol);
    CHECK(bc_abs(zm - BigComplex(0.0, -1.0, prec)) < tol);
  }

  SUBCASE("triple root cluster") {
    auto r = roots_all(cp_monic_from_roots(
        {BigComplex(1, prec), BigComplex(1, prec), BigComplex(1, prec)}, prec));
    REQUIRE(r.size() == 3);
    for (const auto& z : r) CHECK(bc_abs(z - BigComplex(1, prec)) < bf_pow2(-90, prec));
  }

  SUBCASE("degree twenty with separated roots") {
    std::vector<BigComplex> roots;
    BigFloat pi(prec);
    mpfr_const_pi(pi.raw(), MPFR_RNDN);
    for (int k = 0; k < 20; ++k) {
      BigFloat theta = pi * BigFloat(2.0 * k / 20.0 + 0.05, prec);
      BigFloat s(prec), c(prec);
      mpfr_sin_cos(s.raw(), c.raw(), theta.raw(), MPFR_RNDN);
      roots.emplace_back(BigFloat(2.0, prec) * c, BigFloat(2.0, prec) * s);
    }
    auto found = roots_all(cp_monic_from_roots(roots, prec), 99);
    REQUIRE(found.size() == 20);
    std::vector<bool> used(20, false);
    for (const auto& z : found) {
      int best = -1;
      for (int k = 0; k < 20; ++k)
        if (bc_abs(z - roots[k]) < bf_pow2(-200, prec)) best = k;
      REQUIRE(best >= 0);
      CHECK(!used[best]);
      used[best] = true;
    }
  }

  SUBCASE("constant input is rejected") {
    CHECK_THROWS_AS(roots_all(cpoly({5})), NoConvergence);
  }
}

TEST_CASE("shape validation and unknown-equation counts") {
  SUBCASE("the degree-63 family shape is square") {
    RamShape s = psl62_shape();
    s.validate();
    CHECK(s.degree == 63);
    CHECK(s.unknown_count() == 126);
    CHECK(s.equation_count() == 126);
  }

  SUBCASE("toy family is square") {
    RamShape s = toy3_shape();
    s.validate();
    CHECK(s.unknown_count() == 6);
    CHECK(s.equation_count() == 6);
  }

  SUBCASE("degree-2 count toy") {
    RamShape s;
    s.degree = 2;
    s.branches = {{BranchLoc::Zero, CycleType::parse("2^1"), {}, {}},
                  {BranchLoc::Infinity, CycleType::parse("2^1"), {}, {}},
                  {BranchLoc::Fixed, CycleType::parse("1^2"), QRat(1), QRat(0)}};
    s.inf_mult = 2;
    s.traces = {{0, 2, QRat(1)}, {2, 1, QRat(2)}};
    s.validate();
    CHECK(s.unknown_count() == 2);
    CHECK(s.equation_count() == 2);
  }

  SUBCASE("bad shapes throw") {
    RamShape s = toy3_shape();
    s.branches[1].loc = BranchLoc::Fixed;  // no infinity branch
    CHECK_THROWS_AS(s.validate(), ShapeInvalid);

    RamShape g;  // genus 1: four transposition branches on degree 2
    g.degree = 2;
    g.branches = {{BranchLoc::Zero, CycleType::parse("2^1"), {}, {}},
                  {BranchLoc::Infinity, CycleType::parse("2^1"), {}, {}},
                  {BranchLoc::OnePlusSqrtLambda, CycleType::parse("2^1"), {}, {}},
                  {BranchLoc::OneMinusSqrtLambda, CycleType::parse("2^1"), {}, {}}};
    g.inf_mult = 2;
    CHECK_THROWS_AS(g.validate(), ShapeInvalid);

    RamShape ns = toy3_shape();  // not square without the trace pins
    ns.traces.clear();
    CHECK_THROWS_AS(assemble_system(ns, BigComplex(2, kDefaultPrec)), ShapeInvalid);
  }
}

TEST_CASE("coefficient system: exact member, jacobian, newton recovery") {
  const int prec = kDefaultPrec;
  CoverModel m = toy3_model();
  PolySystem sys = assemble_system(m.shape, m.lambda, &m.sqrt_lambda);
  std::vector<BigComplex> x = pack_model(m);
  REQUIRE(static_cast<int>(x.size()) == 6);

  SUBCASE("the constructed member solves the system") {
    for (const auto& r : sys.residual(x)) CHECK(bc_abs(r) < bf_pow2(-300, prec));
  }

  SUBCASE("jacobian matches central finite differences") {
    auto jac = sys.jacobian(x);
    BigComplex h(bf_pow2(-60, prec), BigFloat(prec));
    for (std::size_t col = 0; col < x.size(); ++col) {
      auto xp = x, xm = x;
      xp[col] = xp[col] + h;
      xm[col] = xm[col] - h;
      auto fp = sys.residual(xp), fm = sys.residual(xm);
      for (std::size_t row = 0; row < fp.size(); ++row) {
        BigComplex fd = (fp[row] - fm[row]) / (h + h);
        CHECK(bc_abs(fd - jac[row][col]) < bf_pow2(-55, prec));
      }
    }
  }

  SUBCASE("newton recovers the member from a perturbed start") {
    auto x0 = x;
    for (std::size_t i = 0; i < x0.size(); ++i)
      x0[i] = x0[i] + BigComplex(1e-4, -1e-4, prec);
    auto sol = newton_solve(sys, x0);
    CHECK(vec_dist(sol, x) < bf_pow2(-250, prec));
    CoverModel back = unpack_model(sys, sol);
    CHECK(back.factors.size() == m.factors.size());
  }

  SUBCASE("pack and unpack round trip") {
    CoverModel back = unpack_model(sys, x);
    CHECK(vec_dist(pack_model(back), x) == BigFloat(prec));
  }

  SUBCASE("the member solves the system at lower precision too") {
    CoverModel lo = toy3_model(128);
    PolySystem ls = assemble_system(lo.shape, lo.lambda, &lo.sqrt_lambda);
    for (const auto& r : ls.residual(pack_model(lo))) CHECK(bc_abs(r) < bf_pow2(-96, 128));
  }
}

TEST_CASE("fiber tracking and numerical monodromy on power maps") {
  const int prec = kDefaultPrec;
  BigComplex t0(1, prec);

  SUBCASE("short path leaves the fiber alone") {
    PathPlan p;
    p.waypoints = {t0};
    auto f = track_fiber(cpoly({0, 0, 1}), cpoly({1}), p, {BigComplex(1, prec)});
    CHECK(bc_abs(f[0] - BigComplex(1, prec)) == BigFloat(prec));
  }

  SUBCASE("square map: loop around zero swaps the two sheets") {
    auto perms = monodromy_tuple(cpoly({0, 0, 1}), cpoly({1}), t0,
                                 {loop_around(BigComplex(prec), 0.5, t0, 16, prec),
                                  loop_around(BigComplex(3, prec), 0.5, t0, 16, prec)});
    REQUIRE(perms.size() == 2);
    CHECK(cycle_type(perms[0]).str() == "2^1");
    CHECK(perms[1].is_identity());
  }

  SUBCASE("cube map: loop around zero is a 3-cycle") {
    auto perms = monodromy_tuple(cpoly({0, 0, 0, 1}), cpoly({1}), t0,
                                 {loop_around(BigComplex(prec), 0.5, t0, 16, prec)});
    CHECK(cycle_type(perms[0]).str() == "3^1");
  }
}

TEST_CASE("numerical monodromy of the degree-24 map") {
  const int prec = 160;
  auto fx = covfam::fixtures::psi24();
  CPoly num = to_cpoly(fx.p, prec), den = to_cpoly(fx.q, prec);
  BigComplex t0(0.4, 0.3, prec);
  auto perms = monodromy_tuple(num, den, t0,
                               {loop_around(BigComplex(prec), 0.25, t0, 20, prec)});
  CHECK(cycle_type(perms[0]).str() == "4^2.3^5.1^1");
}

TEST_CASE("lambda continuation on the toy family") {
  const int prec = kDefaultPrec;
  CoverModel m = toy3_model();

  SUBCASE("empty path is the identity") {
    PathPlan p;
    CoverModel r = deform_lambda(m, p);
    CHECK(vec_dist(pack_model(r), pack_model(m)) == BigFloat(prec));
  }

  SUBCASE("there-and-back returns the same member") {
    PathPlan p;
    p.waypoints = {m.lambda + BigComplex(0.0, 0.2, prec), m.lambda};
    CoverModel r = deform_lambda(m, p);
    CHECK(bc_abs(r.lambda - m.lambda) < bf_pow2(16 - prec, prec));
    CHECK(vec_dist(pack_model(r), pack_model(m)) < bf_pow2(-200, prec));
  }

  SUBCASE("step size does not change the endpoint") {
    PathPlan fine, coarse;
    coarse.waypoints = {m.lambda + BigComplex(0.0, 0.3, prec)};
    fine.waypoints = coarse.waypoints;
    coarse.max_step = 0.1;
    fine.max_step = 0.025;
    CHECK(vec_dist(pack_model(deform_lambda(m, coarse)), pack_model(deform_lambda(m, fine))) <
          bf_pow2(-200, prec));
  }

  SUBCASE("a loop around lambda = 0 flips the square root branch") {
    // lambda = -1/3 for this member; keep the loop well away from lambda = 1
    PathPlan p = loop_around(BigComplex(prec), 0.2, m.lambda, 16, prec);
    CoverModel r = deform_lambda(m, p);
    CHECK(bc_abs(r.lambda - m.lambda) < bf_pow2(16 - prec, prec));
    CHECK(bc_abs(r.sqrt_lambda + m.sqrt_lambda) < bf_pow2(-200, prec));
    PolySystem sys = assemble_system(r.shape, r.lambda, &r.sqrt_lambda);
    for (const auto& res : sys.residual(pack_model(r)))
      CHECK(bc_abs(res) < bf_pow2(32 - prec, prec));
  }
}

TEST_CASE("intertwining bijections between two-generator actions") {
  Perm x = Perm::from_cycles(5, {{1, 2, 3, 4, 5}});
  Perm y = Perm::from_cycles(5, {{1, 2}});

  SUBCASE("identical actions give the identity") {
    Perm s = chi_bijection({x, y}, {x, y});
    CHECK(s.is_identity());
  }

  SUBCASE("conjugated actions recover the conjugator") {
    Perm h = Perm::from_cycles(5, {{1, 3}, {2, 5, 4}});
    Perm s = chi_bijection({x, y}, {covfam::permgrp::conjugate(x, h),
                                    covfam::permgrp::conjugate(y, h)});
    CHECK(s == h);
  }

  SUBCASE("inequivalent actions throw") {
    CHECK_THROWS_AS(chi_bijection({x, y}, {x, Perm::from_cycles(5, {{1, 2, 3}})}),
                    NotEquivalent);
  }

  SUBCASE("a nontrivial centralizer is detected") {
    Perm c = Perm::from_cycles(4, {{1, 2, 3, 4}});
    CHECK_THROWS_AS(chi_bijection({c, c}, {c, c}), NotUnique);
  }
}

TEST_CASE("steering through the family action") {
  using namespace covfam::nielsen;
  GroupCtx s3({Perm::from_cycles(3, {{1, 2}}), Perm::from_cycles(3, {{1, 2, 3}})});
  ClassVector cv;
  cv.degree = 3;
  cv.classes = std::vector<CycleType>(4, CycleType::parse("2^1.1^1"));
  cv.group_order = 6;
  OrbitTable o = braid_orbit(search_tuple(cv, s3, 13));
  const int n = static_cast<int>(o.straight_size());
  REQUIRE(n >= 2);

  SUBCASE("family must be attached first") {
    CHECK_THROWS_AS(steer_to_tuple(o, 0, 1), Unreachable);
  }

  Perm x = action_of_word(o, {{3, 1}});
  auto targets = std::array<CycleType, 3>{cycle_type(x), cycle_type(x),
                                          cycle_type(compose(inverse(x), inverse(x)))};
  auto fw = find_family_words(o, targets, 4);
  o.family = std::array<Perm, 3>{fw.x, fw.y, fw.z};

  SUBCASE("words found by steering reach their targets") {
    Perm xi = inverse(fw.x), yi = inverse(fw.y);
    for (int from = 0; from < n; ++from)
      for (int to = 0; to < n; ++to) {
        LoopWord w = steer_to_tuple(o, from, to);
        if (from == to) CHECK(w.empty());
        int cur = from;
        for (auto [g, sign] : w) {
          const Perm& step = g == 0 ? (sign > 0 ? fw.x : xi) : (sign > 0 ? fw.y : yi);
          cur = step[cur];
        }
        CHECK(cur == to);
      }
  }
}

TEST_CASE("numeric verification of a cover model") {
  const int prec = kDefaultPrec;
  CoverModel m = toy3_model();

  SUBCASE("residual and trace checks pass on the exact member") {
    NumericReport rep = verify_cover_numeric(m);
    CHECK(rep.passed);
    REQUIRE(rep.checks.size() == 2);
    for (const auto& [name, ok] : rep.checks) CHECK(ok);
  }

  SUBCASE("a perturbed member fails the residual check") {
    CoverModel bad = m;
    bad.c0 = bad.c0 + BigComplex(1e-6, 0.0, prec);
    CHECK_FALSE(verify_cover_numeric(bad).passed);
  }

  SUBCASE("monodromy agrees with an independently computed tuple") {
    // recompute the tuple with the same loop geometry the verifier uses
    PolySystem sys = assemble_system(m.shape, m.lambda, &m.sqrt_lambda);
    auto vals = sys.branch_values();
    BigComplex v2 = vals[2], v3 = vals[3];
    BigFloat spread = bf_max(BigFloat(1.0, prec), bf_max(bc_abs(v2), bc_abs(v3)));
    BigComplex t0 = BigComplex(0.31, 1.0, prec) * BigComplex(spread, BigFloat(prec));

    CPoly N0 = cp_mul(cp_mul(m.factors.at({0, 2}), m.factors.at({0, 2})), m.factors.at({0, 1}));
    CPoly D = cp_mul(m.factors.at({1, 2}), m.factors.at({1, 2}));
    CPoly num = cp_scale(N0, m.c0);

    auto radius_near = [&](const BigComplex& v, const BigComplex& o1, const BigComplex& o2) {
      BigFloat nd = bc_abs(v - o1);
      BigFloat d2 = bc_abs(v - o2);
      if (d2 < nd) nd = d2;
      return std::min(0.25 * nd.to_double(), 0.5);
    };
    std::vector<PathPlan> loops = {
        loop_around(vals[0], radius_near(vals[0], v2, v3), t0, 24, prec),
        loop_around(v2, radius_near(v2, vals[0], v3), t0, 24, prec),
        loop_around(v3, radius_near(v3, vals[0], v2), t0, 24, prec)};
    auto perms = monodromy_tuple(num, D, t0, loops);
    Perm prod(3);
    for (const auto& g : perms) prod = covfam::permgrp::compose(prod, g);
    perms.push_back(inverse(prod));

    covfam::nielsen::GenTuple expected;
    expected.degree = 3;
    expected.perms = perms;
    NumericReport rep = verify_cover_numeric(m, &expected);
    CHECK(rep.passed);
    REQUIRE(rep.checks.size() == 3);
    CHECK(rep.checks[2].second);

    // every branch of the toy is a transposition
    for (const auto& g : perms) CHECK(cycle_type(g).str() == "2^1.1^1");
    CHECK(covfam::permgrp::is_transitive(perms));
  }
}
