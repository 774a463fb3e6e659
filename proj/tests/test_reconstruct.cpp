#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "covfam/fixtures.hpp"
#include "covfam/permgrp.hpp"
#include "covfam/reconstruct.hpp"

using namespace covfam::reconstruct;
using covfam::numcover::BigComplex;
using covfam::numcover::BigFloat;
using covfam::numcover::kDefaultPrec;

static BigComplex from_q(const QRat& q, int prec = kDefaultPrec) {
  BigFloat r(prec);
  mpfr_set_q(r.raw(), q.get_mpq_t(), MPFR_RNDN);
  return {std::move(r), BigFloat(prec)};
}

static const mpz_class kHeight = mpz_class("1000000000000000000000000000000");  // 10^30

TEST_CASE("rational recognition from high-precision values") {
  const int prec = kDefaultPrec;

  SUBCASE("one third") {
    auto r = recognize_rational(from_q(QRat(1, 3)), kHeight);
    REQUIRE(r.has_value());
    CHECK(*r == QRat(1, 3));
  }

  SUBCASE("the quartic coefficient 137/4 of the embedded quintic") {
    auto quintic = covfam::fixtures::psi24_quintic();
    QRat c = quintic.c[4];
    CHECK(c == QRat(-137, 4));
    auto r = recognize_rational(from_q(c), kHeight);
    REQUIRE(r.has_value());
    CHECK(*r == QRat(-137, 4));
  }

  SUBCASE("an irrational stays unrecognized at a modest height bound") {
    BigComplex x(covfam::numcover::bf_sqrt(BigFloat(2.0, prec)), BigFloat(prec));
    CHECK(!recognize_rational(x, mpz_class(1000000)).has_value());
  }

  SUBCASE("a visible imaginary part is rejected") {
    BigComplex x(BigFloat(0.5, prec), BigFloat(1e-20, prec));
    CHECK(!recognize_rational(x, kHeight).has_value());
  }

  SUBCASE("large heights round trip") {
    QRat q(mpz_class("123456789123456789"), mpz_class("987654321987654323"));
    q.canonicalize();
    auto r = recognize_rational(from_q(q), kHeight);
    REQUIRE(r.has_value());
    CHECK(*r == q);
  }
}

TEST_CASE("quadratic recognition") {
  const int prec = kDefaultPrec;

  SUBCASE("imaginary quadratic round trip at d = -3199") {
    QRat a(1, 2), b(3, 7);
    BigFloat root = covfam::numcover::bf_sqrt(BigFloat(3199.0, prec));
    BigComplex x(from_q(a).re, from_q(b).re * root);
    auto r = recognize_quadratic(x, -3199, kHeight);
    REQUIRE(r.has_value());
    CHECK(r->a == a);
    CHECK(r->b == b);
    CHECK(r->d == -3199);
  }

  SUBCASE("rational input recognizes with b = 0") {
    auto r = recognize_quadratic(from_q(QRat(22, 7)), -3199, kHeight);
    REQUIRE(r.has_value());
    CHECK(r->a == QRat(22, 7));
    CHECK(r->b == 0);
  }

  SUBCASE("real quadratic round trip at d = 2") {
    QRat a(2, 3), b(5, 4);
    BigFloat root = covfam::numcover::bf_sqrt(BigFloat(2.0, prec));
    BigComplex x(from_q(a).re + from_q(b).re * root, BigFloat(prec));
    auto r = recognize_quadratic(x, 2, mpz_class(1000000));
    REQUIRE(r.has_value());
    CHECK(r->a == a);
    CHECK(r->b == b);
  }

  SUBCASE("added noise defeats recognition") {
    QRat a(1, 2), b(3, 7);
    BigFloat root = covfam::numcover::bf_sqrt(BigFloat(3199.0, prec));
    BigComplex x(from_q(a).re + BigFloat(1e-3, prec), from_q(b).re * root);
    CHECK(!recognize_quadratic(x, -3199, mpz_class(100000)).has_value());
  }

  SUBCASE("non-squarefree d is refused") {
    CHECK(!recognize_quadratic(from_q(QRat(1, 2)), 12, kHeight).has_value());
  }
}

TEST_CASE("lattice reduction finds short vectors") {
  // rows (201, 100), (402, 201): shortest vector of this lattice is (0, 1)
  auto r = lll_reduce({{201, 100}, {402, 201}});
  mpz_class n0 = r[0][0] * r[0][0] + r[0][1] * r[0][1];
  CHECK(n0 == 1);
}

TEST_CASE("even-odd splitting of double-cover samples") {
  const int prec = kDefaultPrec;
  BigComplex y(1.25, 0.5, prec);

  SUBCASE("synthesized H1 + y H2 splits exactly") {
    BigComplex h1(3.0, -1.0, prec), h2(0.25, 2.0, prec);
    Sample p{QRat(1, 6), y, {h1 + y * h2}};
    Sample m{QRat(1, 6), -y, {h1 - y * h2}};
    auto [e, o] = split_even_odd(p, m);
    CHECK(covfam::numcover::bc_abs(e[0] - h1).to_double() < 1e-90);
    CHECK(covfam::numcover::bc_abs(o[0] - h2).to_double() < 1e-90);
  }

  SUBCASE("equal coefficient values give a zero odd part") {
    BigComplex v(7.0, 0.0, prec);
    Sample p{QRat(1, 6), y, {v}};
    Sample m{QRat(1, 6), -y, {v}};
    auto [e, o] = split_even_odd(p, m);
    CHECK(covfam::numcover::bc_abs(e[0] - v).is_zero());
    CHECK(covfam::numcover::bc_abs(o[0]).is_zero());
  }

  SUBCASE("vanishing y is a collision") {
    Sample p{QRat(1, 6), BigComplex(prec), {BigComplex(1, prec)}};
    Sample m{QRat(1, 6), BigComplex(prec), {BigComplex(1, prec)}};
    CHECK_THROWS_AS(split_even_odd(p, m), YCollision);
  }

  SUBCASE("mismatched mu is a usage error") {
    Sample p{QRat(1, 6), y, {BigComplex(1, prec)}};
    Sample m{QRat(1, 7), -y, {BigComplex(1, prec)}};
    CHECK_THROWS_AS(split_even_odd(p, m), std::invalid_argument);
  }
}

TEST_CASE("exact rational-function interpolation") {
  using covfam::exactalg::eval;

  auto sample = [](const RatFun& f, const std::vector<QRat>& xs) {
    std::vector<std::pair<QRat, QRat>> pts;
    for (const auto& x : xs) {
      QRat dv = eval(f.den, x);
      pts.emplace_back(x, QRat(eval(f.num, x) / dv));
    }
    return pts;
  };

  SUBCASE("a simple moebius function") {
    RatFun f{QPoly({QRat(1), QRat(1)}), QPoly({QRat(-2), QRat(1)})};  // (x+1)/(x-2)
    auto pts = sample(f, {QRat(0), QRat(1), QRat(3), QRat(4), QRat(5), QRat(1, 2)});
    auto r = fit_ratfun(pts, 1, 1);
    REQUIRE(r.has_value());
    CHECK(r->num == f.num);
    CHECK(r->den == f.den);
  }

  SUBCASE("a constant collapses to denominator one") {
    std::vector<std::pair<QRat, QRat>> pts;
    for (int k = 0; k < 6; ++k) pts.emplace_back(QRat(k), QRat(5));
    auto r = fit_ratfun(pts, 1, 1);
    REQUIRE(r.has_value());
    CHECK(r->num == QPoly({QRat(5)}));
    CHECK(r->den == QPoly({QRat(1)}));
  }

  SUBCASE("degree bounds too small give no fit") {
    RatFun f{QPoly({QRat(0), QRat(0), QRat(0), QRat(1)}), QPoly({QRat(1)})};  // x^3
    auto pts = sample(f, {QRat(0), QRat(1), QRat(2), QRat(3), QRat(4), QRat(5)});
    CHECK(!fit_ratfun(pts, 1, 1).has_value());
  }

  SUBCASE("the result ignores point ordering and survives holdouts") {
    RatFun f{QPoly({QRat(2), QRat(0), QRat(3)}), QPoly({QRat(5), QRat(1)})};
    std::vector<QRat> xs;
    for (int k = 1; k <= 12; ++k) xs.emplace_back(QRat(k, 7));
    auto pts = sample(f, xs);
    auto a = fit_ratfun(pts, 2, 1);
    std::reverse(pts.begin(), pts.end());
    auto b = fit_ratfun(pts, 2, 1);
    std::swap(pts[0], pts[5]);
    auto c = fit_ratfun(pts, 2, 1);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    REQUIRE(c.has_value());
    CHECK(a->num == b->num);
    CHECK(a->den == b->den);
    CHECK(a->num == c->num);
    CHECK(a->den == c->den);
    // wider bounds still land on the same reduced form
    auto d = fit_ratfun(pts, 3, 2);
    REQUIRE(d.has_value());
    CHECK(d->num == a->num);
    CHECK(d->den == a->den);
  }

  SUBCASE("duplicate abscissae are a usage error") {
    std::vector<std::pair<QRat, QRat>> pts(6, {QRat(1), QRat(1)});
    CHECK_THROWS_AS(fit_ratfun(pts, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("end-to-end recovery of random even and odd parts") {
  const int prec = kDefaultPrec;
  std::uint64_t st = 20260825;
  auto rnd_q = [&] {
    QRat q(covfam::permgrp::rng_below(st, 19) - 9, covfam::permgrp::rng_below(st, 4) + 1);
    q.canonicalize();
    return q;
  };
  auto rnd_poly = [&](int deg) {
    std::vector<QRat> c;
    for (int i = 0; i <= deg; ++i) c.push_back(rnd_q());
    return QPoly(std::move(c));
  };

  for (int trial = 0; trial < 3; ++trial) {
    QPoly h1 = rnd_poly(covfam::permgrp::rng_below(st, 5));
    QPoly h2 = rnd_poly(covfam::permgrp::rng_below(st, 5));

    // 100-digit samples at small rationals near 1/6, with irrational y values
    std::vector<std::pair<QRat, QRat>> pts1, pts2;
    for (int k = 0; k < 12; ++k) {
      QRat mu(k + 1, 6);
      mu.canonicalize();
      BigFloat y2(static_cast<long>(2 + k), prec);
      BigComplex y(covfam::numcover::bf_sqrt(y2), BigFloat(prec));
      BigComplex v1 = from_q(covfam::exactalg::eval(h1, mu), prec);
      BigComplex v2 = from_q(covfam::exactalg::eval(h2, mu), prec);
      Sample p{mu, y, {v1 + y * v2}};
      Sample m{mu, -y, {v1 - y * v2}};
      auto [e, o] = split_even_odd(p, m);
      auto r1 = recognize_rational(e[0], kHeight);
      auto r2 = recognize_rational(o[0], kHeight);
      REQUIRE(r1.has_value());
      REQUIRE(r2.has_value());
      pts1.emplace_back(mu, *r1);
      pts2.emplace_back(mu, *r2);
    }

    // ascending degree search as the paper gives no degree data
    auto search = [&](const std::vector<std::pair<QRat, QRat>>& pts) {
      for (int total = 0; total <= 8; ++total)
        for (int dn = 0; dn <= total; ++dn)
          if (auto f = fit_ratfun(pts, dn, total - dn)) return f;
      return std::optional<RatFun>{};
    };
    auto f1 = search(pts1);
    auto f2 = search(pts2);
    REQUIRE(f1.has_value());
    REQUIRE(f2.has_value());
    CHECK(f1->num == h1);
    CHECK(f1->den == QPoly({QRat(1)}));
    CHECK(f2->num == h2);
    CHECK(f2->den == QPoly({QRat(1)}));
  }
}
