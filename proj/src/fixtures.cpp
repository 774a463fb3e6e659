#include "covfam/fixtures.hpp"

namespace covfam::fixtures {

using exactalg::QPoly;
using exactalg::QRat;

static QPoly lin(const QRat& root) { return QPoly({-root, QRat(1)}); }

exactalg::QPoly psi24_quintic() {
  return QPoly({QRat(-2, 3), QRat(8), QRat(-34), QRat(178, 3), QRat(-137, 4), QRat(1)});
}

Psi24 psi24() {
  QPoly quadratic({QRat(1, 8), QRat(-11, 16), QRat(1)});
  QPoly p = lin(QRat(1, 4)) * exactalg::poly_pow(quadratic, 4) *
            exactalg::poly_pow(psi24_quintic(), 3);

  QPoly rquad({QRat(-1, 6), QRat(1, 3), QRat(1)});
  QPoly r = exactalg::scale(exactalg::poly_pow(lin(QRat(1, 2)), 3) *
                                exactalg::poly_pow(lin(QRat(1, 3)), 4) *
                                exactalg::poly_pow(lin(QRat(5, 16)), 2) *
                                exactalg::poly_pow(rquad, 7),
                            QRat(243));

  Psi24 out;
  out.p = p;
  out.r = r;
  out.q = p + r;
  return out;
}

std::vector<exactalg::QPoly> hyper_factors() {
  return {psi24_quintic(), lin(QRat(1, 4)), lin(QRat(5, 16))};
}

Deg7Cover deg7_psl32() {
  using exactalg::QuadElem;
  const long d = -7;
  auto qe = [d](const QRat& a, const QRat& b) { return QuadElem(a, b, d); };
  Deg7Cover out;
  out.d = d;
  // x^4 (x-1)^2 (x-v) with v = (-1 + sqrt(-7))/4; branch types
  // (4.2.1 | 2^2.1^3 | 7) over (0, K, infinity), normalized by den = K
  out.num = exactalg::QuadPoly(std::vector<QuadElem>{
      qe(QRat(0), QRat(0)), qe(QRat(0), QRat(0)), qe(QRat(0), QRat(0)),
      qe(QRat(0), QRat(0)), qe(QRat(1, 4), QRat(-1, 4)), qe(QRat(1, 2), QRat(1, 2)),
      qe(QRat(-7, 4), QRat(-1, 4)), qe(QRat(1), QRat(0))});
  out.den = exactalg::QuadPoly(std::vector<QuadElem>{qe(QRat(1, 49), QRat(-13, 2401))});
  return out;
}

}  // namespace covfam::fixtures
