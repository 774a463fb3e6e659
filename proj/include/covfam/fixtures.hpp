#pragma once

// Embedded exact data: the degree-24 map and its hyperelliptic companion,
// plus a small degree-7 cover with monodromy PSL(3,2) used as an oracle.

#include "covfam/exactalg.hpp"

namespace covfam::fixtures {

struct Psi24 {
  exactalg::QPoly p, q, r;  // q = p + r
};

// built from the published factored forms
Psi24 psi24();

// the quintic factor of p's multiplicity-3 block
exactalg::QPoly psi24_quintic();

// ramification factors of the hyperelliptic companion curve y^2 = c P(mu)
std::vector<exactalg::QPoly> hyper_factors();

// degree-7 Belyi map num/den with branch types (4.2.1 | 2^2.1^3 | 7) and
// monodromy PSL(3,2)
struct Deg7Cover {
  exactalg::QuadPoly num, den;
  long d = 0;  // field discriminant of the coefficients
};
Deg7Cover deg7_psl32();

}  // namespace covfam::fixtures
