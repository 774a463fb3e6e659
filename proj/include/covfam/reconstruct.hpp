#pragma once

// Recognition of rational and quadratic-irrational numbers from
// high-precision approximations, and interpolation of the even/odd
// coefficient functions of a double cover.

#include <optional>
#include <utility>
#include <vector>

#include "covfam/bigfloat.hpp"
#include "covfam/exactalg.hpp"

namespace covfam::reconstruct {

using exactalg::QPoly;
using exactalg::QRat;
using exactalg::QuadElem;
using numcover::BigComplex;
using numcover::BigFloat;

struct YCollision : std::runtime_error {
  YCollision() : std::runtime_error("square-root value too close to zero to split") {}
};

// continued-fraction convergent p/q with q <= height_bound, accepted only if
// the approximation error clears the threshold 2^(-prec/2) with a 2x margin
std::optional<QRat> recognize_rational(const BigComplex& x, const mpz_class& height_bound);

// a + b sqrt(d) with heights <= height_bound; d must be squarefree.
// d < 0 splits into real and imaginary rational recognitions; d > 0 runs a
// three-dimensional integer relation search on (1, sqrt(d), x).
std::optional<QuadElem> recognize_quadratic(const BigComplex& x, long d,
                                            const mpz_class& height_bound);

// one tracked data point of the family at a parameter value mu
struct Sample {
  QRat mu;
  BigComplex yval;                 // signed square-root choice
  std::vector<BigComplex> coeffs;  // tracked cover coefficients
};

// from v(+-) = H1 +- y H2 recover (H1 value, H2 value) coefficientwise
std::pair<std::vector<BigComplex>, std::vector<BigComplex>> split_even_odd(
    const Sample& plus, const Sample& minus);

struct RatFun {
  QPoly num, den;  // coprime, denominator monic
};

// exact rational-function interpolation with numerator degree <= dn and
// denominator degree <= dd; every point, including holdouts beyond the
// seeding subset, must be matched exactly
std::optional<RatFun> fit_ratfun(const std::vector<std::pair<QRat, QRat>>& points,
                                 int dn, int dd);

// LLL-reduced basis of the integer row lattice (delta = 3/4); exposed for tests
std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> basis);

}  // namespace covfam::reconstruct
