#include "covfam/bigfloat.hpp"

#include <cstdio>
#include <vector>

namespace covfam::numcover {

std::string BigFloat::str(int digits) const {
  if (digits <= 0) digits = static_cast<int>(static_cast<double>(prec()) * 0.30103) + 2;
  char fmt[32];
  std::snprintf(fmt, sizeof(fmt), "%%.%dRe", digits);
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), fmt, v_);
  return std::string(buf.data());
}

BigFloat bf_abs(const BigFloat& a) {
  BigFloat r(a.prec());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

BigFloat bf_sqrt(const BigFloat& a) {
  BigFloat r(a.prec());
  mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

BigFloat bf_pow2(long e, int prec) {
  BigFloat r(prec);
  mpfr_set_si_2exp(r.raw(), 1, e, MPFR_RNDN);
  return r;
}

BigFloat bf_hypot(const BigFloat& a, const BigFloat& b) {
  BigFloat r(std::max(a.prec(), b.prec()));
  mpfr_hypot(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}

BigFloat bf_max(const BigFloat& a, const BigFloat& b) { return a < b ? b : a; }

BigComplex operator+(const BigComplex& a, const BigComplex& b) {
  return {a.re + b.re, a.im + b.im};
}
BigComplex operator-(const BigComplex& a, const BigComplex& b) {
  return {a.re - b.re, a.im - b.im};
}
BigComplex operator-(const BigComplex& a) { return {-a.re, -a.im}; }
BigComplex operator*(const BigComplex& a, const BigComplex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
BigComplex operator/(const BigComplex& a, const BigComplex& b) {
  BigFloat n = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

BigFloat bc_abs(const BigComplex& a) { return bf_hypot(a.re, a.im); }

BigComplex bc_sqrt(const BigComplex& a) {
  const int prec = a.prec();
  if (a.is_zero()) return BigComplex(prec);
  BigFloat r = bc_abs(a);
  // sqrt(z) = sqrt((r+re)/2) + i sign(im) sqrt((r-re)/2)
  BigFloat half(0.5, prec);
  BigFloat u = bf_sqrt((r + a.re) * half);
  BigFloat v = bf_sqrt((r - a.re) * half);
  if (a.im.sign() < 0) v = -v;
  if (u.is_zero() && a.im.is_zero() && a.re.sign() < 0) return {u, bf_sqrt(-a.re)};
  return {u, v};
}

BigComplex bc_scale(const BigComplex& a, const BigFloat& s) { return {a.re * s, a.im * s}; }

}  // namespace covfam::numcover
