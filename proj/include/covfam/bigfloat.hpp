#pragma once

// Thin RAII wrapper around MPFR reals plus a complex type built on top.

#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace covfam::numcover {

inline constexpr int kDefaultPrec = 332;

class BigFloat {
 public:
  explicit BigFloat(int prec = kDefaultPrec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  BigFloat(long x, int prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }
  BigFloat(double x, int prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
  BigFloat(const std::string& s, int prec) {
    mpfr_init2(v_, prec);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw std::invalid_argument("bad float literal: " + s);
  }
  BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  int prec() const { return static_cast<int>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_); }
  int sign() const { return mpfr_sgn(v_); }
  std::string str(int digits = 0) const;

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator-(const BigFloat& a) {
    BigFloat r(a.prec());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.prec(), b.prec()));
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_); }

 private:
  mpfr_t v_;
};

BigFloat bf_abs(const BigFloat& a);
BigFloat bf_sqrt(const BigFloat& a);
BigFloat bf_pow2(long e, int prec);  // 2^e
BigFloat bf_hypot(const BigFloat& a, const BigFloat& b);
BigFloat bf_max(const BigFloat& a, const BigFloat& b);

struct BigComplex {
  BigFloat re, im;

  explicit BigComplex(int prec = kDefaultPrec) : re(prec), im(prec) {}
  BigComplex(BigFloat r, BigFloat i) : re(std::move(r)), im(std::move(i)) {}
  BigComplex(long r, int prec) : re(r, prec), im(prec) {}
  BigComplex(double r, double i, int prec) : re(r, prec), im(i, prec) {}

  int prec() const { return std::max(re.prec(), im.prec()); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

BigComplex operator+(const BigComplex& a, const BigComplex& b);
BigComplex operator-(const BigComplex& a, const BigComplex& b);
BigComplex operator-(const BigComplex& a);
BigComplex operator*(const BigComplex& a, const BigComplex& b);
BigComplex operator/(const BigComplex& a, const BigComplex& b);
BigFloat bc_abs(const BigComplex& a);
BigComplex bc_sqrt(const BigComplex& a);  // principal branch
BigComplex bc_scale(const BigComplex& a, const BigFloat& s);

}  // namespace covfam::numcover
