#pragma once

// Exact arithmetic over Q, quadratic fields Q(sqrt(d)) and F_p; ramification
// verification of explicit maps, specialization-based degree patterns, orbit
// length certificates and hyperelliptic model extraction.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covfam/permgrp.hpp"

namespace covfam::exactalg {

using QRat = mpq_class;

struct Inseparable : std::runtime_error {
  Inseparable() : std::runtime_error("p - t q is inseparable in X") {}
};
struct BadPrime : std::runtime_error {
  explicit BadPrime(const std::string& w) : std::runtime_error(w) {}
};
struct AllSamplesDegenerate : std::runtime_error {
  AllSamplesDegenerate() : std::runtime_error("every specialization sample degenerated") {}
};
struct DegreeOutOfRange : std::runtime_error {
  explicit DegreeOutOfRange(const std::string& w) : std::runtime_error(w) {}
};
struct ZeroInput : std::runtime_error {
  ZeroInput() : std::runtime_error("zero input") {}
};
struct MixedField : std::runtime_error {
  MixedField() : std::runtime_error("mixed quadratic discriminants or moduli") {}
};
struct DivisionByZero : std::runtime_error {
  DivisionByZero() : std::runtime_error("division by zero") {}
};

// ---- field elements ------------------------------------------------------

// a + b*sqrt(d); d squarefree, fixed per computation
struct QuadElem {
  QRat a, b;
  long d = -1;

  QuadElem() = default;
  QuadElem(QRat a_, QRat b_, long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {}

  bool is_zero() const { return a == 0 && b == 0; }
  QuadElem conj() const { return {a, -b, d}; }
  friend bool operator==(const QuadElem& x, const QuadElem& y) {
    return x.a == y.a && x.b == y.b && x.d == y.d;
  }
};
QuadElem operator+(const QuadElem& x, const QuadElem& y);
QuadElem operator-(const QuadElem& x, const QuadElem& y);
QuadElem operator-(const QuadElem& x);
QuadElem operator*(const QuadElem& x, const QuadElem& y);
QuadElem operator/(const QuadElem& x, const QuadElem& y);

// element of F_p with the modulus carried along
struct Fp {
  std::uint64_t v = 0;
  std::uint64_t p = 0;

  bool is_zero() const { return v == 0; }
  friend bool operator==(const Fp& x, const Fp& y) { return x.v == y.v && x.p == y.p; }
};
Fp operator+(const Fp& x, const Fp& y);
Fp operator-(const Fp& x, const Fp& y);
Fp operator-(const Fp& x);
Fp operator*(const Fp& x, const Fp& y);
Fp operator/(const Fp& x, const Fp& y);
Fp fp_inv(const Fp& x);
Fp fp_pow(Fp x, std::uint64_t e);

// field helpers usable in generic polynomial code; `ctx` supplies d or p
template <class F>
struct FieldOps;
template <>
struct FieldOps<QRat> {
  static QRat zero(const QRat&) { return QRat(0); }
  static QRat one(const QRat&) { return QRat(1); }
  static QRat from_long(const QRat&, long n) { return QRat(n); }
  static bool is_zero(const QRat& x) { return x == 0; }
};
template <>
struct FieldOps<QuadElem> {
  static QuadElem zero(const QuadElem& c) { return {QRat(0), QRat(0), c.d}; }
  static QuadElem one(const QuadElem& c) { return {QRat(1), QRat(0), c.d}; }
  static QuadElem from_long(const QuadElem& c, long n) { return {QRat(n), QRat(0), c.d}; }
  static bool is_zero(const QuadElem& x) { return x.is_zero(); }
};
template <>
struct FieldOps<Fp> {
  static Fp zero(const Fp& c) { return {0, c.p}; }
  static Fp one(const Fp& c) { return {c.p > 1 ? 1u : 0u, c.p}; }
  static Fp from_long(const Fp& c, long n) {
    long r = n % static_cast<long>(c.p);
    if (r < 0) r += static_cast<long>(c.p);
    return {static_cast<std::uint64_t>(r), c.p};
  }
  static bool is_zero(const Fp& x) { return x.v == 0; }
};

// ---- polynomials ---------------------------------------------------------

// ascending coefficients; empty vector = zero polynomial
template <class F>
struct Poly {
  std::vector<F> c;

  Poly() = default;
  explicit Poly(std::vector<F> cs) : c(std::move(cs)) { normalize(); }

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  const F& lc() const { return c.back(); }
  void normalize() {
    while (!c.empty() && FieldOps<F>::is_zero(c.back())) c.pop_back();
  }
  friend bool operator==(const Poly& p, const Poly& q) { return p.c == q.c; }
};

using QPoly = Poly<QRat>;
using QuadPoly = Poly<QuadElem>;
using FpPoly = Poly<Fp>;

template <class F> Poly<F> operator+(const Poly<F>& p, const Poly<F>& q);
template <class F> Poly<F> operator-(const Poly<F>& p, const Poly<F>& q);
template <class F> Poly<F> operator-(const Poly<F>& p);
template <class F> Poly<F> operator*(const Poly<F>& p, const Poly<F>& q);
template <class F> Poly<F> scale(const Poly<F>& p, const F& s);
template <class F> Poly<F> monic(const Poly<F>& p);
template <class F> std::pair<Poly<F>, Poly<F>> divmod(const Poly<F>& p, const Poly<F>& q);
template <class F> Poly<F> poly_gcd(Poly<F> p, Poly<F> q);  // monic
template <class F> Poly<F> derivative(const Poly<F>& p);
template <class F> F eval(const Poly<F>& p, const F& x);
template <class F> Poly<F> poly_pow(const Poly<F>& p, int e);
template <class F> Poly<F> from_roots(const std::vector<F>& roots, const F& ctx);
template <class F> Poly<F> constant(const F& v);
// resultant via the field PRS; degrees taken as the actual degrees
template <class F> F resultant(Poly<F> p, Poly<F> q);

QPoly qpoly_parse(const std::vector<std::string>& coeffs);  // "num/den" ascending
std::string qpoly_str(const QPoly& p, const std::string& var = "x");

QuadPoly quad_conj(const QuadPoly& p);
QuadElem quad_eval(const QuadPoly& p, const QuadElem& x);

// char-0 Yun decomposition: ascending multiplicity, factors monic, squarefree,
// pairwise coprime; constant content dropped
std::vector<std::pair<QPoly, int>> squarefree_decomposition(const QPoly& p);

// ---- ramification patterns -----------------------------------------------

struct MultPattern {
  std::vector<std::pair<int, int>> parts;  // (multiplicity, count), desc
  int inf_mult = 0;                        // deficiency at infinity, 0 if none
  int degree = 0;                          // degree of the map

  permgrp::CycleType cycle_type() const;
  std::string str() const { return cycle_type().str(); }
};

enum class Place { Zero, One, Infinity };

MultPattern mult_pattern(const QPoly& num, const QPoly& den, Place value);

struct BelyiReport {
  bool passed = false;
  std::vector<std::pair<std::string, bool>> checks;
  std::string summary() const;
};

BelyiReport verify_belyi(const QPoly& num, const QPoly& den,
                         const std::array<permgrp::CycleType, 3>& expected,
                         const QPoly* r = nullptr);

// content-free monic discriminant of p - t q with respect to X, as a
// polynomial in t
QPoly normalized_discriminant(const QPoly& p, const QPoly& q);
QuadPoly normalized_discriminant(const QuadPoly& p, const QuadPoly& q);

// ---- factorization mod p -------------------------------------------------

FpPoly reduce_mod_p(const QPoly& f, std::uint64_t p);
// QuadPoly reduction picks a square root of d mod p; BadPrime if none exists
FpPoly reduce_mod_p(const QuadPoly& f, std::uint64_t p);

// monic irreducible factors with multiplicity, sorted by degree
std::vector<std::pair<FpPoly, int>> factor_mod_p(const FpPoly& f, std::uint64_t seed = 1);
std::vector<std::pair<FpPoly, int>> factor_mod_p(const QPoly& f, std::uint64_t p,
                                                 std::uint64_t seed = 1);

// ---- Lemma 3.1 -----------------------------------------------------------

struct Lemma31Samples {
  std::vector<QRat> points{QRat(2), QRat(3), QRat(5), QRat(7), QRat(11)};
  std::vector<std::uint64_t> primes{67, 101, 127};
};

struct DegreePattern {
  std::vector<int> degrees;  // sorted ascending, majority vote
  int agree = 0, total = 0;  // sample agreement bookkeeping
  std::vector<std::string> disagreements;
};

DegreePattern lemma31_degree_pattern(const QPoly& p, const QPoly& q,
                                     const QPoly& pt, const QPoly& qt,
                                     const Lemma31Samples& samples = {});
DegreePattern lemma31_degree_pattern(const QuadPoly& p, const QuadPoly& q,
                                     const QuadPoly& pt, const QuadPoly& qt,
                                     const Lemma31Samples& samples = {});

// ---- certificates and models ---------------------------------------------

bool orbit_length_certificate(const std::vector<permgrp::Perm>& gens,
                              const std::vector<int>& claimed,
                              std::uint64_t seed = 1);

struct HyperModel {
  QPoly P;
  QRat c;
  int genus = 0;
  bool infinity_branch = false;
};

HyperModel hyperelliptic_model(const std::vector<QPoly>& ram_factors, const QRat& c);

mpz_class squarefree_part(const QRat& r);

}  // namespace covfam::exactalg
