#include "covfam/exactalg.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace covfam::exactalg {

// ---- QuadElem ------------------------------------------------------------

static void check_d(const QuadElem& x, const QuadElem& y) {
  if (x.d != y.d) throw MixedField();
}

QuadElem operator+(const QuadElem& x, const QuadElem& y) {
  check_d(x, y);
  return {x.a + y.a, x.b + y.b, x.d};
}
QuadElem operator-(const QuadElem& x, const QuadElem& y) {
  check_d(x, y);
  return {x.a - y.a, x.b - y.b, x.d};
}
QuadElem operator-(const QuadElem& x) { return {-x.a, -x.b, x.d}; }
QuadElem operator*(const QuadElem& x, const QuadElem& y) {
  check_d(x, y);
  return {x.a * y.a + QRat(x.d) * x.b * y.b, x.a * y.b + x.b * y.a, x.d};
}
QuadElem operator/(const QuadElem& x, const QuadElem& y) {
  check_d(x, y);
  QRat n = y.a * y.a - QRat(y.d) * y.b * y.b;  // norm of y
  if (n == 0) throw DivisionByZero();
  QuadElem z = x * y.conj();
  return {z.a / n, z.b / n, x.d};
}

// ---- Fp ------------------------------------------------------------------

static void check_p(const Fp& x, const Fp& y) {
  if (x.p != y.p) throw MixedField();
}

Fp operator+(const Fp& x, const Fp& y) {
  check_p(x, y);
  std::uint64_t s = x.v + y.v;
  if (s >= x.p) s -= x.p;
  return {s, x.p};
}
Fp operator-(const Fp& x, const Fp& y) {
  check_p(x, y);
  return {x.v >= y.v ? x.v - y.v : x.v + x.p - y.v, x.p};
}
Fp operator-(const Fp& x) { return {x.v ? x.p - x.v : 0, x.p}; }
Fp operator*(const Fp& x, const Fp& y) {
  check_p(x, y);
  return {static_cast<std::uint64_t>(
              (static_cast<unsigned __int128>(x.v) * y.v) % x.p),
          x.p};
}
Fp fp_pow(Fp x, std::uint64_t e) {
  Fp r{x.p > 1 ? 1u : 0u, x.p};
  while (e) {
    if (e & 1) r = r * x;
    x = x * x;
    e >>= 1;
  }
  return r;
}
Fp fp_inv(const Fp& x) {
  if (x.v == 0) throw DivisionByZero();
  return fp_pow(x, x.p - 2);  // p prime
}
Fp operator/(const Fp& x, const Fp& y) {
  check_p(x, y);
  return x * fp_inv(y);
}

// ---- generic polynomial arithmetic ---------------------------------------

template <class F>
static F ctx_of(const Poly<F>& p, const Poly<F>& q) {
  if (!p.is_zero()) return p.c[0];
  if (!q.is_zero()) return q.c[0];
  return F{};
}

template <class F>
Poly<F> operator+(const Poly<F>& p, const Poly<F>& q) {
  if (p.is_zero()) return q;
  if (q.is_zero()) return p;
  F z = FieldOps<F>::zero(p.c[0]);
  std::vector<F> out(std::max(p.c.size(), q.c.size()), z);
  for (std::size_t i = 0; i < p.c.size(); ++i) out[i] = out[i] + p.c[i];
  for (std::size_t i = 0; i < q.c.size(); ++i) out[i] = out[i] + q.c[i];
  return Poly<F>(std::move(out));
}

template <class F>
Poly<F> operator-(const Poly<F>& p) {
  std::vector<F> out = p.c;
  for (auto& x : out) x = -x;
  return Poly<F>(std::move(out));
}

template <class F>
Poly<F> operator-(const Poly<F>& p, const Poly<F>& q) {
  return p + (-q);
}

template <class F>
Poly<F> operator*(const Poly<F>& p, const Poly<F>& q) {
  if (p.is_zero() || q.is_zero()) return Poly<F>{};
  F z = FieldOps<F>::zero(p.c[0]);
  std::vector<F> out(p.c.size() + q.c.size() - 1, z);
  for (std::size_t i = 0; i < p.c.size(); ++i)
    for (std::size_t j = 0; j < q.c.size(); ++j) out[i + j] = out[i + j] + p.c[i] * q.c[j];
  return Poly<F>(std::move(out));
}

template <class F>
Poly<F> scale(const Poly<F>& p, const F& s) {
  std::vector<F> out = p.c;
  for (auto& x : out) x = x * s;
  return Poly<F>(std::move(out));
}

template <class F>
Poly<F> monic(const Poly<F>& p) {
  if (p.is_zero()) return p;
  F inv = FieldOps<F>::one(p.c[0]) / p.lc();
  return scale(p, inv);
}

template <class F>
std::pair<Poly<F>, Poly<F>> divmod(const Poly<F>& p, const Poly<F>& q) {
  if (q.is_zero()) throw DivisionByZero();
  if (p.degree() < q.degree()) return {Poly<F>{}, p};
  F z = FieldOps<F>::zero(q.c[0]);
  std::vector<F> rem = p.c, quo(p.c.size() - q.c.size() + 1, z);
  F inv = FieldOps<F>::one(q.c[0]) / q.lc();
  for (int i = static_cast<int>(rem.size()) - 1; i >= q.degree(); --i) {
    if (FieldOps<F>::is_zero(rem[i])) continue;
    F f = rem[i] * inv;
    quo[i - q.degree()] = f;
    for (int j = 0; j <= q.degree(); ++j)
      rem[i - q.degree() + j] = rem[i - q.degree() + j] - f * q.c[j];
  }
  return {Poly<F>(std::move(quo)), Poly<F>(std::move(rem))};
}

template <class F>
Poly<F> poly_gcd(Poly<F> p, Poly<F> q) {
  while (!q.is_zero()) {
    Poly<F> r = divmod(p, q).second;
    p = std::move(q);
    q = std::move(r);
  }
  return monic(p);
}

template <class F>
Poly<F> derivative(const Poly<F>& p) {
  if (p.degree() < 1) return Poly<F>{};
  std::vector<F> out;
  out.reserve(p.c.size() - 1);
  for (std::size_t i = 1; i < p.c.size(); ++i)
    out.push_back(p.c[i] * FieldOps<F>::from_long(p.c[0], static_cast<long>(i)));
  return Poly<F>(std::move(out));
}

template <class F>
F eval(const Poly<F>& p, const F& x) {
  if (p.is_zero()) return FieldOps<F>::zero(x);
  F r = FieldOps<F>::zero(x);
  for (int i = p.degree(); i >= 0; --i) r = r * x + p.c[i];
  return r;
}

template <class F>
Poly<F> poly_pow(const Poly<F>& p, int e) {
  Poly<F> r = constant(FieldOps<F>::one(p.is_zero() ? F{} : p.c[0]));
  for (int i = 0; i < e; ++i) r = r * p;
  return r;
}

template <class F>
Poly<F> constant(const F& v) {
  if (FieldOps<F>::is_zero(v)) return Poly<F>{};
  return Poly<F>({v});
}

template <class F>
Poly<F> from_roots(const std::vector<F>& roots, const F& ctx) {
  Poly<F> r = constant(FieldOps<F>::one(ctx));
  for (const F& a : roots) r = r * Poly<F>({-a, FieldOps<F>::one(ctx)});
  return r;
}

template <class F>
F resultant(Poly<F> p, Poly<F> q) {
  F one = FieldOps<F>::one(ctx_of(p, q));
  if (p.is_zero() || q.is_zero()) return FieldOps<F>::zero(one);
  F res = one;
  if (p.degree() < q.degree()) {
    if ((p.degree() & 1) && (q.degree() & 1)) res = -res;
    std::swap(p, q);
  }
  while (true) {
    if (q.degree() == 0) {
      F lq = q.c[0], acc = one;
      for (int i = 0; i < p.degree(); ++i) acc = acc * lq;
      return res * acc;
    }
    Poly<F> r = divmod(p, q).second;
    if (r.is_zero()) return FieldOps<F>::zero(one);
    F lq = q.lc(), acc = one;
    for (int i = 0; i < p.degree() - r.degree(); ++i) acc = acc * lq;
    if ((p.degree() & 1) && (q.degree() & 1)) acc = -acc;
    res = res * acc;
    p = std::move(q);
    q = std::move(r);
  }
}

#define COVFAM_INSTANTIATE(F)                                              \
  template Poly<F> operator+ <F>(const Poly<F>&, const Poly<F>&);          \
  template Poly<F> operator- <F>(const Poly<F>&, const Poly<F>&);          \
  template Poly<F> operator- <F>(const Poly<F>&);                          \
  template Poly<F> operator* <F>(const Poly<F>&, const Poly<F>&);          \
  template Poly<F> scale<F>(const Poly<F>&, const F&);                     \
  template Poly<F> monic<F>(const Poly<F>&);                               \
  template std::pair<Poly<F>, Poly<F>> divmod<F>(const Poly<F>&, const Poly<F>&); \
  template Poly<F> poly_gcd<F>(Poly<F>, Poly<F>);                          \
  template Poly<F> derivative<F>(const Poly<F>&);                          \
  template F eval<F>(const Poly<F>&, const F&);                            \
  template Poly<F> poly_pow<F>(const Poly<F>&, int);                       \
  template Poly<F> constant<F>(const F&);                                  \
  template Poly<F> from_roots<F>(const std::vector<F>&, const F&);         \
  template F resultant<F>(Poly<F>, Poly<F>);

COVFAM_INSTANTIATE(QRat)
COVFAM_INSTANTIATE(QuadElem)
COVFAM_INSTANTIATE(Fp)
#undef COVFAM_INSTANTIATE

// ---- parsing and printing ------------------------------------------------

QPoly qpoly_parse(const std::vector<std::string>& coeffs) {
  std::vector<QRat> c;
  c.reserve(coeffs.size());
  for (const auto& s : coeffs) {
    QRat x(s);
    x.canonicalize();
    c.push_back(std::move(x));
  }
  return QPoly(std::move(c));
}

std::string qpoly_str(const QPoly& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    if (p.c[i] == 0) continue;
    QRat a = p.c[i];
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    first = false;
    QRat m = abs(a);
    if (m != 1 || i == 0) os << m.get_str();
    if (i > 0) {
      if (m != 1) os << "*";
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

QuadPoly quad_conj(const QuadPoly& p) {
  std::vector<QuadElem> out = p.c;
  for (auto& x : out) x = x.conj();
  return QuadPoly(std::move(out));
}

QuadElem quad_eval(const QuadPoly& p, const QuadElem& x) { return eval(p, x); }

// ---- Yun squarefree decomposition ----------------------------------------

std::vector<std::pair<QPoly, int>> squarefree_decomposition(const QPoly& p) {
  if (p.is_zero()) throw ZeroInput();
  std::vector<std::pair<QPoly, int>> out;
  QPoly f = monic(p);
  if (f.degree() == 0) return out;
  QPoly fp = derivative(f);
  QPoly g = poly_gcd(f, fp);
  QPoly w = divmod(f, g).first;
  QPoly z = divmod(fp, g).first - derivative(w);
  int i = 1;
  while (w.degree() > 0) {
    QPoly h = poly_gcd(w, z);
    if (h.degree() > 0) out.emplace_back(h, i);
    w = divmod(w, h).first;
    z = divmod(z, h).first - derivative(w);
    ++i;
  }
  return out;
}

// ---- multiplicity patterns -----------------------------------------------

permgrp::CycleType MultPattern::cycle_type() const {
  std::map<int, int, std::greater<int>> agg;
  for (auto [m, c] : parts) agg[m] += c;
  if (inf_mult > 0) agg[inf_mult] += 1;
  permgrp::CycleType ct;
  for (auto [m, c] : agg) ct.parts.emplace_back(m, c);
  return ct;
}

MultPattern mult_pattern(const QPoly& num, const QPoly& den, Place value) {
  QPoly f;
  switch (value) {
    case Place::Zero: f = num; break;
    case Place::One: f = num - den; break;
    case Place::Infinity: f = den; break;
  }
  MultPattern out;
  out.degree = std::max(num.degree(), den.degree());
  if (f.is_zero()) throw ZeroInput();
  std::map<int, int, std::greater<int>> agg;
  for (const auto& [fac, mult] : squarefree_decomposition(f)) agg[mult] += fac.degree();
  for (auto [m, c] : agg) out.parts.emplace_back(m, c);
  out.inf_mult = out.degree - f.degree();
  return out;
}

// ---- normalized discriminant ---------------------------------------------

template <class F>
static Poly<F> lagrange(const std::vector<F>& xs, const std::vector<F>& ys) {
  F one = FieldOps<F>::one(xs[0]);
  Poly<F> acc;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    Poly<F> basis = constant(one);
    F denom = one;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      basis = basis * Poly<F>({-xs[j], one});
      denom = denom * (xs[i] - xs[j]);
    }
    F w = ys[i] / denom;
    acc = acc + scale(basis, w);
  }
  return acc;
}

template <class F>
static Poly<F> norm_disc_impl(const Poly<F>& p, const Poly<F>& q) {
  const int n = std::max(p.degree(), q.degree());
  if (n < 1) throw Inseparable();
  F one = FieldOps<F>::one(ctx_of(p, q));
  std::vector<F> xs, ys;
  const int need = 2 * n + 1;  // disc in t has degree <= 2n - 1
  long t = 0;
  while (static_cast<int>(xs.size()) < need) {
    F tv = FieldOps<F>::from_long(one, t++);
    Poly<F> f = p - scale(q, tv);
    if (f.degree() != n) continue;  // leading coefficient vanished
    Poly<F> fp = derivative(f);
    F res = resultant(f, fp);
    F d = res / f.lc();
    if ((static_cast<long>(n) * (n - 1) / 2) % 2 == 1) d = -d;
    xs.push_back(tv);
    ys.push_back(d);
  }
  Poly<F> delta = lagrange(xs, ys);
  if (delta.is_zero()) throw Inseparable();
  return monic(delta);
}

QPoly normalized_discriminant(const QPoly& p, const QPoly& q) {
  return norm_disc_impl(p, q);
}
QuadPoly normalized_discriminant(const QuadPoly& p, const QuadPoly& q) {
  return norm_disc_impl(p, q);
}

// ---- Belyi verification ---------------------------------------------------

std::string BelyiReport::summary() const {
  std::ostringstream os;
  for (const auto& [name, ok] : checks) os << (ok ? "  ok  " : "  FAIL") << "  " << name << "\n";
  os << (passed ? "PASS" : "FAIL");
  return os.str();
}

BelyiReport verify_belyi(const QPoly& num, const QPoly& den,
                         const std::array<permgrp::CycleType, 3>& expected,
                         const QPoly* r) {
  BelyiReport rep;
  auto add = [&rep](const std::string& name, bool ok) { rep.checks.emplace_back(name, ok); };

  add("coprime", poly_gcd(num, den).degree() == 0);
  if (r) add("q = p + r", den == num + *r);

  const Place places[3] = {Place::Zero, Place::One, Place::Infinity};
  const char* names[3] = {"pattern over 0", "pattern over 1", "pattern over inf"};
  int total_index = 0;
  const int n = std::max(num.degree(), den.degree());
  bool patterns_ok = true;
  for (int i = 0; i < 3; ++i) {
    MultPattern mp = mult_pattern(num, den, places[i]);
    bool ok = mp.cycle_type() == expected[i];
    patterns_ok = patterns_ok && ok;
    add(names[i], ok);
    int points = mp.inf_mult > 0 ? 1 : 0;
    for (auto [m, c] : mp.parts) points += c;
    total_index += n - points;
  }
  add("riemann-hurwitz saturation", total_index == 2 * n - 2);

  bool disc_ok = false;
  try {
    QPoly delta = normalized_discriminant(num, den);
    QPoly t({QRat(0), QRat(1)}), tm1({QRat(-1), QRat(1)});
    for (;;) {
      auto [quo, rem] = divmod(delta, t);
      if (!rem.is_zero()) break;
      delta = quo;
    }
    for (;;) {
      auto [quo, rem] = divmod(delta, tm1);
      if (!rem.is_zero()) break;
      delta = quo;
    }
    disc_ok = delta.degree() == 0;
  } catch (const Inseparable&) {
  }
  add("discriminant supported on {0,1}", disc_ok);

  rep.passed = true;
  for (const auto& [nm, ok] : rep.checks) rep.passed = rep.passed && ok;
  return rep;
}

// ---- reduction and factorization mod p ------------------------------------

static Fp qrat_mod_p(const QRat& x, std::uint64_t p) {
  mpz_class num = x.get_num(), den = x.get_den(), pz(static_cast<unsigned long>(p));
  if (mpz_divisible_p(den.get_mpz_t(), pz.get_mpz_t()))
    throw BadPrime("denominator divisible by " + std::to_string(p));
  mpz_class nm = num % pz, dm = den % pz, inv;
  if (nm < 0) nm += pz;
  mpz_invert(inv.get_mpz_t(), dm.get_mpz_t(), pz.get_mpz_t());
  mpz_class r = (nm * inv) % pz;
  return {static_cast<std::uint64_t>(r.get_ui()), p};
}

FpPoly reduce_mod_p(const QPoly& f, std::uint64_t p) {
  if (f.is_zero()) return {};
  std::vector<Fp> c;
  c.reserve(f.c.size());
  for (const auto& x : f.c) c.push_back(qrat_mod_p(x, p));
  if (c.back().v == 0) throw BadPrime("leading coefficient vanishes mod " + std::to_string(p));
  return FpPoly(std::move(c));
}

static std::uint64_t sqrt_mod_p(long d, std::uint64_t p) {
  long dm = d % static_cast<long>(p);
  if (dm < 0) dm += static_cast<long>(p);
  for (std::uint64_t s = 0; s < p; ++s)
    if ((static_cast<unsigned __int128>(s) * s) % p == static_cast<std::uint64_t>(dm)) return s;
  throw BadPrime("d is a non-residue mod " + std::to_string(p));
}

FpPoly reduce_mod_p(const QuadPoly& f, std::uint64_t p) {
  if (f.is_zero()) return {};
  Fp s{sqrt_mod_p(f.c[0].d, p), p};
  std::vector<Fp> c;
  c.reserve(f.c.size());
  for (const auto& x : f.c) c.push_back(qrat_mod_p(x.a, p) + qrat_mod_p(x.b, p) * s);
  FpPoly g(std::move(c));
  if (g.degree() != f.degree())
    throw BadPrime("leading coefficient vanishes mod " + std::to_string(p));
  return g;
}

static FpPoly pth_root(const FpPoly& f) {
  // over F_p: f(x) = g(x^p) implies g's coefficients are f's at indices 0, p, 2p, ...
  std::uint64_t p = f.c[0].p;
  std::vector<Fp> out;
  for (std::size_t i = 0; i < f.c.size(); i += p) out.push_back(f.c[i]);
  return FpPoly(std::move(out));
}

static void sqfree_fp(const FpPoly& f, int mult_scale,
                      std::vector<std::pair<FpPoly, int>>& out) {
  if (f.degree() < 1) return;
  std::uint64_t p = f.c[0].p;
  FpPoly fp = derivative(f);
  if (fp.is_zero()) {
    sqfree_fp(pth_root(f), mult_scale * static_cast<int>(p), out);
    return;
  }
  FpPoly g = poly_gcd(f, fp);
  FpPoly w = divmod(monic(f), g).first;
  int i = 1;
  while (w.degree() > 0) {
    FpPoly y = poly_gcd(w, g);
    FpPoly fac = divmod(w, y).first;
    if (fac.degree() > 0) out.emplace_back(monic(fac), i * mult_scale);
    w = std::move(y);
    g = divmod(g, w).first;
    ++i;
  }
  if (g.degree() > 0) sqfree_fp(pth_root(g), mult_scale * static_cast<int>(p), out);
}

static FpPoly powmod(FpPoly b, const mpz_class& e, const FpPoly& m) {
  Fp one = FieldOps<Fp>::one(m.c[0]);
  FpPoly r = constant(one);
  b = divmod(b, m).second;
  for (long i = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) - 1; i >= 0; --i) {
    r = divmod(r * r, m).second;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = divmod(r * b, m).second;
  }
  return r;
}

static FpPoly random_fppoly(int maxdeg, std::uint64_t p, std::uint64_t& state) {
  std::vector<Fp> c;
  for (int i = 0; i <= maxdeg; ++i)
    c.push_back({static_cast<std::uint64_t>(permgrp::rng_below(state, static_cast<int>(p))), p});
  return FpPoly(std::move(c));
}

// equal-degree splitting (Cantor-Zassenhaus, p odd)
static void edf(const FpPoly& f, int d, std::uint64_t& state, std::vector<FpPoly>& out) {
  if (f.degree() == d) {
    out.push_back(monic(f));
    return;
  }
  std::uint64_t p = f.c[0].p;
  mpz_class e;
  mpz_ui_pow_ui(e.get_mpz_t(), p, d);
  e = (e - 1) / 2;
  Fp one = FieldOps<Fp>::one(f.c[0]);
  for (;;) {
    FpPoly a = random_fppoly(f.degree() - 1, p, state);
    if (a.degree() < 1) continue;
    FpPoly g = poly_gcd(a, f);
    if (g.degree() == 0) {
      FpPoly b = powmod(a, e, f) - constant(one);
      g = poly_gcd(b, f);
    }
    if (g.degree() > 0 && g.degree() < f.degree()) {
      edf(g, d, state, out);
      edf(divmod(f, g).first, d, state, out);
      return;
    }
  }
}

std::vector<std::pair<FpPoly, int>> factor_mod_p(const FpPoly& f, std::uint64_t seed) {
  std::vector<std::pair<FpPoly, int>> out;
  if (f.degree() < 1) return out;
  std::uint64_t p = f.c[0].p, state = seed ? seed : 1;
  std::vector<std::pair<FpPoly, int>> sq;
  sqfree_fp(f, 1, sq);
  Fp one = FieldOps<Fp>::one(f.c[0]);
  FpPoly x({FieldOps<Fp>::zero(one), one});
  for (const auto& [g0, mult] : sq) {
    // distinct-degree on the squarefree part
    FpPoly g = g0, h = x;
    for (int d = 1; g.degree() > 0; ++d) {
      if (2 * d > g.degree()) {
        out.emplace_back(g, mult);
        break;
      }
      mpz_class pe(static_cast<unsigned long>(p));
      h = powmod(h, pe, g);
      FpPoly gd = poly_gcd(h - x, g);
      if (gd.degree() > 0) {
        std::vector<FpPoly> irr;
        edf(gd, d, state, irr);
        for (auto& q : irr) out.emplace_back(std::move(q), mult);
        g = divmod(g, gd).first;
        h = divmod(h, g).second;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
    for (int i = a.first.degree(); i >= 0; --i)
      if (a.first.c[i].v != b.first.c[i].v) return a.first.c[i].v < b.first.c[i].v;
    return a.second < b.second;
  });
  return out;
}

std::vector<std::pair<FpPoly, int>> factor_mod_p(const QPoly& f, std::uint64_t p,
                                                 std::uint64_t seed) {
  return factor_mod_p(reduce_mod_p(f, p), seed);
}

// ---- Lemma 3.1 degree patterns --------------------------------------------

// Mod-ell factor degrees refine the degree pattern over the coefficient
// field (Frobenius orbits inside Galois orbits).  The pattern reported for a
// specialization point is therefore the finest multiset that every per-prime
// pattern coarsens to; maximizing the number of blocks makes it unique in
// practice and it is found by a small backtracking search.

// can the multiset `fine` be grouped into blocks whose sums give `target`?
static bool refines_to(std::vector<int> fine, std::vector<int> target) {
  if (target.empty()) return fine.empty();
  if (fine.empty()) return false;
  std::sort(fine.rbegin(), fine.rend());
  const int n = static_cast<int>(fine.size());
  // fine[0] lies in some block; try every distinct target value as its block sum
  std::vector<int> tried;
  for (std::size_t ti = 0; ti < target.size(); ++ti) {
    int t = target[ti];
    if (t < fine[0] || std::count(tried.begin(), tried.end(), t)) continue;
    tried.push_back(t);
    for (unsigned mask = 1; mask < (1u << n); mask += 2) {  // contains fine[0]
      int s = 0;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) s += fine[i];
      if (s != t) continue;
      std::vector<int> rest;
      for (int i = 0; i < n; ++i)
        if (!(mask >> i & 1)) rest.push_back(fine[i]);
      std::vector<int> rtarget = target;
      rtarget.erase(rtarget.begin() + static_cast<long>(ti));
      if (refines_to(std::move(rest), std::move(rtarget))) return true;
    }
  }
  return false;
}

// finest multiset every sample pattern refines; ties broken by keeping parts
// that occur verbatim in every sample, then lexicographically
static std::vector<int> join_patterns(std::vector<std::vector<int>> pats) {
  for (auto& p : pats) std::sort(p.begin(), p.end());
  std::sort(pats.begin(), pats.end(),
            [](const auto& a, const auto& b) { return a.size() < b.size(); });
  const std::vector<int>& base = pats[0];
  bool all_equal = true;
  for (const auto& p : pats) all_equal = all_equal && p == base;
  if (all_equal) return base;
  const int m = static_cast<int>(base.size());
  if (m > 12) return base;  // too fine to search; report the coarsest sample

  std::vector<int> universal;  // part values present in every sample
  for (int v : base) {
    bool ok = true;
    for (const auto& p : pats) ok = ok && std::count(p.begin(), p.end(), v) > 0;
    if (ok) universal.push_back(v);
  }

  std::vector<int> best;
  int best_kept = -1;
  // enumerate set partitions of base's parts (restricted growth strings)
  std::vector<int> assign(m, 0);
  auto evaluate = [&](int nblocks) {
    std::vector<int> sums(nblocks, 0);
    for (int i = 0; i < m; ++i) sums[assign[i]] += base[i];
    std::sort(sums.begin(), sums.end());
    if (!best.empty() && sums.size() < best.size()) return;
    for (std::size_t i = 1; i < pats.size(); ++i)
      if (!refines_to(pats[i], sums)) return;
    std::vector<int> uni = universal;
    int kept = 0;
    for (int v : sums) {
      auto it = std::find(uni.begin(), uni.end(), v);
      if (it != uni.end()) {
        uni.erase(it);
        ++kept;
      }
    }
    bool better = best.empty() || sums.size() > best.size() ||
                  (sums.size() == best.size() &&
                   (kept > best_kept || (kept == best_kept && sums < best)));
    if (better) {
      best = sums;
      best_kept = kept;
    }
  };
  std::function<void(int, int)> rec = [&](int i, int maxb) {
    if (i == m) {
      evaluate(maxb);
      return;
    }
    for (int b = 0; b <= maxb && b < m; ++b) {
      assign[i] = b;
      rec(i + 1, std::max(maxb, b + 1));
    }
  };
  rec(0, 0);
  if (best.empty()) best = {std::accumulate(base.begin(), base.end(), 0)};
  return best;
}

template <class F>
static DegreePattern lemma31_impl(const Poly<F>& p, const Poly<F>& q, const Poly<F>& pt,
                                  const Poly<F>& qt, const Lemma31Samples& samples) {
  if (p.degree() <= q.degree())
    throw DegreeOutOfRange("lemma 3.1 requires deg p > deg q");
  std::map<std::vector<int>, int> votes;
  std::vector<std::pair<std::vector<int>, std::string>> seen;
  int total = 0;
  for (const QRat& t0q : samples.points) {
    F t0 = [&] {
      if constexpr (std::is_same_v<F, QRat>) return t0q;
      else return F{t0q, QRat(0), ctx_of(p, q).d};
    }();
    F qv = eval(qt, t0), pv = eval(pt, t0);
    if (FieldOps<F>::is_zero(qv)) continue;
    Poly<F> g = scale(p, qv) - scale(q, pv);
    if (g.degree() != p.degree()) continue;
    std::vector<std::vector<int>> pats;
    for (std::uint64_t ell : samples.primes) {
      std::vector<int> degs;
      try {
        FpPoly gm = reduce_mod_p(g, ell);
        if (poly_gcd(gm, derivative(gm)).degree())
          continue;  // specialization not squarefree mod ell: degenerate
        for (const auto& [fac, mult] : factor_mod_p(gm, ell * 7919 + total))
          for (int i = 0; i < mult; ++i) degs.push_back(fac.degree());
      } catch (const BadPrime&) {
        continue;
      }
      pats.push_back(std::move(degs));
    }
    if (pats.empty()) continue;
    std::vector<int> joined = join_patterns(std::move(pats));
    ++total;
    ++votes[joined];
    seen.emplace_back(std::move(joined), "t0=" + t0q.get_str());
  }
  if (votes.empty()) throw AllSamplesDegenerate();
  DegreePattern out;
  out.total = total;
  auto best = std::max_element(votes.begin(), votes.end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
  out.degrees = best->first;
  out.agree = best->second;
  for (const auto& [degs, tag] : seen)
    if (degs != out.degrees) out.disagreements.push_back(tag);
  return out;
}

DegreePattern lemma31_degree_pattern(const QPoly& p, const QPoly& q, const QPoly& pt,
                                     const QPoly& qt, const Lemma31Samples& samples) {
  return lemma31_impl(p, q, pt, qt, samples);
}
DegreePattern lemma31_degree_pattern(const QuadPoly& p, const QuadPoly& q,
                                     const QuadPoly& pt, const QuadPoly& qt,
                                     const Lemma31Samples& samples) {
  return lemma31_impl(p, q, pt, qt, samples);
}

// ---- orbit length certificate ---------------------------------------------

bool orbit_length_certificate(const std::vector<permgrp::Perm>& gens,
                              const std::vector<int>& claimed, std::uint64_t seed) {
  if (gens.empty() || gens[0].degree() != 63) return false;
  if (!permgrp::identify_psl62(gens)) return false;
  std::vector<int> want = claimed;
  std::sort(want.begin(), want.end());
  if (std::accumulate(want.begin(), want.end(), 0) != 63) return false;

  std::vector<int> all(63);
  for (int i = 0; i < 63; ++i) all[i] = i;
  auto lengths = [&all](const std::vector<permgrp::Perm>& sub) {
    std::vector<int> ls;
    for (const auto& o : permgrp::orbits(sub, all)) ls.push_back(static_cast<int>(o.size()));
    std::sort(ls.begin(), ls.end());
    return ls;
  };

  // the index-63 subgroups of the model: point stabilizers and hyperplane
  // stabilizers; conjugation only permutes the orbit length multisets
  permgrp::StabChain chain(gens);
  std::vector<std::vector<int>> realized;
  realized.push_back(lengths(chain.first_stabilizer_gens()));
  realized.push_back(lengths(permgrp::psl62_hyperplane_stabilizer()));
  std::uint64_t state = seed ? seed : 1;
  for (int trial = 0; trial < 3; ++trial) {  // sampled conjugates, invariance check
    permgrp::Perm h = chain.random_element(state);
    for (auto base : {chain.first_stabilizer_gens(), permgrp::psl62_hyperplane_stabilizer()}) {
      std::vector<permgrp::Perm> conj;
      for (const auto& g : base) conj.push_back(permgrp::conjugate(g, h));
      realized.push_back(lengths(conj));
    }
  }
  return std::find(realized.begin(), realized.end(), want) != realized.end();
}

// ---- hyperelliptic model ---------------------------------------------------

HyperModel hyperelliptic_model(const std::vector<QPoly>& ram_factors, const QRat& c) {
  QPoly P = constant(QRat(1));
  int total = 0;
  for (const auto& f : ram_factors) {
    if (f.degree() < 1 || f.lc() != 1)
      throw DegreeOutOfRange("factors must be monic and nonconstant");
    if (poly_gcd(f, derivative(f)).degree() != 0)
      throw DegreeOutOfRange("factor is not squarefree");
    if (poly_gcd(P, f).degree() != 0)
      throw DegreeOutOfRange("factors are not pairwise coprime");
    P = P * f;
    total += f.degree();
  }
  if (total != 7 && total != 8)
    throw DegreeOutOfRange("total degree must be 7 or 8, got " + std::to_string(total));
  HyperModel m;
  m.P = P;
  m.c = c;
  m.genus = 3;
  m.infinity_branch = (total == 7);
  return m;
}

// ---- squarefree part -------------------------------------------------------

mpz_class squarefree_part(const QRat& r) {
  if (r == 0) throw ZeroInput();
  mpz_class m = r.get_num() * r.get_den();
  mpz_class sign = m < 0 ? -1 : 1;
  m = abs(m);
  mpz_class d = 1;
  for (mpz_class f = 2; f * f <= m; ++f) {
    if (m % f != 0) continue;
    int e = 0;
    while (m % f == 0) {
      m /= f;
      ++e;
    }
    if (e & 1) d *= f;
  }
  return sign * d * m;  // leftover m is prime (or 1)
}

}  // namespace covfam::exactalg
