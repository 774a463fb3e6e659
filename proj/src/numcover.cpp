#include "covfam/numcover.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace covfam::numcover {

// ---- CPoly -----------------------------------------------------------------

void CPoly::normalize() {
  while (!c.empty() && c.back().is_zero()) c.pop_back();
}

static int prec_of(const CPoly& p, const CPoly& q) {
  int prec = kDefaultPrec;
  if (!p.is_zero()) prec = p.c[0].prec();
  else if (!q.is_zero()) prec = q.c[0].prec();
  return prec;
}

CPoly cp_add(const CPoly& p, const CPoly& q) {
  if (p.is_zero()) return q;
  if (q.is_zero()) return p;
  const int prec = prec_of(p, q);
  std::vector<BigComplex> out(std::max(p.c.size(), q.c.size()), BigComplex(prec));
  for (std::size_t i = 0; i < p.c.size(); ++i) out[i] = out[i] + p.c[i];
  for (std::size_t i = 0; i < q.c.size(); ++i) out[i] = out[i] + q.c[i];
  return CPoly(std::move(out));
}

CPoly cp_sub(const CPoly& p, const CPoly& q) { return cp_add(p, cp_scale(q, BigComplex(-1, prec_of(p, q)))); }

CPoly cp_mul(const CPoly& p, const CPoly& q) {
  if (p.is_zero() || q.is_zero()) return {};
  const int prec = prec_of(p, q);
  std::vector<BigComplex> out(p.c.size() + q.c.size() - 1, BigComplex(prec));
  for (std::size_t i = 0; i < p.c.size(); ++i)
    for (std::size_t j = 0; j < q.c.size(); ++j) out[i + j] = out[i + j] + p.c[i] * q.c[j];
  return CPoly(std::move(out));
}

CPoly cp_scale(const CPoly& p, const BigComplex& s) {
  std::vector<BigComplex> out = p.c;
  for (auto& x : out) x = x * s;
  return CPoly(std::move(out));
}

CPoly cp_derivative(const CPoly& p) {
  if (p.degree() < 1) return {};
  const int prec = p.c[0].prec();
  std::vector<BigComplex> out;
  out.reserve(p.c.size() - 1);
  for (std::size_t i = 1; i < p.c.size(); ++i)
    out.push_back(p.c[i] * BigComplex(static_cast<long>(i), prec));
  return CPoly(std::move(out));
}

BigComplex cp_eval(const CPoly& p, const BigComplex& x) {
  if (p.is_zero()) return BigComplex(x.prec());
  BigComplex r(x.prec());
  for (int i = p.degree(); i >= 0; --i) r = r * x + p.c[i];
  return r;
}

CPoly cp_monic_from_roots(const std::vector<BigComplex>& roots, int prec) {
  CPoly r(std::vector<BigComplex>{BigComplex(1, prec)});
  for (const auto& a : roots)
    r = cp_mul(r, CPoly(std::vector<BigComplex>{-a, BigComplex(1, prec)}));
  return r;
}

// exact enough division by a monic divisor; remainder discarded
static CPoly cp_divmonic(const CPoly& p, const CPoly& g) {
  if (g.is_zero() || p.degree() < g.degree()) return {};
  const int prec = prec_of(p, g);
  std::vector<BigComplex> rem = p.c, quo(p.c.size() - g.c.size() + 1, BigComplex(prec));
  for (int i = static_cast<int>(rem.size()) - 1; i >= g.degree(); --i) {
    BigComplex f = rem[i];
    quo[i - g.degree()] = f;
    for (int j = 0; j <= g.degree(); ++j)
      rem[i - g.degree() + j] = rem[i - g.degree() + j] - f * g.c[j];
  }
  return CPoly(std::move(quo));
}

// sum |c_i| r^i, a scale for backward-error tests at |z| = r
static BigFloat cp_bound(const CPoly& p, const BigFloat& r) {
  const int prec = p.is_zero() ? kDefaultPrec : p.c[0].prec();
  BigFloat b(prec), pw(1.0, prec);
  for (const auto& ci : p.c) {
    b = b + bc_abs(ci) * pw;
    pw = pw * r;
  }
  return b;
}

// multiply by x^i
static CPoly cp_shift(const CPoly& p, int i) {
  if (p.is_zero()) return {};
  std::vector<BigComplex> out(p.c.size() + static_cast<std::size_t>(i),
                              BigComplex(p.c[0].prec()));
  for (std::size_t j = 0; j < p.c.size(); ++j) out[j + static_cast<std::size_t>(i)] = p.c[j];
  return CPoly(std::move(out));
}

// ---- root finding ----------------------------------------------------------

std::vector<BigComplex> roots_all(const CPoly& p, std::uint64_t seed) {
  const int n = p.degree();
  if (n < 1) throw NoConvergence("degree must be at least 1");
  const int prec = p.c[0].prec();
  const BigFloat tol = bf_pow2(32 - prec, prec);

  // Cauchy-style radius
  BigFloat radius(1.0, prec);
  for (int i = 0; i < n; ++i) radius = bf_max(radius, bc_abs(p.c[i] / p.c[n]));
  radius = radius + BigFloat(1.0, prec);

  BigFloat pi(prec);
  mpfr_const_pi(pi.raw(), MPFR_RNDN);
  std::uint64_t st = seed ? seed : 7;
  double offset = 0.37 + 1e-3 * static_cast<double>(permgrp::rng_below(st, 997));
  std::vector<BigComplex> z;
  for (int k = 0; k < n; ++k) {
    BigFloat theta = pi * BigFloat(2.0 * (k + offset) / n, prec);
    BigFloat s(prec), c(prec);
    mpfr_sin_cos(s.raw(), c.raw(), theta.raw(), MPFR_RNDN);
    z.emplace_back(radius * c, radius * s);
  }

  CPoly dp = cp_derivative(p);
  const int maxiter = 60 + 60 * prec / 64 + 40 * n;
  auto converged = [&](const BigComplex& zv, const BigComplex& pv) {
    // backward error relative to the coefficient size at |z|
    return !(tol * (BigFloat(1.0, prec) + cp_bound(p, bc_abs(zv))) < bc_abs(pv));
  };
  for (int iter = 0; iter < maxiter; ++iter) {
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      BigComplex pv = cp_eval(p, z[i]);
      if (converged(z[i], pv)) continue;
      BigComplex dv = cp_eval(dp, z[i]);
      if (bc_abs(dv).is_zero()) {
        z[i] = z[i] + BigComplex(1e-3, 1e-3, prec);
        moved = true;
        continue;
      }
      BigComplex w = pv / dv;
      BigComplex sum(prec);
      for (int j = 0; j < n; ++j)
        if (j != i) sum = sum + BigComplex(1, prec) / (z[i] - z[j]);
      BigComplex denom = BigComplex(1, prec) - w * sum;
      if (bc_abs(denom).is_zero()) denom = BigComplex(1, prec);
      z[i] = z[i] - w / denom;
      moved = true;
    }
    if (!moved) return z;
  }
  // accept if every residual is within tolerance despite the iteration cap
  for (int i = 0; i < n; ++i)
    if (!converged(z[i], cp_eval(p, z[i]))) throw NoConvergence("aberth iteration cap reached");
  return z;
}

// ---- linear algebra --------------------------------------------------------

static std::vector<BigComplex> lu_solve(std::vector<std::vector<BigComplex>> a,
                                        std::vector<BigComplex> b, int prec) {
  const int n = static_cast<int>(b.size());
  const BigFloat eps = bf_pow2(16 - prec, prec);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    BigFloat best = bc_abs(a[col][col]);
    for (int r = col + 1; r < n; ++r) {
      BigFloat m = bc_abs(a[r][col]);
      if (best < m) {
        best = m;
        piv = r;
      }
    }
    if (!(eps < best)) throw SingularJacobian();
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (int r = col + 1; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      BigComplex f = a[r][col] / a[col][col];
      for (int k = col; k < n; ++k) a[r][k] = a[r][k] - f * a[col][k];
      b[r] = b[r] - f * b[col];
    }
  }
  std::vector<BigComplex> x(static_cast<std::size_t>(n), BigComplex(prec));
  for (int r = n - 1; r >= 0; --r) {
    BigComplex s = b[r];
    for (int k = r + 1; k < n; ++k) s = s - a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

std::vector<BigComplex> newton_generic(
    const std::function<std::vector<BigComplex>(const std::vector<BigComplex>&)>& f,
    const std::function<std::vector<std::vector<BigComplex>>(const std::vector<BigComplex>&)>&
        jac,
    std::vector<BigComplex> x0, const BigFloat& tol) {
  const int prec = x0.empty() ? kDefaultPrec : x0[0].prec();
  auto norm = [&](const std::vector<BigComplex>& v) {
    BigFloat m(prec);
    for (const auto& e : v) m = bf_max(m, bc_abs(e));
    return m;
  };
  BigFloat last = norm(f(x0));
  if (last < tol) return x0;
  int increases = 0;
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<BigComplex> fx = f(x0);
    BigFloat r = norm(fx);
    if (r < tol) return x0;
    std::vector<BigComplex> dx = lu_solve(jac(x0), fx, prec);
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = x0[i] - dx[i];
    BigFloat rn = norm(f(x0));
    if (last < rn) {
      if (++increases >= 5) throw Diverged("5 consecutive residual increases");
    } else {
      increases = 0;
    }
    last = rn;
  }
  if (last < tol) return x0;
  throw Diverged("newton iteration cap reached");
}

// ---- shapes ----------------------------------------------------------------

void RamShape::validate() const {
  if (degree < 1) throw ShapeInvalid("degree must be positive");
  int inf_count = 0;
  std::vector<CycleType> types;
  for (const auto& b : branches) {
    types.push_back(b.type);
    if (b.loc == BranchLoc::Infinity) {
      ++inf_count;
      bool has = false;
      for (auto [len, cnt] : b.type.parts) has = has || (len == inf_mult && cnt > 0);
      if (!has) throw ShapeInvalid("inf_mult is not a part of the infinity branch type");
    }
  }
  if (inf_count != 1) throw ShapeInvalid("exactly one branch must lie over infinity");
  if (branches.size() < 3) throw ShapeInvalid("need at least three branch points");
  int genus;
  try {
    genus = nielsen::rh_genus(degree, types);
  } catch (const nielsen::ParityError&) {
    throw ShapeInvalid("ramification indices have odd total parity");
  }
  if (genus != 0) throw ShapeInvalid("shape has genus " + std::to_string(genus));
}

// factor layout: (branch index, multiplicity) -> degree, with the pinned
// infinity point removed and trace-pinned top coefficients skipped
struct FactorSlot {
  int branch = 0, mult = 0, deg = 0;
  bool traced = false;
  exactalg::QRat trace;
};

static std::vector<FactorSlot> factor_slots(const RamShape& s) {
  std::vector<FactorSlot> slots;
  for (int b = 0; b < static_cast<int>(s.branches.size()); ++b) {
    for (auto [len, cnt] : s.branches[b].type.parts) {
      int d = cnt;
      if (s.branches[b].loc == BranchLoc::Infinity && len == s.inf_mult) --d;
      if (d <= 0) continue;
      FactorSlot slot;
      slot.branch = b;
      slot.mult = len;
      slot.deg = d;
      for (const auto& t : s.traces)
        if (t.branch == b && t.mult == len) {
          slot.traced = true;
          slot.trace = t.value;
        }
      slots.push_back(slot);
    }
  }
  return slots;
}

int RamShape::unknown_count() const {
  int total = 1;  // c0
  for (const auto& slot : factor_slots(*this)) total += slot.deg - (slot.traced ? 1 : 0);
  return total;
}

int RamShape::equation_count() const {
  return (static_cast<int>(branches.size()) - 2) * degree;
}

RamShape psl62_shape() {
  RamShape s;
  s.degree = 63;
  s.branches = {{BranchLoc::Zero, CycleType::parse("2^28.1^7"), {}, {}},
                {BranchLoc::Infinity, CycleType::parse("2^16.1^31"), {}, {}},
                {BranchLoc::OnePlusSqrtLambda, CycleType::parse("3^20.1^3"), {}, {}},
                {BranchLoc::OneMinusSqrtLambda, CycleType::parse("3^20.1^3"), {}, {}}};
  s.inf_mult = 1;
  // sum of simple roots is 0; sum of double poles is 1
  s.traces = {{0, 1, exactalg::QRat(0)}, {1, 2, exactalg::QRat(1)}};
  return s;
}

// ---- system assembly -------------------------------------------------------

static BigComplex qrat_to_bc(const exactalg::QRat& re, const exactalg::QRat& im, int prec) {
  BigFloat r(prec), i(prec);
  mpfr_set_q(r.raw(), re.get_mpq_t(), MPFR_RNDN);
  mpfr_set_q(i.raw(), im.get_mpq_t(), MPFR_RNDN);
  return {r, i};
}

std::vector<BigComplex> PolySystem::branch_values() const {
  std::vector<BigComplex> vals;
  BigComplex one(1, prec);
  for (const auto& b : shape.branches) {
    switch (b.loc) {
      case BranchLoc::Zero: vals.push_back(BigComplex(prec)); break;
      case BranchLoc::Fixed: vals.push_back(qrat_to_bc(b.fixed_re, b.fixed_im, prec)); break;
      case BranchLoc::OnePlusSqrtLambda: vals.push_back(one + sqrt_lambda); break;
      case BranchLoc::OneMinusSqrtLambda: vals.push_back(one - sqrt_lambda); break;
      case BranchLoc::Infinity: vals.push_back(BigComplex(prec)); break;  // placeholder
    }
  }
  return vals;
}

PolySystem assemble_system(const RamShape& shape, const BigComplex& lambda,
                           const BigComplex* sqrt_lambda) {
  shape.validate();
  if (shape.unknown_count() != shape.equation_count())
    throw ShapeInvalid("system is not square: " + std::to_string(shape.unknown_count()) +
                       " unknowns vs " + std::to_string(shape.equation_count()) +
                       " equations");
  PolySystem s;
  s.shape = shape;
  s.prec = lambda.prec();
  s.lambda = lambda;
  s.sqrt_lambda = sqrt_lambda ? *sqrt_lambda : bc_sqrt(lambda);
  s.n_unknowns = shape.unknown_count();
  return s;
}

// rebuild the per-slot monic factors (with pinned coefficients) from the
// packed unknown vector; x[0] is c0
static std::vector<CPoly> unpack_factors(const PolySystem& s,
                                         const std::vector<BigComplex>& x,
                                         const std::vector<FactorSlot>& slots) {
  std::vector<CPoly> out;
  std::size_t pos = 1;
  for (const auto& slot : slots) {
    std::vector<BigComplex> c(static_cast<std::size_t>(slot.deg) + 1, BigComplex(s.prec));
    c[static_cast<std::size_t>(slot.deg)] = BigComplex(1, s.prec);
    int top = slot.deg - 1;
    for (int i = 0; i < slot.deg; ++i) {
      if (slot.traced && i == top) {
        c[static_cast<std::size_t>(i)] = qrat_to_bc(-slot.trace, exactalg::QRat(0), s.prec);
      } else {
        c[static_cast<std::size_t>(i)] = x[pos++];
      }
    }
    out.emplace_back(std::move(c));
  }
  return out;
}

// product of factor^mult over a branch's slots; empty product = 1
static CPoly branch_product(const PolySystem& s, const std::vector<FactorSlot>& slots,
                            const std::vector<CPoly>& polys, int branch) {
  CPoly prod(std::vector<BigComplex>{BigComplex(1, s.prec)});
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].branch != branch) continue;
    for (int k = 0; k < slots[i].mult; ++k) prod = cp_mul(prod, polys[i]);
  }
  return prod;
}

std::vector<BigComplex> PolySystem::residual(const std::vector<BigComplex>& x) const {
  auto slots = factor_slots(shape);
  auto polys = unpack_factors(*this, x, slots);
  const BigComplex& c0 = x[0];
  auto vals = branch_values();

  int inf_branch = -1, first = -1;
  for (int b = 0; b < static_cast<int>(shape.branches.size()); ++b) {
    if (shape.branches[b].loc == BranchLoc::Infinity) inf_branch = b;
    else if (first < 0) first = b;
  }
  CPoly D = branch_product(*this, slots, polys, inf_branch);
  CPoly N0 = branch_product(*this, slots, polys, first);

  std::vector<BigComplex> out;
  for (int b = 0; b < static_cast<int>(shape.branches.size()); ++b) {
    if (b == inf_branch || b == first) continue;
    CPoly Nb = branch_product(*this, slots, polys, b);
    // c0 N0 + (b0 - bb) D - c0 Nb = 0
    CPoly e = cp_add(cp_scale(cp_sub(N0, Nb), c0), cp_scale(D, vals[first] - vals[b]));
    for (int i = 0; i < shape.degree; ++i)
      out.push_back(i <= e.degree() ? e.c[static_cast<std::size_t>(i)] : BigComplex(prec));
  }
  return out;
}

std::vector<std::vector<BigComplex>> PolySystem::jacobian(
    const std::vector<BigComplex>& x) const {
  auto slots = factor_slots(shape);
  auto polys = unpack_factors(*this, x, slots);
  const BigComplex& c0 = x[0];
  auto vals = branch_values();
  const int n = shape.degree;

  int inf_branch = -1, first = -1;
  for (int b = 0; b < static_cast<int>(shape.branches.size()); ++b) {
    if (shape.branches[b].loc == BranchLoc::Infinity) inf_branch = b;
    else if (first < 0) first = b;
  }
  CPoly D = branch_product(*this, slots, polys, inf_branch);
  CPoly N0 = branch_product(*this, slots, polys, first);
  std::vector<CPoly> Nb(shape.branches.size());
  for (int b = 0; b < static_cast<int>(shape.branches.size()); ++b)
    if (b != inf_branch) Nb[static_cast<std::size_t>(b)] = branch_product(*this, slots, polys, b);

  // per-slot partial: d(product)/d(coeff_i) = mult * (product / factor) * x^i
  std::vector<CPoly> slot_base(slots.size());
  for (std::size_t si = 0; si < slots.size(); ++si) {
    const CPoly& whole = slots[si].branch == inf_branch ? D : Nb[static_cast<std::size_t>(slots[si].branch)];
    slot_base[si] = cp_scale(cp_divmonic(whole, polys[si]),
                             BigComplex(static_cast<long>(slots[si].mult), prec));
  }

  std::vector<std::vector<BigComplex>> jac(
      static_cast<std::size_t>(n_unknowns),
      std::vector<BigComplex>(static_cast<std::size_t>(n_unknowns), BigComplex(prec)));

  int row0 = 0;
  for (int b = 0; b < static_cast<int>(shape.branches.size()); ++b) {
    if (b == inf_branch || b == first) continue;
    // equation block: c0 (N0 - Nb) + (b0 - bb) D
    auto put = [&](const CPoly& col, int unknown) {
      for (int i = 0; i < n; ++i)
        if (i <= col.degree())
          jac[static_cast<std::size_t>(row0 + i)][static_cast<std::size_t>(unknown)] =
              col.c[static_cast<std::size_t>(i)];
    };
    put(cp_sub(N0, Nb[static_cast<std::size_t>(b)]), 0);  // d/dc0
    std::size_t pos = 1;
    for (std::size_t si = 0; si < slots.size(); ++si) {
      CPoly col;
      if (slots[si].branch == first)
        col = cp_scale(slot_base[si], c0);
      else if (slots[si].branch == b)
        col = cp_scale(slot_base[si], -c0);
      else if (slots[si].branch == inf_branch)
        col = cp_scale(slot_base[si], vals[first] - vals[b]);
      int top = slots[si].deg - 1;
      for (int i = 0; i < slots[si].deg; ++i) {
        if (slots[si].traced && i == top) continue;
        if (!col.is_zero()) put(cp_shift(col, i), static_cast<int>(pos));
        ++pos;
      }
    }
    row0 += n;
  }
  return jac;
}

std::vector<BigComplex> pack_model(const CoverModel& m) {
  auto slots = factor_slots(m.shape);
  std::vector<BigComplex> x;
  x.push_back(m.c0);
  for (const auto& slot : slots) {
    auto it = m.factors.find({slot.branch, slot.mult});
    if (it == m.factors.end()) throw ShapeInvalid("model is missing a factor");
    const CPoly& f = it->second;
    int top = slot.deg - 1;
    for (int i = 0; i < slot.deg; ++i) {
      if (slot.traced && i == top) continue;
      x.push_back(i <= f.degree() ? f.c[static_cast<std::size_t>(i)] : BigComplex(m.prec));
    }
  }
  return x;
}

CoverModel unpack_model(const PolySystem& s, const std::vector<BigComplex>& x) {
  auto slots = factor_slots(s.shape);
  auto polys = unpack_factors(s, x, slots);
  CoverModel m;
  m.shape = s.shape;
  m.prec = s.prec;
  m.lambda = s.lambda;
  m.sqrt_lambda = s.sqrt_lambda;
  m.c0 = x[0];
  for (std::size_t i = 0; i < slots.size(); ++i)
    m.factors[{slots[i].branch, slots[i].mult}] = polys[i];
  return m;
}

std::vector<BigComplex> newton_solve(const PolySystem& s, std::vector<BigComplex> x0,
                                     const BigFloat* tol) {
  BigFloat t = tol ? *tol : bf_pow2(32 - s.prec, s.prec);
  return newton_generic([&s](const std::vector<BigComplex>& x) { return s.residual(x); },
                        [&s](const std::vector<BigComplex>& x) { return s.jacobian(x); },
                        std::move(x0), t);
}

// ---- continuation ----------------------------------------------------------

PathPlan loop_around(const BigComplex& center, double radius, const BigComplex& base,
                     int segments, int prec, bool counterclockwise) {
  PathPlan plan;
  BigComplex dir = base - center;
  BigFloat len = bc_abs(dir);
  BigComplex start = center + bc_scale(dir / BigComplex(len, BigFloat(prec)),
                                       BigFloat(radius, prec));
  plan.waypoints.push_back(base);
  BigFloat pi(prec);
  mpfr_const_pi(pi.raw(), MPFR_RNDN);
  for (int k = 0; k <= segments; ++k) {
    double ang = 2.0 * (counterclockwise ? 1.0 : -1.0) * k / segments;
    BigFloat theta = pi * BigFloat(ang, prec);
    BigFloat sn(prec), cs(prec);
    mpfr_sin_cos(sn.raw(), cs.raw(), theta.raw(), MPFR_RNDN);
    plan.waypoints.push_back(center + (start - center) * BigComplex(cs, sn));
  }
  plan.waypoints.push_back(base);
  return plan;
}

// continuous square root along the path: pick the sign closest to the previous
static BigComplex continue_sqrt(const BigComplex& lambda, const BigComplex& prev) {
  BigComplex s = bc_sqrt(lambda);
  if (bc_abs(s + prev) < bc_abs(s - prev)) return -s;
  return s;
}

CoverModel deform_lambda(const CoverModel& m, const PathPlan& plan) {
  if (plan.waypoints.empty()) return m;
  const int prec = m.prec;
  BigComplex lambda = m.lambda, sq = m.sqrt_lambda;
  std::vector<BigComplex> x = pack_model(m);

  std::vector<BigComplex> pts = plan.waypoints;
  for (std::size_t w = 0; w < pts.size(); ++w) {
    BigComplex target = pts[w];
    double t = 0.0, h = plan.max_step;
    while (t < 1.0) {
      double tn = std::min(1.0, t + h);
      BigComplex next = lambda + bc_scale(target - lambda, BigFloat((tn - t) / (1.0 - t), prec));
      BigComplex nsq = continue_sqrt(next, sq);
      try {
        PolySystem s = assemble_system(m.shape, next, &nsq);
        std::vector<BigComplex> xn = newton_solve(s, x);
        x = std::move(xn);
        lambda = next;
        sq = nsq;
        t = tn;
        h = std::min(h * 2.0, plan.max_step);
      } catch (const Diverged&) {
        h *= 0.5;
        if (h < plan.min_step) throw StepUnderflow();
      } catch (const SingularJacobian&) {
        h *= 0.5;
        if (h < plan.min_step) throw StepUnderflow();
      }
    }
  }
  PolySystem s = assemble_system(m.shape, lambda, &sq);
  return unpack_model(s, x);
}

// ---- fiber tracking --------------------------------------------------------

static BigComplex newton_1d(const CPoly& f, const CPoly& df, BigComplex z,
                            const BigFloat& tol) {
  const int prec = z.prec();
  auto converged = [&](const BigComplex& zv, const BigComplex& v) {
    return !(tol * (BigFloat(1.0, prec) + cp_bound(f, bc_abs(zv))) < bc_abs(v));
  };
  for (int i = 0; i < 60; ++i) {
    BigComplex v = cp_eval(f, z);
    if (converged(z, v)) return z;
    BigComplex d = cp_eval(df, z);
    if (bc_abs(d).is_zero()) throw Diverged("derivative vanished");
    z = z - v / d;
  }
  if (converged(z, cp_eval(f, z))) return z;
  throw Diverged("1-d newton stalled");
}

std::vector<BigComplex> track_fiber(const CPoly& num, const CPoly& den,
                                    const PathPlan& path, std::vector<BigComplex> fiber) {
  if (path.waypoints.size() < 2) return fiber;
  const int prec = prec_of(num, den);
  const BigFloat tol = bf_pow2(32 - prec, prec);
  const BigFloat close = bf_pow2(-prec / 2, prec);

  // per-point nearest-neighbor distances before the step
  auto neighbor_dist = [&](const std::vector<BigComplex>& f) {
    std::vector<BigFloat> nd(f.size(), BigFloat(1e300, prec));
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t j = i + 1; j < f.size(); ++j) {
        BigFloat d = bc_abs(f[i] - f[j]);
        if (d < nd[i]) nd[i] = d;
        if (d < nd[j]) nd[j] = d;
      }
    return nd;
  };

  BigComplex tcur = path.waypoints[0];
  for (std::size_t w = 1; w < path.waypoints.size(); ++w) {
    BigComplex target = path.waypoints[w];
    double t = 0.0, h = path.max_step;
    while (t < 1.0) {
      double tn = std::min(1.0, t + h);
      BigComplex tv = tcur + bc_scale(target - tcur, BigFloat((tn - t) / (1.0 - t), prec));
      CPoly f = cp_sub(num, cp_scale(den, tv));
      CPoly df = cp_derivative(f);
      std::vector<BigFloat> nd = neighbor_dist(fiber);
      for (const auto& d : nd)
        if (d < close) throw Collision();
      std::vector<BigComplex> next = fiber;
      bool ok = true;
      try {
        for (std::size_t i = 0; i < next.size() && ok; ++i) {
          next[i] = newton_1d(f, df, next[i], tol);
          // each point must move less than half its own clearance
          BigFloat motion = bc_abs(next[i] - fiber[i]);
          if (!(motion + motion < nd[i])) ok = false;
        }
      } catch (const Diverged&) {
        ok = false;
      }
      if (ok) {
        fiber = std::move(next);
        tcur = tv;
        t = tn;
        h = std::min(h * 2.0, path.max_step);
      } else {
        h *= 0.5;
        if (h < path.min_step) throw StepUnderflow();
      }
    }
  }
  return fiber;
}

std::vector<Perm> monodromy_tuple(const CPoly& num, const CPoly& den,
                                  const BigComplex& t0, const std::vector<PathPlan>& loops) {
  const int prec = prec_of(num, den);
  CPoly f0 = cp_sub(num, cp_scale(den, t0));
  std::vector<BigComplex> base = roots_all(f0);
  const int n = static_cast<int>(base.size());

  std::vector<Perm> out;
  for (const auto& loop : loops) {
    std::vector<BigComplex> end = track_fiber(num, den, loop, base);
    std::vector<int> img(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      int best = -1;
      BigFloat bd(prec);
      for (int j = 0; j < n; ++j) {
        BigFloat d = bc_abs(end[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(j)]);
        if (best < 0 || d < bd) {
          bd = d;
          best = j;
        }
      }
      if (used[static_cast<std::size_t>(best)]) throw Collision();
      used[static_cast<std::size_t>(best)] = true;
      img[static_cast<std::size_t>(i)] = best;
    }
    out.emplace_back(std::move(img));
  }
  return out;
}

// ---- matching --------------------------------------------------------------

Perm chi_bijection(const std::pair<Perm, Perm>& block_action,
                   const std::pair<Perm, Perm>& fiber_action) {
  const int n = block_action.first.degree();
  if (fiber_action.first.degree() != n) throw NotEquivalent();
  const Perm* a[2] = {&block_action.first, &block_action.second};
  const Perm* b[2] = {&fiber_action.first, &fiber_action.second};

  std::vector<Perm> found;
  for (int anchor = 0; anchor < n; ++anchor) {
    std::vector<int> sigma(static_cast<std::size_t>(n), -1);
    sigma[0] = anchor;
    std::queue<int> q;
    q.push(0);
    bool ok = true;
    while (!q.empty() && ok) {
      int i = q.front();
      q.pop();
      for (int k = 0; k < 2 && ok; ++k) {
        int ii = (*a[k])[i], jj = (*b[k])[sigma[static_cast<std::size_t>(i)]];
        if (sigma[static_cast<std::size_t>(ii)] < 0) {
          sigma[static_cast<std::size_t>(ii)] = jj;
          q.push(ii);
        } else if (sigma[static_cast<std::size_t>(ii)] != jj) {
          ok = false;
        }
      }
    }
    if (!ok) continue;
    // transitivity of the block action guarantees sigma is fully defined
    std::vector<bool> hit(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n && ok; ++i) {
      if (sigma[static_cast<std::size_t>(i)] < 0 || hit[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])])
        ok = false;
      else
        hit[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = true;
    }
    for (int i = 0; i < n && ok; ++i)
      for (int k = 0; k < 2; ++k)
        if (sigma[static_cast<std::size_t>((*a[k])[i])] !=
            (*b[k])[sigma[static_cast<std::size_t>(i)]])
          ok = false;
    if (ok) found.emplace_back(std::vector<int>(sigma));
  }
  if (found.empty()) throw NotEquivalent();
  if (found.size() > 1) throw NotUnique();
  return found[0];
}

LoopWord steer_to_tuple(const nielsen::OrbitTable& o, int current, int target) {
  if (!o.family) throw Unreachable();
  const int n = static_cast<int>(o.straight_size());
  if (current == target) return {};
  const Perm& x = (*o.family)[0];
  const Perm& y = (*o.family)[1];
  Perm xi = permgrp::inverse(x), yi = permgrp::inverse(y);
  const Perm* gens[4] = {&x, &xi, &y, &yi};
  const std::pair<int, int> letters[4] = {{0, 1}, {0, -1}, {1, 1}, {1, -1}};

  std::vector<int> prev(static_cast<std::size_t>(n), -1), via(static_cast<std::size_t>(n), -1);
  std::queue<int> q;
  q.push(current);
  prev[static_cast<std::size_t>(current)] = current;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (u == target) break;
    for (int g = 0; g < 4; ++g) {
      int v = (*gens[g])[u];
      if (prev[static_cast<std::size_t>(v)] >= 0) continue;
      prev[static_cast<std::size_t>(v)] = u;
      via[static_cast<std::size_t>(v)] = g;
      q.push(v);
    }
  }
  if (prev[static_cast<std::size_t>(target)] < 0) throw Unreachable();
  LoopWord word;
  for (int u = target; u != current; u = prev[static_cast<std::size_t>(u)])
    word.push_back(letters[via[static_cast<std::size_t>(u)]]);
  std::reverse(word.begin(), word.end());
  return word;
}

// ---- model maps and verification -------------------------------------------

std::pair<CPoly, CPoly> model_map(const CoverModel& m) {
  PolySystem s = assemble_system(m.shape, m.lambda, &m.sqrt_lambda);
  auto slots = factor_slots(m.shape);
  std::vector<BigComplex> x = pack_model(m);
  auto polys = unpack_factors(s, x, slots);
  int inf_branch = -1, first = -1;
  for (int b = 0; b < static_cast<int>(m.shape.branches.size()); ++b) {
    if (m.shape.branches[b].loc == BranchLoc::Infinity) inf_branch = b;
    else if (first < 0) first = b;
  }
  CPoly D = branch_product(s, slots, polys, inf_branch);
  CPoly N0 = branch_product(s, slots, polys, first);
  auto vals = s.branch_values();
  return {cp_add(cp_scale(N0, m.c0), cp_scale(D, vals[first])), D};
}

std::vector<Perm> model_monodromy(const CoverModel& m) {
  const int prec = m.prec;
  PolySystem s = assemble_system(m.shape, m.lambda, &m.sqrt_lambda);
  auto vals = s.branch_values();
  auto [num, den] = model_map(m);
  int inf_branch = -1;
  for (int b = 0; b < static_cast<int>(m.shape.branches.size()); ++b)
    if (m.shape.branches[b].loc == BranchLoc::Infinity) inf_branch = b;

  // base point away from every branch value, simple loops around each
  BigFloat spread(1.0, prec);
  for (int b = 0; b < static_cast<int>(m.shape.branches.size()); ++b)
    if (b != inf_branch) spread = bf_max(spread, bc_abs(vals[b]));
  BigComplex t0 = BigComplex(0.31, 1.0, prec) * BigComplex(spread, BigFloat(prec));

  std::vector<PathPlan> loops;
  for (int b = 0; b < static_cast<int>(m.shape.branches.size()); ++b) {
    if (b == inf_branch) continue;
    BigFloat nd(1e300, prec);
    for (int b2 = 0; b2 < static_cast<int>(m.shape.branches.size()); ++b2) {
      if (b2 == b || b2 == inf_branch) continue;
      BigFloat d = bc_abs(vals[b] - vals[b2]);
      if (d < nd) nd = d;
    }
    double radius = std::min(0.25 * nd.to_double(), 0.5);
    loops.push_back(loop_around(vals[b], radius, t0, 24, prec));
  }
  std::vector<Perm> perms = monodromy_tuple(num, den, t0, loops);
  Perm prod(m.shape.degree);
  for (const auto& g : perms) prod = permgrp::compose(prod, g);
  perms.push_back(permgrp::inverse(prod));
  return perms;
}

NumericReport verify_cover_numeric(const CoverModel& m, const nielsen::GenTuple* expected) {
  NumericReport rep;
  const int prec = m.prec;
  const BigFloat tol = bf_pow2(32 - prec, prec);
  auto add = [&rep](const std::string& name, bool ok) { rep.checks.emplace_back(name, ok); };

  PolySystem s = assemble_system(m.shape, m.lambda, &m.sqrt_lambda);
  std::vector<BigComplex> x = pack_model(m);
  BigFloat worst(prec);
  for (const auto& r : s.residual(x)) worst = bf_max(worst, bc_abs(r));
  rep.max_residual = worst.str(8);
  add("equation residuals", worst < tol);

  bool traces_ok = true;
  for (const auto& t : m.shape.traces) {
    auto slots = factor_slots(m.shape);
    for (const auto& slot : slots) {
      if (slot.branch != t.branch || slot.mult != t.mult) continue;
      auto it = m.factors.find({slot.branch, slot.mult});
      if (it == m.factors.end() || it->second.degree() != slot.deg) {
        traces_ok = false;
        continue;
      }
      BigComplex top = it->second.c[static_cast<std::size_t>(slot.deg - 1)];
      BigComplex want = qrat_to_bc(-t.value, exactalg::QRat(0), prec);
      traces_ok = traces_ok && (bc_abs(top - want) < tol);
    }
  }
  add("trace normalizations", traces_ok);

  if (expected) {
    bool mono_ok = false;
    try {
      std::vector<Perm> perms = model_monodromy(m);
      // compare up to simultaneous conjugation and loop orientation
      for (int orient = 0; orient < 2 && !mono_ok; ++orient) {
        std::vector<Perm> cand = perms;
        if (orient == 1)
          for (auto& g : cand) g = permgrp::inverse(g);
        mono_ok = permgrp::tuple_conjugator(cand, expected->perms).has_value();
      }
    } catch (const std::exception&) {
      mono_ok = false;
    }
    add("monodromy matches the generating tuple", mono_ok);
  }

  rep.passed = true;
  for (const auto& [nm, ok] : rep.checks) rep.passed = rep.passed && ok;
  return rep;
}

}  // namespace covfam::numcover
