#include "covfam/reconstruct.hpp"

#include <algorithm>

namespace covfam::reconstruct {

namespace {

// exact value of a BigFloat as a rational
mpq_class bf_to_mpq(const BigFloat& x) {
  if (x.is_zero()) return 0;
  mpz_class m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x.raw());
  mpq_class q(m);
  if (e >= 0) {
    mpz_mul_2exp(q.get_num_mpz_t(), q.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  q.canonicalize();
  return q;
}

mpq_class pow2q(long e) {
  mpq_class q(1);
  if (e >= 0)
    mpz_mul_2exp(q.get_num_mpz_t(), q.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
  else
    mpz_mul_2exp(q.get_den_mpz_t(), q.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  return q;
}

mpz_class round_nearest(const mpq_class& x) {
  mpq_class shifted = x + mpq_class(1, 2);
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  return r;
}

}  // namespace

std::optional<QRat> recognize_rational(const BigComplex& x, const mpz_class& height_bound) {
  const int prec = x.prec();
  mpq_class threshold = pow2q(-(prec / 2));
  if (abs(bf_to_mpq(x.im)) * 2 > threshold) return std::nullopt;

  mpq_class target = bf_to_mpq(x.re);
  // continued-fraction convergents of the exact dyadic value
  mpz_class p_prev = 0, p_curr = 1, q_prev = 1, q_curr = 0;  // p/q of k-2, k-1
  mpq_class rem = target;
  for (int iter = 0; iter < 10000; ++iter) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rem.get_num_mpz_t(), rem.get_den_mpz_t());
    mpz_class p = a * p_curr + p_prev;
    mpz_class q = a * q_curr + q_prev;
    if (q > height_bound) return std::nullopt;
    mpq_class cand(p, q);
    cand.canonicalize();
    if (abs(target - cand) * 2 < threshold && abs(cand.get_num()) <= height_bound)
      return cand;
    mpq_class frac = rem - mpq_class(a);
    if (frac == 0) return std::nullopt;  // exact but failed the height test above
    rem = 1 / frac;
    p_prev = p_curr;
    p_curr = p;
    q_prev = q_curr;
    q_curr = q;
  }
  return std::nullopt;
}

std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> b) {
  const std::size_t n = b.size();
  if (n < 2) return b;
  auto dot = [](const std::vector<mpz_class>& u, const std::vector<mpz_class>& v) {
    mpz_class s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
  };

  std::vector<std::vector<mpq_class>> mu(n, std::vector<mpq_class>(n));
  std::vector<mpq_class> norm(n);  // squared norms of the Gram-Schmidt vectors
  auto gso = [&] {
    std::vector<std::vector<mpq_class>> star(n, std::vector<mpq_class>(b[0].size()));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < b[i].size(); ++c) star[i][c] = mpq_class(b[i][c]);
      for (std::size_t j = 0; j < i; ++j) {
        mpq_class num = 0;
        for (std::size_t c = 0; c < b[i].size(); ++c) num += mpq_class(b[i][c]) * star[j][c];
        mu[i][j] = norm[j] == 0 ? mpq_class(0) : num / norm[j];
        for (std::size_t c = 0; c < b[i].size(); ++c) star[i][c] -= mu[i][j] * star[j][c];
      }
      norm[i] = 0;
      for (std::size_t c = 0; c < b[i].size(); ++c) norm[i] += star[i][c] * star[i][c];
    }
  };

  gso();
  std::size_t k = 1;
  int guard = 0;
  while (k < n && ++guard < 100000) {
    for (std::size_t j = k; j-- > 0;) {
      mpz_class r = round_nearest(mu[k][j]);
      if (r != 0) {
        for (std::size_t c = 0; c < b[k].size(); ++c) b[k][c] -= r * b[j][c];
        gso();
      }
    }
    // Lovasz condition with delta = 3/4
    if (norm[k] >= (mpq_class(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * norm[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gso();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  std::sort(b.begin(), b.end(), [&](const auto& u, const auto& v) { return dot(u, u) < dot(v, v); });
  return b;
}

std::optional<QuadElem> recognize_quadratic(const BigComplex& x, long d,
                                            const mpz_class& height_bound) {
  if (d == 0 || d == 1) return std::nullopt;
  if (exactalg::squarefree_part(QRat(d)) != d) return std::nullopt;
  const int prec = x.prec();

  if (d < 0) {
    BigFloat root = numcover::bf_sqrt(BigFloat(static_cast<long>(-d), prec));
    auto a = recognize_rational(BigComplex(x.re, BigFloat(prec)), height_bound);
    auto bq = recognize_rational(BigComplex(x.im / root, BigFloat(prec)), height_bound);
    if (!a || !bq) return std::nullopt;
    return QuadElem(*a, *bq, d);
  }

  mpq_class threshold = pow2q(-(prec / 2));
  if (abs(bf_to_mpq(x.im)) * 2 > threshold) return std::nullopt;
  BigFloat root = numcover::bf_sqrt(BigFloat(d, prec));

  // integer relation c1 + c2 sqrt(d) + c3 x ~ 0 via a scaled 3-dim lattice
  mpq_class scale = pow2q(prec - 16);
  std::vector<std::vector<mpz_class>> basis = {
      {1, 0, 0, round_nearest(scale)},
      {0, 1, 0, round_nearest(scale * bf_to_mpq(root))},
      {0, 0, 1, round_nearest(scale * bf_to_mpq(x.re))}};
  for (const auto& row : lll_reduce(std::move(basis))) {
    if (row[2] == 0) continue;
    mpq_class a(-row[0], row[2]), b(-row[1], row[2]);
    a.canonicalize();
    b.canonicalize();
    if (abs(a.get_num()) > height_bound || a.get_den() > height_bound) continue;
    if (abs(b.get_num()) > height_bound || b.get_den() > height_bound) continue;
    BigFloat approx(prec);
    mpfr_set_q(approx.raw(), a.get_mpq_t(), MPFR_RNDN);
    BigFloat bpart(prec);
    mpfr_set_q(bpart.raw(), b.get_mpq_t(), MPFR_RNDN);
    approx = approx + bpart * root;
    if (abs(bf_to_mpq(x.re - approx)) * 2 < threshold) return QuadElem(a, b, d);
  }
  return std::nullopt;
}

std::pair<std::vector<BigComplex>, std::vector<BigComplex>> split_even_odd(
    const Sample& plus, const Sample& minus) {
  if (plus.mu != minus.mu) throw std::invalid_argument("samples have different mu");
  if (plus.coeffs.size() != minus.coeffs.size())
    throw std::invalid_argument("samples track different coefficient counts");
  const int prec = plus.yval.prec();
  BigFloat tol = numcover::bf_pow2(-(prec / 2), prec);
  if (numcover::bc_abs(plus.yval) < tol) throw YCollision();
  if (tol + tol < numcover::bc_abs(plus.yval + minus.yval) / numcover::bc_abs(plus.yval))
    throw std::invalid_argument("yval signs are not opposite");

  std::vector<BigComplex> h1, h2;
  BigComplex half(0.5, 0.0, prec);
  BigComplex two_y = plus.yval + plus.yval;
  for (std::size_t i = 0; i < plus.coeffs.size(); ++i) {
    h1.push_back((plus.coeffs[i] + minus.coeffs[i]) * half);
    h2.push_back((plus.coeffs[i] - minus.coeffs[i]) / two_y);
  }
  return {std::move(h1), std::move(h2)};
}

std::optional<RatFun> fit_ratfun(const std::vector<std::pair<QRat, QRat>>& raw_points,
                                 int dn, int dd) {
  const int unknowns = dn + 1 + dd + 1;  // numerator coeffs, then d0..d_dd
  if (static_cast<int>(raw_points.size()) < dn + dd + 2) return std::nullopt;
  // exact comparisons below need canonical rationals
  std::vector<std::pair<QRat, QRat>> points = raw_points;
  for (auto& [x, y] : points) {
    x.canonicalize();
    y.canonicalize();
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].first == points[j].first)
        throw std::invalid_argument("duplicate abscissae");

  // homogeneous system N(x) - y D(x) = 0; solutions form the null space
  std::vector<std::vector<mpq_class>> rows;
  for (const auto& [x, y] : points) {
    std::vector<mpq_class> row(static_cast<std::size_t>(unknowns));
    mpq_class pw = 1;
    for (int i = 0; i <= dn; ++i) {
      row[static_cast<std::size_t>(i)] = pw;
      pw *= x;
    }
    pw = 1;
    for (int j = 0; j <= dd; ++j) {
      row[static_cast<std::size_t>(dn + 1 + j)] = -y * pw;
      pw *= x;
    }
    rows.push_back(std::move(row));
  }

  // exact reduced row echelon form
  std::size_t lead = 0;
  std::vector<int> pivot_of_col(static_cast<std::size_t>(unknowns), -1);
  for (int col = 0; col < unknowns && lead < rows.size(); ++col) {
    std::size_t piv = lead;
    while (piv < rows.size() && rows[piv][static_cast<std::size_t>(col)] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[lead], rows[piv]);
    mpq_class inv = 1 / rows[lead][static_cast<std::size_t>(col)];
    for (auto& v : rows[lead]) v *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == lead || rows[r][static_cast<std::size_t>(col)] == 0) continue;
      mpq_class f = rows[r][static_cast<std::size_t>(col)];
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        rows[r][c] -= f * rows[lead][c];
    }
    pivot_of_col[static_cast<std::size_t>(col)] = static_cast<int>(lead);
    ++lead;
  }

  // each free column yields a null vector; try them until one validates
  for (int fc = 0; fc < unknowns; ++fc) {
    if (pivot_of_col[static_cast<std::size_t>(fc)] >= 0) continue;
    std::vector<QRat> sol(static_cast<std::size_t>(unknowns), QRat(0));
    sol[static_cast<std::size_t>(fc)] = 1;
    for (int col = 0; col < unknowns; ++col) {
      int pr = pivot_of_col[static_cast<std::size_t>(col)];
      if (pr >= 0)
        sol[static_cast<std::size_t>(col)] =
            -rows[static_cast<std::size_t>(pr)][static_cast<std::size_t>(fc)];
    }
    QPoly num(std::vector<QRat>(sol.begin(), sol.begin() + dn + 1));
    QPoly den(std::vector<QRat>(sol.begin() + dn + 1, sol.end()));
    if (den.is_zero()) continue;

    QPoly g = exactalg::poly_gcd(num, den);
    if (g.degree() > 0) {
      num = exactalg::divmod(num, g).first;
      den = exactalg::divmod(den, g).first;
    }
    QRat lc_inv = 1 / den.lc();
    num = exactalg::scale(num, lc_inv);
    den = exactalg::scale(den, lc_inv);

    bool ok = true;
    for (const auto& [x, y] : points) {
      QRat dv = exactalg::eval(den, x);
      if (dv == 0 || exactalg::eval(num, x) != y * dv) {
        ok = false;
        break;
      }
    }
    if (ok) return RatFun{std::move(num), std::move(den)};
  }
  return std::nullopt;
}

}  // namespace covfam::reconstruct
