#include "covfam/permgrp.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace covfam::permgrp {

Perm::Perm(int degree) : img_(degree) {
  std::iota(img_.begin(), img_.end(), 0);
}

Perm::Perm(std::vector<int> images) : img_(std::move(images)) {
  std::vector<char> seen(img_.size(), 0);
  for (int v : img_) {
    if (v < 0 || v >= degree() || seen[v])
      throw std::invalid_argument("image array is not a bijection");
    seen[v] = 1;
  }
}

bool Perm::is_identity() const {
  for (int p = 0; p < degree(); ++p)
    if (img_[p] != p) return false;
  return true;
}

std::string Perm::to_cycles() const {
  std::ostringstream os;
  std::vector<char> seen(img_.size(), 0);
  bool any = false;
  for (int p = 0; p < degree(); ++p) {
    if (seen[p] || img_[p] == p) continue;
    os << '(';
    int q = p;
    bool first = true;
    while (!seen[q]) {
      seen[q] = 1;
      if (!first) os << ',';
      os << q + 1;
      first = false;
      q = img_[q];
    }
    os << ')';
    any = true;
  }
  if (!any) os << "()";
  return os.str();
}

Perm Perm::from_cycles(int degree, const std::vector<std::vector<int>>& cycles) {
  std::vector<int> img(degree);
  std::iota(img.begin(), img.end(), 0);
  for (const auto& cyc : cycles) {
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      int from = cyc[i] - 1, to = cyc[(i + 1) % cyc.size()] - 1;
      if (from < 0 || from >= degree || to < 0 || to >= degree)
        throw std::invalid_argument("cycle point out of range");
      img[from] = to;
    }
  }
  return Perm(std::move(img));
}

Perm compose(const Perm& a, const Perm& b) {
  if (a.degree() != b.degree()) throw DegreeMismatch{};
  std::vector<int> img(a.degree());
  for (int p = 0; p < a.degree(); ++p) img[p] = b[a[p]];
  return Perm(std::move(img));
}

Perm inverse(const Perm& a) {
  std::vector<int> img(a.degree());
  for (int p = 0; p < a.degree(); ++p) img[a[p]] = p;
  return Perm(std::move(img));
}

Perm conjugate(const Perm& g, const Perm& h) {
  return compose(compose(inverse(h), g), h);
}

int CycleType::weight() const {
  int w = 0;
  for (auto [len, cnt] : parts) w += len * cnt;
  return w;
}

int CycleType::index() const {
  int w = 0;
  for (auto [len, cnt] : parts) w += (len - 1) * cnt;
  return w;
}

std::string CycleType::str() const {
  std::ostringstream os;
  bool first = true;
  for (auto [len, cnt] : parts) {
    if (!first) os << '.';
    os << len << '^' << cnt;
    first = false;
  }
  return os.str();
}

CycleType CycleType::parse(const std::string& s) {
  CycleType ct;
  std::istringstream is(s);
  std::string piece;
  while (std::getline(is, piece, '.')) {
    auto caret = piece.find('^');
    int len, cnt;
    if (caret == std::string::npos) {
      len = std::stoi(piece);
      cnt = 1;
    } else {
      len = std::stoi(piece.substr(0, caret));
      cnt = std::stoi(piece.substr(caret + 1));
    }
    if (len <= 0 || cnt <= 0) throw std::invalid_argument("bad cycle type: " + s);
    if (!ct.parts.empty() && ct.parts.back().first <= len)
      throw std::invalid_argument("cycle type lengths must strictly decrease: " + s);
    ct.parts.emplace_back(len, cnt);
  }
  if (ct.parts.empty()) throw std::invalid_argument("empty cycle type");
  return ct;
}

CycleType cycle_type(const Perm& a) {
  std::vector<char> seen(a.degree(), 0);
  std::map<int, int, std::greater<>> counts;
  for (int p = 0; p < a.degree(); ++p) {
    if (seen[p]) continue;
    int len = 0, q = p;
    while (!seen[q]) {
      seen[q] = 1;
      ++len;
      q = a[q];
    }
    counts[len]++;
  }
  CycleType ct;
  for (auto [len, cnt] : counts) ct.parts.emplace_back(len, cnt);
  return ct;
}

int perm_order(const Perm& a) {
  long ord = 1;
  for (auto [len, cnt] : cycle_type(a).parts) ord = std::lcm(ord, (long)len);
  return static_cast<int>(ord);
}

std::uint64_t rng_next(std::uint64_t& state) {
  state ^= state >> 12;
  state ^= state << 25;
  state ^= state >> 27;
  return state * 0x2545F4914F6CDD1DULL;
}

int rng_below(std::uint64_t& state, int n) {
  return static_cast<int>(rng_next(state) % static_cast<std::uint64_t>(n));
}

// ---------------------------------------------------------------------------
// Schreier-Sims

StabChain::StabChain(const std::vector<Perm>& gens) {
  if (gens.empty()) throw std::invalid_argument("empty generator list");
  degree_ = gens[0].degree();
  for (const auto& g : gens)
    if (g.degree() != degree_) throw DegreeMismatch{};
  for (const auto& g : gens) {
    Perm res;
    if (!sift(g, &res)) extend_level(0, res);
  }
  order_ = 1;
  for (const auto& L : levels_) order_ *= L.orbit.size();
}

void StabChain::rebuild_orbit(Level& L) {
  L.orbit.clear();
  L.transversal.assign(degree_, std::nullopt);
  L.orbit.push_back(L.base_point);
  L.transversal[L.base_point] = Perm(degree_);
  for (std::size_t i = 0; i < L.orbit.size(); ++i) {
    int p = L.orbit[i];
    for (const auto& g : L.gens) {
      int q = g[p];
      if (!L.transversal[q]) {
        L.transversal[q] = compose(*L.transversal[p], g);
        L.orbit.push_back(q);
      }
    }
  }
}

bool StabChain::sift(const Perm& g, Perm* residue_out) const {
  Perm h = g;
  for (const auto& L : levels_) {
    int q = h[L.base_point];
    if (!L.transversal[q]) {
      if (residue_out) *residue_out = h;
      return false;
    }
    h = compose(h, inverse(*L.transversal[q]));
  }
  if (residue_out) *residue_out = h;
  return h.is_identity();
}

void StabChain::extend_level(std::size_t lvl, const Perm& g) {
  if (lvl < levels_.size()) {
    // skip if the tail of the chain already represents g
    Perm h = g;
    bool stuck = false;
    for (std::size_t k = lvl; k < levels_.size(); ++k) {
      int r = h[levels_[k].base_point];
      if (!levels_[k].transversal[r]) {
        stuck = true;
        break;
      }
      h = compose(h, inverse(*levels_[k].transversal[r]));
    }
    if (!stuck && h.is_identity()) return;
  }
  if (lvl == levels_.size()) {
    // new level: base point is any point moved by g
    Level L;
    for (int p = 0; p < degree_; ++p)
      if (g[p] != p) {
        L.base_point = p;
        break;
      }
    levels_.push_back(std::move(L));
  }
  levels_[lvl].gens.push_back(g);
  rebuild_orbit(levels_[lvl]);
  // Close this level under Schreier generators. Deeper recursion may reallocate
  // levels_, so take copies instead of references into it.
  const std::vector<int> orbit = levels_[lvl].orbit;
  const std::vector<Perm> gens = levels_[lvl].gens;
  std::vector<std::optional<Perm>> transversal = levels_[lvl].transversal;
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    int p = orbit[i];
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
      const Perm& s = gens[gi];
      int q = s[p];
      Perm schreier = compose(compose(*transversal[p], s),
                              inverse(*transversal[q]));
      if (schreier.is_identity()) continue;
      // sift through deeper levels only
      Perm h = schreier;
      bool ok = true;
      std::size_t deep = lvl + 1;
      for (; deep < levels_.size(); ++deep) {
        int r = h[levels_[deep].base_point];
        if (!levels_[deep].transversal[r]) {
          ok = false;
          break;
        }
        h = compose(h, inverse(*levels_[deep].transversal[r]));
      }
      if (!ok || !h.is_identity()) extend_level(lvl + 1, h);
    }
  }
}

std::vector<int> StabChain::base() const {
  std::vector<int> b;
  for (const auto& L : levels_) b.push_back(L.base_point);
  return b;
}

bool StabChain::contains(const Perm& g) const {
  if (g.degree() != degree_) return false;
  return sift(g, nullptr);
}

Perm StabChain::random_element(std::uint64_t& rng_state) const {
  Perm g(degree_);
  for (const auto& L : levels_) {
    int pick = rng_below(rng_state, static_cast<int>(L.orbit.size()));
    g = compose(g, *L.transversal[L.orbit[pick]]);
  }
  return g;
}

std::vector<Perm> StabChain::first_stabilizer_gens() const {
  std::vector<Perm> out;
  if (levels_.empty()) return out;
  const Level& L = levels_[0];
  for (int p : L.orbit)
    for (const auto& s : L.gens) {
      Perm schreier =
          compose(compose(*L.transversal[p], s), inverse(*L.transversal[s[p]]));
      if (!schreier.is_identity()) out.push_back(std::move(schreier));
    }
  if (out.empty()) out.push_back(Perm(degree_));
  return out;
}

// ---------------------------------------------------------------------------
// orbits and transitivity

std::vector<int> orbit_of(const std::vector<Perm>& gens, int point) {
  std::vector<int> orb{point};
  int degree = gens.empty() ? point + 1 : gens[0].degree();
  std::vector<char> seen(degree, 0);
  seen[point] = 1;
  for (std::size_t i = 0; i < orb.size(); ++i)
    for (const auto& g : gens) {
      int q = g[orb[i]];
      if (!seen[q]) {
        seen[q] = 1;
        orb.push_back(q);
      }
    }
  std::sort(orb.begin(), orb.end());
  return orb;
}

std::vector<std::vector<int>> orbits(const std::vector<Perm>& gens,
                                     const std::vector<int>& points) {
  std::vector<std::vector<int>> out;
  std::vector<char> done;
  int maxp = 0;
  for (int p : points) maxp = std::max(maxp, p);
  done.assign(maxp + 1, 0);
  std::vector<char> wanted(maxp + 1, 0);
  for (int p : points) wanted[p] = 1;
  for (int p : points) {
    if (done[p]) continue;
    auto orb = orbit_of(gens, p);
    std::vector<int> restricted;
    for (int q : orb)
      if (q <= maxp && wanted[q]) {
        restricted.push_back(q);
        done[q] = 1;
      }
    out.push_back(std::move(restricted));
  }
  return out;
}

bool is_transitive(const std::vector<Perm>& gens) {
  if (gens.empty()) return false;
  return static_cast<int>(orbit_of(gens, 0).size()) == gens[0].degree();
}

bool is_two_transitive(const std::vector<Perm>& gens) {
  if (!is_transitive(gens)) return false;
  int n = gens[0].degree();
  if (n < 2) return false;
  // Schreier generators of the stabilizer of point 0
  std::vector<int> orb{0};
  std::vector<std::optional<Perm>> trans(n);
  trans[0] = Perm(n);
  for (std::size_t i = 0; i < orb.size(); ++i)
    for (const auto& g : gens) {
      int q = g[orb[i]];
      if (!trans[q]) {
        trans[q] = compose(*trans[orb[i]], g);
        orb.push_back(q);
      }
    }
  std::vector<Perm> stab;
  for (int p : orb)
    for (const auto& g : gens) {
      Perm s = compose(compose(*trans[p], g), inverse(*trans[g[p]]));
      if (!s.is_identity()) stab.push_back(std::move(s));
    }
  if (stab.empty()) return false;
  return static_cast<int>(orbit_of(stab, 1).size()) == n - 1;
}

// ---------------------------------------------------------------------------
// tuple conjugacy and canonical forms

static bool tuple_transitive(const Tuple& A) {
  return is_transitive(A);
}

std::optional<Perm> tuple_conjugator(const Tuple& A, const Tuple& B) {
  if (A.empty() || A.size() != B.size()) return std::nullopt;
  int n = A[0].degree();
  for (const auto& g : B)
    if (g.degree() != n) throw DegreeMismatch{};
  if (!tuple_transitive(A)) throw NotTransitive{};

  for (int target = 0; target < n; ++target) {
    // propagate h over the Schreier graph of <A> from h(0)=target
    std::vector<int> h(n, -1);
    h[0] = target;
    std::vector<int> queue{0};
    bool ok = true;
    for (std::size_t qi = 0; qi < queue.size() && ok; ++qi) {
      int p = queue[qi];
      for (std::size_t gi = 0; gi < A.size() && ok; ++gi) {
        int q = A[gi][p];
        int hq = B[gi][h[p]];
        if (h[q] == -1) {
          h[q] = hq;
          queue.push_back(q);
        } else if (h[q] != hq) {
          ok = false;
        }
      }
    }
    if (!ok) continue;
    std::vector<char> used(n, 0);
    for (int v : h) {
      if (v < 0 || used[v]) {
        ok = false;
        break;
      }
      used[v] = 1;
    }
    if (!ok) continue;
    Perm hp((std::vector<int>(h)));
    bool all = true;
    for (std::size_t gi = 0; gi < A.size(); ++gi)
      if (conjugate(A[gi], hp) != B[gi]) {
        all = false;
        break;
      }
    if (all) return hp;
  }
  return std::nullopt;
}

Tuple canonical_tuple(const Tuple& A) {
  if (A.empty()) return A;
  int n = A[0].degree();
  if (!tuple_transitive(A)) throw NotTransitive{};

  std::vector<int> best;  // concatenated image arrays of the best relabeling
  std::vector<int> label(n), relabeled;
  relabeled.reserve(static_cast<std::size_t>(n) * A.size());
  for (int root = 0; root < n; ++root) {
    // BFS relabeling: label[p] = discovery index, root discovered first
    std::fill(label.begin(), label.end(), -1);
    label[root] = 0;
    std::vector<int> queue{root};
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
      for (const auto& g : A) {
        int q = g[queue[qi]];
        if (label[q] == -1) {
          label[q] = static_cast<int>(queue.size());
          queue.push_back(q);
        }
      }
    relabeled.clear();
    for (const auto& g : A) {
      // image array of label . g . label^-1, appended
      std::size_t off = relabeled.size();
      relabeled.resize(off + n);
      for (int p = 0; p < n; ++p) relabeled[off + label[p]] = label[g[p]];
    }
    if (best.empty() || relabeled < best) best = relabeled;
  }
  Tuple out;
  for (std::size_t gi = 0; gi < A.size(); ++gi) {
    std::vector<int> img(best.begin() + gi * n, best.begin() + (gi + 1) * n);
    out.emplace_back(std::move(img));
  }
  return out;
}

// ---------------------------------------------------------------------------
// F2 matrices and the PSL6(2) model

MatF2 MatF2::identity() {
  MatF2 m;
  for (int i = 0; i < 6; ++i) m.rows[i] = static_cast<std::uint8_t>(1u << i);
  return m;
}

MatF2 matf2_mul(const MatF2& a, const MatF2& b) {
  // (ab)(v) = a(b(v)); rows are functionals: row i of product is
  // row-vector a.rows[i] times matrix b.
  MatF2 out;
  for (int i = 0; i < 6; ++i) {
    std::uint8_t acc = 0;
    for (int j = 0; j < 6; ++j)
      if (a.rows[i] & (1u << j)) acc ^= b.rows[j];
    out.rows[i] = acc;
  }
  return out;
}

std::uint8_t matf2_apply(const MatF2& m, std::uint8_t v) {
  std::uint8_t out = 0;
  for (int i = 0; i < 6; ++i)
    if (__builtin_popcount(m.rows[i] & v) & 1) out |= (1u << i);
  return out;
}

int matf2_rank(const MatF2& a) {
  std::array<std::uint8_t, 6> rows = a.rows;
  int rank = 0;
  for (int col = 0; col < 6; ++col) {
    int pivot = -1;
    for (int r = rank; r < 6; ++r)
      if (rows[r] & (1u << col)) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (int r = 0; r < 6; ++r)
      if (r != rank && (rows[r] & (1u << col))) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

std::optional<MatF2> matf2_inverse(const MatF2& a) {
  std::array<std::uint8_t, 6> rows = a.rows;
  std::array<std::uint8_t, 6> inv = MatF2::identity().rows;
  for (int col = 0; col < 6; ++col) {
    int pivot = -1;
    for (int r = col; r < 6; ++r)
      if (rows[r] & (1u << col)) {
        pivot = r;
        break;
      }
    if (pivot < 0) return std::nullopt;
    std::swap(rows[col], rows[pivot]);
    std::swap(inv[col], inv[pivot]);
    for (int r = 0; r < 6; ++r)
      if (r != col && (rows[r] & (1u << col))) {
        rows[r] ^= rows[col];
        inv[r] ^= inv[col];
      }
  }
  MatF2 out;
  out.rows = inv;
  return out;
}

Perm matf2_to_perm(const MatF2& m) {
  std::vector<int> img(63);
  for (int p = 0; p < 63; ++p) {
    std::uint8_t v = static_cast<std::uint8_t>(p + 1);
    std::uint8_t w = matf2_apply(m, v);
    if (w == 0) throw std::invalid_argument("singular matrix has no point action");
    img[p] = w - 1;
  }
  return Perm(std::move(img));
}

Psl62Model psl62_generators() {
  // transvection e1 -> e1, e2 -> e1+e2 (as map on coordinates: row picture)
  MatF2 t = MatF2::identity();
  t.rows[0] = 0b000011;  // new coordinate 1 = c1 + c2
  // basis 6-cycle e1->e2->...->e6->e1; coordinates shift cyclically
  MatF2 c;
  for (int i = 0; i < 6; ++i) c.rows[i] = static_cast<std::uint8_t>(1u << ((i + 5) % 6));
  Psl62Model model;
  model.mats = {t, c};
  model.perms = {matf2_to_perm(t), matf2_to_perm(c)};
  return model;
}

Perm class_rep(const StabChain& chain, const CycleType& ct, std::uint64_t seed,
               long budget) {
  std::uint64_t state = seed ? seed : 0x9E3779B97F4A7C15ULL;
  long k = 1;
  for (const auto& [len, mult] : ct.parts) k = std::lcm(k, static_cast<long>(len));
  for (long i = 0; i < budget; ++i) {
    Perm g = chain.random_element(state);
    if (cycle_type(g) == ct) return g;
    // power a random element into the target order; catches classes too small
    // to hit by uniform sampling
    long m = perm_order(g);
    if (m > k && m % k == 0) {
      Perm h = g;
      for (long j = 1; j < m / k; ++j) h = compose(h, g);
      if (cycle_type(h) == ct) return h;
    }
  }
  throw NotFound("no element of cycle type " + ct.str() + " found within budget");
}

int distinguished_fixed_point(const Perm& g, const MatF2& m) {
  if (matf2_to_perm(m) != g)
    throw std::invalid_argument("matrix does not induce the given permutation");
  MatF2 n = m;
  for (int i = 0; i < 6; ++i) n.rows[i] ^= static_cast<std::uint8_t>(1u << i);
  if (matf2_rank(n) != 1)
    throw RankMismatch("rank(M+I) != 1; element is not a transvection");
  MatF2 sq = matf2_mul(n, n);
  for (int i = 0; i < 6; ++i)
    if (sq.rows[i]) throw RankMismatch("(M+I)^2 != 0");
  // the image of (M+I) is spanned by one nonzero vector
  for (int v = 1; v < 64; ++v) {
    std::uint8_t w = matf2_apply(n, static_cast<std::uint8_t>(v));
    if (w != 0) {
      int point = w - 1;
      if (g[point] != point)
        throw RankMismatch("distinguished vector is not fixed by g");
      return point;
    }
  }
  throw RankMismatch("M+I is zero");
}

bool identify_psl62(const std::vector<Perm>& gens) {
  if (gens.empty() || gens[0].degree() != 63) return false;
  StabChain chain(gens);
  return chain.order() == kPsl62Order && is_two_transitive(gens);
}

std::vector<Perm> psl62_hyperplane_stabilizer() {
  // hyperplane W = {v : bit 5 clear}; stabilizer = block matrices
  // [[A, b], [0, 1]] with A in GL5(2)
  std::vector<MatF2> mats;
  MatF2 t = MatF2::identity();
  t.rows[0] = 0b000011;  // GL5 transvection embedded
  mats.push_back(t);
  MatF2 c = MatF2::identity();
  for (int i = 0; i < 5; ++i) c.rows[i] = static_cast<std::uint8_t>(1u << ((i + 4) % 5));
  c.rows[5] = 0b100000;
  mats.push_back(c);
  MatF2 b = MatF2::identity();
  b.rows[0] = 0b100001;  // adds coordinate 6 into coordinate 1
  mats.push_back(b);
  std::vector<Perm> out;
  for (const auto& m : mats) out.push_back(matf2_to_perm(m));
  return out;
}

}  // namespace covfam::permgrp
