#include "covfam/nielsen.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace covfam::nielsen {

using permgrp::compose;
using permgrp::conjugate;
using permgrp::cycle_type;
using permgrp::inverse;
using permgrp::is_transitive;
using permgrp::is_two_transitive;

void ClassVector::validate() const {
  if (classes.size() < 3)
    throw std::invalid_argument("class vector needs at least 3 classes");
  for (const auto& ct : classes)
    if (ct.weight() != degree)
      throw std::invalid_argument("cycle type " + ct.str() +
                                  " does not sum to the degree");
}

void GenTuple::check_invariants() const {
  Perm prod(degree);
  for (const auto& g : perms) prod = compose(prod, g);
  if (!prod.is_identity())
    throw std::invalid_argument("tuple product is not the identity");
  for (std::size_t i = 0; i < perms.size(); ++i)
    if (cycle_type(perms[i]) != classvector.classes[i])
      throw std::invalid_argument("tuple entry has wrong cycle type");
  if (verified) {
    StabChain chain(perms);
    if (chain.order() != classvector.group_order)
      throw std::invalid_argument("tuple does not generate the target group");
  }
}

std::string word_str(const BraidWord& w) {
  std::ostringstream os;
  if (w.empty()) return "e";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << '.';
    os << 'Q' << w[i].index;
    if (w[i].sign < 0) os << '\'';
  }
  return os.str();
}

int rh_genus(int degree, const std::vector<CycleType>& types) {
  int ind = 0;
  for (const auto& t : types) {
    if (t.weight() != degree)
      throw std::invalid_argument("cycle type does not sum to the degree");
    ind += t.index();
  }
  int twog = ind - 2 * degree + 2;  // 2g
  if (twog % 2 != 0 || twog < 0)
    throw ParityError("Riemann-Hurwitz count gives no nonnegative genus: 2g = " +
                      std::to_string(twog));
  return twog / 2;
}

GenTuple search_tuple(const ClassVector& cv, const GroupCtx& group,
                      std::uint64_t seed, long budget) {
  cv.validate();
  if (cv.classes.size() != 4)
    throw std::invalid_argument("search_tuple expects a length-4 class vector");
  std::uint64_t state = seed ? seed : 1;

  Perm s1 = permgrp::class_rep(group.chain, cv.classes[0], permgrp::rng_next(state));
  Perm rep2 = permgrp::class_rep(group.chain, cv.classes[1], permgrp::rng_next(state));
  Perm rep3 = permgrp::class_rep(group.chain, cv.classes[2], permgrp::rng_next(state));

  for (long trial = 0; trial < budget; ++trial) {
    Perm s2 = conjugate(rep2, group.chain.random_element(state));
    Perm s3 = conjugate(rep3, group.chain.random_element(state));
    Perm s4 = inverse(compose(compose(s1, s2), s3));
    if (cycle_type(s4) != cv.classes[3]) continue;
    std::vector<Perm> perms{s1, s2, s3, s4};
    if (!is_transitive(perms)) continue;
    StabChain sub(perms);
    if (sub.order() != cv.group_order) continue;
    GenTuple t;
    t.degree = cv.degree;
    t.perms = std::move(perms);
    t.classvector = cv;
    t.verified = true;
    return t;
  }
  throw BudgetExhausted("no generating tuple found in " + std::to_string(budget) +
                        " trials");
}

GenTuple braid_move(const GenTuple& t, int i, int sign) {
  int k = static_cast<int>(t.perms.size());
  if (i < 1 || i >= k) throw IndexOutOfRange{};
  GenTuple out = t;
  const Perm& a = t.perms[i - 1];
  const Perm& b = t.perms[i];
  if (sign >= 0) {
    out.perms[i - 1] = b;
    out.perms[i] = conjugate(a, b);  // b^-1 a b
  } else {
    out.perms[i - 1] = compose(compose(a, b), inverse(a));  // a b a^-1
    out.perms[i] = a;
  }
  std::swap(out.classvector.classes[i - 1], out.classvector.classes[i]);
  return out;
}

int OrbitTable::find(const std::vector<Perm>& canonical) const {
  for (std::size_t i = 0; i < tuples.size(); ++i)
    if (tuples[i] == canonical) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<int> tuple_key(const std::vector<Perm>& t) {
  std::vector<int> key;
  for (const auto& g : t)
    key.insert(key.end(), g.images().begin(), g.images().end());
  return key;
}

std::vector<Perm> apply_q(const std::vector<Perm>& t, int i, int sign) {
  std::vector<Perm> out = t;
  const Perm& a = t[i - 1];
  const Perm& b = t[i];
  if (sign >= 0) {
    out[i - 1] = b;
    out[i] = conjugate(a, b);
  } else {
    out[i - 1] = compose(compose(a, b), inverse(a));
    out[i] = a;
  }
  return out;
}

bool layout_is_straight(const std::vector<Perm>& t, const ClassVector& cv) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (cycle_type(t[i]) != cv.classes[i]) return false;
  return true;
}

}  // namespace

OrbitTable braid_orbit(const GenTuple& t) {
  t.check_invariants();
  const int k = static_cast<int>(t.perms.size());
  OrbitTable table;
  table.classvector = t.classvector;

  std::map<std::vector<int>, int> index;
  auto canon0 = permgrp::canonical_tuple(t.perms);
  table.tuples.push_back(canon0);
  index.emplace(tuple_key(canon0), 0);

  // BFS closure under Q_1^± .. Q_{k-1}^±
  for (std::size_t head = 0; head < table.tuples.size(); ++head) {
    for (int i = 1; i < k; ++i)
      for (int sign : {+1, -1}) {
        auto img = permgrp::canonical_tuple(apply_q(table.tuples[head], i, sign));
        auto key = tuple_key(img);
        auto [it, inserted] = index.emplace(std::move(key),
                                            static_cast<int>(table.tuples.size()));
        if (inserted) table.tuples.push_back(std::move(img));
      }
  }

  const int m = static_cast<int>(table.tuples.size());
  table.qmove.assign(2 * (k - 1), std::vector<int>(m, -1));
  for (int idx = 0; idx < m; ++idx)
    for (int i = 1; i < k; ++i)
      for (int sign : {+1, -1}) {
        auto img = permgrp::canonical_tuple(apply_q(table.tuples[idx], i, sign));
        auto it = index.find(tuple_key(img));
        if (it == index.end()) throw EscapesOrbit{};
        table.qmove[2 * (i - 1) + (sign < 0 ? 1 : 0)][idx] = it->second;
      }

  table.straight_rank.assign(m, -1);
  for (int idx = 0; idx < m; ++idx)
    if (layout_is_straight(table.tuples[idx], t.classvector)) {
      table.straight_rank[idx] = static_cast<int>(table.straight.size());
      table.straight.push_back(idx);
    }
  return table;
}

namespace {

// full-index move map of a word (identity-initialized, composed letterwise)
std::vector<int> word_move(const OrbitTable& o, const BraidWord& w) {
  const int m = static_cast<int>(o.tuples.size());
  std::vector<int> map(m);
  for (int i = 0; i < m; ++i) map[i] = i;
  for (const auto& letter : w) {
    const auto& q = o.qmove[2 * (letter.index - 1) + (letter.sign < 0 ? 1 : 0)];
    for (int i = 0; i < m; ++i) map[i] = q[map[i]];
  }
  return map;
}

std::optional<Perm> restrict_to_straight(const OrbitTable& o,
                                         const std::vector<int>& full_map) {
  std::vector<int> img(o.straight.size());
  for (std::size_t r = 0; r < o.straight.size(); ++r) {
    int to = full_map[o.straight[r]];
    int rank = o.straight_rank[to];
    if (rank < 0) return std::nullopt;
    img[r] = rank;
  }
  return Perm(std::move(img));
}

}  // namespace

Perm action_of_word(const OrbitTable& o, const BraidWord& w) {
  for (const auto& letter : w)
    if (letter.index < 1 ||
        2 * (letter.index - 1) >= static_cast<int>(o.qmove.size()))
      throw IndexOutOfRange{};
  auto restricted = restrict_to_straight(o, word_move(o, w));
  if (!restricted) throw EscapesOrbit{};
  return *restricted;
}

FamilyWords find_family_words(const OrbitTable& o,
                              const std::array<CycleType, 3>& targets,
                              int maxlen) {
  const int letters = static_cast<int>(o.qmove.size());
  const int m = static_cast<int>(o.tuples.size());

  // candidate straight actions per target type, first word wins
  std::vector<std::pair<Perm, BraidWord>> cand_x, cand_z;
  std::map<std::vector<int>, BraidWord> by_perm;  // straight images -> word

  auto classify = [&](const std::vector<int>& full_map, const BraidWord& w) {
    auto rp = restrict_to_straight(o, full_map);
    if (!rp) return;
    auto [it, fresh] = by_perm.try_emplace(rp->images(), w);
    if (!fresh) return;  // same straight action seen with an earlier word
    CycleType ct = cycle_type(*rp);
    if (ct == targets[0]) cand_x.emplace_back(*rp, w);
    if (ct == targets[2]) cand_z.emplace_back(*rp, w);
  };

  // iterative deepening keeps the shortest-then-lex tie-break: leaves of each
  // depth are visited in lex order before any longer word
  std::vector<int> id(m);
  for (int i = 0; i < m; ++i) id[i] = i;
  BraidWord word;
  std::function<void(const std::vector<int>&, int)> dfs =
      [&](const std::vector<int>& map, int remaining) {
        if (remaining == 0) {
          classify(map, word);
          return;
        }
        std::vector<int> ext(m);
        for (int l = 0; l < letters; ++l) {
          const auto& q = o.qmove[l];
          for (int i = 0; i < m; ++i) ext[i] = q[map[i]];
          word.push_back({l / 2 + 1, l % 2 == 0 ? +1 : -1});
          dfs(ext, remaining - 1);
          word.pop_back();
        }
      };
  for (int len = 0; len <= maxlen; ++len) dfs(id, len);

  FamilyWords result;
  bool have = false;
  for (const auto& [x, w0] : cand_x)
    for (const auto& [z, winf] : cand_z) {
      Perm y = compose(inverse(x), inverse(z));
      if (cycle_type(y) != targets[1]) continue;
      auto it = by_perm.find(y.images());
      if (it == by_perm.end()) continue;  // y not reachable within maxlen
      if (!is_transitive({x, y})) continue;
      ++result.match_count;
      if (!have) {
        result.w0 = w0;
        result.w1 = it->second;
        result.winf = winf;
        result.x = x;
        result.y = y;
        result.z = z;
        have = true;
      }
    }
  if (!have)
    throw NoMatch("no family words with the requested cycle structures at maxlen " +
                  std::to_string(maxlen));
  return result;
}

BlockSystem block_system(const Perm& x, const Perm& y, const Perm& z) {
  std::vector<Perm> gens{x, y, z};
  if (!is_transitive(gens)) throw permgrp::NotTransitive{};
  const int n = x.degree();

  auto try_seed = [&](int beta) -> std::optional<std::vector<int>> {
    // minimal block system in which 0 and beta share a block (union-find closure)
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    std::vector<std::pair<int, int>> agenda{{0, beta}};
    while (!agenda.empty()) {
      auto [a, b] = agenda.back();
      agenda.pop_back();
      a = find(a);
      b = find(b);
      if (a == b) continue;
      parent[b] = a;
      for (const auto& g : gens) agenda.emplace_back(g[a], g[b]);
    }
    std::vector<int> rep(n);
    for (int i = 0; i < n; ++i) rep[i] = find(i);
    int cls = 0;
    std::vector<int> label(n, -1), block_of(n);
    for (int i = 0; i < n; ++i) {
      if (label[rep[i]] == -1) label[rep[i]] = cls++;
      block_of[i] = label[rep[i]];
    }
    if (cls == 1 || cls == n) return std::nullopt;
    return block_of;
  };

  std::optional<std::vector<int>> best;
  std::size_t best_count = 0;
  for (int beta = 1; beta < n; ++beta) {
    auto b = try_seed(beta);
    if (!b) continue;
    std::size_t count = 1 + *std::max_element(b->begin(), b->end());
    if (!best || count > best_count) {  // more blocks = smaller blocks = minimal
      best = b;
      best_count = count;
    }
  }
  if (!best) throw Primitive{};

  BlockSystem bs;
  bs.block_of = *best;
  bs.blocks.assign(best_count, {});
  for (int p = 0; p < n; ++p) bs.blocks[bs.block_of[p]].push_back(p);
  auto induce = [&](const Perm& g) {
    std::vector<int> img(best_count);
    for (std::size_t b = 0; b < best_count; ++b)
      img[b] = bs.block_of[g[bs.blocks[b][0]]];
    return Perm(std::move(img));
  };
  bs.induced = {induce(x), induce(y), induce(z)};
  return bs;
}

BranchData degree2_branch_data(const Perm& x, const Perm& y, const Perm& z,
                               const BlockSystem& bs) {
  for (const auto& blk : bs.blocks)
    if (blk.size() != 2)
      throw std::invalid_argument("degree2_branch_data needs blocks of size 2");

  BranchData out;
  const std::array<const Perm*, 3> fine{&x, &y, &z};
  auto cycle_len = [](const Perm& g, int p) {
    int len = 1;
    for (int q = g[p]; q != p; q = g[q]) ++len;
    return len;
  };
  for (int fiber = 0; fiber < 3; ++fiber) {
    const Perm& g = *fine[fiber];
    const Perm& gi = bs.induced[fiber];
    std::vector<char> seen(gi.degree(), 0);
    for (int b = 0; b < gi.degree(); ++b) {
      if (seen[b]) continue;
      int e = 0;
      for (int c = b; !seen[c]; c = gi[c]) {
        seen[c] = 1;
        ++e;
      }
      int p = bs.blocks[b][0], q = bs.blocks[b][1];
      int lp = cycle_len(g, p), lq = cycle_len(g, q);
      if (lp == e && lq == e) {
        out.split_counts[fiber]++;
      } else if (lp == 2 * e && lq == 2 * e) {
        out.ramified_counts[fiber]++;
        out.ramified.push_back({fiber, e});
      } else {
        throw InconsistentCover("covering cycle lengths " + std::to_string(lp) +
                                "," + std::to_string(lq) +
                                " over an induced cycle of length " +
                                std::to_string(e));
      }
    }
  }
  return out;
}

ClassVector psl62_class_vector() {
  ClassVector cv;
  cv.degree = 63;
  cv.classes = {CycleType::parse("2^28.1^7"), CycleType::parse("2^16.1^31"),
                CycleType::parse("3^20.1^3"), CycleType::parse("3^20.1^3")};
  cv.group_order = permgrp::kPsl62Order;
  return cv;
}

}  // namespace covfam::nielsen
