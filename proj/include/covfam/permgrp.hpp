#pragma once

// Permutation arithmetic, stabilizer chains, tuple canonicalization and an
// explicit F2-matrix model of PSL6(2) acting on the 63 nonzero vectors of F2^6.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace covfam::permgrp {

struct DegreeMismatch : std::runtime_error {
  DegreeMismatch() : std::runtime_error("permutation degrees differ") {}
};
struct NotTransitive : std::runtime_error {
  NotTransitive() : std::runtime_error("group is not transitive") {}
};
struct NotFound : std::runtime_error {
  explicit NotFound(const std::string& what) : std::runtime_error(what) {}
};
struct RankMismatch : std::runtime_error {
  explicit RankMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Permutation of {0..degree-1}, stored as the image array.
// Composition is left-to-right: (a*b)[p] = b[a[p]].
class Perm {
 public:
  Perm() = default;
  explicit Perm(int degree);                 // identity
  explicit Perm(std::vector<int> images);

  int degree() const { return static_cast<int>(img_.size()); }
  int operator[](int p) const { return img_[p]; }
  const std::vector<int>& images() const { return img_; }

  bool is_identity() const;
  friend bool operator==(const Perm&, const Perm&) = default;
  auto operator<=>(const Perm&) const = default;

  // cycle notation on 1-based points, e.g. "(1,2)(3,4,5)"
  std::string to_cycles() const;
  static Perm from_cycles(int degree, const std::vector<std::vector<int>>& cycles);

 private:
  std::vector<int> img_;
};

Perm compose(const Perm& a, const Perm& b);
Perm inverse(const Perm& a);
Perm conjugate(const Perm& g, const Perm& h);  // h^-1 g h

// Cycle type "a^e.b^f" with lengths strictly decreasing.
struct CycleType {
  std::vector<std::pair<int, int>> parts;  // (length, count)

  int weight() const;  // sum of length*count
  int index() const;   // sum of (length-1)*count
  std::string str() const;
  static CycleType parse(const std::string& s);
  friend bool operator==(const CycleType&, const CycleType&) = default;
  auto operator<=>(const CycleType&) const = default;
};

CycleType cycle_type(const Perm& a);
int perm_order(const Perm& a);

// Base and strong generating set, built by deterministic Schreier-Sims.
class StabChain {
 public:
  explicit StabChain(const std::vector<Perm>& gens);

  unsigned long long order() const { return order_; }
  bool contains(const Perm& g) const;
  int degree() const { return degree_; }
  std::vector<int> base() const;

  // Uniform random element (product of uniformly chosen coset reps).
  Perm random_element(std::uint64_t& rng_state) const;

  // Strong generators of the stabilizer of base()[0].
  std::vector<Perm> first_stabilizer_gens() const;

 private:
  struct Level {
    int base_point = 0;
    std::vector<Perm> gens;            // strong generators at this level
    std::vector<int> orbit;            // orbit of base_point
    std::vector<std::optional<Perm>> transversal;  // point -> rep mapping base_point there
  };
  bool sift(const Perm& g, Perm* residue_out) const;
  void extend_level(std::size_t lvl, const Perm& g);
  void rebuild_orbit(Level& L);

  int degree_ = 0;
  std::vector<Level> levels_;
  unsigned long long order_ = 1;
};

std::vector<std::vector<int>> orbits(const std::vector<Perm>& gens,
                                     const std::vector<int>& points);
std::vector<int> orbit_of(const std::vector<Perm>& gens, int point);
bool is_transitive(const std::vector<Perm>& gens);
bool is_two_transitive(const std::vector<Perm>& gens);

// Generating tuples live here in raw form; nielsen wraps them with class data.
using Tuple = std::vector<Perm>;

struct NotConjugate {};

// h with h^-1 A_i h = B_i for all i, or nothing. <A> must be transitive.
std::optional<Perm> tuple_conjugator(const Tuple& A, const Tuple& B);

// Lexicographic minimum over BFS relabelings rooted at every candidate image
// of point 0. Canonical form for simultaneous S_n-conjugacy; usable as an
// inner-class canonical form only when <A> is self-normalizing in S_n.
Tuple canonical_tuple(const Tuple& A);

// 6x6 invertible matrix over F2; row i is a 6-bit mask.
struct MatF2 {
  std::array<std::uint8_t, 6> rows{};

  static MatF2 identity();
  friend bool operator==(const MatF2&, const MatF2&) = default;
};

MatF2 matf2_mul(const MatF2& a, const MatF2& b);
int matf2_rank(const MatF2& a);
std::uint8_t matf2_apply(const MatF2& m, std::uint8_t v);  // column vector v
std::optional<MatF2> matf2_inverse(const MatF2& a);

// Permutation of the 63 nonzero vectors, enumerated by binary value:
// point p (0-based) is the vector with value p+1.
Perm matf2_to_perm(const MatF2& m);

struct Psl62Model {
  std::vector<MatF2> mats;
  std::vector<Perm> perms;
};

// Generators of GL6(2) = PSL6(2): a transvection and the basis 6-cycle.
Psl62Model psl62_generators();

constexpr unsigned long long kPsl62Order = 20158709760ULL;

// Random search for an element of the given cycle type; budget in samples.
Perm class_rep(const StabChain& chain, const CycleType& ct,
               std::uint64_t seed, long budget = 1000000);

// For g of cycle type 2^16.1^31 induced by matrix M: the unique point fixed
// by the normalizer of <g>, i.e. the nonzero vector spanning im(M+I).
int distinguished_fixed_point(const Perm& g, const MatF2& m);

// degree 63, order |PSL6(2)|, 2-transitive
bool identify_psl62(const std::vector<Perm>& gens);

// Generators of the stabilizer of the hyperplane {v : bit5(v)=0} in the
// standard model, as permutations of the 63 points.
std::vector<Perm> psl62_hyperplane_stabilizer();

// xorshift64* step, the only RNG used anywhere
std::uint64_t rng_next(std::uint64_t& state);
// uniform in [0, n)
int rng_below(std::uint64_t& state, int n);

}  // namespace covfam::permgrp
