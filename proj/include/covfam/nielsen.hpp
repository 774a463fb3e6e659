#pragma once

// Class vectors, product-one generating tuples, the Hurwitz braid action and
// its orbit closure, family monodromy words, block systems and the branch
// data of degree-2 subcovers.

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "covfam/permgrp.hpp"

namespace covfam::nielsen {

using permgrp::CycleType;
using permgrp::Perm;
using permgrp::StabChain;

struct ParityError : std::runtime_error {
  explicit ParityError(const std::string& w) : std::runtime_error(w) {}
};
struct IndexOutOfRange : std::runtime_error {
  IndexOutOfRange() : std::runtime_error("braid index out of range") {}
};
struct BudgetExhausted : std::runtime_error {
  explicit BudgetExhausted(const std::string& w) : std::runtime_error(w) {}
};
struct EscapesOrbit : std::runtime_error {
  EscapesOrbit() : std::runtime_error("word leaves the computed orbit") {}
};
struct NoMatch : std::runtime_error {
  explicit NoMatch(const std::string& w) : std::runtime_error(w) {}
};
struct Primitive : std::runtime_error {
  Primitive() : std::runtime_error("action is primitive; no nontrivial blocks") {}
};
struct InconsistentCover : std::runtime_error {
  explicit InconsistentCover(const std::string& w) : std::runtime_error(w) {}
};

struct ClassVector {
  int degree = 0;
  std::vector<CycleType> classes;  // length k >= 3
  unsigned long long group_order = 0;

  void validate() const;
};

struct GenTuple {
  int degree = 0;
  std::vector<Perm> perms;
  ClassVector classvector;
  bool verified = false;

  // product-one, classes match positionally; order checked only if `verified`
  void check_invariants() const;
};

struct BraidLetter {
  int index = 0;  // 1..k-1
  int sign = 1;   // +1 or -1
};
using BraidWord = std::vector<BraidLetter>;

std::string word_str(const BraidWord& w);

// Riemann-Hurwitz genus of a degree-n cover with the given branch cycle types.
int rh_genus(int degree, const std::vector<CycleType>& types);

// Ambient group data used by tuple search.
struct GroupCtx {
  std::vector<Perm> gens;
  StabChain chain;

  explicit GroupCtx(std::vector<Perm> g) : gens(std::move(g)), chain(gens) {}
};

GenTuple search_tuple(const ClassVector& cv, const GroupCtx& group,
                      std::uint64_t seed, long budget = 4000000);

// Hurwitz move Q_i: (.., s_i, s_{i+1}, ..) -> (.., s_{i+1}, s_{i+1}^-1 s_i s_{i+1}, ..)
GenTuple braid_move(const GenTuple& t, int i, int sign);

// Braid orbit closure. Internally the table holds the closure of the tuple
// under all Q_i (visiting every ordering of the class vector); the straight
// members, i.e. the orbit under the layout-stabilizing subgroup generated by
// the pure braids A_ij and Q_j for adjacent equal classes, are marked.
struct OrbitTable {
  ClassVector classvector;
  std::vector<std::vector<Perm>> tuples;   // canonical forms, full closure
  std::vector<int> straight;               // indices with the straight layout
  std::vector<int> straight_rank;          // full index -> rank in `straight`, or -1
  // qmove[2*(i-1)+ (sign<0)] : full-index move map of Q_i^sign
  std::vector<std::vector<int>> qmove;
  std::optional<std::array<Perm, 3>> family;  // x, y, z on straight ranks

  int find(const std::vector<Perm>& canonical) const;
  std::size_t straight_size() const { return straight.size(); }
};

OrbitTable braid_orbit(const GenTuple& t);

// Permutation of straight ranks induced by the braid word (must stabilize the
// straight layout).
Perm action_of_word(const OrbitTable& o, const BraidWord& w);

struct FamilyWords {
  BraidWord w0, w1, winf;
  Perm x, y, z;
  long match_count = 0;
};

// Search for words of length <= maxlen whose straight actions have the target
// cycle structures and compose to the identity.
FamilyWords find_family_words(const OrbitTable& o,
                              const std::array<CycleType, 3>& targets,
                              int maxlen = 6);

struct BlockSystem {
  std::vector<std::vector<int>> blocks;        // partition of the domain
  std::vector<int> block_of;                   // point -> block index
  std::array<Perm, 3> induced;                 // action of (x,y,z) on blocks
};

BlockSystem block_system(const Perm& x, const Perm& y, const Perm& z);

struct RamifiedLabel {
  int fiber = 0;   // 0, 1, 2 for the fibers over 0, 1, infinity
  int length = 0;  // induced cycle length e
};

struct BranchData {
  std::array<int, 3> ramified_counts{};  // over 0, 1, infinity
  std::array<int, 3> split_counts{};
  std::vector<RamifiedLabel> ramified;
};

// For a degree-2 subcover: classify every induced cycle as split (two e-cycles
// above) or ramified (one 2e-cycle above).
BranchData degree2_branch_data(const Perm& x, const Perm& y, const Perm& z,
                               const BlockSystem& bs);

// Built-in class vector of the degree-63 PSL6(2) family.
ClassVector psl62_class_vector();

}  // namespace covfam::nielsen
