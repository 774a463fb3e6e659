#pragma once

// Complex polynomial numerics: coefficient-comparison systems for covers with
// prescribed ramification, Newton solving, lambda-path continuation, fiber
// tracking, numerical monodromy and the block<->fiber matching.

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "covfam/bigfloat.hpp"
#include "covfam/exactalg.hpp"
#include "covfam/nielsen.hpp"
#include "covfam/permgrp.hpp"

namespace covfam::numcover {

using permgrp::CycleType;
using permgrp::Perm;

struct ShapeInvalid : std::runtime_error {
  explicit ShapeInvalid(const std::string& w) : std::runtime_error(w) {}
};
struct Diverged : std::runtime_error {
  explicit Diverged(const std::string& w) : std::runtime_error(w) {}
};
struct SingularJacobian : std::runtime_error {
  SingularJacobian() : std::runtime_error("jacobian is singular at working precision") {}
};
struct StepUnderflow : std::runtime_error {
  StepUnderflow() : std::runtime_error("continuation step fell below the minimum") {}
};
struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& w) : std::runtime_error(w) {}
};
struct Collision : std::runtime_error {
  Collision() : std::runtime_error("fiber points collided during tracking") {}
};
struct NotEquivalent : std::runtime_error {
  NotEquivalent() : std::runtime_error("actions are not equivalent") {}
};
struct NotUnique : std::runtime_error {
  NotUnique() : std::runtime_error("intertwining bijection is not unique") {}
};
struct Unreachable : std::runtime_error {
  Unreachable() : std::runtime_error("target not reachable under the family action") {}
};

// ---- complex polynomials ---------------------------------------------------

struct CPoly {
  std::vector<BigComplex> c;  // ascending; empty = zero

  CPoly() = default;
  explicit CPoly(std::vector<BigComplex> cs) : c(std::move(cs)) { normalize(); }

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  void normalize();
};

CPoly cp_add(const CPoly& p, const CPoly& q);
CPoly cp_sub(const CPoly& p, const CPoly& q);
CPoly cp_mul(const CPoly& p, const CPoly& q);
CPoly cp_scale(const CPoly& p, const BigComplex& s);
CPoly cp_derivative(const CPoly& p);
BigComplex cp_eval(const CPoly& p, const BigComplex& x);
CPoly cp_monic_from_roots(const std::vector<BigComplex>& roots, int prec);

// Aberth-Ehrlich simultaneous root finding
std::vector<BigComplex> roots_all(const CPoly& p, std::uint64_t seed = 7);

// ---- ramification shapes and cover models ---------------------------------

enum class BranchLoc { Zero, Infinity, OnePlusSqrtLambda, OneMinusSqrtLambda, Fixed };

struct BranchDesc {
  BranchLoc loc = BranchLoc::Zero;
  CycleType type;
  // value of a Fixed branch point, as a rational pair
  exactalg::QRat fixed_re, fixed_im;
};

struct TraceConstraint {
  int branch = 0;  // index into branches
  int mult = 0;    // which factor of that branch
  exactalg::QRat value;
};

struct RamShape {
  int degree = 0;
  std::vector<BranchDesc> branches;
  int inf_mult = 1;  // multiplicity of the point pinned at infinity
  std::vector<TraceConstraint> traces;

  void validate() const;  // genus 0, one Infinity branch, inf_mult present
  int unknown_count() const;
  int equation_count() const;
};

// the degree-63 PSL6(2) family shape
RamShape psl62_shape();

struct CoverModel {
  RamShape shape;
  int prec = kDefaultPrec;
  BigComplex lambda;       // current base parameter
  BigComplex sqrt_lambda;  // tracked continuously along paths
  BigComplex c0;
  // factors[branch index][multiplicity] = monic factor
  std::map<std::pair<int, int>, CPoly> factors;
};

struct PolySystem {
  RamShape shape;
  int prec = kDefaultPrec;
  BigComplex lambda, sqrt_lambda;
  int n_unknowns = 0;

  std::vector<BigComplex> residual(const std::vector<BigComplex>& x) const;
  std::vector<std::vector<BigComplex>> jacobian(const std::vector<BigComplex>& x) const;
  // branch point values in order of shape.branches (infinity omitted)
  std::vector<BigComplex> branch_values() const;
};

PolySystem assemble_system(const RamShape& shape, const BigComplex& lambda,
                           const BigComplex* sqrt_lambda = nullptr);

std::vector<BigComplex> pack_model(const CoverModel& m);
CoverModel unpack_model(const PolySystem& s, const std::vector<BigComplex>& x);

std::vector<BigComplex> newton_solve(const PolySystem& s, std::vector<BigComplex> x0,
                                     const BigFloat* tol = nullptr);

// generic square-system Newton used by both the cover system and tests
std::vector<BigComplex> newton_generic(
    const std::function<std::vector<BigComplex>(const std::vector<BigComplex>&)>& f,
    const std::function<std::vector<std::vector<BigComplex>>(const std::vector<BigComplex>&)>& jac,
    std::vector<BigComplex> x0, const BigFloat& tol);

// ---- paths and continuation ------------------------------------------------

struct PathPlan {
  std::vector<BigComplex> waypoints;
  double max_step = 0.1;
  double min_step = 1e-12;
};

PathPlan loop_around(const BigComplex& center, double radius, const BigComplex& base,
                     int segments, int prec, bool counterclockwise = true);

CoverModel deform_lambda(const CoverModel& m, const PathPlan& plan);

std::vector<BigComplex> track_fiber(const CPoly& num, const CPoly& den,
                                    const PathPlan& path, std::vector<BigComplex> fiber);

std::vector<Perm> monodromy_tuple(const CPoly& num, const CPoly& den,
                                  const BigComplex& t0,
                                  const std::vector<PathPlan>& loops);

// ---- matching --------------------------------------------------------------

Perm chi_bijection(const std::pair<Perm, Perm>& block_action,
                   const std::pair<Perm, Perm>& fiber_action);

// letters (generator index 0 or 1, sign +-1) acting via the family pair (x, y)
using LoopWord = std::vector<std::pair<int, int>>;

LoopWord steer_to_tuple(const nielsen::OrbitTable& o, int current, int target);

// numerator and denominator of the rational map defined by the model
std::pair<CPoly, CPoly> model_map(const CoverModel& m);

// monodromy around every finite branch point in branch order, with the
// inertia at infinity (inverse of the product) appended
std::vector<Perm> model_monodromy(const CoverModel& m);

struct NumericReport {
  bool passed = false;
  std::vector<std::pair<std::string, bool>> checks;
  std::string max_residual;
};

NumericReport verify_cover_numeric(const CoverModel& m,
                                   const nielsen::GenTuple* expected = nullptr);

}  // namespace covfam::numcover
