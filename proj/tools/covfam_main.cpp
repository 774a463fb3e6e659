// covfam: batch command-line driver for the cover-family toolkit.
//
// Subcommands mirror the library modules: nielsen (tuple search, braid
// orbits, family words, block systems, degree-2 branch data), rh-genus,
// cover (assemble, solve, deform, monodromy, verify), chi, verify
// (belyi, certificate), factor-modp, lemma31, model hyperelliptic,
// recognize, fit.  All randomness flows from --seed; every JSON artifact
// embeds an envelope with version, seed, precision and input hashes.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage, 3 input error,
// 4 budget exhausted.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "covfam/exactalg.hpp"
#include "covfam/fixtures.hpp"
#include "covfam/json_io.hpp"
#include "covfam/nielsen.hpp"
#include "covfam/numcover.hpp"
#include "covfam/permgrp.hpp"
#include "covfam/reconstruct.hpp"

namespace pg = covfam::permgrp;
namespace nz = covfam::nielsen;
namespace ea = covfam::exactalg;
namespace nc = covfam::numcover;
namespace rc = covfam::reconstruct;
namespace jio = covfam::jsonio;
namespace fx = covfam::fixtures;

using jio::json;
using nc::BigComplex;
using nc::BigFloat;
using pg::CycleType;
using pg::Perm;

namespace {

struct InputFail : std::runtime_error {
  explicit InputFail(const std::string& w) : std::runtime_error(w) {}
};
struct VerifyFail : std::runtime_error {
  explicit VerifyFail(const std::string& w) : std::runtime_error(w) {}
};

struct Ctx {
  std::uint64_t seed = 1;
  int prec = nc::kDefaultPrec;
  long budget = 4000000;
  bool long_running = false;
  std::string out;
  bool json_out = false;
  std::vector<std::pair<std::string, std::string>> inputs;
};

json load_json(Ctx& ctx, const std::string& path) {
  std::string text;
  try {
    text = jio::read_file(path);
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
  ctx.inputs.emplace_back(path, jio::content_hash(text));
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputFail("invalid JSON in " + path);
  return j;
}

// artifacts written by this tool wrap the payload; accept bare payloads too
json unwrap(const json& j, const std::string& key) {
  if (j.is_object() && j.contains(key)) return j.at(key);
  return j;
}

void emit(const Ctx& ctx, const std::string& key, const json& payload,
          const std::string& human) {
  json doc;
  doc["envelope"] = jio::report_envelope(ctx.seed, ctx.prec, ctx.inputs);
  doc[key] = payload;
  if (!ctx.out.empty()) jio::write_atomic(ctx.out, doc.dump(2) + "\n");
  if (ctx.json_out)
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << human;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<Perm> make_group(const std::string& name) {
  if (name == "psl62") return pg::psl62_generators().perms;
  if (name.size() >= 2 && name[0] == 's') {
    int n = 0;
    try {
      n = std::stoi(name.substr(1));
    } catch (...) {
      throw InputFail("unknown group: " + name);
    }
    if (n < 2 || n > 64) throw InputFail("symmetric degree out of range: " + name);
    std::vector<int> t(n), c(n);
    for (int i = 0; i < n; ++i) t[i] = i, c[i] = (i + 1) % n;
    std::swap(t[0], t[1]);
    return {Perm(t), Perm(c)};
  }
  throw InputFail("unknown group: " + name + " (expected psl62 or sN)");
}

nz::ClassVector make_classvector(const std::string& classes,
                                 const std::vector<Perm>& gens) {
  nz::ClassVector cv;
  for (const auto& s : split_csv(classes)) {
    CycleType ct;
    try {
      ct = CycleType::parse(s);
    } catch (const std::exception& e) {
      throw InputFail(std::string("bad cycle type '") + s + "': " + e.what());
    }
    cv.classes.push_back(ct);
  }
  if (cv.classes.empty()) throw InputFail("empty class list");
  cv.degree = cv.classes[0].weight();
  cv.group_order = pg::StabChain(gens).order();
  try {
    cv.validate();
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
  return cv;
}

nc::RamShape toy3_shape() {
  using ea::QRat;
  using nc::BranchLoc;
  nc::RamShape s;
  s.degree = 3;
  s.branches = {{BranchLoc::Zero, CycleType::parse("2^1.1^1"), {}, {}},
                {BranchLoc::Infinity, CycleType::parse("2^1.1^1"), {}, {}},
                {BranchLoc::OnePlusSqrtLambda, CycleType::parse("2^1.1^1"), {}, {}},
                {BranchLoc::OneMinusSqrtLambda, CycleType::parse("2^1.1^1"), {}, {}}};
  s.inf_mult = 1;
  s.traces = {{0, 1, QRat(0)}, {1, 2, QRat(1)}};
  return s;
}

nc::RamShape make_shape(Ctx& ctx, const std::string& spec) {
  if (spec == "psl62") return nc::psl62_shape();
  if (spec == "toy3") return toy3_shape();
  return jio::shape_from_json(unwrap(load_json(ctx, spec), "shape"));
}

BigComplex parse_complex_pair(const std::string& s, int prec) {
  auto parts = split_csv(s);
  if (parts.empty() || parts.size() > 2) throw InputFail("expected re[,im]: " + s);
  try {
    BigFloat re(parts[0], prec);
    BigFloat im = parts.size() == 2 ? BigFloat(parts[1], prec) : BigFloat(prec);
    return {re, im};
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
}

ea::QPoly parse_qpoly_arg(const std::string& coeffs) {
  try {
    return ea::qpoly_parse(split_csv(coeffs));
  } catch (const std::exception& e) {
    throw InputFail(std::string("bad coefficient list: ") + e.what());
  }
}

nz::OrbitTable load_orbit(Ctx& ctx, const std::string& path) {
  try {
    return jio::orbit_from_json(unwrap(load_json(ctx, path), "orbit"));
  } catch (const jio::ParseError& e) {
    throw InputFail(e.what());
  }
}

nc::CoverModel load_cover(Ctx& ctx, const std::string& path) {
  try {
    return jio::cover_from_json(unwrap(load_json(ctx, path), "cover"));
  } catch (const jio::ParseError& e) {
    throw InputFail(e.what());
  }
}

std::string report_text(const std::vector<std::pair<std::string, bool>>& checks) {
  std::ostringstream os;
  for (const auto& [name, ok] : checks)
    os << "  [" << (ok ? "pass" : "FAIL") << "] " << name << "\n";
  return os.str();
}

json checks_json(const std::vector<std::pair<std::string, bool>>& checks) {
  json arr = json::array();
  for (const auto& [name, ok] : checks) arr.push_back({{"name", name}, {"ok", ok}});
  return arr;
}

// ---- nielsen ---------------------------------------------------------------

int cmd_nielsen_search(Ctx& ctx, const std::string& group, const std::string& classes) {
  auto gens = make_group(group);
  auto cv = make_classvector(classes, gens);
  nz::GroupCtx g(gens);
  auto t = nz::search_tuple(cv, g, ctx.seed, ctx.budget);
  std::ostringstream os;
  os << "found product-one tuple of degree " << t.degree << "\n";
  for (std::size_t i = 0; i < t.perms.size(); ++i)
    os << "  s" << i << " ~ " << pg::cycle_type(t.perms[i]).str() << "\n";
  emit(ctx, "tuple", jio::tuple_to_json(t), os.str());
  return 0;
}

int cmd_nielsen_orbit(Ctx& ctx, const std::string& group, const std::string& classes) {
  auto gens = make_group(group);
  auto cv = make_classvector(classes, gens);
  nz::GroupCtx g(gens);
  auto t = nz::search_tuple(cv, g, ctx.seed, ctx.budget);
  auto o = nz::braid_orbit(t);
  std::ostringstream os;
  os << "braid orbit closure: " << o.tuples.size() << " tuples, "
     << o.straight_size() << " with the straight layout\n";
  emit(ctx, "orbit", jio::orbit_to_json(o), os.str());
  return 0;
}

int cmd_nielsen_family(Ctx& ctx, const std::string& orbit_path,
                       const std::string& targets, int maxlen) {
  auto o = load_orbit(ctx, orbit_path);
  auto tstr = split_csv(targets);
  if (tstr.size() != 3) throw InputFail("--targets needs three cycle structures");
  std::array<CycleType, 3> tgt;
  for (int i = 0; i < 3; ++i) {
    try {
      tgt[i] = CycleType::parse(tstr[i]);
    } catch (const std::exception& e) {
      throw InputFail(e.what());
    }
  }
  auto fw = nz::find_family_words(o, tgt, maxlen);
  o.family = {fw.x, fw.y, fw.z};
  std::ostringstream os;
  os << "family words on " << o.straight_size() << " straight tuples\n"
     << "  w0   = " << nz::word_str(fw.w0) << "  -> " << pg::cycle_type(fw.x).str() << "\n"
     << "  w1   = " << nz::word_str(fw.w1) << "  -> " << pg::cycle_type(fw.y).str() << "\n"
     << "  winf = " << nz::word_str(fw.winf) << "  -> " << pg::cycle_type(fw.z).str() << "\n";
  emit(ctx, "orbit", jio::orbit_to_json(o), os.str());
  return 0;
}

std::array<Perm, 3> family_of(const nz::OrbitTable& o) {
  if (!o.family) throw InputFail("orbit file has no family words; run nielsen family-words first");
  return *o.family;
}

int cmd_nielsen_blocks(Ctx& ctx, const std::string& orbit_path) {
  auto o = load_orbit(ctx, orbit_path);
  auto [x, y, z] = family_of(o);
  auto bs = nz::block_system(x, y, z);
  std::ostringstream os;
  os << bs.blocks.size() << " blocks of size " << bs.blocks[0].size() << "\n"
     << "  induced over 0:   " << pg::cycle_type(bs.induced[0]).str() << "\n"
     << "  induced over 1:   " << pg::cycle_type(bs.induced[1]).str() << "\n"
     << "  induced over inf: " << pg::cycle_type(bs.induced[2]).str() << "\n";
  json j;
  j["blocks"] = bs.blocks;
  j["induced"] = {jio::perm_to_json(bs.induced[0]), jio::perm_to_json(bs.induced[1]),
                  jio::perm_to_json(bs.induced[2])};
  emit(ctx, "block_system", j, os.str());
  return 0;
}

int cmd_nielsen_branch_data(Ctx& ctx, const std::string& orbit_path) {
  auto o = load_orbit(ctx, orbit_path);
  auto [x, y, z] = family_of(o);
  auto bs = nz::block_system(x, y, z);
  auto bd = nz::degree2_branch_data(x, y, z, bs);
  std::ostringstream os;
  os << "degree-2 subcover branch data over (0, 1, inf)\n"
     << "  ramified: (" << bd.ramified_counts[0] << ", " << bd.ramified_counts[1] << ", "
     << bd.ramified_counts[2] << ")\n"
     << "  split:    (" << bd.split_counts[0] << ", " << bd.split_counts[1] << ", "
     << bd.split_counts[2] << ")\n";
  json j;
  j["ramified_counts"] = bd.ramified_counts;
  j["split_counts"] = bd.split_counts;
  json lab = json::array();
  for (const auto& r : bd.ramified) lab.push_back({{"fiber", r.fiber}, {"length", r.length}});
  j["ramified"] = lab;
  emit(ctx, "branch_data", j, os.str());
  return 0;
}

int cmd_rh_genus(Ctx& ctx, int degree, const std::vector<std::string>& types) {
  std::vector<CycleType> cts;
  for (const auto& s : types) {
    try {
      cts.push_back(CycleType::parse(s));
    } catch (const std::exception& e) {
      throw InputFail(e.what());
    }
  }
  int g;
  try {
    g = nz::rh_genus(degree, cts);
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
  std::ostringstream os;
  os << g << "\n";
  emit(ctx, "genus", json(g), os.str());
  return 0;
}

// ---- cover -----------------------------------------------------------------

int cmd_cover_assemble(Ctx& ctx, const std::string& shape_spec, const std::string& lambda) {
  auto shape = make_shape(ctx, shape_spec);
  BigComplex lam = parse_complex_pair(lambda, ctx.prec);
  auto sys = nc::assemble_system(shape, lam);
  std::ostringstream os;
  os << "degree " << shape.degree << " system: " << sys.n_unknowns << " unknowns, "
     << shape.equation_count() << " equations\n";
  json j;
  j["degree"] = shape.degree;
  j["unknowns"] = sys.n_unknowns;
  j["equations"] = shape.equation_count();
  j["shape"] = jio::shape_to_json(shape);
  emit(ctx, "system", j, os.str());
  return 0;
}

int cmd_cover_solve(Ctx& ctx, const std::string& shape_spec, const std::string& lambda,
                    long trials) {
  auto shape = make_shape(ctx, shape_spec);
  BigComplex lam = parse_complex_pair(lambda, ctx.prec);
  auto sys = nc::assemble_system(shape, lam);
  std::uint64_t st = ctx.seed * 2654435761u + 1;
  for (long trial = 0; trial < trials; ++trial) {
    std::vector<BigComplex> x0;
    x0.reserve(sys.n_unknowns);
    for (int i = 0; i < sys.n_unknowns; ++i) {
      double re = (pg::rng_below(st, 4001) - 2000) / 1000.0;
      double im = (pg::rng_below(st, 4001) - 2000) / 1000.0;
      x0.emplace_back(re, im, ctx.prec);
    }
    try {
      auto x = nc::newton_solve(sys, std::move(x0));
      auto m = nc::unpack_model(sys, x);
      auto rep = nc::verify_cover_numeric(m);
      if (!rep.passed) continue;
      std::ostringstream os;
      os << "solved after " << (trial + 1) << " start(s); max residual "
         << rep.max_residual << "\n";
      emit(ctx, "cover", jio::cover_to_json(m), os.str());
      return 0;
    } catch (const nc::Diverged&) {
    } catch (const nc::SingularJacobian&) {
    }
  }
  throw nz::BudgetExhausted("no Newton start converged within the trial budget");
}

int cmd_cover_deform(Ctx& ctx, const std::string& cover_path, const std::string& path_file,
                     const std::string& center, double radius, int segments, bool clockwise) {
  auto m = load_cover(ctx, cover_path);
  nc::PathPlan plan;
  if (!path_file.empty()) {
    try {
      plan = jio::path_from_json(unwrap(load_json(ctx, path_file), "path"), m.prec);
    } catch (const jio::ParseError& e) {
      throw InputFail(e.what());
    }
  } else {
    BigComplex c = parse_complex_pair(center, m.prec);
    plan = nc::loop_around(c, radius, m.lambda, segments, m.prec, !clockwise);
  }
  auto m2 = nc::deform_lambda(m, plan);
  std::ostringstream os;
  os << "deformed along " << (plan.waypoints.size() - 1) << " segments; lambda = ("
     << m2.lambda.re.str(10) << ", " << m2.lambda.im.str(10) << ")\n";
  emit(ctx, "cover", jio::cover_to_json(m2), os.str());
  return 0;
}

int cmd_cover_monodromy(Ctx& ctx, const std::string& cover_path) {
  auto m = load_cover(ctx, cover_path);
  auto tuple = nc::model_monodromy(m);
  std::ostringstream os;
  os << "monodromy tuple (finite branch points in shape order, then infinity)\n";
  json arr = json::array();
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    os << "  g" << i << " ~ " << pg::cycle_type(tuple[i]).str() << "\n";
    arr.push_back(jio::perm_to_json(tuple[i]));
  }
  emit(ctx, "monodromy", arr, os.str());
  return 0;
}

int cmd_cover_verify(Ctx& ctx, const std::string& cover_path, const std::string& tuple_path) {
  auto m = load_cover(ctx, cover_path);
  std::optional<nz::GenTuple> expected;
  if (!tuple_path.empty()) {
    try {
      expected = jio::tuple_from_json(unwrap(load_json(ctx, tuple_path), "tuple"));
    } catch (const jio::ParseError& e) {
      throw InputFail(e.what());
    }
  }
  auto rep = nc::verify_cover_numeric(m, expected ? &*expected : nullptr);
  std::ostringstream os;
  os << report_text(rep.checks) << "max residual " << rep.max_residual << "\n"
     << (rep.passed ? "PASS" : "FAIL") << "\n";
  json j;
  j["passed"] = rep.passed;
  j["checks"] = checks_json(rep.checks);
  j["max_residual"] = rep.max_residual;
  emit(ctx, "verification", j, os.str());
  if (!rep.passed) throw VerifyFail("numeric cover verification failed");
  return 0;
}

// ---- matching, verification, exact algebra ---------------------------------

int cmd_chi(Ctx& ctx, const std::string& in_path) {
  json j = load_json(ctx, in_path);
  auto pair_of = [&](const char* key) -> std::pair<Perm, Perm> {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
      throw InputFail(std::string("expected two permutations under '") + key + "'");
    try {
      return {jio::perm_from_json(j.at(key)[0]), jio::perm_from_json(j.at(key)[1])};
    } catch (const jio::ParseError& e) {
      throw InputFail(e.what());
    }
  };
  auto chi = nc::chi_bijection(pair_of("block"), pair_of("fiber"));
  std::ostringstream os;
  os << "chi = " << chi.to_cycles() << "\n";
  emit(ctx, "chi", jio::perm_to_json(chi), os.str());
  return 0;
}

int cmd_verify_belyi(Ctx& ctx, const std::string& fixture, const std::string& num,
                     const std::string& den, const std::string& expected,
                     const std::string& rpoly) {
  ea::QPoly p, q;
  std::optional<ea::QPoly> r;
  std::array<CycleType, 3> exp_types;
  if (fixture == "psi24") {
    auto fixd = fx::psi24();
    p = fixd.p;
    q = fixd.q;
    r = fixd.r;
    exp_types = {CycleType::parse("4^2.3^5.1^1"), CycleType::parse("7^2.4^1.3^1.2^1.1^1"),
                 CycleType::parse("2^12")};
  } else if (fixture.empty()) {
    if (num.empty() || den.empty() || expected.empty())
      throw InputFail("need --num, --den and --expected when no --fixture is given");
    p = parse_qpoly_arg(num);
    q = parse_qpoly_arg(den);
    auto es = split_csv(expected);
    if (es.size() != 3) throw InputFail("--expected needs three cycle structures");
    for (int i = 0; i < 3; ++i) {
      try {
        exp_types[i] = CycleType::parse(es[i]);
      } catch (const std::exception& e) {
        throw InputFail(e.what());
      }
    }
    if (!rpoly.empty()) r = parse_qpoly_arg(rpoly);
  } else {
    throw InputFail("unknown fixture: " + fixture);
  }
  auto rep = ea::verify_belyi(p, q, exp_types, r ? &*r : nullptr);
  std::ostringstream os;
  os << report_text(rep.checks) << (rep.passed ? "PASS" : "FAIL") << "\n";
  json j;
  j["passed"] = rep.passed;
  j["checks"] = checks_json(rep.checks);
  emit(ctx, "belyi", j, os.str());
  if (!rep.passed) throw VerifyFail("Belyi verification failed");
  return 0;
}

int cmd_verify_certificate(Ctx& ctx, const std::string& in_path, const std::string& fixture) {
  jio::Certificate cert;
  if (fixture == "deg7") {
    auto d7 = fx::deg7_psl32();
    cert.p = d7.num;
    cert.q = d7.den;
    cert.field_d = d7.d;
    cert.expected_structures = {"4^1.2^1.1^1", "2^2.1^3", "7^1"};
    cert.expected_locus = "0,K,inf";
  } else if (!fixture.empty()) {
    throw InputFail("unknown fixture: " + fixture);
  } else if (in_path.empty()) {
    throw InputFail("need --in or --fixture deg7");
  } else {
    try {
      cert = jio::certificate_from_json(unwrap(load_json(ctx, in_path), "certificate"));
    } catch (const jio::ParseError& e) {
      throw InputFail(e.what());
    }
  }
  std::vector<std::pair<std::string, bool>> checks;
  int deg = std::max(cert.p.degree(), cert.q.degree());
  checks.emplace_back("numerator and denominator nonzero",
                      !cert.p.is_zero() && !cert.q.is_zero());
  bool d_ok = cert.field_d != 0 && cert.field_d != 1 &&
              ea::squarefree_part(ea::QRat(cert.field_d)) == cert.field_d;
  checks.emplace_back("field discriminant squarefree", d_ok);
  bool structs_ok = !cert.expected_structures.empty();
  for (const auto& s : cert.expected_structures) {
    try {
      structs_ok = structs_ok && CycleType::parse(s).weight() == deg;
    } catch (const std::exception&) {
      structs_ok = false;
    }
  }
  checks.emplace_back("expected structures parse and have weight = degree", structs_ok);
  json j;
  j["degree"] = deg;
  j["field_d"] = cert.field_d;
  std::ostringstream pattern_note;
  try {
    // keep only sample primes where the coefficient field reduces, i.e. where
    // the discriminant has a square root mod p
    ea::Lemma31Samples samples;
    samples.primes.clear();
    for (std::uint64_t p : {11u, 23u, 29u, 37u, 43u, 53u, 67u, 71u, 79u, 101u, 107u, 127u}) {
      try {
        ea::reduce_mod_p(cert.p, p);
        ea::reduce_mod_p(cert.q, p);
        samples.primes.push_back(p);
      } catch (const ea::BadPrime&) {
      }
    }
    auto pat = ea::lemma31_degree_pattern(cert.p, cert.q, cert.p, cert.q, samples);
    checks.emplace_back("specialization degree pattern is stable",
                        pat.agree == pat.total && pat.total > 0);
    j["self_composition_degrees"] = pat.degrees;
    pattern_note << "  self-composition degree pattern: {";
    for (std::size_t i = 0; i < pat.degrees.size(); ++i)
      pattern_note << (i ? ", " : "") << pat.degrees[i];
    pattern_note << "}  (" << pat.agree << "/" << pat.total << " samples agree)\n";
  } catch (const std::exception& e) {
    checks.emplace_back(std::string("specialization degree pattern (") + e.what() + ")", false);
  }
  bool passed = true;
  for (const auto& [_, ok] : checks) passed = passed && ok;
  std::ostringstream os;
  os << report_text(checks) << pattern_note.str() << (passed ? "PASS" : "FAIL") << "\n";
  j["passed"] = passed;
  j["checks"] = checks_json(checks);
  emit(ctx, "certificate_report", j, os.str());
  if (!passed) throw VerifyFail("certificate verification failed");
  return 0;
}

int cmd_factor_modp(Ctx& ctx, const std::string& coeffs, std::uint64_t p) {
  auto f = parse_qpoly_arg(coeffs);
  std::vector<std::pair<ea::FpPoly, int>> facs;
  try {
    facs = ea::factor_mod_p(f, p, ctx.seed);
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
  std::ostringstream os;
  json arr = json::array();
  os << "factors mod " << p << " (ascending coefficients):\n";
  for (const auto& [g, mult] : facs) {
    os << "  [";
    json c = json::array();
    for (std::size_t i = 0; i < g.c.size(); ++i) {
      os << (i ? ", " : "") << g.c[i].v;
      c.push_back(g.c[i].v);
    }
    os << "]^" << mult << "\n";
    arr.push_back({{"coeffs", c}, {"mult", mult}});
  }
  emit(ctx, "factors", arr, os.str());
  return 0;
}

int cmd_lemma31(Ctx& ctx, const std::string& fixture, const std::string& num,
                const std::string& den, const std::string& num2, const std::string& den2) {
  ea::DegreePattern pat;
  if (fixture == "deg7") {
    auto c = fx::deg7_psl32();
    // the fixture's coefficients live in Q(sqrt(-7)); sample at primes that
    // split there so the reductions exist
    ea::Lemma31Samples s;
    s.primes = {11, 23, 29, 37, 43, 53, 67, 71, 79};
    pat = ea::lemma31_degree_pattern(c.num, c.den, c.num, c.den, s);
  } else if (fixture.empty()) {
    if (num.empty() || den.empty()) throw InputFail("need --num and --den (or --fixture deg7)");
    auto p = parse_qpoly_arg(num), q = parse_qpoly_arg(den);
    auto pt = num2.empty() ? p : parse_qpoly_arg(num2);
    auto qt = den2.empty() ? q : parse_qpoly_arg(den2);
    try {
      pat = ea::lemma31_degree_pattern(p, q, pt, qt);
    } catch (const std::exception& e) {
      throw InputFail(e.what());
    }
  } else {
    throw InputFail("unknown fixture: " + fixture);
  }
  std::ostringstream os;
  os << "degree pattern {";
  for (std::size_t i = 0; i < pat.degrees.size(); ++i) os << (i ? ", " : "") << pat.degrees[i];
  os << "}  (" << pat.agree << "/" << pat.total << " samples agree)\n";
  for (const auto& d : pat.disagreements) os << "  disagreement: " << d << "\n";
  json j;
  j["degrees"] = pat.degrees;
  j["agree"] = pat.agree;
  j["total"] = pat.total;
  emit(ctx, "degree_pattern", j, os.str());
  return 0;
}

int cmd_model_hyper(Ctx& ctx, const std::string& factors_path, const std::string& c_str) {
  std::vector<ea::QPoly> factors;
  if (factors_path.empty() || factors_path == "fixture") {
    factors = fx::hyper_factors();
  } else {
    json j = unwrap(load_json(ctx, factors_path), "factors");
    if (!j.is_array()) throw InputFail("factors file must be an array of polynomials");
    for (const auto& f : j) {
      try {
        factors.push_back(jio::qpoly_from_json(f));
      } catch (const jio::ParseError& e) {
        throw InputFail(e.what());
      }
    }
  }
  ea::QRat c;
  try {
    c = jio::qrat_parse(c_str);
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
  ea::HyperModel hm;
  try {
    hm = ea::hyperelliptic_model(factors, c);
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
  std::ostringstream os;
  os << "y^2 = " << jio::qrat_str(hm.c) << " * P(mu), genus " << hm.genus
     << (hm.infinity_branch ? ", ramified over infinity" : "") << "\n"
     << "P(mu) = " << ea::qpoly_str(hm.P, "mu") << "\n";
  json j;
  j["P"] = jio::qpoly_to_json(hm.P);
  j["c"] = jio::qrat_str(hm.c);
  j["genus"] = hm.genus;
  j["infinity_branch"] = hm.infinity_branch;
  emit(ctx, "hyperelliptic", j, os.str());
  return 0;
}

int cmd_recognize(Ctx& ctx, const std::string& re, const std::string& im, long d,
                  const std::string& height) {
  BigComplex x = parse_complex_pair(im.empty() ? re : re + "," + im, ctx.prec);
  mpz_class h;
  try {
    h = mpz_class(height);
  } catch (const std::exception&) {
    throw InputFail("bad height bound: " + height);
  }
  json j;
  std::ostringstream os;
  bool found = false;
  if (d == 1) {
    auto r = rc::recognize_rational(x, h);
    if (r) {
      found = true;
      os << jio::qrat_str(*r) << "\n";
      j["rational"] = jio::qrat_str(*r);
    }
  } else {
    std::optional<ea::QuadElem> r;
    try {
      r = rc::recognize_quadratic(x, d, h);
    } catch (const std::exception& e) {
      throw InputFail(e.what());
    }
    if (r) {
      found = true;
      os << jio::qrat_str(r->a) << " + (" << jio::qrat_str(r->b) << ")*sqrt(" << d << ")\n";
      j["a"] = jio::qrat_str(r->a);
      j["b"] = jio::qrat_str(r->b);
      j["d"] = d;
    }
  }
  if (!found) {
    os << "no match within the height bound\n";
    j = nullptr;
  }
  emit(ctx, "recognized", j, os.str());
  if (!found) throw VerifyFail("recognition failed");
  return 0;
}

int cmd_fit(Ctx& ctx, const std::string& points_path, int dn, int dd) {
  json j = unwrap(load_json(ctx, points_path), "points");
  if (!j.is_array()) throw InputFail("points file must be an array of [x, y] pairs");
  std::vector<std::pair<ea::QRat, ea::QRat>> pts;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw InputFail("each point must be [x, y]");
    try {
      pts.emplace_back(jio::qrat_parse(e[0].get<std::string>()),
                       jio::qrat_parse(e[1].get<std::string>()));
    } catch (const std::exception& ex) {
      throw InputFail(ex.what());
    }
  }
  std::optional<rc::RatFun> f;
  try {
    f = rc::fit_ratfun(pts, dn, dd);
  } catch (const std::exception& e) {
    throw InputFail(e.what());
  }
  std::ostringstream os;
  json out;
  if (f) {
    os << "(" << ea::qpoly_str(f->num) << ") / (" << ea::qpoly_str(f->den) << ")\n";
    out["num"] = jio::qpoly_to_json(f->num);
    out["den"] = jio::qpoly_to_json(f->den);
  } else {
    os << "no rational function within the degree bounds fits all points\n";
    out = nullptr;
  }
  emit(ctx, "ratfun", out, os.str());
  if (!f) throw VerifyFail("fit failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"covfam: 4-branch-point cover family toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all subcommand help");

  Ctx ctx;
  app.add_option("--seed", ctx.seed, "RNG seed (all randomness flows from it)");
  app.add_option("--prec", ctx.prec, "working precision in bits")->check(CLI::Range(64, 65536));
  app.add_option("--budget", ctx.budget, "search budget (samples / trials)");
  app.add_flag("--long-running", ctx.long_running, "enable long-running computations");
  app.add_option("--out", ctx.out, "write the JSON artifact to this path (atomically)");
  app.add_flag("--json", ctx.json_out, "print the JSON artifact to stdout");

  int rc_code = 0;
  std::function<void()> action;

  // nielsen
  auto* sn = app.add_subcommand("nielsen", "tuples, braid orbits, family words, blocks");
  sn->require_subcommand(1);
  std::string group = "psl62", classes, orbit_path, targets;
  int maxlen = 6;
  {
    auto* c = sn->add_subcommand("search", "search a product-one tuple in the class vector");
    c->add_option("--group", group, "psl62 or sN");
    c->add_option("--classes", classes, "comma-separated cycle types")->required();
    c->callback([&] { rc_code = cmd_nielsen_search(ctx, group, classes); });
  }
  {
    auto* c = sn->add_subcommand("orbit", "braid orbit closure of a searched tuple");
    c->add_option("--group", group, "psl62 or sN");
    c->add_option("--classes", classes, "comma-separated cycle types")->required();
    c->callback([&] { rc_code = cmd_nielsen_orbit(ctx, group, classes); });
  }
  {
    auto* c = sn->add_subcommand("family-words", "find braid words with target structures");
    c->add_option("--orbit", orbit_path, "orbit JSON file")->required();
    c->add_option("--targets", targets, "three cycle structures, comma-separated")->required();
    c->add_option("--maxlen", maxlen, "maximum word length");
    c->callback([&] { rc_code = cmd_nielsen_family(ctx, orbit_path, targets, maxlen); });
  }
  {
    auto* c = sn->add_subcommand("blocks", "block system of the family action");
    c->add_option("--orbit", orbit_path, "orbit JSON file with family words")->required();
    c->callback([&] { rc_code = cmd_nielsen_blocks(ctx, orbit_path); });
  }
  {
    auto* c = sn->add_subcommand("branch-data", "degree-2 subcover branch data");
    c->add_option("--orbit", orbit_path, "orbit JSON file with family words")->required();
    c->callback([&] { rc_code = cmd_nielsen_branch_data(ctx, orbit_path); });
  }

  // rh-genus
  int rh_degree = 0;
  std::vector<std::string> rh_types;
  {
    auto* c = app.add_subcommand("rh-genus", "Riemann-Hurwitz genus from cycle types");
    c->add_option("degree", rh_degree, "cover degree")->required();
    c->add_option("types", rh_types, "branch cycle types")->required()->expected(-1);
    c->callback([&] { rc_code = cmd_rh_genus(ctx, rh_degree, rh_types); });
  }

  // cover
  auto* sc = app.add_subcommand("cover", "numeric cover models over the lambda line");
  sc->require_subcommand(1);
  std::string shape_spec = "toy3", lambda = "0.25,0.0", cover_path, tuple_path, path_file;
  std::string center = "0.0,0.0";
  double radius = 0.1;
  int segments = 24;
  long trials = 200;
  bool clockwise = false;
  {
    auto* c = sc->add_subcommand("assemble", "report the coefficient system shape");
    c->add_option("--shape", shape_spec, "psl62, toy3 or a shape JSON file");
    c->add_option("--lambda", lambda, "base parameter re[,im]");
    c->callback([&] { rc_code = cmd_cover_assemble(ctx, shape_spec, lambda); });
  }
  {
    auto* c = sc->add_subcommand("solve", "multi-start Newton solve of the system");
    c->add_option("--shape", shape_spec, "psl62, toy3 or a shape JSON file");
    c->add_option("--lambda", lambda, "base parameter re[,im]");
    c->add_option("--trials", trials, "number of random Newton starts");
    c->callback([&] { rc_code = cmd_cover_solve(ctx, shape_spec, lambda, trials); });
  }
  {
    auto* c = sc->add_subcommand("deform", "continue a cover along a lambda path");
    c->add_option("--cover", cover_path, "cover JSON file")->required();
    c->add_option("--path", path_file, "path JSON file (overrides the loop options)");
    c->add_option("--center", center, "loop center re[,im]");
    c->add_option("--radius", radius, "loop radius");
    c->add_option("--segments", segments, "loop segments");
    c->add_flag("--clockwise", clockwise, "negative orientation");
    c->callback([&] {
      rc_code = cmd_cover_deform(ctx, cover_path, path_file, center, radius, segments, clockwise);
    });
  }
  {
    auto* c = sc->add_subcommand("monodromy", "numerical monodromy tuple of a cover");
    c->add_option("--cover", cover_path, "cover JSON file")->required();
    c->callback([&] { rc_code = cmd_cover_monodromy(ctx, cover_path); });
  }
  {
    auto* c = sc->add_subcommand("verify", "residual + structure checks of a cover");
    c->add_option("--cover", cover_path, "cover JSON file")->required();
    c->add_option("--tuple", tuple_path, "expected monodromy tuple JSON file");
    c->callback([&] { rc_code = cmd_cover_verify(ctx, cover_path, tuple_path); });
  }

  // chi
  std::string chi_in;
  {
    auto* c = app.add_subcommand("chi", "bijection intertwining block and fiber actions");
    c->add_option("--in", chi_in, "JSON file with 'block' and 'fiber' permutation pairs")
        ->required();
    c->callback([&] { rc_code = cmd_chi(ctx, chi_in); });
  }

  // verify
  auto* sv = app.add_subcommand("verify", "exact verification of maps and certificates");
  sv->require_subcommand(1);
  std::string fixture, vnum, vden, vexpected, vrpoly, cert_in;
  {
    auto* c = sv->add_subcommand("belyi", "ramification verification of p/q");
    c->add_option("--fixture", fixture, "built-in fixture (psi24)");
    c->add_option("--num", vnum, "numerator coefficients, ascending, comma-separated");
    c->add_option("--den", vden, "denominator coefficients");
    c->add_option("--expected", vexpected, "three expected cycle structures");
    c->add_option("--r", vrpoly, "optional r with q = p + r");
    c->callback([&] { rc_code = cmd_verify_belyi(ctx, fixture, vnum, vden, vexpected, vrpoly); });
  }
  {
    auto* c = sv->add_subcommand("certificate", "syntactic + specialization checks");
    c->add_option("--in", cert_in, "certificate JSON file");
    c->add_option("--fixture", fixture, "built-in fixture (deg7)");
    c->callback([&] { rc_code = cmd_verify_certificate(ctx, cert_in, fixture); });
  }

  // factor-modp
  std::string fm_coeffs;
  std::uint64_t fm_p = 2;
  {
    auto* c = app.add_subcommand("factor-modp", "factor a rational polynomial mod p");
    c->add_option("--coeffs", fm_coeffs, "ascending coefficients, comma-separated")->required();
    c->add_option("-p,--prime", fm_p, "prime modulus")->required();
    c->callback([&] { rc_code = cmd_factor_modp(ctx, fm_coeffs, fm_p); });
  }

  // lemma31
  std::string l_fixture, l_num, l_den, l_num2, l_den2;
  {
    auto* c = app.add_subcommand("lemma31", "specialization degree pattern of a composition");
    c->add_option("--fixture", l_fixture, "built-in fixture (deg7)");
    c->add_option("--num", l_num, "outer numerator coefficients");
    c->add_option("--den", l_den, "outer denominator coefficients");
    c->add_option("--num2", l_num2, "inner numerator (defaults to outer)");
    c->add_option("--den2", l_den2, "inner denominator (defaults to outer)");
    c->callback([&] { rc_code = cmd_lemma31(ctx, l_fixture, l_num, l_den, l_num2, l_den2); });
  }

  // model hyperelliptic
  auto* sm = app.add_subcommand("model", "derived curve models");
  sm->require_subcommand(1);
  std::string hfactors, hc = "3";
  {
    auto* c = sm->add_subcommand("hyperelliptic", "y^2 = c P(mu) from ramification factors");
    c->add_option("--factors", hfactors, "factors JSON file, or 'fixture' (default)");
    c->add_option("--c", hc, "leading constant c");
    c->callback([&] { rc_code = cmd_model_hyper(ctx, hfactors, hc); });
  }

  // recognize
  std::string r_re, r_im, r_height = "1000000000000000000000000000000";
  long r_d = 1;
  {
    auto* c = app.add_subcommand("recognize", "recognize a rational or quadratic number");
    c->add_option("--re", r_re, "real part, decimal string")->required();
    c->add_option("--im", r_im, "imaginary part, decimal string");
    c->add_option("--d", r_d, "field discriminant (1 = rational)");
    c->add_option("--height", r_height, "height bound for numerator and denominator");
    c->callback([&] { rc_code = cmd_recognize(ctx, r_re, r_im, r_d, r_height); });
  }

  // fit
  std::string f_points;
  int f_dn = 4, f_dd = 4;
  {
    auto* c = app.add_subcommand("fit", "exact rational-function interpolation");
    c->add_option("--points", f_points, "JSON array of [x, y] rational pairs")->required();
    c->add_option("--dn", f_dn, "numerator degree bound");
    c->add_option("--dd", f_dd, "denominator degree bound");
    c->callback([&] { rc_code = cmd_fit(ctx, f_points, f_dn, f_dd); });
  }

  // allow the global flags to appear after the subcommand name as well
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
    a->fallthrough();
    for (auto* s : a->get_subcommands([](CLI::App*) { return true; })) enable_fallthrough(s);
  };
  for (auto* s : app.get_subcommands([](CLI::App*) { return true; })) enable_fallthrough(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const InputFail& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const VerifyFail& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const nc::NotEquivalent& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const nc::NotUnique& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const nz::NoMatch& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const nz::BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 4;
  } catch (const jio::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  }
  return rc_code;
}
