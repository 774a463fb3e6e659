#pragma once

// JSON serialization of permutations, tuples, orbits, exact polynomials,
// cover models, paths, certificates and samples, plus atomic file output
// and the report envelope carrying version, seed, precision and input hashes.

#include <json.hpp>

#include "covfam/exactalg.hpp"
#include "covfam/nielsen.hpp"
#include "covfam/numcover.hpp"
#include "covfam/reconstruct.hpp"

namespace covfam::jsonio {

using nlohmann::json;

inline constexpr const char* kToolVersion = "covfam 1.0.0";

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& w) : std::runtime_error(w) {}
};

// rationals as "num/den" (or "num" when integral)
std::string qrat_str(const exactalg::QRat& q);
exactalg::QRat qrat_parse(const std::string& s);

// permutations: {"degree": n, "images": [..]} with 1-based images
json perm_to_json(const permgrp::Perm& p);
permgrp::Perm perm_from_json(const json& j);

// {"degree", "class_vector", "perms", "verified"}
json tuple_to_json(const nielsen::GenTuple& t);
nielsen::GenTuple tuple_from_json(const json& j);

// canonical tuples + move maps + optional family images
json orbit_to_json(const nielsen::OrbitTable& o);
nielsen::OrbitTable orbit_from_json(const json& j);

// complex numbers as decimal strings with explicit exponent; round-trip
// exact at the stated precision
json complex_to_json(const numcover::BigComplex& z);
numcover::BigComplex complex_from_json(const json& j, int prec);

json shape_to_json(const numcover::RamShape& s);
numcover::RamShape shape_from_json(const json& j);

json cover_to_json(const numcover::CoverModel& m);
numcover::CoverModel cover_from_json(const json& j);

json path_to_json(const numcover::PathPlan& p);
numcover::PathPlan path_from_json(const json& j, int prec);

// exact polynomials: {"coeffs": ["num/den", ...]} ascending; quadratic
// coefficients {"a": "n/d", "b": "n/d", "d": <int>}
json qpoly_to_json(const exactalg::QPoly& p);
exactalg::QPoly qpoly_from_json(const json& j);
json quadpoly_to_json(const exactalg::QuadPoly& p);
exactalg::QuadPoly quadpoly_from_json(const json& j);

// cover data certificate in the transcription format for published tables
struct Certificate {
  exactalg::QuadPoly p, q;
  long field_d = -1;
  std::vector<std::string> expected_structures;
  std::string expected_locus;
};
json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const json& j);

json sample_to_json(const reconstruct::Sample& s);
reconstruct::Sample sample_from_json(const json& j, int prec);

// report envelope: {"version", "seed", "prec_bits", "inputs": {name: hash}}
json report_envelope(std::uint64_t seed, int prec,
                     const std::vector<std::pair<std::string, std::string>>& inputs);

// FNV-1a 64-bit content hash, hex encoded
std::string content_hash(const std::string& data);

// write via a temporary file in the same directory, then rename
void write_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace covfam::jsonio
