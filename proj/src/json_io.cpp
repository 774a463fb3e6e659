#include "covfam/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace covfam::jsonio {

namespace {

const char* loc_str(numcover::BranchLoc loc) {
  switch (loc) {
    case numcover::BranchLoc::Zero: return "0";
    case numcover::BranchLoc::Infinity: return "inf";
    case numcover::BranchLoc::OnePlusSqrtLambda: return "1+s";
    case numcover::BranchLoc::OneMinusSqrtLambda: return "1-s";
    case numcover::BranchLoc::Fixed: return "fixed";
  }
  return "?";
}

numcover::BranchLoc loc_parse(const std::string& s) {
  if (s == "0") return numcover::BranchLoc::Zero;
  if (s == "inf") return numcover::BranchLoc::Infinity;
  if (s == "1+s") return numcover::BranchLoc::OnePlusSqrtLambda;
  if (s == "1-s") return numcover::BranchLoc::OneMinusSqrtLambda;
  if (s == "fixed") return numcover::BranchLoc::Fixed;
  throw ParseError("unknown branch location: " + s);
}

json float_to_json(const numcover::BigFloat& x) { return x.str(); }

numcover::BigFloat float_from_json(const json& j, int prec) {
  if (!j.is_string()) throw ParseError("expected a decimal string");
  return numcover::BigFloat(j.get<std::string>(), prec);
}

}  // namespace

std::string qrat_str(const exactalg::QRat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

exactalg::QRat qrat_parse(const std::string& s) {
  exactalg::QRat q;
  if (q.set_str(s, 10) != 0) throw ParseError("bad rational: " + s);
  q.canonicalize();
  return q;
}

json perm_to_json(const permgrp::Perm& p) {
  std::vector<int> img;
  for (int i = 0; i < p.degree(); ++i) img.push_back(p[i] + 1);
  return json{{"degree", p.degree()}, {"images", img}};
}

permgrp::Perm perm_from_json(const json& j) {
  int n = j.at("degree").get<int>();
  std::vector<int> img = j.at("images").get<std::vector<int>>();
  if (static_cast<int>(img.size()) != n) throw ParseError("image count differs from degree");
  for (auto& v : img) {
    if (v < 1 || v > n) throw ParseError("image out of range");
    --v;
  }
  return permgrp::Perm(std::move(img));
}

json tuple_to_json(const nielsen::GenTuple& t) {
  json perms = json::array();
  for (const auto& g : t.perms) perms.push_back(perm_to_json(g)["images"]);
  json classes = json::array();
  for (const auto& c : t.classvector.classes) classes.push_back(c.str());
  return json{{"degree", t.degree},
              {"class_vector", classes},
              {"perms", perms},
              {"group_order", t.classvector.group_order},
              {"verified", t.verified}};
}

nielsen::GenTuple tuple_from_json(const json& j) {
  nielsen::GenTuple t;
  t.degree = j.at("degree").get<int>();
  t.classvector.degree = t.degree;
  for (const auto& c : j.at("class_vector"))
    t.classvector.classes.push_back(permgrp::CycleType::parse(c.get<std::string>()));
  if (j.contains("group_order"))
    t.classvector.group_order = j["group_order"].get<unsigned long long>();
  for (const auto& imgs : j.at("perms"))
    t.perms.push_back(perm_from_json(json{{"degree", t.degree}, {"images", imgs}}));
  t.verified = j.value("verified", false);
  return t;
}

json orbit_to_json(const nielsen::OrbitTable& o) {
  json tuples = json::array();
  for (const auto& tup : o.tuples) {
    json t = json::array();
    for (const auto& g : tup) t.push_back(perm_to_json(g)["images"]);
    tuples.push_back(std::move(t));
  }
  json classes = json::array();
  for (const auto& c : o.classvector.classes) classes.push_back(c.str());
  json out{{"degree", o.classvector.degree},
           {"class_vector", classes},
           {"group_order", o.classvector.group_order},
           {"tuples", tuples},
           {"straight", o.straight},
           {"straight_rank", o.straight_rank},
           {"qmove", o.qmove}};
  if (o.family) {
    json fam = json::array();
    for (const auto& g : *o.family) fam.push_back(perm_to_json(g)["images"]);
    out["family"] = std::move(fam);
  }
  return out;
}

nielsen::OrbitTable orbit_from_json(const json& j) {
  nielsen::OrbitTable o;
  o.classvector.degree = j.at("degree").get<int>();
  for (const auto& c : j.at("class_vector"))
    o.classvector.classes.push_back(permgrp::CycleType::parse(c.get<std::string>()));
  o.classvector.group_order = j.value("group_order", 0ULL);
  for (const auto& tup : j.at("tuples")) {
    std::vector<permgrp::Perm> perms;
    for (const auto& imgs : tup)
      perms.push_back(perm_from_json(json{{"degree", o.classvector.degree}, {"images", imgs}}));
    o.tuples.push_back(std::move(perms));
  }
  o.straight = j.at("straight").get<std::vector<int>>();
  o.straight_rank = j.at("straight_rank").get<std::vector<int>>();
  o.qmove = j.at("qmove").get<std::vector<std::vector<int>>>();
  if (j.contains("family")) {
    const int n = static_cast<int>(o.straight.size());
    std::array<permgrp::Perm, 3> fam;
    for (int i = 0; i < 3; ++i)
      fam[static_cast<std::size_t>(i)] =
          perm_from_json(json{{"degree", n}, {"images", j["family"][static_cast<std::size_t>(i)]}});
    o.family = std::move(fam);
  }
  return o;
}

json complex_to_json(const numcover::BigComplex& z) {
  return json{{"re", float_to_json(z.re)}, {"im", float_to_json(z.im)}};
}

numcover::BigComplex complex_from_json(const json& j, int prec) {
  return {float_from_json(j.at("re"), prec), float_from_json(j.at("im"), prec)};
}

json shape_to_json(const numcover::RamShape& s) {
  json branches = json::array();
  for (const auto& b : s.branches) {
    json bj{{"loc", loc_str(b.loc)}, {"type", b.type.str()}};
    if (b.loc == numcover::BranchLoc::Fixed) {
      bj["fixed_re"] = qrat_str(b.fixed_re);
      bj["fixed_im"] = qrat_str(b.fixed_im);
    }
    branches.push_back(std::move(bj));
  }
  json traces = json::array();
  for (const auto& t : s.traces)
    traces.push_back(json{{"branch", t.branch}, {"mult", t.mult}, {"value", qrat_str(t.value)}});
  return json{{"degree", s.degree},
              {"branches", branches},
              {"inf_mult", s.inf_mult},
              {"traces", traces}};
}

numcover::RamShape shape_from_json(const json& j) {
  numcover::RamShape s;
  s.degree = j.at("degree").get<int>();
  s.inf_mult = j.at("inf_mult").get<int>();
  for (const auto& bj : j.at("branches")) {
    numcover::BranchDesc b;
    b.loc = loc_parse(bj.at("loc").get<std::string>());
    b.type = permgrp::CycleType::parse(bj.at("type").get<std::string>());
    if (b.loc == numcover::BranchLoc::Fixed) {
      b.fixed_re = qrat_parse(bj.at("fixed_re").get<std::string>());
      b.fixed_im = qrat_parse(bj.at("fixed_im").get<std::string>());
    }
    s.branches.push_back(std::move(b));
  }
  for (const auto& tj : j.at("traces"))
    s.traces.push_back({tj.at("branch").get<int>(), tj.at("mult").get<int>(),
                        qrat_parse(tj.at("value").get<std::string>())});
  return s;
}

json cover_to_json(const numcover::CoverModel& m) {
  json factors = json::array();
  for (const auto& [key, poly] : m.factors) {
    json coeffs = json::array();
    for (const auto& c : poly.c) coeffs.push_back(complex_to_json(c));
    factors.push_back(json{{"branch_index", key.first},
                           {"branch", loc_str(m.shape.branches[static_cast<std::size_t>(key.first)].loc)},
                           {"mult", key.second},
                           {"coeffs", std::move(coeffs)}});
  }
  return json{{"shape", shape_to_json(m.shape)},
              {"lambda", complex_to_json(m.lambda)},
              {"sqrt_lambda", complex_to_json(m.sqrt_lambda)},
              {"prec_bits", m.prec},
              {"c0", complex_to_json(m.c0)},
              {"factors", std::move(factors)}};
}

numcover::CoverModel cover_from_json(const json& j) {
  numcover::CoverModel m;
  m.shape = shape_from_json(j.at("shape"));
  m.prec = j.at("prec_bits").get<int>();
  m.lambda = complex_from_json(j.at("lambda"), m.prec);
  if (j.contains("sqrt_lambda"))
    m.sqrt_lambda = complex_from_json(j["sqrt_lambda"], m.prec);
  else
    m.sqrt_lambda = numcover::bc_sqrt(m.lambda);
  m.c0 = complex_from_json(j.at("c0"), m.prec);
  for (const auto& fj : j.at("factors")) {
    std::vector<numcover::BigComplex> coeffs;
    for (const auto& cj : fj.at("coeffs")) coeffs.push_back(complex_from_json(cj, m.prec));
    m.factors[{fj.at("branch_index").get<int>(), fj.at("mult").get<int>()}] =
        numcover::CPoly(std::move(coeffs));
  }
  return m;
}

json path_to_json(const numcover::PathPlan& p) {
  json pts = json::array();
  for (const auto& w : p.waypoints) pts.push_back(complex_to_json(w));
  return json{{"waypoints", pts}, {"max_step", p.max_step}, {"min_step", p.min_step}};
}

numcover::PathPlan path_from_json(const json& j, int prec) {
  numcover::PathPlan p;
  for (const auto& wj : j.at("waypoints")) p.waypoints.push_back(complex_from_json(wj, prec));
  p.max_step = j.value("max_step", 0.1);
  p.min_step = j.value("min_step", 1e-12);
  return p;
}

json qpoly_to_json(const exactalg::QPoly& p) {
  json coeffs = json::array();
  for (const auto& c : p.c) coeffs.push_back(qrat_str(c));
  return json{{"coeffs", coeffs}};
}

exactalg::QPoly qpoly_from_json(const json& j) {
  std::vector<exactalg::QRat> c;
  for (const auto& cj : j.at("coeffs")) c.push_back(qrat_parse(cj.get<std::string>()));
  return exactalg::QPoly(std::move(c));
}

json quadpoly_to_json(const exactalg::QuadPoly& p) {
  json coeffs = json::array();
  for (const auto& c : p.c)
    coeffs.push_back(json{{"a", qrat_str(c.a)}, {"b", qrat_str(c.b)}, {"d", c.d}});
  return json{{"coeffs", coeffs}};
}

exactalg::QuadPoly quadpoly_from_json(const json& j) {
  std::vector<exactalg::QuadElem> c;
  for (const auto& cj : j.at("coeffs"))
    c.emplace_back(qrat_parse(cj.at("a").get<std::string>()),
                   qrat_parse(cj.at("b").get<std::string>()), cj.at("d").get<long>());
  return exactalg::QuadPoly(std::move(c));
}

json certificate_to_json(const Certificate& c) {
  return json{{"p", quadpoly_to_json(c.p)},
              {"q", quadpoly_to_json(c.q)},
              {"field_d", c.field_d},
              {"expected_structures", c.expected_structures},
              {"expected_locus", c.expected_locus}};
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.p = quadpoly_from_json(j.at("p"));
  c.q = quadpoly_from_json(j.at("q"));
  c.field_d = j.at("field_d").get<long>();
  c.expected_structures = j.at("expected_structures").get<std::vector<std::string>>();
  c.expected_locus = j.at("expected_locus").get<std::string>();
  return c;
}

json sample_to_json(const reconstruct::Sample& s) {
  json coeffs = json::array();
  for (const auto& c : s.coeffs) coeffs.push_back(complex_to_json(c));
  return json{{"mu", qrat_str(s.mu)}, {"yval", complex_to_json(s.yval)}, {"coeffs", coeffs}};
}

reconstruct::Sample sample_from_json(const json& j, int prec) {
  reconstruct::Sample s;
  s.mu = qrat_parse(j.at("mu").get<std::string>());
  s.yval = complex_from_json(j.at("yval"), prec);
  for (const auto& cj : j.at("coeffs")) s.coeffs.push_back(complex_from_json(cj, prec));
  return s;
}

json report_envelope(std::uint64_t seed, int prec,
                     const std::vector<std::pair<std::string, std::string>>& inputs) {
  json in = json::object();
  for (const auto& [name, data] : inputs) in[name] = content_hash(data);
  return json{{"version", kToolVersion}, {"seed", seed}, {"prec_bits", prec}, {"inputs", in}};
}

std::string content_hash(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char b : data) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::string& path, const std::string& contents) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp);
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace covfam::jsonio
