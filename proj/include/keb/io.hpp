// Copyright 2026 The keb-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "keb/certificate.hpp"
#include "keb/channels.hpp"
#include "keb/core.hpp"
#include "keb/entanglement_breaking.hpp"

namespace keb::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "keb-lab/1";

inline std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses JSON text; syntax errors carry line and column.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(complex_to_json(M(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline cplx complex_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError(path + ": expected a number or an [re, im] pair");
}

inline Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError(path + ": expected a nonempty list of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  if (cols == 0) throw InputError(path + ": rows must be nonempty");
  Matrix M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw InputError(path + "/" + std::to_string(i) + ": ragged row (expected " + std::to_string(cols) + " entries)");
    for (std::size_t c = 0; c < cols; ++c)
      M(i, c) = complex_from_json(j[i][c], path + "/" + std::to_string(i) + "/" + std::to_string(c));
  }
  return M;
}

inline Vector vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected a list");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i], path + "/" + std::to_string(i));
  return v;
}

inline const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw InputError(path + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline int require_int(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_integer()) throw InputError(path + "/" + key + ": expected an integer");
  return v.get<int>();
}

inline double require_double(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number()) throw InputError(path + "/" + key + ": expected a number");
  return v.get<double>();
}

inline void check_dim(int d, int maxDim, const std::string& what) {
  if (d < 1) throw InputError(what + " must be positive");
  if (d > maxDim)
    throw LimitError(what + " = " + std::to_string(d) + " exceeds the maximum " + std::to_string(maxDim));
}

inline ChannelRep channel_from_json(const json& j, int maxDim, const std::string& path = "");

inline ChannelRep family_from_json(const json& f, int dimIn, int dimOut, int maxDim, const std::string& path) {
  const json& nameJ = require(f, "name", path);
  if (!nameJ.is_string()) throw InputError(path + "/name: expected a string");
  auto name = family_from_string(nameJ.get<std::string>());
  if (!name) throw InputError(path + "/name: unknown family \"" + nameJ.get<std::string>() + "\"");
  const json params = f.contains("params") ? f.at("params") : json::object();
  const std::string pp = path + "/params";
  FamilySpec s;
  s.name = *name;
  s.d = dimIn;
  s.d_out = dimOut;
  switch (*name) {
    case FamilyName::WernerHolevo:
    case FamilyName::PhiLambda: s.lambda = require_double(params, "lambda", pp); break;
    case FamilyName::WernerModified:
      s.lambda = require_double(params, "lambda", pp);
      s.maps = {channel_from_json(require(params, "gamma", pp), maxDim, pp + "/gamma")};
      break;
    case FamilyName::Schur: s.param = matrix_from_json(require(params, "A", pp), pp + "/A"); break;
    case FamilyName::AdV: s.param = matrix_from_json(require(params, "V", pp), pp + "/V"); break;
    case FamilyName::DirectSum: {
      const json& maps = require(params, "maps", pp);
      if (!maps.is_array() || maps.size() != 2) throw InputError(pp + "/maps: expected two channel specs");
      s.maps = {channel_from_json(maps[0], maxDim, pp + "/maps/0"), channel_from_json(maps[1], maxDim, pp + "/maps/1")};
      break;
    }
    case FamilyName::Identity:
    case FamilyName::Transpose:
    case FamilyName::TraceMap: break;
  }
  ChannelRep phi = family_make(std::move(s));
  if (phi.dim_in() != dimIn || phi.dim_out() != dimOut)
    throw InputError(path + ": family dimensions " + std::to_string(phi.dim_in()) + "->" +
                     std::to_string(phi.dim_out()) + " disagree with dim_in/dim_out");
  return phi;
}

// {"dim_in", "dim_out", "body": {"kraus": [M...]} | {"choi": M} | {"family": {"name", "params"}}}
inline ChannelRep channel_from_json(const json& j, int maxDim, const std::string& path) {
  const std::string p = path.empty() ? "$" : path;
  const int dimIn = require_int(j, "dim_in", p);
  const int dimOut = require_int(j, "dim_out", p);
  check_dim(dimIn, maxDim, p + "/dim_in");
  check_dim(dimOut, maxDim, p + "/dim_out");
  const json& body = require(j, "body", p);
  const std::string bp = p + "/body";
  if (body.contains("kraus")) {
    const json& ks = body.at("kraus");
    if (!ks.is_array() || ks.empty()) throw InputError(bp + "/kraus: expected a nonempty list of matrices");
    std::vector<Matrix> kraus;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      Matrix V = matrix_from_json(ks[i], bp + "/kraus/" + std::to_string(i));
      if (V.rows() != dimIn || V.cols() != dimOut)
        throw InputError(bp + "/kraus/" + std::to_string(i) + ": expected a " + std::to_string(dimIn) + "x" +
                         std::to_string(dimOut) + " matrix");
      kraus.push_back(std::move(V));
    }
    return ChannelRep::from_kraus(std::move(kraus));
  }
  if (body.contains("choi")) {
    Matrix C = matrix_from_json(body.at("choi"), bp + "/choi");
    if (C.rows() != dimIn * dimOut || C.cols() != dimIn * dimOut)
      throw InputError(bp + "/choi: expected a square matrix of size " + std::to_string(dimIn * dimOut));
    return ChannelRep::from_choi(Bipartite(std::move(C), dimIn, dimOut));
  }
  if (body.contains("family")) return family_from_json(body.at("family"), dimIn, dimOut, maxDim, bp + "/family");
  throw InputError(bp + ": expected one of \"kraus\", \"choi\", \"family\"");
}

// {"dimA", "dimB", "matrix", optional "name", "parameters"}
inline Bipartite state_from_json(const json& j, int maxDim) {
  const int dA = require_int(j, "dimA", "$");
  const int dB = require_int(j, "dimB", "$");
  check_dim(dA, maxDim, "$/dimA");
  check_dim(dB, maxDim, "$/dimB");
  Matrix M = matrix_from_json(require(j, "matrix", "$"), "$/matrix");
  if (M.rows() != dA * dB || M.cols() != dA * dB)
    throw InputError("$/matrix: expected a square matrix of size " + std::to_string(dA * dB));
  return Bipartite(std::move(M), dA, dB);
}

inline json state_to_json(const Bipartite& X) {
  json j;
  j["dimA"] = X.dimA;
  j["dimB"] = X.dimB;
  j["matrix"] = matrix_to_json(X.matrix);
  return j;
}

inline json tolerance_to_json(const Tolerance& t, int maxDim) {
  json j;
  j["eps_psd"] = t.eps_psd;
  j["eps_herm"] = t.eps_herm;
  j["eps_sep"] = t.eps_sep;
  j["eps_eq"] = t.eps_eq;
  j["restarts"] = t.restarts;
  j["samples"] = t.samples;
  j["seed"] = t.seed;
  j["max_dim"] = maxDim;
  return j;
}

inline json evidence_to_json(const Evidence& e) {
  json j;
  j["kind"] = to_string(e.kind);
  if (e.value) j["value"] = *e.value;
  if (e.vector.size() > 0) j["vector"] = vector_to_json(e.vector);
  if (e.matrix.size() > 0) j["matrix"] = matrix_to_json(e.matrix);
  if (e.kind == EvidenceKind::Interval || e.kind == EvidenceKind::PrefixIndex) {
    j["lo"] = e.lo;
    j["hi"] = e.hi;
  }
  if (e.schmidt_rank > 0) j["schmidt_rank"] = e.schmidt_rank;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

inline Evidence evidence_from_json(const json& j) {
  Evidence e;
  const std::string kind = j.value("kind", "none");
  for (auto k : {EvidenceKind::None, EvidenceKind::Eigenpair, EvidenceKind::SchmidtWitness, EvidenceKind::Decomposition,
                 EvidenceKind::Analytic, EvidenceKind::Interval, EvidenceKind::WitnessOperator,
                 EvidenceKind::Realignment, EvidenceKind::PrefixIndex})
    if (kind == to_string(k)) e.kind = k;
  if (j.contains("value")) e.value = j.at("value").get<double>();
  if (j.contains("vector")) e.vector = vector_from_json(j.at("vector"), "evidence/vector");
  if (j.contains("matrix")) e.matrix = matrix_from_json(j.at("matrix"), "evidence/matrix");
  e.lo = j.value("lo", 0.0);
  e.hi = j.value("hi", 0.0);
  e.schmidt_rank = j.value("schmidt_rank", 0);
  e.note = j.value("note", "");
  return e;
}

inline json decomposition_to_json(const SeparableDecomposition& d) {
  json j;
  json terms = json::array();
  for (const auto& [A, B] : d.terms) terms.push_back({{"A", matrix_to_json(A)}, {"B", matrix_to_json(B)}});
  j["terms"] = std::move(terms);
  if (!d.twirled.empty()) {
    json tw = json::array();
    for (const auto& t : d.twirled)
      tw.push_back({{"weight", t.weight}, {"x", vector_to_json(t.x)}, {"y", vector_to_json(t.y)}});
    j["twirled"] = std::move(tw);
  }
  j["residual"] = d.residual;
  return j;
}

inline SeparableDecomposition decomposition_from_json(const json& j) {
  SeparableDecomposition d;
  for (const auto& t : j.value("terms", json::array()))
    d.terms.push_back({matrix_from_json(t.at("A"), "terms/A"), matrix_from_json(t.at("B"), "terms/B")});
  for (const auto& t : j.value("twirled", json::array()))
    d.twirled.push_back({t.at("weight").get<double>(), vector_from_json(t.at("x"), "twirled/x"),
                         vector_from_json(t.at("y"), "twirled/y")});
  d.residual = j.value("residual", 0.0);
  return d;
}

inline json certificate_to_json(const Certificate& c) {
  json j;
  j["verdict"] = to_string(c.verdict);
  j["method"] = c.method;
  j["evidence"] = evidence_to_json(c.evidence);
  if (c.decomposition) j["decomposition"] = decomposition_to_json(*c.decomposition);
  if (c.analytic_without_decomposition) j["analytic_without_decomposition"] = true;
  if (c.clamped) j["clamped"] = true;
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

inline Certificate certificate_from_json(const json& j) {
  Certificate c;
  const std::string v = j.value("verdict", "UNKNOWN");
  c.verdict = v == "HOLDS" ? Verdict::Holds : v == "FAILS" ? Verdict::Fails : Verdict::Unknown;
  c.method = j.value("method", "");
  if (j.contains("evidence")) c.evidence = evidence_from_json(j.at("evidence"));
  if (j.contains("decomposition")) c.decomposition = decomposition_from_json(j.at("decomposition"));
  c.analytic_without_decomposition = j.value("analytic_without_decomposition", false);
  c.clamped = j.value("clamped", false);
  if (j.contains("notes")) c.notes = j.at("notes").get<std::vector<std::string>>();
  return c;
}

inline json keb_report_to_json(const KebReport& r) {
  json j;
  j["k"] = r.k;
  j["route"] = to_string(r.route);
  j["certificate"] = certificate_to_json(r.verdict);
  if (!r.details.empty()) j["details"] = r.details;
  if (!r.witness.empty()) {
    json w = json::array();
    for (const auto& V : r.witness) w.push_back(matrix_to_json(V));
    j["witness_kraus"] = std::move(w);
  }
  if (r.composite) j["composite"] = certificate_to_json(*r.composite);
  return j;
}

inline KebReport keb_report_from_json(const json& j) {
  KebReport r;
  r.k = j.value("k", 0);
  r.verdict = certificate_from_json(j.at("certificate"));
  r.details = j.value("details", "");
  for (const auto& w : j.value("witness_kraus", json::array())) r.witness.push_back(matrix_from_json(w, "witness_kraus"));
  if (j.contains("composite")) r.composite = certificate_from_json(j.at("composite"));
  return r;
}

}  // namespace keb::io
