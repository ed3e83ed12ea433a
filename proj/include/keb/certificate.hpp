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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "keb/core.hpp"

namespace keb {

enum class Verdict { Holds, Fails, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Fails: return "FAILS";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

enum class EvidenceKind {
  None,
  Eigenpair,         // value + vector
  SchmidtWitness,    // vector of Schmidt rank <= k with negative quadratic form
  Decomposition,     // separable decomposition attached
  Analytic,          // closed-form criterion, see note
  Interval,          // lo/hi
  WitnessOperator,   // block-positive operator W with tr(WX) < 0
  Realignment,       // value = nuclear norm minus trace
  PrefixIndex,       // value = 1-based prefix index
};

inline const char* to_string(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::None: return "none";
    case EvidenceKind::Eigenpair: return "eigenpair";
    case EvidenceKind::SchmidtWitness: return "schmidt_witness";
    case EvidenceKind::Decomposition: return "decomposition";
    case EvidenceKind::Analytic: return "analytic";
    case EvidenceKind::Interval: return "interval";
    case EvidenceKind::WitnessOperator: return "witness_operator";
    case EvidenceKind::Realignment: return "realignment";
    case EvidenceKind::PrefixIndex: return "prefix_index";
  }
  return "none";
}

// X = sum_n w_n P(|x_n><x_n| (x) |y_n><y_n|), P the orthogonal two-copy twirl.
struct TwirledTerm {
  double weight = 0.0;
  Vector x;
  Vector y;
};

struct SeparableDecomposition {
  std::vector<std::pair<Matrix, Matrix>> terms;  // X = sum A_i (x) B_i
  std::vector<TwirledTerm> twirled;
  double residual = 0.0;
};

struct Evidence {
  EvidenceKind kind = EvidenceKind::None;
  std::optional<double> value;
  Vector vector;   // eigenvector or witness vector
  Matrix matrix;   // witness operator
  double lo = 0.0, hi = 0.0;
  int schmidt_rank = 0;
  std::string note;
};

struct Certificate {
  Verdict verdict = Verdict::Unknown;
  std::string method;
  Evidence evidence;
  std::optional<SeparableDecomposition> decomposition;
  bool analytic_without_decomposition = false;
  bool clamped = false;
  std::vector<std::string> notes;

  bool holds() const { return verdict == Verdict::Holds; }
  bool fails() const { return verdict == Verdict::Fails; }
  bool unknown() const { return verdict == Verdict::Unknown; }
};

inline Certificate make_certificate(Verdict v, std::string method, Evidence ev = {}) {
  Certificate c;
  c.verdict = v;
  c.method = std::move(method);
  c.evidence = std::move(ev);
  return c;
}

inline Evidence analytic(std::string note) {
  Evidence e;
  e.kind = EvidenceKind::Analytic;
  e.note = std::move(note);
  return e;
}

inline Evidence eigenpair(double value, Vector v) {
  Evidence e;
  e.kind = EvidenceKind::Eigenpair;
  e.value = value;
  e.vector = std::move(v);
  return e;
}

}  // namespace keb
