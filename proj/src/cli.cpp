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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "keb/keb.hpp"

namespace keb::cli {
namespace {

using io::json;

struct Globals {
  Tolerance tol;
  int maxDim = 6;
  std::string format = "json";
  bool timings = false;
};

class Report {
 public:
  Report(std::string command, const Globals& g) : g_(g) {
    j_["schema"] = io::kSchema;
    j_["command"] = std::move(command);
    j_["inputsDigest"] = "";
    j_["toleranceProfile"] = io::tolerance_to_json(g.tol, g.maxDim);
    j_["verdicts"] = json::array();
  }

  void digest(const std::string& material) {
    j_["inputsDigest"] = "fnv1a64:" + io::hex64(io::fnv1a64(material + "|" + j_["toleranceProfile"].dump()));
  }

  json& add(json entry) {
    j_["verdicts"].push_back(std::move(entry));
    return j_["verdicts"].back();
  }

  template <class F>
  auto timed(const std::string& step, F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = f();
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (g_.timings) j_["timings"][step] = ms;
    return r;
  }

  json& root() { return j_; }

 private:
  json j_;
  const Globals& g_;
};

json cert_entry(const std::string& name, const Certificate& c, const std::string& target) {
  json e;
  e["name"] = name;
  e["kind"] = "certificate";
  e["target"] = target;
  e["certificate"] = io::certificate_to_json(c);
  return e;
}

json keb_entry(const std::string& name, const KebReport& r) {
  json e;
  e["name"] = name;
  e["kind"] = "keb";
  e["report"] = io::keb_report_to_json(r);
  return e;
}

std::string verdict_of(const json& e) {
  if (e.contains("certificate")) return e["certificate"]["verdict"].get<std::string>();
  if (e.contains("report")) return e["report"]["certificate"]["verdict"].get<std::string>();
  if (e.contains("verdict")) return e["verdict"].get<std::string>();
  return "";
}

std::string method_of(const json& e) {
  if (e.contains("certificate")) return e["certificate"]["method"].get<std::string>();
  if (e.contains("report"))
    return e["report"]["route"].get<std::string>() + ": " + e["report"].value("details", std::string());
  return "";
}

void emit(Report& rep, const Globals& g, std::ostream& out) {
  json& j = rep.root();
  if (g.format == "json") {
    out << j.dump(2) << "\n";
    return;
  }
  if (g.format == "csv") {
    if (j.contains("table")) {
      out << "family,d,k,lo,hi,status,necessary_lo,necessary_hi,gap_lo,gap_hi\n";
      for (const auto& row : j["table"]) {
        out << row["family"].get<std::string>() << "," << row["d"] << "," << row["k"] << "," << row["lo"] << ","
            << row["hi"] << "," << row["status"].get<std::string>() << "," << row["necessary_lo"] << ","
            << row["necessary_hi"] << ",";
        if (row.contains("gap_lo")) out << row["gap_lo"] << "," << row["gap_hi"];
        else out << ",";
        out << "\n";
      }
      return;
    }
    out << "name,verdict,method\n";
    for (const auto& e : j["verdicts"]) {
      std::string m = method_of(e);
      std::replace(m.begin(), m.end(), ',', ';');
      out << e["name"].get<std::string>() << "," << verdict_of(e) << "," << m << "\n";
    }
    return;
  }
  out << "command: " << j["command"].get<std::string>() << "\n";
  out << "inputs digest: " << j["inputsDigest"].get<std::string>() << "\n";
  if (j.contains("summary")) out << "summary: " << j["summary"].dump() << "\n";
  if (j.contains("table"))
    for (const auto& row : j["table"]) out << "  " << row.dump() << "\n";
  for (const auto& e : j["verdicts"]) {
    out << "  " << e["name"].get<std::string>() << ": " << verdict_of(e);
    std::string m = method_of(e);
    if (!m.empty()) out << " (" << m << ")";
    out << "\n";
  }
  if (j.contains("timings"))
    for (auto it = j["timings"].begin(); it != j["timings"].end(); ++it)
      out << "  time " << it.key() << ": " << it.value().get<double>() << " ms\n";
}

ChannelRep load_channel(const std::string& path, const Globals& g, std::string* text) {
  *text = io::read_file(path);
  return io::channel_from_json(io::parse_json(*text, path), g.maxDim);
}

Bipartite load_state(const std::string& path, const Globals& g, std::string* text) {
  *text = io::read_file(path);
  return io::state_from_json(io::parse_json(*text, path), g.maxDim);
}

// k-EB at one k: certification first, refutation when undecided or to attach a witness.
KebReport classify_k(const ChannelRep& phi, int k, const Tolerance& tol) {
  KebReport c = keb_certify(phi, k, tol);
  if (c.verdict.holds()) return c;
  if (k == 1) return c;
  KebReport r = keb_refute(phi, k, tol);
  if (r.verdict.fails()) return r;
  return c;
}

int cmd_analyze(const std::string& spec, int kMax, const Globals& g, std::ostream& out) {
  std::string text;
  ChannelRep phi = load_channel(spec, g, &text);
  Report rep("analyze", g);
  rep.digest(text);
  const Tolerance& tol = g.tol;
  rep.add(cert_entry("positive", rep.timed("positive", [&] { return is_positive_map(phi, tol); }), "positivity"));
  rep.add(cert_entry("CP", rep.timed("cp", [&] { return is_cp(phi, tol); }), "choi"));
  Certificate ppt = rep.timed("ppt", [&] { return is_ppt_map(phi, tol); });
  rep.add(cert_entry("PPT", ppt, ppt.method == "Choi eigensolve" ? "choi" : "choi_pt"));
  const int top = kMax > 0 ? std::min(kMax, phi.dim_in()) : phi.dim_in();
  for (int k = 1; k <= top; ++k) {
    KebReport r = rep.timed("k=" + std::to_string(k), [&] { return classify_k(phi, k, tol); });
    rep.add(keb_entry(std::to_string(k) + "-EB", r));
  }
  emit(rep, g, out);
  return kOk;
}

std::pair<int, int> parse_range(const std::string& s) {
  auto num = [&](const std::string& t) {
    try {
      std::size_t pos = 0;
      int v = std::stoi(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw InputError("bad k range \"" + s + "\"");
    }
  };
  for (const char* sep : {"..", ":", "-"}) {
    auto p = s.find(sep);
    if (p != std::string::npos && p > 0) return {num(s.substr(0, p)), num(s.substr(p + std::string(sep).size()))};
  }
  int v = num(s);
  return {v, v};
}

int cmd_threshold(const std::string& familyName, int d, const std::string& kRange, bool probe, const Globals& g,
                  std::ostream& out) {
  auto fam = family_from_string(familyName);
  if (!fam) throw InputError("unsupported family \"" + familyName + "\"");
  io::check_dim(d, g.maxDim, "d");
  auto [k0, k1] = parse_range(kRange);
  if (k0 < 1 || k1 < k0) throw InputError("bad k range \"" + kRange + "\"");
  Report rep("threshold", g);
  rep.digest(familyName + "|" + std::to_string(d) + "|" + std::to_string(k0) + ".." + std::to_string(k1) +
             (probe ? "|probe" : ""));
  json table = json::array();
  for (int k = k0; k <= k1; ++k) {
    ThresholdInterval t = keb_threshold(*fam, d, k);
    json row;
    row["family"] = familyName;
    row["d"] = d;
    row["k"] = k;
    row["lo"] = t.lo;
    row["hi"] = t.hi;
    row["status"] = t.exact ? "exact" : "sufficient";
    row["necessary_lo"] = t.necLo;
    row["necessary_hi"] = t.necHi;
    if (t.gap) {
      row["gap_lo"] = t.gap->first;
      row["gap_hi"] = t.gap->second;
      row["gap_status"] = "UNKNOWN";
    }
    if (!t.note.empty()) row["note"] = t.note;
    table.push_back(row);
    if (probe && k >= 2) {
      const double eps = 0.01;
      auto make = [&](double lam) {
        return *fam == FamilyName::WernerHolevo ? werner_holevo(d, lam) : phi_lambda(d, lam);
      };
      const std::string tag = "k=" + std::to_string(k);
      rep.add(keb_entry(tag + " certify at hi", keb_certify(make(t.hi), k, g.tol)));
      rep.add(keb_entry(tag + " certify at lo", keb_certify(make(t.lo), k, g.tol)));
      rep.add(keb_entry(tag + " refute at necessary hi+eps", keb_refute(make(t.necHi + eps), k, g.tol)));
      rep.add(keb_entry(tag + " refute at necessary lo-eps", keb_refute(make(t.necLo - eps), k, g.tol)));
    }
  }
  rep.root()["table"] = table;
  emit(rep, g, out);
  return kOk;
}

int cmd_sep(const std::string& state, bool certify, const Globals& g, std::ostream& out) {
  std::string text;
  Bipartite X = load_state(state, g, &text);
  Report rep("sep", g);
  rep.digest(text);
  Certificate r = rep.timed("refute", [&] { return sep_refute(X, g.tol); });
  rep.add(cert_entry("refutation", r, "state"));
  std::string cls = r.fails() ? "ENTANGLED" : "UNKNOWN";
  if (!r.fails() && certify) {
    Certificate c = rep.timed("certify", [&] { return sep_certify(X, g.tol); });
    rep.add(cert_entry("certification", c, "state"));
    if (c.holds()) cls = "SEPARABLE";
  }
  rep.root()["summary"] = {{"classification", cls}};
  emit(rep, g, out);
  return kOk;
}

Vector parse_vector_token(const std::string& tok, int d) {
  if (tok.size() >= 2 && tok[0] == 'e') {
    int i = 0;
    try {
      i = std::stoi(tok.substr(1));
    } catch (const std::exception&) {
      throw InputError("bad basis vector \"" + tok + "\"");
    }
    if (i < 1 || i > d) throw InputError("basis vector " + tok + " out of range for d = " + std::to_string(d));
    return basis_vector(d, i - 1);
  }
  Vector v = io::vector_from_json(io::parse_json(tok, "--product"), "--product");
  if (v.size() != d) throw InputError("--product vector length must equal --dim");
  return v;
}

int cmd_twirl(const std::string& state, const std::vector<std::string>& product, int dim, const Globals& g,
              std::ostream& out) {
  Report rep("twirl", g);
  Bipartite A(Matrix::Zero(1, 1), 1, 1);
  json summary;
  if (!product.empty()) {
    if (product.size() != 2) throw InputError("--product takes two vectors");
    io::check_dim(dim, g.maxDim, "--dim");
    Vector x = parse_vector_token(product[0], dim), y = parse_vector_token(product[1], dim);
    rep.digest("product|" + product[0] + "|" + product[1] + "|" + std::to_string(dim));
    Vector xy = kron(x, y);
    A = Bipartite(xy * xy.adjoint(), dim, dim);
    TwirlCoefficients pc = twirl_product_coeffs(x, y, dim);
    summary["product_coefficients"] = {pc.a, pc.b, pc.c};
  } else {
    if (state.empty()) throw InputError("twirl needs a state file or --product");
    std::string text;
    A = load_state(state, g, &text);
    rep.digest(text);
  }
  require_twirl_shape(A);
  const int d = A.dimA;
  TwirlProjection p = twirl_project(A, g.tol.eps_herm * 100 * std::max(1.0, A.matrix.cwiseAbs().maxCoeff()));
  summary["coefficients"] = {p.coeffs.a, p.coeffs.b, p.coeffs.c};
  summary["coefficient_form"] = "a I + b |Omega><Omega| + c Delta with independent a, b, c";
  Bipartite mc = rep.timed("monte_carlo", [&] { return twirl_monte_carlo(A, g.tol.samples, g.tol.seed); });
  summary["monte_carlo_samples"] = g.tol.samples;
  summary["monte_carlo_distance"] = (mc.matrix - p.projected.matrix).norm();
  if (summary.contains("product_coefficients")) {
    auto pc = summary["product_coefficients"];
    summary["product_vs_projection"] = std::max({std::abs(pc[0].get<double>() - p.coeffs.a),
                                                 std::abs(pc[1].get<double>() - p.coeffs.b),
                                                 std::abs(pc[2].get<double>() - p.coeffs.c)});
  }
  if (std::abs(A.matrix.trace().real()) > 1e-14) {
    Certificate c = twirl_cone_membership(p.coeffs, d, 2000, g.tol.seed, g.tol.eps_sep, g.tol);
    json& e = rep.add(cert_entry("twirl-cone membership", c, "twirl_operator"));
    e["coefficients"] = {p.coeffs.a, p.coeffs.b, p.coeffs.c};
    e["d"] = d;
  }
  rep.root()["summary"] = summary;
  emit(rep, g, out);
  return kOk;
}

int cmd_majorize(const std::string& spec, int k, const Globals& g, std::ostream& out) {
  std::string text;
  ChannelRep phi = load_channel(spec, g, &text);
  Report rep("majorize", g);
  rep.digest(text + "|k=" + std::to_string(k));
  MajorizationReport m = rep.timed("majorize", [&] { return keb_majorization_check(phi, k, g.tol); });
  rep.add(cert_entry("against tr_1", m.first, "rerun:majorize"))["k"] = k;
  rep.add(cert_entry("against tr_2", m.second, "rerun:majorize"))["k"] = k;
  rep.root()["summary"] = {{"factor", m.factor}, {"verdict", to_string(m.verdict.verdict)}};
  emit(rep, g, out);
  return kOk;
}

int cmd_power(const std::string& spec, int k, const Globals& g, std::ostream& out) {
  std::string text;
  ChannelRep phi = load_channel(spec, g, &text);
  Report rep("power", g);
  rep.digest(text + "|k=" + std::to_string(k));
  PowerResult p = rep.timed("power", [&] { return power_to_eb(phi, k, g.tol); });
  rep.root()["summary"] = {{"m", p.m}, {"sn_upper_bound", p.snUpper}, {"ceiling_bound", p.ceilBound}};
  rep.add(cert_entry("power is EB", p.verification, "state_of_power"));
  emit(rep, g, out);
  return kOk;
}

int cmd_explore(const std::string& spec, int k, int scan, const Globals& g, std::ostream& out) {
  std::string text;
  ChannelRep phi = load_channel(spec, g, &text);
  Report rep("explore", g);
  rep.digest(text + "|k=" + std::to_string(k) + "|scan=" + std::to_string(scan));
  rep.add(keb_entry("certify", keb_certify(phi, k, g.tol)));
  rep.add(keb_entry("refute", keb_refute(phi, k, g.tol)));
  if (phi.dim_in() == phi.dim_out())
    rep.add(cert_entry("EB necessary inequalities", eb_necessary(phi, default_lambda_grid(), g.tol), "rerun:eb_necessary"));
  const FamilySpec* f = phi.family();
  if (scan > 0 && f && f->name == FamilyName::PhiLambda) {
    ThresholdInterval t = keb_threshold(FamilyName::PhiLambda, phi.dim_in(), k);
    if (t.gap) {
      json pts = json::array();
      for (int i = 0; i < scan; ++i) {
        double lam = t.gap->first + (t.gap->second - t.gap->first) * (i + 0.5) / scan;
        KebReport r = keb_refute(phi_lambda(phi.dim_in(), lam), k, g.tol);
        pts.push_back({{"lambda", lam}, {"refuter", to_string(r.verdict.verdict)}, {"details", r.details}});
      }
      rep.root()["exploration"] = {{"gap", {t.gap->first, t.gap->second}},
                                   {"points", pts},
                                   {"note", "numeric exploration only; the gap verdict stays UNKNOWN"}};
    }
  }
  emit(rep, g, out);
  return kOk;
}

Tolerance tolerance_from_json(const json& j) {
  Tolerance t;
  t.eps_psd = j.value("eps_psd", t.eps_psd);
  t.eps_herm = j.value("eps_herm", t.eps_herm);
  t.eps_sep = j.value("eps_sep", t.eps_sep);
  t.eps_eq = j.value("eps_eq", t.eps_eq);
  t.restarts = j.value("restarts", t.restarts);
  t.samples = j.value("samples", t.samples);
  t.seed = j.value("seed", t.seed);
  return t;
}

bool quadratic_negative(const Matrix& M, const Vector& v, double eps) {
  if (v.size() != M.rows() || v.norm() == 0.0) return false;
  Vector u = v / v.norm();
  return (u.adjoint() * M * u)(0, 0).real() < -eps;
}

// Replays one FAILS entry against the original input.
bool replay(const json& e, const std::string& command, const std::string& inputPath, const Tolerance& tol,
            int maxDim) {
  std::string text;
  const std::string kind = e.value("kind", "");
  if (kind == "keb") {
    Globals g;
    g.maxDim = maxDim;
    ChannelRep phi = load_channel(inputPath, g, &text);
    KebReport r = io::keb_report_from_json(e.at("report"));
    if (!r.witness.empty()) return reverify_keb_failure(phi, r, tol);
    return keb_certify(phi, r.k, tol).verdict.fails();
  }
  const Certificate c = io::certificate_from_json(e.at("certificate"));
  const std::string target = e.value("target", "");
  if (target == "twirl_operator") {
    const auto& co = e.at("coefficients");
    const int d = e.at("d").get<int>();
    TwirlCoefficients t{co[0].get<double>(), co[1].get<double>(), co[2].get<double>()};
    Matrix X = t.to_operator(d);
    if (c.method == "PPT test of reconstructed operator")
      return quadratic_negative(partial_transpose(Bipartite(X, d, d), Side::Second).matrix, c.evidence.vector,
                                tol.eps_psd);
    return quadratic_negative(X, c.evidence.vector, tol.eps_psd);
  }
  Globals g;
  g.maxDim = maxDim;
  if (command == "sep") {
    Bipartite X = load_state(inputPath, g, &text);
    return reverify_refutation(X, c, tol);
  }
  ChannelRep phi = load_channel(inputPath, g, &text);
  if (target == "choi") return quadratic_negative(phi.choi().matrix, c.evidence.vector, tol.eps_psd);
  if (target == "choi_pt")
    return quadratic_negative(partial_transpose(phi.choi(), Side::Second).matrix, c.evidence.vector, tol.eps_psd);
  if (target == "positivity") {
    const Vector& u = c.evidence.vector;
    if (u.size() != phi.dim_in()) return false;
    Matrix out = phi.apply(u * u.adjoint() / u.squaredNorm());
    return min_eigenvalue(out, 1e-8 * std::max(1.0, out.cwiseAbs().maxCoeff())) < -tol.eps_psd;
  }
  if (target == "rerun:majorize") {
    MajorizationReport m = keb_majorization_check(phi, e.at("k").get<int>(), tol);
    const Certificate& again = e.value("name", "") == "against tr_1" ? m.first : m.second;
    return again.fails() && again.evidence.lo == c.evidence.lo;
  }
  if (target == "rerun:eb_necessary") return eb_necessary(phi, default_lambda_grid(), tol).fails();
  return false;
}

int cmd_verify(const std::string& reportPath, const std::string& inputPath, const Globals& g, std::ostream& out) {
  std::string text = io::read_file(reportPath);
  json report = io::parse_json(text, reportPath);
  if (report.value("schema", "") != std::string(io::kSchema))
    throw InputError(reportPath + ": unsupported report schema");
  const std::string command = report.value("command", "");
  const Tolerance tol = tolerance_from_json(report.value("toleranceProfile", json::object()));
  const int maxDim = report.value("toleranceProfile", json::object()).value("max_dim", g.maxDim);
  Report rep("verify", g);
  rep.digest(text);
  bool all = true;
  for (const auto& e : report.value("verdicts", json::array())) {
    if (verdict_of(e) != "FAILS") continue;
    if (inputPath.empty() && e.value("target", "") != "twirl_operator")
      throw InputError("verify needs --input for " + command + " reports");
    bool ok = replay(e, command, inputPath, tol, maxDim);
    all = all && ok;
    json r;
    r["name"] = e.value("name", "");
    r["kind"] = "replay";
    r["verdict"] = ok ? "FAILS" : "UNKNOWN";
    r["replayed"] = ok;
    rep.add(r);
  }
  rep.root()["summary"] = {{"all_replayed", all}};
  emit(rep, g, out);
  return all ? kOk : kNumericGate;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"keb_lab: k-entanglement-breaking map analysis"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto addGlobals = [&](CLI::App* s) {
    s->add_option("--tol-psd", g.tol.eps_psd, "PSD tolerance")->envname("KEB_TOL_PSD");
    s->add_option("--tol-sep", g.tol.eps_sep, "separable reconstruction tolerance")->envname("KEB_TOL_SEP");
    s->add_option("--restarts", g.tol.restarts, "search restarts")->envname("KEB_RESTARTS");
    s->add_option("--samples", g.tol.samples, "Monte Carlo samples")->envname("KEB_SAMPLES");
    s->add_option("--seed", seed, "random seed")->envname("KEB_SEED");
    s->add_option("--max-dim", g.maxDim, "maximum factor dimension")->envname("KEB_MAX_DIM");
    s->add_option("--format", g.format, "output format")
        ->envname("KEB_FORMAT")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    s->add_flag("--timings", g.timings, "include per-step timings");
  };

  std::string path, family, kRange = "1", report, input, state;
  std::vector<std::string> product;
  int k = 2, kMax = 0, d = 0, dim = 0, scan = 0;
  bool probe = false, noCertify = false;

  auto* analyze = app.add_subcommand("analyze", "full classification ladder for a channel spec");
  analyze->add_option("spec", path, "channel spec JSON")->required();
  analyze->add_option("--k-max", kMax, "largest k to analyze");
  auto* threshold = app.add_subcommand("threshold", "certified k-EB intervals for a parametric family");
  threshold->add_option("--family", family, "WernerHolevo or PhiLambda")->required();
  threshold->add_option("--d", d, "dimension")->required();
  threshold->add_option("--k", kRange, "k or k range a..b");
  threshold->add_flag("--probe", probe, "numeric probes at the interval endpoints");
  auto* sep = app.add_subcommand("sep", "separability of a state fixture");
  sep->add_option("state", path, "state fixture JSON")->required();
  sep->add_flag("--no-certify", noCertify, "refutation only");
  auto* twirl = app.add_subcommand("twirl", "orthogonal two-copy twirl");
  twirl->add_option("state", state, "state fixture JSON");
  twirl->add_option("--product", product, "two vectors: e<i> or JSON arrays")->expected(2);
  twirl->add_option("--dim", dim, "dimension for --product");
  auto* majorize = app.add_subcommand("majorize", "spectral majorization for a certified k-EB map");
  majorize->add_option("spec", path, "channel spec JSON")->required();
  majorize->add_option("--k", k, "k")->required();
  auto* power = app.add_subcommand("power", "power of a k-EB map that is EB");
  power->add_option("spec", path, "channel spec JSON")->required();
  power->add_option("--k", k, "k")->required();
  auto* explore = app.add_subcommand("explore", "numeric exploration without verdict upgrades");
  explore->add_option("spec", path, "channel spec JSON")->required();
  explore->add_option("--k", k, "k")->required();
  explore->add_option("--scan", scan, "points scanned across an unresolved gap");
  auto* verify = app.add_subcommand("verify", "replay FAILS evidence in a report");
  verify->add_option("report", report, "report JSON")->required();
  verify->add_option("--input", input, "original input file");
  for (auto* s : {analyze, threshold, sep, twirl, majorize, power, explore, verify}) addGlobals(s);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }
  g.tol.seed = seed;

  try {
    g.tol.validate();
    if (g.maxDim < 1) throw InputError("--max-dim must be positive");
    if (*analyze) return cmd_analyze(path, kMax, g, out);
    if (*threshold) return cmd_threshold(family, d, kRange, probe, g, out);
    if (*sep) return cmd_sep(path, !noCertify, g, out);
    if (*twirl) return cmd_twirl(state, product, dim, g, out);
    if (*majorize) return cmd_majorize(path, k, g, out);
    if (*power) return cmd_power(path, k, g, out);
    if (*explore) return cmd_explore(path, k, scan, g, out);
    if (*verify) return cmd_verify(report, input, g, out);
  } catch (const LimitError& e) {
    err << "limit exceeded: " << e.what() << "\n";
    return kLimitExceeded;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericGateError& e) {
    err << "numeric gate: " << e.what() << "\n";
    return kNumericGate;
  } catch (const io::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace keb::cli
