#pragma once

// Command-line front end. Everything lives in this header so the tests can
// drive run() in-process; main.cpp only forwards argv.
//
// Operator files:
//   {"n": 3, "kind": "operator_s2" | "vecmap" | "symmat", "data": [...], "meta": {...}}
// data is row-major: a d x d svec-coordinate matrix (d = n(n+1)/2), an
// n x n matrix f standing for P2(f), or an svec vector. Nested row arrays
// are accepted on input; output is always flat.

#include "symprod/geninv.hpp"
#include "symprod/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace symprod::cli {

using json = nlohmann::json;

enum Exit : int { kOk = 0, kPropertyFailure = 1, kSchemaError = 2, kDimensionMismatch = 3 };

inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Schema:
    case ErrorCode::BadLength:
    case ErrorCode::NonSymmetric:
    case ErrorCode::InvalidCone: return kSchemaError;
    case ErrorCode::DimensionMismatch: return kDimensionMismatch;
    default: return kPropertyFailure;
  }
}

inline Error schema(const std::string& what) { return Error(ErrorCode::Schema, what); }

// ---------------------------------------------------------------------------
// Files

struct OperatorFile {
  int n = 0;
  std::string kind;
  std::vector<double> data;
  std::map<std::string, std::string> meta;
};

inline std::size_t expected_length(const std::string& kind, int n) {
  const auto d = static_cast<std::size_t>(sym_dim(n));
  const auto m = static_cast<std::size_t>(n);
  if (kind == "operator_s2") return d * d;
  if (kind == "vecmap") return m * m;
  if (kind == "symmat") return d;
  throw schema("unknown kind \"" + kind + "\"");
}

inline std::vector<double> numbers(const json& a, const std::string& field) {
  if (!a.is_array()) throw schema(field + " must be an array");
  std::vector<double> out;
  for (const json& v : a) {
    if (v.is_array()) {
      for (const json& w : v) {
        if (!w.is_number()) throw schema(field + " entries must be numbers");
        out.push_back(w.get<double>());
      }
    } else {
      if (!v.is_number()) throw schema(field + " entries must be numbers");
      out.push_back(v.get<double>());
    }
  }
  for (double x : out)
    if (!std::isfinite(x)) throw schema(field + " entries must be finite");
  return out;
}

inline OperatorFile parse_operator_file(const json& j) {
  if (!j.is_object()) throw schema("operator file must be a JSON object");
  for (const char* key : {"n", "kind", "data"})
    if (!j.contains(key)) throw schema(std::string("missing field \"") + key + "\"");
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1 || j["n"].get<long long>() > 64)
    throw schema("n must be an integer in [1, 64]");
  if (!j["kind"].is_string()) throw schema("kind must be a string");
  OperatorFile f;
  f.n = j["n"].get<int>();
  f.kind = j["kind"].get<std::string>();
  f.data = numbers(j["data"], "data");
  const std::size_t want = expected_length(f.kind, f.n);
  if (f.data.size() != want)
    throw schema("data has " + std::to_string(f.data.size()) + " entries, kind " + f.kind + " with n = " +
                 std::to_string(f.n) + " needs " + std::to_string(want));
  if (j.contains("meta")) {
    if (!j["meta"].is_object()) throw schema("meta must be an object");
    for (const auto& [k, v] : j["meta"].items()) {
      if (!v.is_string()) throw schema("meta values must be strings");
      f.meta[k] = v.get<std::string>();
    }
  }
  return f;
}

inline json to_json(const OperatorFile& f) {
  json j{{"n", f.n}, {"kind", f.kind}, {"data", f.data}};
  if (!f.meta.empty()) j["meta"] = f.meta;
  return j;
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw schema(path + ": " + e.what());
  }
}

inline MatrixXd row_major(const std::vector<double>& data, Index rows, Index cols) {
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = data[static_cast<std::size_t>(i * cols + j)];
  return m;
}

inline std::vector<double> flatten(const MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

inline std::vector<double> to_vector(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// operator_s2 as given; vecmap f as P2(f).
inline LinOp to_operator(const OperatorFile& f) {
  if (f.kind == "operator_s2") {
    const Index d = sym_dim(f.n);
    return LinOp(f.n, row_major(f.data, d, d));
  }
  if (f.kind == "vecmap") return p2_of(VecMap(row_major(f.data, f.n, f.n)));
  throw schema("kind " + f.kind + " is not an operator");
}

inline LinOp load_operator(const std::string& path) { return to_operator(parse_operator_file(read_json(path))); }

inline json operator_json(const LinOp& t) { return to_json({t.n(), "operator_s2", flatten(t.mat()), {}}); }
inline json vecmap_json(const VecMap& f) { return to_json({f.n(), "vecmap", flatten(f.mat), {}}); }
inline json symmat_json(const SymMat& a) { return to_json({a.n(), "symmat", to_vector(a.coords()), {}}); }

/// Cone file: {"n": n, "generators": [[g_1], [g_2], ...]}, one array per generator.
inline ConeSpec load_cone(const std::string& spec, int n, std::uint64_t seed) {
  if (spec == "orthant") return ConeSpec::orthant(n);
  const std::string prefix = "generated:";
  if (spec.rfind(prefix, 0) != 0) throw schema("--cone must be orthant or generated:<path>");
  const json j = read_json(spec.substr(prefix.size()));
  if (!j.is_object() || !j.contains("n") || !j.contains("generators"))
    throw schema("cone file needs n and generators");
  if (!j["n"].is_number_integer()) throw schema("cone n must be an integer");
  const int cn = j["n"].get<int>();
  if (cn != n)
    throw Error(ErrorCode::DimensionMismatch,
                "cone has n = " + std::to_string(cn) + ", operator has n = " + std::to_string(n));
  const json& gs = j["generators"];
  if (!gs.is_array() || gs.empty()) throw schema("generators must be a non-empty array");
  MatrixXd g(cn, static_cast<Index>(gs.size()));
  for (std::size_t c = 0; c < gs.size(); ++c) {
    const std::vector<double> v = numbers(gs[c], "generator");
    if (v.size() != static_cast<std::size_t>(cn))
      throw Error(ErrorCode::DimensionMismatch, "generator " + std::to_string(c) + " has wrong length");
    for (int i = 0; i < cn; ++i) g(i, static_cast<Index>(c)) = v[static_cast<std::size_t>(i)];
  }
  return ConeSpec::generated(std::move(g), seed);
}

// ---------------------------------------------------------------------------
// Result payloads

inline json to_json(const PreserverForm& form) {
  if (const auto* sp = std::get_if<SecondPower>(&form))
    return {{"variant", "SecondPower"}, {"c", sp->c}, {"f", vecmap_json(sp->f)}, {"residual", sp->residual}};
  if (const auto* fn = std::get_if<Functional>(&form))
    return {{"variant", "Functional"}, {"u", symmat_json(fn->u)}, {"b", symmat_json(fn->b)},
            {"residual", fn->residual}};
  const auto& np = std::get<NotPreserver>(form);
  return {{"variant", "NotPreserver"},
          {"witness", to_vector(np.witness)},
          {"minor", {{"rows", {np.minor.i, np.minor.j}}, {"cols", {np.minor.k, np.minor.l}}}},
          {"image_rank", np.image_rank}};
}

inline json optional_vector(const std::optional<VectorXd>& v) { return v ? json(to_vector(*v)) : json(nullptr); }

inline json to_json(const RankOneCheck& r) {
  json j{{"holds", r.holds},
         {"witness", optional_vector(r.witness)},
         {"points_evaluated", r.points_evaluated},
         {"failure_probability", r.failure_probability}};
  if (r.minor) j["minor"] = {{"rows", {r.minor->i, r.minor->j}}, {"cols", {r.minor->k, r.minor->l}}};
  return j;
}

inline json to_json(const PenroseReport& p) {
  return {{"tut", p.tut}, {"utu", p.utu}, {"tu", p.tu}, {"ut", p.ut}, {"bound", p.bound}, {"pass", p.pass}};
}

inline json to_json(const verify::PropertyResult& r) {
  return {{"suite", r.suite},
          {"name", r.name},
          {"passed", r.passed},
          {"trials", r.trials},
          {"worst", r.worst},
          {"bound", r.bound},
          {"failing_seed", r.failing_seed ? json(*r.failing_seed) : json(nullptr)},
          {"detail", r.detail}};
}

struct Outcome {
  json config;
  json result;
  int exit = kOk;
};

inline PitOptions pit_for(const std::string& mode, int n, double tol, std::uint64_t seed) {
  PitOptions pit;
  pit.mode = mode == "randomized" ? PitMode::Randomized : PitMode::Exact;
  if (pit.mode == PitMode::Exact && n > kPitMaxExactFloatN) pit.mode = PitMode::Randomized;
  pit.tol = tol;
  pit.seed = seed;
  return pit;
}

// ---------------------------------------------------------------------------
// Commands

struct ClassifyArgs {
  std::string input;
  std::string cone = "orthant";
  std::string mode = "exact";
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

inline Outcome cmd_classify(const ClassifyArgs& a) {
  const LinOp t = load_operator(a.input);
  const ConeSpec k = load_cone(a.cone, t.n(), a.seed);
  ClassifyOptions opts;
  opts.tol = a.tol;
  opts.pit = pit_for(a.mode, t.n(), a.tol, a.seed);

  Outcome out;
  out.config = {{"seed", a.seed}, {"tol", a.tol}, {"mode", a.mode}, {"cone", a.cone}, {"n", t.n()},
                {"pit_mode_used", opts.pit.mode == PitMode::Exact ? "exact" : "randomized"}};
  const PreserverForm form = classify_preserver(t, opts);
  const RankOneCheck r1 = is_rank_one_nonincreasing(t, opts.pit);
  const ConeDecision dp = preserves_positive_decomposables(t, k, opts);
  const Cp1Decision cp1 = classify_cp1_preserver(t, k, opts);
  const AutDecision aut = is_aut_cp(t, k, opts);

  json cp1j{{"kind", to_string(cp1.kind)}, {"witness", optional_vector(cp1.witness)}, {"reason", cp1.reason}};
  if (cp1.f) cp1j["f"] = vecmap_json(*cp1.f);
  if (cp1.u) cp1j["u"] = symmat_json(*cp1.u);
  if (cp1.b) cp1j["b"] = symmat_json(*cp1.b);
  json autj{{"yes", aut.yes}, {"reason", to_string(aut.reason)}};
  if (aut.f) autj["f"] = vecmap_json(*aut.f);

  out.result = {{"form", to_json(form)},
                {"rank_one_nonincreasing", to_json(r1)},
                {"positive_decomposables",
                 {{"holds", dp.holds}, {"witness", optional_vector(dp.witness)}, {"reason", dp.reason}}},
                {"cp_rank_one", cp1j},
                {"aut_cp", autj}};
  return out;
}

struct GeninvArgs {
  std::string input;
  std::string kind = "mp";
  bool check_closed_form = false;
  double tol = 1e-9;
};

/// MP of <., U> B in coordinates b u^T: u b^T / (|u|^2 |b|^2).
inline LinOp functional_pinv(const Functional& fn) {
  const double s = fn.u.coords().squaredNorm() * fn.b.coords().squaredNorm();
  if (s == 0.0) return LinOp::zero(fn.u.n());
  return LinOp(fn.u.n(), fn.u.coords() * fn.b.coords().transpose() / s);
}

inline Outcome cmd_geninv(const GeninvArgs& a) {
  const LinOp t = load_operator(a.input);
  if (a.kind != "mp" && a.kind != "drazin") throw schema("--kind must be mp or drazin");
  Outcome out;
  out.config = {{"kind", a.kind}, {"check_closed_form", a.check_closed_form}, {"tol", a.tol}, {"n", t.n()}};
  ClassifyOptions opts;
  opts.tol = a.tol;
  opts.pit = pit_for("exact", t.n(), a.tol, 0);

  if (a.kind == "mp") {
    const LinOp u = moore_penrose(t);
    out.result = {{"inverse", operator_json(u)}, {"penrose", to_json(verify_penrose(t, u))}};
    if (a.check_closed_form) {
      const PreserverForm form = classify_preserver(t, opts);
      json cf{{"form", form_name(form)}, {"applicable", false}};
      if (const auto* sp = std::get_if<SecondPower>(&form)) {
        const ClosedFormCheck c = mp_of_p2(sp->f, sp->c);
        cf = {{"form", "SecondPower"}, {"applicable", true}, {"residual", c.residual}, {"bound", c.bound}};
      } else if (const auto* fn = std::get_if<Functional>(&form)) {
        const LinOp closed = functional_pinv(*fn);
        const double res = linalg::op_norm(u.mat() - closed.mat());
        const double bound = 1e-8 * (1.0 + linalg::op_norm(closed.mat()));
        cf = {{"form", "Functional"}, {"applicable", true}, {"residual", res}, {"bound", bound}};
        if (!(res <= bound)) out.exit = kPropertyFailure;
      }
      out.result["closed_form"] = cf;
    }
  } else {
    const DrazinResult r = drazin(t);
    const DrazinSystem sys = drazin_residuals(t, r);
    out.result = {{"inverse", operator_json(r.inverse)},
                  {"index", r.index},
                  {"drazin_system", {{"power", sys.power}, {"inner", sys.inner}, {"commute", sys.commute}}}};
    if (a.check_closed_form) {
      const PreserverForm form = classify_preserver(t, opts);
      json cf{{"form", form_name(form)}, {"applicable", false}};
      if (!std::holds_alternative<NotPreserver>(form)) {
        const ClosedFormCheck c = drazin_of_forms(form);
        cf = {{"form", form_name(form)}, {"applicable", true},     {"residual", c.residual},
              {"bound", c.bound},        {"index", c.closed_form_index}};
      }
      out.result["closed_form"] = cf;
    }
  }
  return out;
}

struct VerifyArgs {
  std::string suite = "all";
  int trials = 100;
  std::uint64_t seed = 0;
  int n_max = 6;
  bool inject_fault = false;
};

inline Outcome cmd_verify(const VerifyArgs& a) {
  verify::VerifyOptions o;
  o.trials = a.trials;
  o.seed = a.seed;
  o.n_max = a.n_max;
  o.inject_fault = a.inject_fault;
  if (a.trials < 1) throw schema("--trials must be positive");
  if (a.n_max < 2) throw schema("--n-max must be at least 2");
  Outcome out;
  out.config = {{"suite", a.suite}, {"trials", a.trials}, {"seed", a.seed}, {"n_max", a.n_max},
                {"inject_fault", a.inject_fault}};
  const std::vector<verify::PropertyResult> rows = verify::run_suite(a.suite, o);
  json props = json::array();
  bool all = true;
  for (const auto& r : rows) {
    props.push_back(to_json(r));
    all = all && r.passed;
  }
  out.result = {{"passed", all}, {"properties", props}};
  out.exit = all ? kOk : kPropertyFailure;
  return out;
}

struct ReproduceArgs {
  std::string example;
  int n = 3;
};

inline Outcome reproduce_trace(int n) {
  const VectorXd e = VectorXd::Ones(n);
  const LinOp t = functional_map(SymMat::identity(n), sym_outer(e));
  const LinOp u = moore_penrose(t);
  // A -> (e^T A e) I / n^3
  const LinOp closed = functional_map(sym_outer(e), SymMat::identity(n)) * (1.0 / std::pow(n, 3));
  const double closed_res = linalg::op_norm(u.mat() - closed.mat());
  const PenroseReport pr = verify_penrose(t, u, 1e-10);
  const VectorXd e1 = VectorXd::Unit(n, 0);
  const SymMat image = u.apply(sym_outer(e1));
  const int rank = tensor_rank(image);
  const RankOneCheck direct = is_rank_one_nonincreasing(u, pit_for("exact", n, 1e-9, 0));
  Outcome out;
  out.result = {{"operator", operator_json(t)},
                {"pinv", operator_json(u)},
                {"closed_form_residual", closed_res},
                {"penrose", to_json(pr)},
                {"witness", to_vector(e1)},
                {"witness_image", symmat_json(image)},
                {"witness_rank", rank},
                {"pinv_rank_one_nonincreasing", direct.holds}};
  const bool ok = closed_res <= 1e-10 && pr.pass && rank == n && !direct.holds;
  out.result["passed"] = ok;
  out.exit = ok ? kOk : kPropertyFailure;
  return out;
}

inline Outcome reproduce_shift(int n) {
  MatrixXd s = MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) s(i + 1, i) = 1.0;  // e_i -> e_(i+1)
  const VecMap f(s);
  const VecMap fp(linalg::pinv(s));
  const ConeSpec k = ConeSpec::orthant(n);
  const ConeDecision a = preserves_positive_decomposables(p2_of(f), k);
  const ConeDecision b = preserves_positive_decomposables(p2_of(fp), k);
  const ClosedFormCheck c = mp_of_p2(f);
  Outcome out;
  out.result = {{"f", vecmap_json(f)},
                {"f_pinv", vecmap_json(fp)},
                {"p2_f_preserves_positive_decomposables", a.holds},
                {"p2_f_pinv_preserves_positive_decomposables", b.holds},
                {"mp_closed_form_residual", c.residual}};
  const bool ok = a.holds && b.holds;
  out.result["passed"] = ok;
  out.exit = ok ? kOk : kPropertyFailure;
  return out;
}

inline Outcome cmd_reproduce(const ReproduceArgs& a) {
  if (a.n < 2) throw schema("--n must be at least 2");
  if (a.n > 12) throw schema("--n must be at most 12");
  Outcome out;
  if (a.example == "trace-counterexample") {
    out = reproduce_trace(a.n);
  } else if (a.example == "shift-truncation") {
    out = reproduce_shift(a.n);
  } else {
    throw schema("--example must be trace-counterexample or shift-truncation");
  }
  out.config = {{"example", a.example}, {"n", a.n}};
  return out;
}

// ---------------------------------------------------------------------------
// Entry point

/// Runs one command line (without the program name). The report goes to
/// `out` (or --output), diagnostics to `err`. Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-one preservers on symmetric matrices", "symprod"};
  app.require_subcommand(1);
  std::string output;
  app.add_option("-o,--output", output, "write the report here instead of stdout");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "classify an operator and run the cone decisions");
  classify->add_option("input", ca.input, "operator file")->required();
  classify->add_option("--cone", ca.cone, "orthant or generated:<path>");
  classify->add_option("--mode", ca.mode, "rank-one test mode")->check(CLI::IsMember({"exact", "randomized"}));
  classify->add_option("--tol", ca.tol);
  classify->add_option("--seed", ca.seed);

  GeninvArgs ga;
  auto* geninv = app.add_subcommand("geninv", "Moore-Penrose or Drazin inverse");
  geninv->add_option("input", ga.input, "operator file")->required();
  geninv->add_option("--kind", ga.kind)->check(CLI::IsMember({"mp", "drazin"}));
  geninv->add_flag("--check-closed-form", ga.check_closed_form);
  geninv->add_option("--tol", ga.tol);

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "run the property suites");
  ver->add_option("--suite", va.suite, "symtensor, cones, preservers, geninv, oracle or all");
  ver->add_option("--trials", va.trials);
  ver->add_option("--seed", va.seed);
  ver->add_option("--n-max", va.n_max);
  ver->add_flag("--inject-fault", va.inject_fault, "perturb the pseudoinverse (negative control)");

  ReproduceArgs ra;
  auto* rep = app.add_subcommand("reproduce", "worked examples");
  rep->add_option("--example", ra.example)->required();
  rep->add_option("--n", ra.n);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "symprod: " << e.what() << "\n";
    return kSchemaError;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  std::string name;
  try {
    if (*classify) {
      name = "classify";
      o = cmd_classify(ca);
    } else if (*geninv) {
      name = "geninv";
      o = cmd_geninv(ga);
    } else if (*ver) {
      name = "verify";
      o = cmd_verify(va);
    } else {
      name = "reproduce";
      o = cmd_reproduce(ra);
    }
  } catch (const Error& e) {
    err << "symprod: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "symprod: " << e.what() << "\n";
    return kPropertyFailure;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const json report{{"command", name}, {"args", args}, {"config", o.config}, {"result", o.result},
                    {"wall_clock_seconds", secs}};
  if (output.empty()) {
    out << report.dump(2) << "\n";
  } else {
    std::ofstream f(output);
    if (!f) {
      err << "symprod: cannot write " << output << "\n";
      return kSchemaError;
    }
    f << report.dump(2) << "\n";
  }
  if (o.exit != kOk) err << "symprod: " << name << " reported a failed check\n";
  return o.exit;
}

}  // namespace symprod::cli
