#pragma once

// Randomized property suites. Each property draws `trials` instances, each
// from its own engine seeded by (seed, property name, instance index), and
// records the worst residual plus the seed of the first failing instance.

#include "symprod/exact.hpp"
#include "symprod/fixtures.hpp"
#include "symprod/geninv.hpp"
#include "symprod/oracle.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace symprod::verify {

struct PropertyResult {
  std::string suite;
  std::string name;
  bool passed = true;
  int trials = 0;
  double worst = 0.0;  ///< largest residual seen
  double bound = 0.0;  ///< tolerance of the instance that produced `worst`
  std::optional<std::uint64_t> failing_seed;
  std::string detail;
};

struct VerifyOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  int n_max = 6;
  /// Negative control: perturb every pseudoinverse by a relative 1e-3.
  bool inject_fault = false;
};

/// One instance: residual and tolerance; ok defaults to residual <= bound.
struct Sample {
  double residual = 0.0;
  double bound = 0.0;
  std::optional<bool> ok;
  std::string note;

  static Sample check(bool cond, std::string note = {}) {
    Sample s;
    s.residual = cond ? 0.0 : 1.0;
    s.bound = 0.5;
    s.ok = cond;
    s.note = std::move(note);
    return s;
  }
};

using Instance = std::function<Sample(fixtures::Rng&, int index)>;

inline PropertyResult run_property(const std::string& suite, const std::string& name, int trials,
                                   std::uint64_t seed, const Instance& body) {
  PropertyResult r;
  r.suite = suite;
  r.name = name;
  r.trials = trials;
  const std::uint64_t stream = fixtures::stream_id((suite + "/" + name).c_str());
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = fixtures::instance_seed(seed, stream, static_cast<std::uint64_t>(i));
    fixtures::Rng rng(s);
    Sample sample;
    try {
      sample = body(rng, i);
    } catch (const std::exception& e) {
      sample = Sample::check(false, std::string("exception: ") + e.what());
    }
    const bool ok = sample.ok ? *sample.ok : sample.residual <= sample.bound;
    if (sample.residual >= r.worst) {
      r.worst = sample.residual;
      r.bound = sample.bound;
    }
    if (!ok && r.passed) {
      r.passed = false;
      r.failing_seed = s;
      r.detail = sample.note.empty() ? "instance " + std::to_string(i) : sample.note;
    }
  }
  return r;
}

/// Main-path pseudoinverse as seen by the suites (fault hook included).
inline LinOp suite_pinv(const LinOp& t, const VerifyOptions& o) {
  LinOp p = moore_penrose(t);
  if (o.inject_fault) p = p * (1.0 + 1e-3);
  return p;
}

inline int pick_n(fixtures::Rng& rng, int lo, int hi, const VerifyOptions& o) {
  return fixtures::uniform_int(rng, lo, std::max(lo, std::min(hi, o.n_max)));
}

inline double rel(double num, double scale) { return num / std::max(scale, 1e-300); }

// ---------------------------------------------------------------------------

inline std::vector<PropertyResult> symtensor_suite(const VerifyOptions& o) {
  const std::string s = "symtensor";
  std::vector<PropertyResult> out;
  out.push_back(run_property(s, "isometry", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 8, o);
    const SymMat a = fixtures::random_symmat(rng, n), b = fixtures::random_symmat(rng, n);
    const double tr = (a.matrix() * b.matrix()).trace();
    return Sample{std::abs(a.dot(b) - tr), 1e-10 * (1.0 + a.norm() * b.norm()), {}, {}};
  }));
  out.push_back(run_property(s, "round_trip", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 8, o);
    const MatrixXd a = fixtures::random_symmat(rng, n).matrix();
    const VectorXd v = fixtures::gaussian_vector(rng, sym_dim(n));
    const double e1 = linalg::max_abs(smat(svec(a)) - a) / std::max(linalg::max_abs(a), 1e-300);
    const double e2 = (svec(smat(v)) - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
    return Sample{std::max(e1, e2), 4.5e-16, {}, {}};
  }));
  out.push_back(run_property(s, "round_trip_rational", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    exact::Dense<exact::Rational> a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const exact::Rational q(fixtures::uniform_int(rng, -50, 50), fixtures::uniform_int(rng, 1, 20));
        a(i, j) = q;
        a(j, i) = q;
      }
    return Sample::check(exact::unvech(exact::vech(a)) == a);
  }));
  out.push_back(run_property(s, "rank_one_decomposition", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 8, o);
    const double lam = (fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0);
    const double mag = fixtures::uniform(rng, 0.1, 10.0);
    const VectorXd x = sign_gauge(fixtures::gaussian_vector(rng, n).normalized());
    const RankOneDecomposition dec = decompose_rank_one(lam * mag * sym_outer(x));
    if (!dec.form) return Sample::check(false, "rank " + std::to_string(dec.rank));
    const double err = std::max(std::abs(dec.form->lambda - lam * mag) / mag, (dec.form->x - x).norm());
    return Sample{err, 1e-10, {}, {}};
  }));
  out.push_back(run_property(s, "outer_ranks", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 2, 8, o);
    const VectorXd x = fixtures::gaussian_vector(rng, n), y = fixtures::gaussian_vector(rng, n);
    return Sample::check(tensor_rank(sym_outer(x)) == 1 && tensor_rank(sym_outer2(x, y)) == 2);
  }));
  out.push_back(run_property(s, "decomposables_span", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const int d = sym_dim(n);
    MatrixXd m(d, d);
    for (int k = 0; k < d; ++k) m.col(k) = sym_outer(fixtures::gaussian_vector(rng, n)).coords();
    return Sample::check(linalg::numerical_rank(m) == d);
  }));
  return out;
}

inline ConeSpec random_cone(fixtures::Rng& rng, int n) {
  if (fixtures::uniform(rng, 0, 1) < 0.4) return ConeSpec::orthant(n);
  const int extra = fixtures::uniform_int(rng, 0, 2);
  MatrixXd g(n, n + extra);
  g.leftCols(n) = MatrixXd::Identity(n, n) + 0.5 * fixtures::nonnegative(rng, n, n);
  g.rightCols(extra) = fixtures::nonnegative(rng, n, extra) + MatrixXd::Constant(n, extra, 0.1);
  return ConeSpec::generated(g);
}

inline std::vector<PropertyResult> cones_suite(const VerifyOptions& o) {
  const std::string s = "cones";
  std::vector<PropertyResult> out;
  out.push_back(run_property(s, "pointedness", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 1, 6, o);
    const ConeSpec k = random_cone(rng, n);
    VectorXd x;
    switch (i % 3) {
      case 0: x = VectorXd::Zero(n); break;
      case 1: x = k.generators() * fixtures::nonnegative(rng, k.num_generators(), 1).col(0); break;
      default: x = fixtures::gaussian_vector(rng, n); break;
    }
    const bool both = member(k, x).member && member(k, -x).member;
    return Sample::check(both == (x.cwiseAbs().maxCoeff() <= kConeTol));
  }));
  out.push_back(run_property(s, "orthant_projective_cone", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const MatrixXd nn = fixtures::nonnegative(rng, n, n, 0.3);
    const MatrixXd a = nn + nn.transpose();
    // a = sum over i <= j of x y^T + y x^T with x, y >= 0.
    MatrixXd rec = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        VectorXd x = VectorXd::Zero(n), y = VectorXd::Zero(n);
        if (i == j) {
          x(i) = y(i) = std::sqrt(a(i, i) / 2.0);
        } else {
          x(i) = a(i, j);
          y(j) = 1.0;
        }
        rec += sym_outer2(x, y).matrix();
      }
    // Converse: random nonnegative combinations are entrywise nonnegative.
    MatrixXd comb = MatrixXd::Zero(n, n);
    for (int t = 0; t < 3; ++t)
      comb += sym_outer2(fixtures::nonnegative_vector(rng, n), fixtures::nonnegative_vector(rng, n)).matrix();
    const double err = linalg::max_abs(rec - a) / std::max(1.0, linalg::max_abs(a));
    if (comb.minCoeff() < 0.0) return Sample::check(false, "negative entry in a projective combination");
    return Sample{err, 1e-12, {}, {}};
  }));
  out.push_back(run_property(s, "cp_certificate_soundness", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 2, 5, o);
    const int cols = fixtures::uniform_int(rng, 1, n + 1);
    const MatrixXd w = fixtures::nonnegative(rng, n, cols, 0.2);
    const SymMat a = SymMat::from_matrix(w * w.transpose());
    if (a.norm() == 0.0) return Sample::check(true);
    CpOptions opts;
    opts.seed = static_cast<std::uint64_t>(i);
    const CpMembership m = cp_membership(a, opts);
    if (m.verdict == CpVerdict::No) return Sample::check(false, "CP matrix rejected: " + m.reason);
    if (!m.certificate) return Sample::check(m.decided_by_dnn || m.verdict == CpVerdict::Inconclusive);
    double neg = 0.0;
    for (const auto& u : m.certificate->factors) neg = std::max(neg, -u.minCoeff());
    const double res = (m.certificate->reconstruct(n) - a.matrix()).norm() / a.matrix().norm();
    if (neg > 0.0) return Sample::check(false, "negative factor entry");
    return Sample{res, kCpResidualTol, {}, {}};
  }));
  out.push_back(run_property(s, "copositivity_chain", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 1, 6, o);
    SymMat u;
    switch (i % 3) {
      case 0: {
        const MatrixXd g = fixtures::gaussian(rng, n, n);
        u = SymMat::from_matrix(g * g.transpose());
        break;
      }
      case 1: u = fixtures::strictly_copositive(rng, n); break;
      default: u = fixtures::random_symmat(rng, n); break;
    }
    const MatrixXd m = u.matrix();
    const bool strict = is_strictly_copositive(u), cop = is_copositive(u);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const bool psd = es.eigenvalues().minCoeff() >= 0.0;
    const bool positive = m.minCoeff() > 0.0;
    bool ok = (!strict || cop) && (!psd || cop) && (!positive || strict);
    // Sampled values never undercut the enumerated minimum.
    const SimplexMinimum sm = simplex_minimum(m);
    for (int t = 0; t < 50 && ok; ++t) {
      VectorXd x = fixtures::nonnegative(rng, n, 1).col(0);
      if (x.sum() == 0.0) continue;
      x /= x.sum();
      if (x.dot(m * x) < sm.value - 1e-12 * (1.0 + sm.scale)) ok = false;
    }
    return Sample::check(ok);
  }));
  out.push_back(run_property(s, "cp_rank_lower_bound", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 2, 4, o);
    const int cols = fixtures::uniform_int(rng, 1, n + 1);
    const MatrixXd w = fixtures::nonnegative(rng, n, cols, 0.2) + MatrixXd::Constant(n, cols, 0.05);
    const SymMat a = SymMat::from_matrix(w * w.transpose());
    const CpRank r = cp_rank(a, static_cast<std::uint64_t>(i));
    if (!r.rank) return Sample::check(true, "inconclusive");
    return Sample::check(*r.rank >= tensor_rank(a) && *r.rank <= cols);
  }));
  out.push_back(run_property(s, "extremal_rank_one", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 1, 4, o);
    const VectorXd u = fixtures::nonnegative_vector(rng, n);
    const ExtremalityReport rep = check_extremal_cp(u, 4, static_cast<std::uint64_t>(i));
    if (rep.certificates_found == 0) return Sample::check(false, "no factorization found");
    return Sample{std::max(rep.max_collinearity_defect, rep.max_functional_defect), 1e-8, rep.passed, {}};
  }));
  return out;
}

/// Mixed corpus: second powers, functionals, adversarial operators.
struct CorpusItem {
  LinOp t;
  const char* kind = "";
};

inline CorpusItem corpus_operator(fixtures::Rng& rng, int n) {
  switch (fixtures::uniform_int(rng, 0, 4)) {
    case 0: return {p2_of(VecMap(fixtures::nonnegative_full_rank(rng, n))), "p2_nonnegative"};
    case 1: {
      const MatrixXd f = fixtures::gaussian(rng, n, n);
      const double c = fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
      return {p2_of(VecMap(f), c), "p2_general"};
    }
    case 2: {
      const SymMat u = fixtures::copositive(rng, n);
      const VectorXd x = fixtures::nonnegative_vector(rng, n);
      return {functional_map(u, sym_outer(x)), "functional_copositive"};
    }
    case 3: {
      const SymMat u = fixtures::random_symmat(rng, n);
      const VectorXd x = fixtures::gaussian_vector(rng, n);
      return {functional_map(u, sym_outer(x)), "functional_general"};
    }
    default: return {fixtures::adversarial(rng, n), "adversarial"};
  }
}

inline std::vector<PropertyResult> preservers_suite(const VerifyOptions& o) {
  const std::string s = "preservers";
  std::vector<PropertyResult> out;
  out.push_back(run_property(s, "functoriality", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const MatrixXd f = fixtures::gaussian(rng, n, n), g = fixtures::gaussian(rng, n, n);
    const MatrixXd lhs = (p2_of(VecMap(f)) * p2_of(VecMap(g))).mat();
    const MatrixXd rhs = p2_of(VecMap(f * g)).mat();
    return Sample{linalg::max_abs(lhs - rhs), 1e-10 * (1.0 + linalg::max_abs(rhs)), {}, {}};
  }));
  out.push_back(run_property(s, "sign_invariance", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const MatrixXd f = fixtures::gaussian(rng, n, n);
    const double c = fixtures::uniform(rng, -2.0, 2.0) + 3.0;
    return Sample::check(p2_of(VecMap(f), c).mat() == p2_of(VecMap(-f), c).mat());
  }));
  out.push_back(run_property(s, "scale_absorption", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const MatrixXd f = fixtures::gaussian(rng, n, n);
    const double sign = fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
    const double c = sign * fixtures::uniform(rng, 0.1, 10.0);
    const MatrixXd lhs = p2_of(VecMap(f), c).mat();
    const MatrixXd rhs = p2_of(VecMap(std::sqrt(std::abs(c)) * f), sign).mat();
    return Sample{linalg::max_abs(lhs - rhs), 1e-12 * (1.0 + linalg::max_abs(lhs)), {}, {}};
  }));
  out.push_back(run_property(s, "classify_second_power", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 2, 6, o);
    const MatrixXd f = fixtures::gaussian(rng, n, n);
    const double c = fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
    const LinOp t = p2_of(VecMap(f), c);
    const PreserverForm form = classify_preserver(t);
    const auto* sp = std::get_if<SecondPower>(&form);
    if (!sp || sp->c != c) return Sample::check(false, std::string("got ") + form_name(form));
    return Sample{detail::relative_gap(reconstruct(form).mat(), t.mat()), 1e-9, {}, {}};
  }));
  out.push_back(run_property(s, "classify_functional", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const SymMat u = fixtures::random_symmat(rng, n);
    const VectorXd x = fixtures::gaussian_vector(rng, n);
    const LinOp t = functional_map(u, sym_outer(x));
    const PreserverForm form = classify_preserver(t);
    if (!std::holds_alternative<Functional>(form)) return Sample::check(false, std::string("got ") + form_name(form));
    return Sample{detail::relative_gap(reconstruct(form).mat(), t.mat()), 1e-9, {}, {}};
  }));
  out.push_back(run_property(s, "classify_adversarial", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 2, 6, o);
    const LinOp t = fixtures::adversarial(rng, n);
    const PreserverForm form = classify_preserver(t);
    const auto* np = std::get_if<NotPreserver>(&form);
    if (!np) return Sample::check(false, std::string("got ") + form_name(form));
    return Sample::check(tensor_rank(t.apply(sym_outer(np->witness))) >= 2);
  }));
  out.push_back(run_property(s, "positive_decomposables_imply_rank_one", o.trials, o.seed,
                             [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 2, 5, o);
    const CorpusItem item = corpus_operator(rng, n);
    const ConeSpec k = random_cone(rng, n);
    const ConeDecision d = preserves_positive_decomposables(item.t, k);
    if (!d.holds) return Sample::check(true);
    return Sample::check(is_rank_one_nonincreasing(item.t).holds, item.kind);
  }));
  out.push_back(run_property(s, "automorphism_soundness", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const MatrixXd p = fixtures::positive_monomial(rng, n);
    const AutDecision a = is_aut_cp(p2_of(VecMap(p)), ConeSpec::orthant(n));
    if (!a.yes) return Sample::check(false, std::string("monomial rejected: ") + to_string(a.reason));
    const MatrixXd finv = a.f->mat.inverse();
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const MatrixXd w = fixtures::nonnegative(rng, n, fixtures::uniform_int(rng, 1, n + 1), 0.3);
      worst = std::max(worst, -(a.f->mat * w).minCoeff());
      worst = std::max(worst, -(finv * w).minCoeff());
    }
    return Sample{std::max(worst, 0.0), 1e-12, {}, {}};
  }));
  out.push_back(run_property(s, "exact_randomized_agreement", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 2, 5, o);
    const CorpusItem item = corpus_operator(rng, n);
    const bool exact_mode = is_rank_one_nonincreasing(item.t).holds;
    const bool random_mode =
        is_rank_one_nonincreasing(item.t, PitOptions{PitMode::Randomized, 16, static_cast<std::uint64_t>(i), 1e-9})
            .holds;
    return Sample::check(exact_mode == random_mode, item.kind);
  }));
  out.push_back(run_property(s, "cp_rank_one_forms", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 2, 6, o);
    const ConeSpec k = ConeSpec::orthant(n);
    switch (i % 3) {
      case 0: {
        const Cp1Decision d = classify_cp1_preserver(p2_of(VecMap(fixtures::nonnegative_full_rank(rng, n))), k);
        return Sample::check(d.kind == Cp1Decision::Kind::FormI, d.reason);
      }
      case 1: {
        const SymMat u = fixtures::strictly_copositive(rng, n);
        const Cp1Decision d = classify_cp1_preserver(functional_map(u, sym_outer(fixtures::nonnegative_vector(rng, n))), k);
        return Sample::check(d.kind == Cp1Decision::Kind::FormII, d.reason);
      }
      default: {
        const SymMat u = fixtures::merely_copositive(rng, n);
        const LinOp t = functional_map(u, sym_outer(fixtures::nonnegative_vector(rng, n)));
        const Cp1Decision d = classify_cp1_preserver(t, k);
        if (d.kind != Cp1Decision::Kind::No || !d.witness) return Sample::check(false, "merely copositive accepted");
        const SymMat image = t.apply(sym_outer(*d.witness));
        const bool leaves = image.norm() <= 1e-9 * t.mat().norm() * d.witness->squaredNorm() ||
                            !is_positive_decomposable(k, image).x.has_value();
        return Sample::check(leaves && d.witness->minCoeff() >= -1e-12, "witness stays in CP1");
      }
    }
  }));
  return out;
}

inline std::vector<PropertyResult> geninv_suite(const VerifyOptions& o) {
  const std::string s = "geninv";
  std::vector<PropertyResult> out;
  out.push_back(run_property(s, "trace_example", std::max(1, std::min(o.trials, 4)), o.seed,
                             [&](fixtures::Rng&, int i) {
    const int n = 2 + i;
    const VectorXd e = VectorXd::Ones(n);
    const LinOp t = functional_map(SymMat::identity(n), sym_outer(e));
    const LinOp p = suite_pinv(t, o);
    const LinOp closed = functional_map(sym_outer(e), SymMat::identity(n)) * (1.0 / std::pow(n, 3));
    const double res = linalg::op_norm(p.mat() - closed.mat());
    const PenroseReport pr = verify_penrose(t, p, 1e-10);
    const int r = tensor_rank(p.apply(sym_outer(VectorXd::Unit(n, 0))));
    if (r != n) return Sample::check(false, "witness rank " + std::to_string(r));
    return Sample{std::max(res, pr.worst()), 1e-10, res <= 1e-10 && pr.pass, {}};
  }));
  out.push_back(run_property(s, "penrose_uniqueness", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 4, o);
    const int d = sym_dim(n);
    const LinOp t(n, fixtures::with_rank(rng, d, fixtures::uniform_int(rng, 0, d)));
    const LinOp u(n, oracle::oracle_pinv(t.mat()));
    const PenroseReport pr = verify_penrose(t, u);
    if (!pr.pass) return Sample::check(false, "oracle candidate fails the Penrose equations");
    const LinOp p = suite_pinv(t, o);
    return Sample{linalg::op_norm(u.mat() - p.mat()), 1e-8 * (1.0 + linalg::op_norm(p.mat())), {}, {}};
  }));
  out.push_back(run_property(s, "penrose_equations", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 5, o);
    const int d = sym_dim(n);
    const LinOp t(n, fixtures::with_rank(rng, d, fixtures::uniform_int(rng, 0, d)));
    const PenroseReport pr = verify_penrose(t, suite_pinv(t, o));
    return Sample{pr.worst(), pr.bound, {}, {}};
  }));
  out.push_back(run_property(s, "drazin_uniqueness", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 4, o);
    const int d = sym_dim(n);
    const fixtures::DrazinFixture fx = fixtures::drazin_fixture(rng, d, fixtures::uniform_int(rng, 0, std::min(4, d)));
    const DrazinResult main = drazin(LinOp(n, fx.f));
    const oracle::OracleDrazin orc = oracle::oracle_drazin(fx.f);
    if (main.index != orc.index) return Sample::check(false, "index differs");
    return Sample{linalg::op_norm(main.inverse.mat() - orc.inverse), 1e-7 * (1.0 + linalg::op_norm(orc.inverse)), {}, {}};
  }));
  out.push_back(run_property(s, "mp_second_power", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 2, 6, o);
    const MatrixXd f = fixtures::with_rank(rng, n, fixtures::uniform_int(rng, 0, n));
    const double sign = fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
    const double c = sign * fixtures::uniform(rng, 0.5, 2.0);
    const LinOp mp = suite_pinv(p2_of(VecMap(f), c), o);
    const LinOp closed = p2_of(VecMap(oracle::oracle_pinv(f)), 1.0 / c);
    const double fn = linalg::op_norm(f);
    return Sample{linalg::op_norm(mp.mat() - closed.mat()), 1e-7 * (1.0 + std::pow(fn, 4)), {}, {}};
  }));
  out.push_back(run_property(s, "drazin_second_power", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const fixtures::DrazinFixture fx = fixtures::drazin_fixture(rng, n, fixtures::uniform_int(rng, 1, std::min(4, n)));
    const LinOp t = p2_of(VecMap(fx.f));
    const DrazinResult r = drazin(t);
    const LinOp closed = p2_of(VecMap(fx.drazin));
    if (r.index != fx.index)
      return Sample::check(false, "index " + std::to_string(r.index) + " vs " + std::to_string(fx.index));
    return Sample{linalg::op_norm(r.inverse.mat() - closed.mat()), 1e-7 * (1.0 + linalg::op_norm(closed.mat())), {}, {}};
  }));
  out.push_back(run_property(s, "index_characterization", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 4, o);
    const fixtures::DrazinFixture fx = fixtures::drazin_fixture(rng, n, fixtures::uniform_int(rng, 0, std::min(4, n)));
    const LinOp t = p2_of(VecMap(fx.f));
    const DrazinResult r = drazin(t);
    const double scale = 1.0 + linalg::op_norm(r.inverse.mat());
    const DrazinSystem sys = drazin_residuals(t, r);
    if (sys.worst() > 1e-8 * scale) return Sample{sys.worst(), 1e-8 * scale, {}, "Drazin system fails"};
    if (r.index > 0) {
      // One power less must break T^k S T = T^k.
      const DrazinSystem lower = drazin_residuals(t, DrazinResult{r.inverse, r.index - 1});
      if (lower.power <= 1e-6) return Sample::check(false, "index is not minimal");
    }
    return Sample{sys.worst(), 1e-8 * scale, {}, {}};
  }));
  out.push_back(run_property(s, "drazin_closed_forms", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 1, 5, o);
    PreserverForm form;
    if (i % 2 == 0) {
      const fixtures::DrazinFixture fx = fixtures::drazin_fixture(rng, n, fixtures::uniform_int(rng, 0, std::min(4, n)));
      form = SecondPower{fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0, VecMap(fx.f), 0.0};
    } else {
      const SymMat u = fixtures::random_symmat(rng, n);
      VectorXd y = fixtures::gaussian_vector(rng, n);
      if (i % 4 == 1 && n >= 2) {
        // Force trace(B U) = 0 on half of the functional instances.
        // y = e_1 + t e_2 with u00 + 2 u01 t + u11 t^2 = 0.
        const MatrixXd um = u.matrix();
        const double a = um(0, 0), b = um(0, 1), c = um(1, 1);
        const double disc = b * b - a * c;
        if (std::abs(c) < 1e-3 || disc < 0.0) return Sample::check(true);
        y = VectorXd::Unit(n, 0);
        y(1) = (-b + std::sqrt(disc)) / c;
      }
      form = Functional{u, sym_outer(y), 0.0};
    }
    const ClosedFormCheck c = drazin_of_forms(form);
    return Sample{c.residual, c.bound, {}, {}};
  }));
  out.push_back(run_property(s, "mp_rank_one_dichotomy", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = pick_n(rng, 2, 5, o);
    LinOp t;
    bool expect = true;
    if (i % 2 == 0) {
      t = p2_of(VecMap(fixtures::with_rank(rng, n, fixtures::uniform_int(rng, 2, n))));
    } else {
      const int r = fixtures::uniform_int(rng, 1, n);
      const MatrixXd g = fixtures::gaussian(rng, n, r);
      const SymMat u = SymMat::from_matrix(g * g.transpose());
      t = functional_map(u, sym_outer(fixtures::gaussian_vector(rng, n)));
      expect = r <= 1;
    }
    const MpPreserverCheck m = mp_preserver_check(t);
    return Sample::check(m.preserving == expect);
  }));
  out.push_back(run_property(s, "adjoint_is_transpose", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = pick_n(rng, 1, 6, o);
    const LinOp t(n, fixtures::gaussian(rng, sym_dim(n), sym_dim(n)));
    const SymMat a = fixtures::random_symmat(rng, n), b = fixtures::random_symmat(rng, n);
    // <T A, B> with B applied as a matrix trace against the adjoint image.
    const double lhs = (t.apply(a).matrix() * b.matrix()).trace();
    const double rhs = (a.matrix() * t.adjoint().apply(b).matrix()).trace();
    return Sample{std::abs(lhs - rhs), 1e-10 * (1.0 + std::abs(lhs)), {}, {}};
  }));
  return out;
}

/// Main paths against the brute-force oracles, n in {2, 3, 4}.
inline std::vector<PropertyResult> oracle_suite(const VerifyOptions& o) {
  const std::string s = "oracle";
  std::vector<PropertyResult> out;
  out.push_back(run_property(s, "pinv_vs_greville", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = fixtures::uniform_int(rng, 2, 4);
    const int d = sym_dim(n);
    const MatrixXd m = fixtures::with_rank(rng, d, fixtures::uniform_int(rng, 0, d));
    const MatrixXd main = suite_pinv(LinOp(n, m), o).mat();
    const MatrixXd orc = oracle::oracle_pinv(m);
    return Sample{linalg::op_norm(main - orc), 1e-8 * (1.0 + linalg::op_norm(orc)), {}, {}};
  }));
  out.push_back(run_property(s, "drazin_vs_core_nilpotent", o.trials, o.seed, [&](fixtures::Rng& rng, int) {
    const int n = fixtures::uniform_int(rng, 2, 4);
    const int d = sym_dim(n);
    const fixtures::DrazinFixture fx = fixtures::drazin_fixture(rng, d, fixtures::uniform_int(rng, 0, std::min(4, d)));
    const DrazinResult main = drazin(LinOp(n, fx.f));
    const oracle::OracleDrazin orc = oracle::oracle_drazin(fx.f);
    if (main.index != orc.index) return Sample::check(false, "index differs");
    return Sample{linalg::op_norm(main.inverse.mat() - orc.inverse), 1e-7 * (1.0 + linalg::op_norm(orc.inverse)), {}, {}};
  }));
  out.push_back(run_property(s, "pit_vs_sampling", o.trials, o.seed, [&](fixtures::Rng& rng, int i) {
    const int n = fixtures::uniform_int(rng, 2, 4);
    const CorpusItem item = corpus_operator(rng, n);
    const bool pit = is_rank_one_nonincreasing(item.t).holds;
    const bool samp = oracle::oracle_rank_one_nonincreasing(item.t, {static_cast<std::uint64_t>(i), 32, 1e-9});
    return Sample::check(pit == samp, item.kind);
  }));
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"symtensor", "cones", "preservers", "geninv", "oracle"};
  return names;
}

/// Runs one suite or "all"; results are ordered by suite name, then property.
inline std::vector<PropertyResult> run_suite(const std::string& suite, const VerifyOptions& o) {
  std::vector<std::string> chosen;
  if (suite == "all") {
    chosen = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    chosen = {suite};
  } else {
    throw Error(ErrorCode::Schema, "unknown suite '" + suite + "'");
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<PropertyResult> all;
  for (const auto& name : chosen) {
    std::vector<PropertyResult> part;
    if (name == "symtensor") part = symtensor_suite(o);
    else if (name == "cones") part = cones_suite(o);
    else if (name == "preservers") part = preservers_suite(o);
    else if (name == "geninv") part = geninv_suite(o);
    else part = oracle_suite(o);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace symprod::verify
