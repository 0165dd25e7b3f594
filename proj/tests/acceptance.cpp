// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "symprod/fixtures.hpp"
#include "symprod/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

using namespace symprod;
using fixtures::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void fail(const std::string& what) {
    if (pass) note << what << "; ";
    pass = false;
  }
};

Rng rng_for(const char* criterion, int i) {
  return fixtures::instance_rng(2024, fixtures::stream_id(criterion), static_cast<std::uint64_t>(i));
}

LinOp trace_map(int n) { return functional_map(SymMat::identity(n), sym_outer(VectorXd::Ones(n))); }

// A -> (e^T A e) I / n^3
LinOp trace_map_pinv(int n) {
  return functional_map(sym_outer(VectorXd::Ones(n)), SymMat::identity(n)) * (1.0 / std::pow(n, 3));
}

void trace_example(Outcome& o) {
  for (int n = 2; n <= 5; ++n) {
    const LinOp t = trace_map(n);
    const LinOp u = moore_penrose(t);
    const double res = linalg::op_norm(u.mat() - trace_map_pinv(n).mat());
    if (res > 1e-10) o.fail("n=" + std::to_string(n) + " closed form residual " + std::to_string(res));
    const PenroseReport p = verify_penrose(t, u, 1e-10);
    if (std::max({p.tut, p.utu, p.tu, p.ut}) > 1e-10) o.fail("Penrose equations at n=" + std::to_string(n));
    const MpPreserverCheck c = mp_preserver_check(t);
    if (c.preserving || !c.witness || !c.witness->isApprox(VectorXd::Unit(n, 0)) || c.witness_rank != n)
      o.fail("witness e1 at n=" + std::to_string(n));
    if (tensor_rank(u(sym_outer(VectorXd::Unit(n, 0)))) != n) o.fail("rank of T+(e1 e1^T)");
    if (is_rank_one_nonincreasing(u).holds) o.fail("pinv reported rank-one non-increasing");
  }
  o.note << "n=2..5";
}

void mp_second_power(Outcome& o) {
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    Rng rng = rng_for("mp_second_power", i);
    const int n = fixtures::uniform_int(rng, 2, 6);
    const int r = fixtures::uniform_int(rng, 0, n);
    const MatrixXd f = fixtures::uniform(rng, 0.3, 3.0) * fixtures::with_rank(rng, n, r);
    const double c = (fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0) * fixtures::uniform(rng, 0.2, 5.0);
    const MatrixXd lhs = moore_penrose(p2_of(VecMap(f), c)).mat();
    const MatrixXd rhs = p2_of(VecMap(linalg::pinv(f)), 1.0 / c).mat();
    const double nf = linalg::op_norm(f);
    const double rel = linalg::op_norm(lhs - rhs) / (1e-7 * (1.0 + std::pow(nf, 4)));
    worst = std::max(worst, rel);
    if (rel > 1.0) o.fail("instance " + std::to_string(i));
  }
  o.note << "300 instances, worst residual/bound " << worst;
}

void drazin_second_power(Outcome& o) {
  double worst = 0.0;
  int per_index[5] = {};
  for (int i = 0; i < 300; ++i) {
    Rng rng = rng_for("drazin_second_power", i);
    const int k = 1 + i % 4;
    const int n = fixtures::uniform_int(rng, std::max(2, k), 6);
    const fixtures::DrazinFixture fx = fixtures::drazin_fixture(rng, n, k);
    const DrazinResult d = drazin(p2_of(VecMap(fx.f)));
    const MatrixXd expect = p2_of(VecMap(fx.drazin)).mat();
    const double rel = linalg::op_norm(d.inverse.mat() - expect) / (1e-7 * (1.0 + linalg::op_norm(expect)));
    worst = std::max(worst, rel);
    if (rel > 1.0) o.fail("inverse at instance " + std::to_string(i));
    if (d.index != fx.index) o.fail("index at instance " + std::to_string(i));
    ++per_index[fx.index];
  }
  o.note << "index counts 1:" << per_index[1] << " 2:" << per_index[2] << " 3:" << per_index[3]
         << " 4:" << per_index[4] << ", worst residual/bound " << worst;
}

bool pit_modes_agree(const LinOp& t, std::uint64_t seed) {
  const bool exact = is_rank_one_nonincreasing(t).holds;
  const bool randomized = is_rank_one_nonincreasing(t, PitOptions{PitMode::Randomized, 64, seed, 1e-9}).holds;
  return exact == randomized;
}

void classification_round_trip(Outcome& o) {
  int agreement_checked = 0;
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    Rng rng = rng_for("round_trip", i);
    const int n = fixtures::uniform_int(rng, 2, 6);
    LinOp t;
    int expected = 0;  // 0: SecondPower, 1: Functional
    double c = 1.0;
    switch (i % 3) {
      case 0:
        c = fixtures::uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
        t = p2_of(VecMap(fixtures::nonnegative_full_rank(rng, n)), c);
        break;
      case 1: {
        // rank-one f = u psi^T with u in the orthant; the operator has rank one
        const VectorXd u = fixtures::nonnegative_vector(rng, n);
        const VectorXd psi = fixtures::gaussian_vector(rng, n);
        t = p2_of(VecMap(u * psi.transpose()));
        expected = 1;
        break;
      }
      default:
        t = functional_map(fixtures::copositive(rng, n), sym_outer(fixtures::nonnegative_vector(rng, n)));
        expected = 1;
    }
    const PreserverForm form = classify_preserver(t);
    const auto* sp = std::get_if<SecondPower>(&form);
    const auto* fn = std::get_if<Functional>(&form);
    if ((expected == 0 && (!sp || sp->c != c)) || (expected == 1 && !fn)) {
      o.fail(std::string("canonical instance ") + std::to_string(i) + " came back " + form_name(form));
      continue;
    }
    if (i % 3 == 1 && linalg::numerical_rank(fn->u.matrix()) > 1) o.fail("rank-one f gave rank(U) > 1");
    const double res = detail::relative_gap(reconstruct(form).mat(), t.mat());
    worst = std::max(worst, res);
    if (res > 1e-9) o.fail("reconstruction residual at instance " + std::to_string(i));
    if (n <= 5) {
      ++agreement_checked;
      if (!pit_modes_agree(t, static_cast<std::uint64_t>(i))) o.fail("PIT modes disagree");
    }
  }
  for (int i = 0; i < 100; ++i) {
    Rng rng = rng_for("round_trip_adversarial", i);
    const int n = fixtures::uniform_int(rng, 2, 6);
    const LinOp t = fixtures::adversarial(rng, n);
    const PreserverForm form = classify_preserver(t);
    const auto* np = std::get_if<NotPreserver>(&form);
    if (!np) {
      o.fail(std::string("adversarial came back ") + form_name(form));
      continue;
    }
    if (np->image_rank < 2 || tensor_rank(t(sym_outer(np->witness))) < 2) o.fail("witness image has rank < 2");
    if (n <= 5) {
      ++agreement_checked;
      if (!pit_modes_agree(t, static_cast<std::uint64_t>(1000 + i))) o.fail("PIT modes disagree");
    }
  }
  o.note << "500 canonical + 100 adversarial, worst reconstruction " << worst << ", PIT agreement on "
         << agreement_checked;
}

void automorphisms(Outcome& o) {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Rng rng = rng_for("aut_monomial", i);
    const int n = fixtures::uniform_int(rng, 1, 6);
    const MatrixXd p = fixtures::positive_monomial(rng, n);
    const AutDecision a = is_aut_cp(p2_of(VecMap(p)), ConeSpec::orthant(n));
    if (!a.yes || !a.f) {
      o.fail(std::string("monomial rejected: ") + to_string(a.reason));
      continue;
    }
    const double err = linalg::max_abs(a.f->mat - p);
    worst = std::max(worst, err);
    if (err > 1e-9) o.fail("monomial not recovered");
  }
  for (int i = 0; i < 200; ++i) {
    Rng rng = rng_for("aut_non_monomial", i);
    const int n = fixtures::uniform_int(rng, 2, 6);
    const MatrixXd p = fixtures::nonnegative_non_monomial(rng, n);
    if (is_aut_cp(p2_of(VecMap(p)), ConeSpec::orthant(n)).yes) o.fail("non-monomial accepted");
  }
  o.note << "200 monomial (worst recovery " << worst << ") + 200 non-monomial";
}

// Independent simplex minimum: every support S, stationary point of the
// bordered system [U_S 1; 1^T 0].
double kkt_simplex_min(const MatrixXd& u) {
  const int n = static_cast<int>(u.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i);
    const int m = static_cast<int>(s.size());
    MatrixXd k = MatrixXd::Zero(m + 1, m + 1);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) k(a, b) = u(s[a], s[b]);
      k(a, m) = k(m, a) = 1.0;
    }
    VectorXd rhs = VectorXd::Zero(m + 1);
    rhs(m) = 1.0;
    Eigen::FullPivLU<MatrixXd> lu(k);
    if (!lu.isInvertible()) continue;
    const VectorXd sol = lu.solve(rhs);
    if (sol.head(m).minCoeff() < -1e-12) continue;
    VectorXd x = VectorXd::Zero(n);
    for (int a = 0; a < m; ++a) x(s[a]) = std::max(sol(a), 0.0);
    x /= x.sum();
    best = std::min(best, x.dot(u * x));
  }
  for (int i = 0; i < n; ++i) best = std::min(best, u(i, i));
  return best;
}

void cp_rank_one_forms(Outcome& o) {
  int kkt = 0, rank_one_f = 0;
  for (int i = 0; i < 500; ++i) {
    Rng rng = rng_for("cp1_forms", i);
    const int n = fixtures::uniform_int(rng, 2, 6);
    const ConeSpec k = ConeSpec::orthant(n);
    if (i < 200) {
      MatrixXd f = fixtures::nonnegative(rng, n, n, 0.3);
      for (int j = 0; j < n; ++j)
        if (f.col(j).maxCoeff() == 0.0) f(fixtures::uniform_int(rng, 0, n - 1), j) = fixtures::uniform(rng, 0.2, 1.0);
      // rank-one f gives a rank-one operator, reported in the functional form
      const bool rank_one = linalg::numerical_rank(f) == 1;
      rank_one_f += rank_one;
      const Cp1Decision d = classify_cp1_preserver(p2_of(VecMap(f)), k);
      const auto want = rank_one ? Cp1Decision::Kind::FormII : Cp1Decision::Kind::FormI;
      if (d.kind != want) o.fail("FormI fixture gave " + std::string(to_string(d.kind)));
      if (d.kind == Cp1Decision::Kind::FormI && detail::relative_gap(p2_of(*d.f).mat(), p2_of(VecMap(f)).mat()) > 1e-9)
        o.fail("FormI reconstruction");
      continue;
    }
    if (i < 400 || i >= 450) {
      const bool strict = i < 400;
      const SymMat u = strict ? fixtures::strictly_copositive(rng, n) : fixtures::merely_copositive(rng, n);
      const LinOp t = functional_map(u, sym_outer(fixtures::nonnegative_vector(rng, n)));
      const Cp1Decision d = classify_cp1_preserver(t, k);
      const auto want = strict ? Cp1Decision::Kind::FormII : Cp1Decision::Kind::No;
      if (d.kind != want) o.fail("Functional fixture gave " + std::string(to_string(d.kind)));
      // strict-copositivity decision against the bordered-KKT minimum sign
      const SimplexMinimum sm = simplex_minimum(u.matrix());
      const double ref = kkt_simplex_min(u.matrix());
      const bool ref_strict = ref > kCopositiveTol * sm.scale;
      ++kkt;
      if (sm.strictly_copositive != ref_strict || ref_strict != strict) o.fail("strict copositivity mismatch");
      if (!strict && (!d.witness || d.witness->minCoeff() < 0.0)) o.fail("merely copositive: no witness in K");
      continue;
    }
    // zero column
    MatrixXd f = fixtures::nonnegative_full_rank(rng, n);
    const int j = fixtures::uniform_int(rng, 0, n - 1);
    f.col(j).setZero();
    const LinOp t = p2_of(VecMap(f));
    const Cp1Decision d = classify_cp1_preserver(t, k);
    if (d.kind != Cp1Decision::Kind::No || !d.witness) {
      o.fail("zero-column fixture accepted");
      continue;
    }
    const SymMat image = t(sym_outer(*d.witness));
    const bool leaves = image.norm() <= 1e-9 * t.mat().norm() * d.witness->squaredNorm() ||
                        !is_positive_decomposable(k, image).x.has_value();
    if (!leaves || d.witness->minCoeff() < 0.0) o.fail("zero-column witness does not leave CP1");
  }
  o.note << "200 FormI (" << rank_one_f << " with rank-one f) + 200 FormII + 100 No, KKT sign checks " << kkt;
}

void extremal_rank_one(Outcome& o) {
  double coll = 0.0, func = 0.0;
  int certs = 0, functionals = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng = rng_for("extremal", i);
    const int n = fixtures::uniform_int(rng, 1, 4);
    const VectorXd u = fixtures::nonnegative_vector(rng, n);
    const ExtremalityReport r = check_extremal_cp(u, 3, static_cast<std::uint64_t>(i), 20, 1e-8);
    certs += r.certificates_found;
    functionals += r.functionals_checked;
    coll = std::max(coll, r.max_collinearity_defect);
    func = std::max(func, r.max_functional_defect);
    if (!r.passed) o.fail("instance " + std::to_string(i));
    if (r.certificates_found == 0) o.fail("no factorization found at instance " + std::to_string(i));
  }
  o.note << "100 u, certificates " << certs << ", functionals " << functionals << ", worst collinearity " << coll
         << ", worst functional " << func;
}

void oracle_equivalence(Outcome& o) {
  int rows = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    verify::VerifyOptions opts;
    opts.trials = 100;
    opts.seed = seed;
    for (const verify::PropertyResult& r : verify::oracle_suite(opts)) {
      ++rows;
      if (!r.passed) o.fail(r.name + " seed " + std::to_string(seed) + ": " + r.detail);
    }
  }
  o.note << rows << " property runs x 100 instances";
}

void forward_implication(Outcome& o) {
  int preserved = 0, total = 0;
  for (int i = 0; i < 2000; ++i) {
    Rng rng = rng_for("forward_implication", i);
    const int n = fixtures::uniform_int(rng, 2, 5);
    const verify::CorpusItem item = verify::corpus_operator(rng, n);
    const ConeSpec k = verify::random_cone(rng, n);
    ++total;
    if (!preserves_positive_decomposables(item.t, k).holds) continue;
    ++preserved;
    if (!is_rank_one_nonincreasing(item.t).holds) o.fail(std::string("exception: ") + item.kind);
  }
  o.note << preserved << " of " << total << " corpus operators preserve positive decomposables";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;  // seconds, 0 for none
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {"trace_example", 1.0, trace_example},
      {"mp_second_power", 30.0, mp_second_power},
      {"drazin_second_power", 60.0, drazin_second_power},
      {"classification_round_trip", 0.0, classification_round_trip},
      {"cone_automorphisms", 0.0, automorphisms},
      {"cp_rank_one_forms", 0.0, cp_rank_one_forms},
      {"extremal_rank_one", 0.0, extremal_rank_one},
      {"oracle_equivalence", 120.0, oracle_equivalence},
      {"forward_implication", 0.0, forward_implication},
  };
  int failures = 0;
  int idx = 0;
  for (const Criterion& c : criteria) {
    ++idx;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0 && secs > c.budget) o.fail(" over time budget");
    if (!o.pass) ++failures;
    std::printf("AC%d %s %-26s %8.2fs  %s\n", idx, o.pass ? "PASS" : "FAIL", c.name, secs, o.note.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
