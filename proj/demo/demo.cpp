// Walk through the main entry points on small hand-built operators.

#include "symprod/geninv.hpp"

#include <iostream>

using namespace symprod;

namespace {

void show(const char* label, const LinOp& t) {
  const ConeSpec k = ConeSpec::orthant(t.n());
  const PreserverForm form = classify_preserver(t);
  std::cout << label << ": " << form_name(form);
  if (const auto* sp = std::get_if<SecondPower>(&form)) std::cout << " c=" << sp->c << "\n  f =\n" << sp->f.mat;
  if (const auto* np = std::get_if<NotPreserver>(&form))
    std::cout << " witness=(" << np->witness.transpose() << ") image rank " << np->image_rank;
  std::cout << "\n  positive decomposables kept: " << preserves_positive_decomposables(t, k).holds
            << ", CP1 form: " << to_string(classify_cp1_preserver(t, k).kind)
            << ", Aut(CP): " << is_aut_cp(t, k).yes << "\n";
}

}  // namespace

int main() {
  MatrixXd shear(2, 2);
  shear << 1, 1, 0, 1;
  show("P2(shear)", p2_of(VecMap(shear)));

  const int n = 3;
  const LinOp trace = functional_map(SymMat::identity(n), sym_outer(VectorXd::Ones(n)));
  show("tr(A) e e^T", trace);

  show("A + tr(A) I", LinOp::identity(2) + functional_map(SymMat::identity(2), SymMat::identity(2)));

  // The pseudoinverse of the trace map spreads e1 e1^T over the whole identity.
  const LinOp pinv = moore_penrose(trace);
  const SymMat img = pinv(sym_outer(VectorXd::Unit(n, 0)));
  std::cout << "pinv(tr(A) e e^T) applied to e1 e1^T =\n" << img.matrix() << "\n  rank " << tensor_rank(img)
            << ", penrose pass " << verify_penrose(trace, pinv).pass << "\n";

  MatrixXd nil(2, 2);
  nil << 0, 1, 0, 0;
  const DrazinResult d = drazin(p2_of(VecMap(nil)));
  std::cout << "Drazin of P2(nilpotent): index " << d.index << ", |inverse| " << linalg::max_abs(d.inverse.mat())
            << "\n";
  return 0;
}
