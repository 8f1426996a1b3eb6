#include "rydress/two_atom_register.hpp"

#include <sstream>

#include "rydress/errors.hpp"

namespace rydress {

std::string level_label(Level level) {
  switch (level) {
    case Level::one: return "1";
    case Level::zero: return "0";
    case Level::rydberg: return "r";
    case Level::dark: return "d";
  }
  return "?";
}

std::string basis_label(int index) {
  return level_label(static_cast<Level>(index / kLevels)) + "," +
         level_label(static_cast<Level>(index % kLevels));
}

Vector16c product_ket(Level a, Level b) {
  Vector16c ket = Vector16c::Zero();
  ket(basis_index(a, b)) = 1.0;
  return ket;
}

TwoAtomRegister::TwoAtomRegister() : rho_(Matrix16c::Zero()) {
  const int i = basis_index(Level::one, Level::one);
  rho_(i, i) = 1.0;
}

TwoAtomRegister TwoAtomRegister::product(Level a, Level b) {
  return TwoAtomRegister(product_ket(a, b) * product_ket(a, b).adjoint());
}

TwoAtomRegister TwoAtomRegister::from_ket(const Vector16c& ket) {
  const double norm = ket.norm();
  if (!(norm > 0.0)) throw DomainError("register: zero ket");
  const Vector16c psi = ket / norm;
  return TwoAtomRegister(psi * psi.adjoint());
}

TwoAtomRegister TwoAtomRegister::from_density(const Matrix16c& rho) {
  TwoAtomRegister reg(rho);
  reg.check_invariants();
  return reg;
}

TwoAtomRegister TwoAtomRegister::from_atoms(const Matrix4c& atom1, const Matrix4c& atom2) {
  Matrix16c rho;
  for (int a = 0; a < kLevels; ++a)
    for (int b = 0; b < kLevels; ++b)
      for (int c = 0; c < kLevels; ++c)
        for (int d = 0; d < kLevels; ++d) rho(kLevels * a + c, kLevels * b + d) = atom1(a, b) * atom2(c, d);
  return from_density(rho);
}

Populations TwoAtomRegister::populations() const {
  Populations p{};
  for (int i = 0; i < kDim; ++i) p[i] = rho_(i, i).real();
  return p;
}

double TwoAtomRegister::population(Level a, Level b) const {
  const int i = basis_index(a, b);
  return rho_(i, i).real();
}

double TwoAtomRegister::trace() const { return rho_.trace().real(); }

double TwoAtomRegister::purity() const { return (rho_ * rho_).trace().real(); }

double TwoAtomRegister::max_asymmetry() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double TwoAtomRegister::min_eigenvalue() const {
  const Matrix16c herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix16c> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void TwoAtomRegister::check_invariants() const {
  std::ostringstream msg;
  if (const double a = max_asymmetry(); a > kHermiticityTol) {
    msg << "register is not Hermitian (max asymmetry " << a << ")";
    throw NumericalError(msg.str());
  }
  if (const double t = trace(); std::abs(t - 1.0) > kTraceTol) {
    msg << "register trace is " << t << ", expected 1";
    throw NumericalError(msg.str());
  }
  if (const double e = min_eigenvalue(); e < -kPositivityTol) {
    msg << "register has a negative eigenvalue " << e;
    throw NumericalError(msg.str());
  }
}

}  // namespace rydress
