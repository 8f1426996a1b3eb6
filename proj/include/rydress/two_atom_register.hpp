#pragma once

#include <array>
#include <complex>
#include <string>

#include <Eigen/Dense>

namespace rydress {

/// Per-atom levels in basis order: the clock qubit |1> and |0>, the Rydberg
/// level |r>, and a dark level |d> that collects lost atoms.
enum class Level : int { one = 0, zero = 1, rydberg = 2, dark = 3 };

inline constexpr int kLevels = 4;
inline constexpr int kDim = kLevels * kLevels;

using Complex = std::complex<double>;
using Matrix4c = Eigen::Matrix<Complex, kLevels, kLevels>;
using Matrix16c = Eigen::Matrix<Complex, kDim, kDim>;
using Vector16c = Eigen::Matrix<Complex, kDim, 1>;
using Populations = std::array<double, kDim>;

/// Product-basis index of |a, b> with atom 1 as the slow index.
constexpr int basis_index(Level a, Level b) { return kLevels * static_cast<int>(a) + static_cast<int>(b); }

/// "1", "0", "r" or "d".
std::string level_label(Level level);
/// "1,0" style label for a product-basis index.
std::string basis_label(int index);

/// Density operator of two four-level atoms. Construction from raw data
/// validates Hermiticity, unit trace and positivity.
class TwoAtomRegister {
 public:
  static constexpr double kHermiticityTol = 1e-10;
  static constexpr double kTraceTol = 1e-8;
  static constexpr double kPositivityTol = 1e-8;

  /// |1,1><1,1|
  TwoAtomRegister();

  static TwoAtomRegister product(Level a, Level b);
  static TwoAtomRegister from_ket(const Vector16c& ket);
  static TwoAtomRegister from_density(const Matrix16c& rho);
  /// Tensor product of two single-atom density matrices.
  static TwoAtomRegister from_atoms(const Matrix4c& atom1, const Matrix4c& atom2);

  const Matrix16c& density() const { return rho_; }

  /// Replaces the density matrix without validation; evolution code calls
  /// check_invariants() itself where it matters.
  void assign(const Matrix16c& rho) { rho_ = rho; }

  Populations populations() const;
  double population(Level a, Level b) const;
  double trace() const;
  double purity() const;
  double max_asymmetry() const;
  double min_eigenvalue() const;

  /// Throws NumericalError naming the violated invariant.
  void check_invariants() const;

 private:
  explicit TwoAtomRegister(const Matrix16c& rho) : rho_(rho) {}
  Matrix16c rho_;
};

Vector16c product_ket(Level a, Level b);

}  // namespace rydress
