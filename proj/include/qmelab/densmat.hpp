#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "qmelab/rng.hpp"

namespace qmelab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Validation tolerances for state invariants.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kKrausTol = 1e-10;

// Pauli operators and friends (2x2).
Eigen::Matrix2cd pauli_i();
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd hadamard();
Eigen::Matrix2cd phase_s();

// Kronecker product of two single-qubit operators.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix4cd tensor(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != 2 || a.cols() != 2 || b.rows() != 2 || b.cols() != 2)
    throw std::invalid_argument("tensor: factors must be 2x2");
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b.derived();
  return out;
}

template <typename Derived>
Matrix dagger(const Eigen::MatrixBase<Derived>& m) {
  return m.adjoint();
}

double max_abs(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol = kHermTol);
bool is_unitary(const Matrix& m, double tol = kUnitaryTol);

// Eigenvalues of a Hermitian matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

// Hermitian, unit-trace, positive-semidefinite matrix over 1 or 2 qubits.
// Invariants are checked at construction; every channel in this library
// returns states through this type, so drift past tolerance is an error
// rather than a silent renormalization.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);

  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix from_bloch(const BlochVector& r);
  static DensityMatrix from_bloch(double x, double y, double z);
  static DensityMatrix maximally_mixed(int n_qubits);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  int n_qubits() const { return dim() == 2 ? 1 : 2; }

  double purity() const;

 private:
  Matrix m_;
};

// UrhoU^dagger. Rejects non-unitary u and dimension mismatches.
DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u);

// sum_i K_i rho K_i^dagger. Rejects Kraus sets whose completeness residual
// ||sum K^dagger K - 1||_max exceeds kKrausTol.
DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<Matrix>& kraus);

// Raw map without state validation; hot loops compose with this and
// validate once at the end.
Matrix apply_kraus_raw(const Matrix& rho, const std::vector<Matrix>& kraus);

double kraus_completeness_residual(const std::vector<Matrix>& kraus);

// (<X>, <Y>, <Z>) of a single-qubit state.
BlochVector bloch_vector(const DensityMatrix& rho);

// T(rho, sigma) = 1/2 ||rho - sigma||_1: half the sum of the absolute
// eigenvalues of the Hermitian difference.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// Uhlmann fidelity, squared convention: for pure sigma = |psi><psi| this
// equals <psi|rho|psi>. Nearly-pure arguments (purity > 1 - 1e-9) take the
// Tr(rho sigma) shortcut; mixed-mixed pairs go through matrix square roots.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Tr(rho obs) for Hermitian obs; the imaginary residual is checked against
// kHermTol and discarded.
double expectation(const DensityMatrix& rho, const Matrix& obs);

// Canonical Pauli labels: {"X","Y","Z"} for 1 qubit,
// {"XI","YI","ZI","IX","IY","IZ","XX",...,"ZZ"} (15) for 2 qubits.
const std::vector<std::string>& pauli_labels(int n_qubits);
Matrix pauli_from_label(const std::string& label);
std::vector<double> pauli_expectations(const DensityMatrix& rho);

// Haar-like random pure state (normalized complex Gaussian amplitudes).
Vector random_pure_state(int n_qubits, RandomStream& rng);
// Ginibre-induced random mixed state, G G^dagger / Tr.
DensityMatrix random_density_matrix(int n_qubits, RandomStream& rng);
// Random unitary via QR of a complex Gaussian matrix.
Matrix random_unitary(int dim, RandomStream& rng);

}  // namespace qmelab
