#include "qmelab/densmat.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmelab {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Eigen::Matrix2cd pauli_i() { return Eigen::Matrix2cd::Identity(); }

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, -kI, kI, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd m;
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

Eigen::Matrix2cd phase_s() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, kI;
  return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& m, double tol) {
  return max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  return max_abs(m.adjoint() * m - id) <= tol;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
  const auto d = m_.rows();
  require(m_.cols() == d && (d == 2 || d == 4), "DensityMatrix: dim must be 2 or 4");
  const double herm = max_abs(m_ - m_.adjoint());
  require(herm <= kHermTol, "DensityMatrix: not Hermitian, residual " + fmt(herm));
  const double tr = std::abs(m_.trace() - Complex(1.0));
  require(tr <= kTraceTol, "DensityMatrix: trace deviates from 1 by " + fmt(tr));
  const double min_eig = hermitian_eigenvalues(m_).minCoeff();
  require(min_eig >= -kPsdTol,
          "DensityMatrix: negative eigenvalue " + fmt(min_eig));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const auto d = psi.size();
  require(d == 2 || d == 4, "pure: dim must be 2 or 4");
  const double n2 = psi.squaredNorm();
  require(std::abs(n2 - 1.0) <= 1e-10, "pure: state not normalized");
  Matrix m = psi * psi.adjoint() / n2;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_bloch(const BlochVector& r) {
  require(r.norm() <= 1.0 + 1e-10, "from_bloch: vector norm exceeds 1");
  Matrix m = 0.5 * (Matrix::Identity(2, 2) + r.x * pauli_x() + r.y * pauli_y() +
                    r.z * pauli_z());
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_bloch(double x, double y, double z) {
  return from_bloch(BlochVector{x, y, z});
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  require(n_qubits == 1 || n_qubits == 2, "maximally_mixed: 1 or 2 qubits");
  const int d = 1 << n_qubits;
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u) {
  require(u.rows() == rho.dim() && u.cols() == rho.dim(),
          "apply_unitary: dimension mismatch");
  require(is_unitary(u), "apply_unitary: operator is not unitary");
  return DensityMatrix(u * rho.matrix() * u.adjoint());
}

double kraus_completeness_residual(const std::vector<Matrix>& kraus) {
  if (kraus.empty()) return 1.0;
  const auto d = kraus.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return max_abs(sum - Matrix::Identity(d, d));
}

Matrix apply_kraus_raw(const Matrix& rho, const std::vector<Matrix>& kraus) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<Matrix>& kraus) {
  require(!kraus.empty(), "apply_kraus: empty Kraus set");
  for (const auto& k : kraus)
    require(k.rows() == rho.dim() && k.cols() == rho.dim(),
            "apply_kraus: dimension mismatch");
  const double residual = kraus_completeness_residual(kraus);
  require(residual <= kKrausTol,
          "apply_kraus: incomplete Kraus set, residual " + fmt(residual));
  return DensityMatrix(apply_kraus_raw(rho.matrix(), kraus));
}

BlochVector bloch_vector(const DensityMatrix& rho) {
  require(rho.n_qubits() == 1, "bloch_vector: single-qubit states only");
  const Matrix& m = rho.matrix();
  BlochVector r;
  r.x = (m * pauli_x()).trace().real();
  r.y = (m * pauli_y()).trace().real();
  r.z = (m * pauli_z()).trace().real();
  return r;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), "trace_distance: dimension mismatch");
  const Eigen::VectorXd eigs = hermitian_eigenvalues(rho.matrix() - sigma.matrix());
  double t = 0.5 * eigs.cwiseAbs().sum();
  if (t > 1.0 && t <= 1.0 + 1e-12) t = 1.0;
  return t;
}

namespace {

double clamp_unit(double v) {
  if (v < 0.0 && v >= -1e-12) return 0.0;
  if (v > 1.0 && v <= 1.0 + 1e-12) return 1.0;
  return v;
}

Matrix hermitian_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  Eigen::VectorXd eigs = solver.eigenvalues();
  for (int i = 0; i < eigs.size(); ++i) eigs[i] = std::sqrt(std::max(eigs[i], 0.0));
  return solver.eigenvectors() * eigs.asDiagonal() *
         solver.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), "fidelity: dimension mismatch");
  constexpr double kPureCut = 1.0 - 1e-9;
  if (rho.purity() > kPureCut || sigma.purity() > kPureCut) {
    return clamp_unit((rho.matrix() * sigma.matrix()).trace().real());
  }
  const Matrix root = hermitian_sqrt(rho.matrix());
  const Eigen::VectorXd eigs = hermitian_eigenvalues(root * sigma.matrix() * root);
  double sum = 0.0;
  for (int i = 0; i < eigs.size(); ++i) sum += std::sqrt(std::max(eigs[i], 0.0));
  return clamp_unit(sum * sum);
}

double expectation(const DensityMatrix& rho, const Matrix& obs) {
  require(obs.rows() == rho.dim() && obs.cols() == rho.dim(),
          "expectation: dimension mismatch");
  require(is_hermitian(obs), "expectation: observable is not Hermitian");
  const Complex tr = (rho.matrix() * obs).trace();
  require(std::abs(tr.imag()) <= kHermTol,
          "expectation: imaginary residual " + fmt(tr.imag()));
  return tr.real();
}

const std::vector<std::string>& pauli_labels(int n_qubits) {
  static const std::vector<std::string> one{"X", "Y", "Z"};
  static const std::vector<std::string> two{"XI", "YI", "ZI", "IX", "IY",
                                            "IZ", "XX", "XY", "XZ", "YX",
                                            "YY", "YZ", "ZX", "ZY", "ZZ"};
  require(n_qubits == 1 || n_qubits == 2, "pauli_labels: 1 or 2 qubits");
  return n_qubits == 1 ? one : two;
}

namespace {

Eigen::Matrix2cd pauli_from_char(char c) {
  switch (c) {
    case 'I': return pauli_i();
    case 'X': return pauli_x();
    case 'Y': return pauli_y();
    case 'Z': return pauli_z();
    default: throw std::invalid_argument(std::string("unknown Pauli: ") + c);
  }
}

}  // namespace

Matrix pauli_from_label(const std::string& label) {
  if (label.size() == 1) return pauli_from_char(label[0]);
  if (label.size() == 2)
    return tensor(pauli_from_char(label[0]), pauli_from_char(label[1]));
  throw std::invalid_argument("pauli_from_label: length must be 1 or 2");
}

std::vector<double> pauli_expectations(const DensityMatrix& rho) {
  const auto& labels = pauli_labels(rho.n_qubits());
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(expectation(rho, pauli_from_label(l)));
  return out;
}

namespace {

// Box-Muller on our own uniforms keeps streams portable across stdlibs.
double gaussian(RandomStream& rng) {
  const double u1 = std::max(rng.uniform(), 1e-300);
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix ginibre(int dim, RandomStream& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gaussian(rng), gaussian(rng));
  return g;
}

}  // namespace

Vector random_pure_state(int n_qubits, RandomStream& rng) {
  const int d = 1 << n_qubits;
  Vector psi(d);
  for (int i = 0; i < d; ++i) psi[i] = Complex(gaussian(rng), gaussian(rng));
  psi.normalize();
  return psi;
}

DensityMatrix random_density_matrix(int n_qubits, RandomStream& rng) {
  const Matrix g = ginibre(1 << n_qubits, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  // Hermitize away the last bits of rounding noise.
  m = 0.5 * (m + m.adjoint().eval());
  return DensityMatrix(std::move(m));
}

Matrix random_unitary(int dim, RandomStream& rng) {
  const Matrix g = ginibre(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the phase convention so the result is deterministic.
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const Complex phase = d == Complex(0.0) ? Complex(1.0) : d / std::abs(d);
    q.col(i) *= phase;
  }
  return q;
}

}  // namespace qmelab
