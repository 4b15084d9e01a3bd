#include "qmelab/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace qmelab {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double gamma1(double t1) {
  require(t1 > 0.0, "gamma1: T1 must be positive");
  return 1.0 / t1;
}

double gamma_phi(double t1, double t2r) {
  require(t1 > 0.0 && t2r > 0.0, "gamma_phi: times must be positive");
  require(t2r <= 2.0 * t1, "gamma_phi: T2R > 2 T1 gives a negative rate");
  return 1.0 / t2r - 1.0 / (2.0 * t1);
}

std::vector<Matrix> amp_damp_kraus(double g1, double t) {
  require(g1 >= 0.0 && t >= 0.0, "amp_damp_kraus: negative rate or time");
  const double decay = std::exp(-g1 * t);
  Matrix a1 = Matrix::Zero(2, 2);
  a1(0, 0) = 1.0;
  a1(1, 1) = std::exp(-g1 * t / 2.0);
  Matrix a2 = Matrix::Zero(2, 2);
  a2(0, 1) = std::sqrt(1.0 - decay);
  return {a1, a2};
}

std::vector<Matrix> dephase_kraus(double gphi, double t) {
  require(gphi >= 0.0 && t >= 0.0, "dephase_kraus: negative rate or time");
  const double decay = std::exp(-gphi * t);
  Matrix d1 = std::exp(-gphi * t / 2.0) * Matrix::Identity(2, 2);
  Matrix d2 = Matrix::Zero(2, 2);
  d2(0, 0) = std::sqrt(1.0 - decay);
  Matrix d3 = Matrix::Zero(2, 2);
  d3(1, 1) = std::sqrt(1.0 - decay);
  return {d1, d2, d3};
}

// Kraus set of the composed single-qubit channel, embedded on the given
// qubit of an n-qubit register (qubit 0 is the leftmost / most
// significant label).
std::vector<Matrix> decoherence_kraus_embedded(int n_qubits, int qubit_index,
                                               const QubitCoherence& coh, double t) {
  const auto amps = amp_damp_kraus(gamma1(coh.t1), t);
  const auto phases = dephase_kraus(gamma_phi(coh.t1, coh.t2r), t);
  std::vector<Matrix> kraus;
  kraus.reserve(amps.size() * phases.size());
  for (const auto& a : amps)
    for (const auto& d : phases) {
      const Matrix k = a * d;  // dephasing acts first
      if (n_qubits == 1) {
        kraus.push_back(k);
      } else if (qubit_index == 0) {
        kraus.push_back(tensor(k, pauli_i()));
      } else {
        kraus.push_back(tensor(pauli_i(), k));
      }
    }
  return kraus;
}

Matrix decoherence_channel_raw(const Matrix& rho, int n_qubits, int qubit_index,
                               const QubitCoherence& coh, double t) {
  return apply_kraus_raw(rho,
                         decoherence_kraus_embedded(n_qubits, qubit_index, coh, t));
}

DensityMatrix decoherence_channel(const DensityMatrix& rho, int qubit_index,
                                  const QubitCoherence& coh, double t) {
  require(t >= 0.0, "decoherence_channel: negative time");
  require(qubit_index >= 0 && qubit_index < rho.n_qubits(),
          "decoherence_channel: invalid qubit index");
  return apply_kraus(
      rho, decoherence_kraus_embedded(rho.n_qubits(), qubit_index, coh, t));
}

TwoQubitDevice default_device() {
  TwoQubitDevice dev;
  dev.q1 = {23.0, 13.0, 17.0, 5.0};
  dev.q2 = {39.0, 25.0, 39.0, 25.0};
  dev.timing = {30.0, 60.0, 5.0};
  return dev;
}

Matrix post_gate_decoherence_raw(const Matrix& rho, const TwoQubitDevice& dev,
                                 bool cz_step) {
  const double t = cz_step ? dev.timing.step_cz_us() : dev.timing.step_1qb_us();
  const QubitCoherence c1 = cz_step ? dev.q1.during_cz() : dev.q1.idle();
  const QubitCoherence c2 = cz_step ? dev.q2.during_cz() : dev.q2.idle();
  if (rho.rows() == 2) return decoherence_channel_raw(rho, 1, 0, c1, t);
  Matrix out = decoherence_channel_raw(rho, 2, 0, c1, t);
  return decoherence_channel_raw(out, 2, 1, c2, t);
}

std::vector<Matrix> leakage_kraus(double lam) {
  require(lam >= 0.0 && lam <= 1.0, "leakage_kraus: lambda must be in [0,1]");
  Matrix l1 = Matrix::Identity(4, 4);
  l1(3, 3) = std::sqrt(1.0 - lam);
  Matrix l2 = Matrix::Zero(4, 4);
  l2(2, 3) = std::sqrt(lam);
  return {l1, l2};
}

Eigen::Matrix4cd cz_ideal() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  m(3, 3) = -1.0;
  return m;
}

Eigen::Matrix4cd cphase(double phi) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  m(3, 3) = std::exp(kI * phi);
  return m;
}

Eigen::Matrix2cd rz(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(-kI * theta / 2.0);
  m(1, 1) = std::exp(kI * theta / 2.0);
  return m;
}

Eigen::Matrix4cd cz_error_unitary(const CzErrorParams& p) {
  return tensor(rz(p.theta1), rz(p.theta2)) * cphase(p.phi) * cz_ideal();
}

Matrix cz_with_errors_raw(const Matrix& rho, const CzErrorParams& p) {
  const Eigen::Matrix4cd u = cz_error_unitary(p);
  const Matrix rotated = u * rho * u.adjoint();
  if (p.lam == 0.0) return rotated;
  return apply_kraus_raw(rotated, leakage_kraus(p.lam));
}

DensityMatrix cz_with_errors(const DensityMatrix& rho, const CzErrorParams& p) {
  require(rho.dim() == 4, "cz_with_errors: two-qubit states only");
  require(p.lam >= 0.0 && p.lam <= 1.0, "cz_with_errors: lambda must be in [0,1]");
  return DensityMatrix(cz_with_errors_raw(rho.matrix(), p));
}

}  // namespace qmelab
