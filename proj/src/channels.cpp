#include "qmelab/channels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmelab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_dims(const DensityMatrix& rho, const StabilizerObservable& s,
                const char* where) {
  require(rho.dim() == s.dim(), std::string(where) + ": dimension mismatch");
}

}  // namespace

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

StabilizerObservable stabilizer_from_axis(double nx, double ny, double nz) {
  const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
  require(std::abs(norm - 1.0) <= 1e-10, "stabilizer_from_axis: axis must be a unit vector");
  Eigen::Matrix2cd s = nx * pauli_x() + ny * pauli_y() + nz * pauli_z();
  StabilizerObservable out;
  out.unitary = s;
  out.projector_plus = 0.5 * (Eigen::Matrix2cd::Identity() + s);
  out.projector_minus = 0.5 * (Eigen::Matrix2cd::Identity() - s);
  std::ostringstream label;
  label << "axis(" << nx << "," << ny << "," << nz << ")";
  out.label = label.str();
  out.gate_list = {s};
  return out;
}

StabilizerObservable pauli_string(const std::vector<Pauli>& labels) {
  require(labels.size() == 1 || labels.size() == 2,
          "pauli_string: 1 or 2 factors supported");
  auto factor = [](Pauli p) -> Eigen::Matrix2cd {
    switch (p) {
      case Pauli::I: return pauli_i();
      case Pauli::X: return pauli_x();
      case Pauli::Y: return pauli_y();
      case Pauli::Z: return pauli_z();
    }
    return pauli_i();
  };
  StabilizerObservable out;
  std::string label;
  for (auto p : labels) {
    out.gate_list.push_back(factor(p));
    label += pauli_char(p);
  }
  out.label = label;
  if (labels.size() == 1) {
    out.unitary = out.gate_list[0];
  } else {
    out.unitary = tensor(out.gate_list[0], out.gate_list[1]);
  }
  const Matrix id = Matrix::Identity(out.unitary.rows(), out.unitary.cols());
  out.projector_plus = 0.5 * (id + out.unitary);
  out.projector_minus = 0.5 * (id - out.unitary);
  return out;
}

DensityMatrix measurement_channel(const DensityMatrix& rho,
                                  const StabilizerObservable& s) {
  check_dims(rho, s, "measurement_channel");
  return DensityMatrix(s.projector_plus * rho.matrix() * s.projector_plus.adjoint() +
                       s.projector_minus * rho.matrix() * s.projector_minus.adjoint());
}

DensityMatrix dephasing_channel(const DensityMatrix& rho,
                                const StabilizerObservable& s) {
  check_dims(rho, s, "dephasing_channel");
  return DensityMatrix(0.5 * rho.matrix() +
                       0.5 * s.unitary * rho.matrix() * s.unitary.adjoint());
}

Matrix QmeBranch::unitary(int n_qubits) const {
  if (choice == QmeChoice::Identity) {
    const int d = 1 << n_qubits;
    return Matrix::Identity(d, d);
  }
  if (gates.size() == 1) return gates[0];
  return tensor(gates[0], gates[1]);
}

QmeBranch qme_branch_from_uniform(const StabilizerObservable& s, double u) {
  QmeBranch branch;
  if (u < 0.5) {
    branch.choice = QmeChoice::Identity;
    branch.gates.assign(s.n_qubits(), pauli_i());
  } else {
    branch.choice = QmeChoice::Stabilizer;
    branch.gates = s.gate_list;
  }
  return branch;
}

QmeBranch qme_sample(const StabilizerObservable& s, RandomStream& rng) {
  return qme_branch_from_uniform(s, rng.uniform());
}

DensityMatrix apply_branch(const DensityMatrix& rho, const QmeBranch& branch) {
  return apply_unitary(rho, branch.unitary(rho.n_qubits()));
}

DensityMatrix qme_trajectory_average(const DensityMatrix& rho,
                                     const StabilizerObservable& s,
                                     int n_samples, RandomStream& rng) {
  check_dims(rho, s, "qme_trajectory_average");
  require(n_samples >= 1, "qme_trajectory_average: n_samples must be >= 1");
  Matrix sum = Matrix::Zero(rho.dim(), rho.dim());
  for (int i = 0; i < n_samples; ++i) {
    const QmeBranch branch = qme_sample(s, rng);
    const Matrix u = branch.unitary(rho.n_qubits());
    sum += u * rho.matrix() * u.adjoint();
  }
  return DensityMatrix(sum / static_cast<double>(n_samples));
}

}  // namespace qmelab
