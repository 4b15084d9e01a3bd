#include "qmelab/codes.hpp"

#include <cmath>
#include <stdexcept>

namespace qmelab {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Vector ket2(Complex a0, Complex a1, Complex a2, Complex a3) {
  Vector v(4);
  v << a0, a1, a2, a3;
  return v;
}

}  // namespace

std::string code_name_string(CodeName name) {
  return name == CodeName::zz ? "zz" : "xx";
}

CodeName code_name_from_string(const std::string& s) {
  if (s == "zz") return CodeName::zz;
  if (s == "xx") return CodeName::xx;
  throw std::invalid_argument("unknown code name: " + s);
}

BellCode make_code(CodeName name) {
  const double s = 1.0 / std::sqrt(2.0);
  BellCode code;
  code.name = name;
  if (name == CodeName::zz) {
    code.stabilizer = pauli_string({Pauli::Z, Pauli::Z});
    code.ket_one = ket2(s, 0, 0, s);
    code.ket_zero = ket2(s, 0, 0, -s);
  } else {
    code.stabilizer = pauli_string({Pauli::X, Pauli::X});
    code.ket_one = ket2(s, 0, 0, s);
    code.ket_zero = ket2(0, s, s, 0);
  }
  return code;
}

Eigen::Matrix2cd axis_rotation(const Eigen::Vector3d& axis, double theta) {
  require(std::abs(axis.norm() - 1.0) <= 1e-10,
          "axis_rotation: axis must be a unit vector");
  const Eigen::Matrix2cd n_sigma =
      axis[0] * pauli_x() + axis[1] * pauli_y() + axis[2] * pauli_z();
  return std::cos(theta / 2.0) * Eigen::Matrix2cd::Identity() -
         kI * std::sin(theta / 2.0) * n_sigma;
}

Eigen::Matrix4cd transversal_unitary(const TransversalError& err) {
  return tensor(axis_rotation(err.axis1, err.theta),
                axis_rotation(err.axis2, err.theta));
}

DensityMatrix apply_transversal_error(const DensityMatrix& rho,
                                      const TransversalError& err) {
  require(rho.dim() == 4, "apply_transversal_error: two-qubit states only");
  return apply_unitary(rho, transversal_unitary(err));
}

std::vector<PrepStep> preparation_circuit(CodeName name, int which) {
  const Eigen::Matrix2cd id = pauli_i();
  const Eigen::Matrix2cd h = hadamard();
  std::vector<PrepStep> steps;
  steps.push_back({"H1+H2", tensor(h, h), false});
  steps.push_back({"CZ", cz_ideal(), true});
  if (name == CodeName::zz && which == 0) {
    // Z1 commutes with the H2 layer, so they share a step.
    steps.push_back({"H2+Z1", tensor(pauli_z(), h), false});
  } else {
    steps.push_back({"H2", tensor(id, h), false});
    if (name == CodeName::xx && which == 0)
      steps.push_back({"X2", tensor(id, pauli_x()), false});
  }
  return steps;
}

std::string preparation_label(const std::vector<PrepStep>& steps) {
  std::string out;
  for (const auto& s : steps) {
    if (!out.empty()) out += ";";
    out += s.label;
  }
  return out;
}

DensityMatrix prepare_logical(const BellCode& code, int which,
                              const PrepOptions& opts) {
  require(which == 0 || which == 1, "prepare_logical: which must be 0 or 1");
  if (!opts.via_circuit) return DensityMatrix::pure(code.ket(which));
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = 1.0;  // |00><00|
  for (const auto& step : preparation_circuit(code.name, which)) {
    rho = step.unitary * rho * step.unitary.adjoint();
    if (opts.device) rho = post_gate_decoherence_raw(rho, *opts.device, step.is_cz);
  }
  return DensityMatrix(std::move(rho));
}

}  // namespace qmelab
