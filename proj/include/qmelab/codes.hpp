#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmelab/channels.hpp"
#include "qmelab/densmat.hpp"
#include "qmelab/noise.hpp"

namespace qmelab {

enum class CodeName { zz, xx };

std::string code_name_string(CodeName name);
CodeName code_name_from_string(const std::string& s);

// Two-qubit Bell-state code: the stabilizer's +1 eigenspace carries the
// logical qubit.
//   zz: |~1> = (|00>+|11>)/sqrt2, |~0> = (|00>-|11>)/sqrt2, S = ZZ
//   xx: |~1> = (|00>+|11>)/sqrt2, |~0> = (|01>+|10>)/sqrt2, S = XX
struct BellCode {
  CodeName name;
  StabilizerObservable stabilizer;
  Vector ket_zero;  // |~0>
  Vector ket_one;   // |~1>

  DensityMatrix logical_zero() const { return DensityMatrix::pure(ket_zero); }
  DensityMatrix logical_one() const { return DensityMatrix::pure(ket_one); }
  const Vector& ket(int which) const { return which == 0 ? ket_zero : ket_one; }
};

BellCode make_code(CodeName name);

// Independent single-qubit rotations across the code qubits:
// U = exp(-i theta n1.sigma / 2) x exp(-i theta n2.sigma / 2).
struct TransversalError {
  Eigen::Vector3d axis1;
  Eigen::Vector3d axis2;
  double theta = 0.0;
};

Eigen::Matrix2cd axis_rotation(const Eigen::Vector3d& axis, double theta);
Eigen::Matrix4cd transversal_unitary(const TransversalError& err);
DensityMatrix apply_transversal_error(const DensityMatrix& rho,
                                      const TransversalError& err);

// One preparation time step; simultaneous single-qubit gates share a step.
struct PrepStep {
  std::string label;
  Eigen::Matrix4cd unitary;
  bool is_cz = false;
};

// H on both qubits, CZ, H on qubit 2, plus a basis rotation for the
// chosen logical state.
std::vector<PrepStep> preparation_circuit(CodeName name, int which);
std::string preparation_label(const std::vector<PrepStep>& steps);

struct PrepOptions {
  bool via_circuit = false;
  // Decoherence applied after every step when set; ignored for exact prep.
  std::optional<TwoQubitDevice> device;
};

DensityMatrix prepare_logical(const BellCode& code, int which,
                              const PrepOptions& opts = {});

}  // namespace qmelab
