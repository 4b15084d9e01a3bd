#pragma once

#include <vector>

#include "qmelab/densmat.hpp"

namespace qmelab {

// Coherence times in microseconds; the *_cz values apply while the qubit
// undergoes a CZ trajectory, the plain values at the idling point.
struct QubitCoherence {
  double t1 = 0.0;
  double t2r = 0.0;
  double t1_cz = 0.0;
  double t2r_cz = 0.0;

  QubitCoherence idle() const { return {t1, t2r, t1, t2r}; }
  QubitCoherence during_cz() const { return {t1_cz, t2r_cz, t1_cz, t2r_cz}; }
};

// Gate durations in nanoseconds; decoherence after a gate acts for the
// gate time plus the inter-pulse gap.
struct GateTiming {
  double t_1qb_ns = 30.0;
  double t_cz_ns = 60.0;
  double gap_ns = 5.0;

  double step_1qb_us() const { return (t_1qb_ns + gap_ns) * 1e-3; }
  double step_cz_us() const { return (t_cz_ns + gap_ns) * 1e-3; }
};

struct CzErrorParams {
  double phi = 0.0;     // CPHASE over-rotation, radians
  double theta1 = 0.0;  // Z over-rotation on qubit 1, radians
  double theta2 = 0.0;  // Z over-rotation on qubit 2, radians
  double lam = 0.0;     // leakage rate per gate, in [0,1]
};

// Gamma_1 = 1/T1 (rates in 1/us).
double gamma1(double t1);
// Gamma_phi = 1/T2R - 1/(2 T1); rejects T2R > 2 T1.
double gamma_phi(double t1, double t2r);

// A1 = diag(1, e^{-g1 t/2}), A2 = sqrt(1 - e^{-g1 t}) |0><1|.
std::vector<Matrix> amp_damp_kraus(double g1, double t);
// D1 = e^{-gphi t/2} 1, D2/D3 = sqrt(1 - e^{-gphi t}) |0><0| / |1><1|.
std::vector<Matrix> dephase_kraus(double gphi, double t);

// Dephasing then amplitude damping on one qubit of the register, for a
// duration t (us) at the given coherence point.
DensityMatrix decoherence_channel(const DensityMatrix& rho, int qubit_index,
                                  const QubitCoherence& coh, double t);
Matrix decoherence_channel_raw(const Matrix& rho, int n_qubits, int qubit_index,
                               const QubitCoherence& coh, double t);

// The six composed Kraus operators A_i D_j, embedded on one qubit of the
// register. Parameter independent across a circuit, so hot loops build
// them once.
std::vector<Matrix> decoherence_kraus_embedded(int n_qubits, int qubit_index,
                                               const QubitCoherence& coh, double t);

// Device parameter bundle: per-qubit coherence plus shared gate timing.
struct TwoQubitDevice {
  QubitCoherence q1;
  QubitCoherence q2;
  GateTiming timing;
};

// Taken from the device characterization used throughout: T1 = 23/39 us,
// T2R = 13/25 us, CZ-trajectory values 17/5 us on qubit 1, 30 ns
// single-qubit and 60 ns CZ gates with a 5 ns gap.
TwoQubitDevice default_device();

// Decoherence on every register qubit after one circuit step. CZ steps
// use the CZ-trajectory coherence point and the CZ duration; other steps
// use idle values and the single-qubit duration. Works on 2x2 (qubit 1
// parameters) and 4x4 states.
Matrix post_gate_decoherence_raw(const Matrix& rho, const TwoQubitDevice& dev,
                                 bool cz_step);

// L1 = diag(1,1,1,sqrt(1-lam)), L2 = sqrt(lam) |10><11|. The |10><11|
// placement is what makes the pair trace preserving; population leaks out
// of |11> and shows up in |10>.
std::vector<Matrix> leakage_kraus(double lam);

Eigen::Matrix4cd cz_ideal();
Eigen::Matrix4cd cphase(double phi);
Eigen::Matrix2cd rz(double theta);  // diag(e^{-i theta/2}, e^{i theta/2})

// Unitary part of the imperfect gate: RZ(theta1) x RZ(theta2) *
// CPHASE(phi) * CZ. All three factors are diagonal and commute.
Eigen::Matrix4cd cz_error_unitary(const CzErrorParams& p);

// Ideal CZ, then CPHASE(phi), then RZ(theta1) x RZ(theta2), then the
// leakage channel.
DensityMatrix cz_with_errors(const DensityMatrix& rho, const CzErrorParams& p);
Matrix cz_with_errors_raw(const Matrix& rho, const CzErrorParams& p);

}  // namespace qmelab
