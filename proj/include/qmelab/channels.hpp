#pragma once

#include <string>
#include <vector>

#include "qmelab/densmat.hpp"
#include "qmelab/rng.hpp"

namespace qmelab {

enum class Pauli { I, X, Y, Z };

char pauli_char(Pauli p);

// A unitary, Hermitian involution S with its +/-1 eigenprojectors and a
// per-qubit gate decomposition for the stochastic branch. Pauli strings
// decompose factor by factor; axis observables are their own single-qubit
// gate.
struct StabilizerObservable {
  Matrix unitary;
  Matrix projector_plus;
  Matrix projector_minus;
  std::string label;
  std::vector<Eigen::Matrix2cd> gate_list;

  int dim() const { return static_cast<int>(unitary.rows()); }
  int n_qubits() const { return dim() == 2 ? 1 : 2; }
};

// S = nx X + ny Y + nz Z for a unit axis; projectors (1 +/- S)/2 in closed
// form (exact for involutions).
StabilizerObservable stabilizer_from_axis(double nx, double ny, double nz);

// Tensor product of 1 or 2 Pauli factors, e.g. {Z, Z} -> ZZ.
StabilizerObservable pauli_string(const std::vector<Pauli>& labels);

// Non-selective measurement of S: P+ rho P+ + P- rho P-.
DensityMatrix measurement_channel(const DensityMatrix& rho,
                                  const StabilizerObservable& s);

// Dephasing along S: rho/2 + S rho S^dagger / 2. Equal to the measurement
// channel for every involutive S.
DensityMatrix dephasing_channel(const DensityMatrix& rho,
                                const StabilizerObservable& s);

enum class QmeChoice { Identity, Stabilizer };

struct QmeBranch {
  QmeChoice choice = QmeChoice::Identity;
  std::vector<Eigen::Matrix2cd> gates;  // one per qubit

  // Tensor product of the per-qubit gates.
  Matrix unitary(int n_qubits) const;
};

// Deterministic core of the sampler: u < 1/2 picks Identity, else the
// stabilizer branch.
QmeBranch qme_branch_from_uniform(const StabilizerObservable& s, double u);

// One uniform draw per event; p = 1/2 each branch.
QmeBranch qme_sample(const StabilizerObservable& s, RandomStream& rng);

DensityMatrix apply_branch(const DensityMatrix& rho, const QmeBranch& branch);

// Empirical mean over n_samples sampled branches; converges to the
// dephasing channel.
DensityMatrix qme_trajectory_average(const DensityMatrix& rho,
                                     const StabilizerObservable& s,
                                     int n_samples, RandomStream& rng);

}  // namespace qmelab
