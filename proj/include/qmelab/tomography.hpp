#pragma once

#include <map>
#include <string>
#include <vector>

#include "qmelab/densmat.hpp"
#include "qmelab/rng.hpp"

namespace qmelab {

// Counts from one full tomography pass: one histogram of 2^n outcomes per
// basis setting. Settings are X/Y/Z strings, all 3^n of them for an
// informationally complete record.
struct TomographyRecord {
  std::vector<std::string> basis_settings;
  int shots_per_setting = 0;
  std::vector<std::vector<long long>> counts;
  std::uint64_t seed = 0;
};

struct ReconstructedState {
  DensityMatrix rho;
  std::map<std::string, double> raw_expectations;
  double psd_projection_distance = 0.0;  // Frobenius distance to the raw estimate
};

// Born-rule multinomial sampling in a rotated basis. X measurements
// conjugate the state by H, Y by H S-dagger (gate order: S-dagger then H),
// then sample in the Z basis. Outcome index packs qubit 0 as the most
// significant bit.
std::vector<long long> simulate_measurement(const DensityMatrix& rho,
                                            const std::string& basis, int shots,
                                            RandomStream& rng);

// Full 3^n-setting record of a state.
TomographyRecord take_tomography(const DensityMatrix& rho, int shots,
                                 RandomStream& rng);

// Pauli expectation estimates from counts; strings with identity factors
// average the compatible settings' marginals.
std::map<std::string, double> expectations_from_record(const TomographyRecord& record);

// Exact expectations, for the infinite-shot limit.
std::map<std::string, double> exact_expectations(const DensityMatrix& rho);

// Linear inversion rho = 2^-n sum <P> P followed by projection to the
// PSD unit-trace cone (clip negative eigenvalues, renormalize).
ReconstructedState reconstruct_from_expectations(
    const std::map<std::string, double>& expectations, int n_qubits);
ReconstructedState reconstruct(const TomographyRecord& record);

// Divide a curve by its value at the smallest x (the zero-error reference).
std::vector<std::pair<double, double>> spam_normalize(
    const std::vector<std::pair<double, double>>& curve);

}  // namespace qmelab
