#include "qmelab/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qmelab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Eigen::Matrix2cd basis_rotation(char axis) {
  switch (axis) {
    case 'Z': return pauli_i();
    case 'X': return hadamard();
    case 'Y': return hadamard() * phase_s().adjoint();
    default: throw std::invalid_argument(std::string("unknown basis axis: ") + axis);
  }
}

Matrix full_rotation(const std::string& basis) {
  if (basis.size() == 1) return basis_rotation(basis[0]);
  if (basis.size() == 2)
    return tensor(basis_rotation(basis[0]), basis_rotation(basis[1]));
  throw std::invalid_argument("basis must name 1 or 2 axes");
}

std::vector<std::string> all_settings(int n_qubits) {
  const std::string axes = "XYZ";
  std::vector<std::string> out;
  if (n_qubits == 1) {
    for (char a : axes) out.emplace_back(1, a);
  } else {
    for (char a : axes)
      for (char b : axes) out.push_back(std::string{a, b});
  }
  return out;
}

// Parity sign of outcome bits at the non-identity positions of a Pauli.
double outcome_sign(const std::string& pauli, int outcome, int n_qubits) {
  double sign = 1.0;
  for (int q = 0; q < n_qubits; ++q) {
    if (pauli[q] == 'I') continue;
    const int bit = (outcome >> (n_qubits - 1 - q)) & 1;
    sign *= bit ? -1.0 : 1.0;
  }
  return sign;
}

bool setting_measures(const std::string& setting, const std::string& pauli) {
  for (size_t q = 0; q < pauli.size(); ++q)
    if (pauli[q] != 'I' && pauli[q] != setting[q]) return false;
  return true;
}

}  // namespace

std::vector<long long> simulate_measurement(const DensityMatrix& rho,
                                            const std::string& basis, int shots,
                                            RandomStream& rng) {
  require(shots >= 1, "simulate_measurement: shots must be >= 1");
  require(static_cast<int>(basis.size()) == rho.n_qubits(),
          "simulate_measurement: basis length mismatch");
  const Matrix v = full_rotation(basis);
  const Matrix rotated = v * rho.matrix() * v.adjoint();
  const int d = rho.dim();
  std::vector<double> cumulative(d);
  double acc = 0.0;
  for (int k = 0; k < d; ++k) {
    acc += std::max(rotated(k, k).real(), 0.0);
    cumulative[k] = acc;
  }
  std::vector<long long> histogram(d, 0);
  for (int s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    int k = 0;
    while (k < d - 1 && u >= cumulative[k]) ++k;
    ++histogram[k];
  }
  return histogram;
}

TomographyRecord take_tomography(const DensityMatrix& rho, int shots,
                                 RandomStream& rng) {
  TomographyRecord record;
  record.basis_settings = all_settings(rho.n_qubits());
  record.shots_per_setting = shots;
  record.seed = rng.base_seed();
  for (const auto& setting : record.basis_settings)
    record.counts.push_back(simulate_measurement(rho, setting, shots, rng));
  return record;
}

std::map<std::string, double> expectations_from_record(const TomographyRecord& record) {
  require(!record.basis_settings.empty(), "empty tomography record");
  const int n_qubits = static_cast<int>(record.basis_settings.front().size());
  const auto required_settings = all_settings(n_qubits);
  const std::set<std::string> have(record.basis_settings.begin(),
                                   record.basis_settings.end());
  for (const auto& s : required_settings)
    require(have.count(s) > 0, "tomography record is missing setting " + s);
  require(record.counts.size() == record.basis_settings.size(),
          "tomography record: counts/settings size mismatch");

  std::map<std::string, double> out;
  for (const auto& pauli : pauli_labels(n_qubits)) {
    double sum = 0.0;
    int n_compatible = 0;
    for (size_t i = 0; i < record.basis_settings.size(); ++i) {
      if (!setting_measures(record.basis_settings[i], pauli)) continue;
      const auto& hist = record.counts[i];
      long long shots = 0;
      double value = 0.0;
      for (size_t outcome = 0; outcome < hist.size(); ++outcome) {
        shots += hist[outcome];
        value += static_cast<double>(hist[outcome]) *
                 outcome_sign(pauli, static_cast<int>(outcome), n_qubits);
      }
      require(shots == record.shots_per_setting,
              "tomography record: counts do not sum to shots_per_setting");
      sum += value / static_cast<double>(shots);
      ++n_compatible;
    }
    out[pauli] = sum / n_compatible;
  }
  return out;
}

std::map<std::string, double> exact_expectations(const DensityMatrix& rho) {
  std::map<std::string, double> out;
  for (const auto& pauli : pauli_labels(rho.n_qubits()))
    out[pauli] = expectation(rho, pauli_from_label(pauli));
  return out;
}

ReconstructedState reconstruct_from_expectations(
    const std::map<std::string, double>& expectations, int n_qubits) {
  const auto& labels = pauli_labels(n_qubits);
  for (const auto& l : labels)
    require(expectations.count(l) > 0, "reconstruct: missing expectation " + l);
  const int d = 1 << n_qubits;
  Matrix raw = Matrix::Identity(d, d);
  for (const auto& l : labels) raw += expectations.at(l) * pauli_from_label(l);
  raw /= static_cast<double>(d);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(raw);
  Eigen::VectorXd eigs = solver.eigenvalues();
  for (int i = 0; i < eigs.size(); ++i) eigs[i] = std::max(eigs[i], 0.0);
  const double total = eigs.sum();
  require(total > 0.0, "reconstruct: projected state has zero trace");
  eigs /= total;
  Matrix projected =
      solver.eigenvectors() * eigs.asDiagonal() * solver.eigenvectors().adjoint();
  projected = 0.5 * (projected + projected.adjoint().eval());

  ReconstructedState out{DensityMatrix(projected), expectations,
                         (projected - raw).norm()};
  return out;
}

ReconstructedState reconstruct(const TomographyRecord& record) {
  const auto expectations = expectations_from_record(record);
  const int n_qubits = static_cast<int>(record.basis_settings.front().size());
  return reconstruct_from_expectations(expectations, n_qubits);
}

std::vector<std::pair<double, double>> spam_normalize(
    const std::vector<std::pair<double, double>>& curve) {
  require(!curve.empty(), "spam_normalize: empty curve");
  const auto ref = std::min_element(
      curve.begin(), curve.end(),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  require(ref->second > 0.0, "spam_normalize: reference value must be positive");
  std::vector<std::pair<double, double>> out;
  out.reserve(curve.size());
  for (const auto& [x, v] : curve) out.emplace_back(x, v / ref->second);
  return out;
}

}  // namespace qmelab
