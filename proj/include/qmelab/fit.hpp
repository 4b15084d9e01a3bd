#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qmelab/densmat.hpp"
#include "qmelab/noise.hpp"
#include "qmelab/rng.hpp"

namespace qmelab {

// One tomography snapshot of the CZ-sequence circuit. A step is a CZ
// pair; expectations cover the 15 two-qubit Paulis.
struct FitSnapshot {
  int step = 0;
  std::map<std::string, double> expectations;
};

struct FitProblem {
  std::vector<FitSnapshot> snapshots;
  Matrix initial_state;  // 4x4 density matrix, as measured
  std::optional<TwoQubitDevice> device;  // absent: no decoherence in the model

  // Sorts snapshots by step and checks the problem invariants.
  void normalize();
};

struct FitResult {
  CzErrorParams params;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Forward model: per step, two imperfect CZ gates, each followed by
// decoherence on both qubits when a device is present. Returns the 15
// Pauli expectations (canonical label order) at each snapshot step.
std::vector<std::vector<double>> predict_expectations(const CzErrorParams& params,
                                                      const FitProblem& problem);

// Sum of squared residuals over all snapshots and Pauli components.
double fit_objective(const CzErrorParams& params, const FitProblem& problem);

// Least squares over (phi, theta1, theta2, lambda); lambda runs through a
// logit reparameterization to stay in [0,1]. Five deterministic starts
// (the supplied guess plus corners of a small angle box); lowest residual
// wins, ties broken by smallest parameter norm.
FitResult fit_cz_params(const FitProblem& problem,
                        const CzErrorParams& initial_guess = {});

// Synthetic snapshot generation sharing the forward model; shots = 0
// records exact expectations, otherwise tomography counts are simulated
// with the given shots per setting.
std::vector<FitSnapshot> make_synthetic_snapshots(const Matrix& initial_state,
                                                  const CzErrorParams& truth,
                                                  const std::optional<TwoQubitDevice>& device,
                                                  const std::vector<int>& steps,
                                                  int shots, std::uint64_t seed);

// --- Nelder-Mead simplex minimizer (derivative free) ---

struct NelderMeadOptions {
  int max_iterations = 2000;
  double simplex_tol = 1e-10;   // max vertex distance to the best point
  double f_tol = 1e-24;         // absolute spread of vertex values
  double initial_step = 0.05;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
  Eigen::VectorXd first_move;  // displacement of the first accepted point
};

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& opts = {});

}  // namespace qmelab
