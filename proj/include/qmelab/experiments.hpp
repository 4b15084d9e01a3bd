#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmelab/codes.hpp"
#include "qmelab/densmat.hpp"
#include "qmelab/noise.hpp"

namespace qmelab {

// Sweep request. `values` is the independent variable grid: state-grid
// indices (fig1 / supp-axes), error angle in radians (fig2 /
// supp-transversal) or CZ-pair count (fig3). `arms` holds base arm names;
// experiments with panels or error families expand them into the emitted
// arm labels.
struct SweepSpec {
  std::vector<double> values;
  std::vector<std::string> arms;
  bool exact = true;
  int n_trajectories = 0;  // sampled mode only
  int shots = 0;           // 0 = exact expectations, else tomography shots
  std::uint64_t master_seed = 42;
};

// Device, noise and protocol switches shared by every sweep point.
struct RunContext {
  TwoQubitDevice device = default_device();
  CzErrorParams cz_errors;
  CodeName code = CodeName::xx;
  bool decoherence = true;
  bool noisy_qme_gates = false;  // give QME gates duration and decoherence
  bool prep_via_circuit = false;
  int threads = 1;  // 0 = hardware concurrency; sampled sweeps only
};

struct ResultRow {
  std::string arm;
  double x = 0.0;
  double trace_distance = 0.0;
  double fidelity = 0.0;
  std::optional<double> one_minus_t_norm;
  std::vector<std::optional<double>> expectations;
  std::string shots = "exact";
  std::uint64_t seed = 0;
  std::string mode = "exact";
};

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> exp_labels;
  bool has_norm_column = false;
  std::vector<std::string> arms_emitted;
  std::vector<ResultRow> rows;  // sorted by (arm, x)
  std::vector<std::pair<std::string, std::string>> metadata;
};

// Bloch-sphere initial-state grid used by fig1 and supp-axes: a 12-point
// great circle in the x-z plane plus the six axis states.
std::vector<BlochVector> fig1_state_grid();

std::vector<double> default_values(const std::string& experiment);
std::vector<std::string> default_arms(const std::string& experiment);

// Single-qubit channel-equivalence demonstration along z: arms apply the
// identity, the stabilizer gate, QME, or a real (non-selective)
// measurement to each grid state.
ExperimentResult run_fig1(const RunContext& ctx, const SweepSpec& spec);

// First-order-insensitivity sweeps: |0> under Rx(theta) with optional
// QME_Z, and a code word under Rx(theta) x Rx(theta) with optional QME of
// the code stabilizer. Emits SPAM-normalized 1-T alongside the raw
// metrics.
ExperimentResult run_fig2(const RunContext& ctx, const SweepSpec& spec);

// CZ-sequence experiment: prepare |~0>, run N CZ pairs with the error
// model, optionally insert QME of the code stabilizer after every pair.
ExperimentResult run_fig3(const RunContext& ctx, const SweepSpec& spec);

// fig1 logic with emulated measurement along x and along (x+y)/sqrt2.
ExperimentResult run_supp_axes(const RunContext& ctx, const SweepSpec& spec);

// fig2-style curves for a family of transversal errors:
// XX, YY, XY and an equatorial tilted axis.
ExperimentResult run_supp_transversal(const RunContext& ctx, const SweepSpec& spec);

ExperimentResult run_experiment(const std::string& name, const RunContext& ctx,
                                const SweepSpec& spec);

}  // namespace qmelab
