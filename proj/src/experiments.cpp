#include "qmelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "qmelab/channels.hpp"
#include "qmelab/tomography.hpp"

namespace qmelab {

namespace {

constexpr std::uint64_t kTomoTag = 0x746f6d6fULL;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string mode_string(const SweepSpec& spec) {
  if (spec.exact) return "exact";
  return "sampled(" + std::to_string(spec.n_trajectories) + ")";
}

std::string shots_string(const SweepSpec& spec) {
  return spec.shots > 0 ? std::to_string(spec.shots) : "exact";
}

std::uint64_t point_key(const std::string& arm, int point_index) {
  return hash_combine(fnv1a64(arm), static_cast<std::uint64_t>(point_index));
}

void check_spec(const SweepSpec& spec) {
  require(!spec.values.empty(), "sweep: values must be non-empty");
  require(!spec.arms.empty(), "sweep: arms must be non-empty");
  require(spec.exact || spec.n_trajectories >= 1,
          "sweep: sampled mode needs n_trajectories >= 1");
}

void run_points(int n, int threads, const std::function<void(int)>& fn) {
  if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Tomography-at-the-end emulation; pass-through when shots are exact.
DensityMatrix measure_state(const DensityMatrix& state, const SweepSpec& spec,
                            std::uint64_t key) {
  if (spec.shots <= 0) return state;
  RandomStream stream =
      RandomStream(spec.master_seed).substream(hash_combine(key, kTomoTag));
  return reconstruct(take_tomography(state, spec.shots, stream)).rho;
}

// QME of s: exact dephasing channel, or a per-trajectory sampled branch.
Matrix apply_qme_exact_raw(const Matrix& rho, const StabilizerObservable& s,
                           const RunContext& ctx) {
  Matrix out = 0.5 * rho + 0.5 * s.unitary * rho * s.unitary.adjoint();
  if (ctx.noisy_qme_gates && ctx.decoherence)
    out = post_gate_decoherence_raw(out, ctx.device, /*cz_step=*/false);
  return out;
}

Matrix apply_qme_sampled_raw(const Matrix& rho, const StabilizerObservable& s,
                             const RunContext& ctx, RandomStream& stream) {
  const QmeBranch branch = qme_sample(s, stream);
  const Matrix u = branch.unitary(rho.rows() == 2 ? 1 : 2);
  Matrix out = u * rho * u.adjoint();
  if (ctx.noisy_qme_gates && ctx.decoherence)
    out = post_gate_decoherence_raw(out, ctx.device, /*cz_step=*/false);
  return out;
}

void sort_rows(ExperimentResult& result) {
  std::sort(result.rows.begin(), result.rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              if (a.arm != b.arm) return a.arm < b.arm;
              return a.x < b.x;
            });
}

// Per-arm SPAM normalization of 1-T, referenced to the smallest x.
void fill_norm_column(ExperimentResult& result) {
  for (const auto& arm : result.arms_emitted) {
    std::vector<std::pair<double, double>> curve;
    for (const auto& row : result.rows)
      if (row.arm == arm) curve.emplace_back(row.x, 1.0 - row.trace_distance);
    const auto normalized = spam_normalize(curve);
    size_t k = 0;
    for (auto& row : result.rows)
      if (row.arm == arm) row.one_minus_t_norm = normalized[k++].second;
  }
  result.has_norm_column = true;
}

std::vector<std::optional<double>> bloch_cells(const DensityMatrix& state,
                                               size_t n_labels) {
  const BlochVector r = bloch_vector(state);
  std::vector<std::optional<double>> cells(n_labels);
  cells[0] = r.x;
  cells[1] = r.y;
  cells[2] = r.z;
  return cells;
}

std::vector<std::optional<double>> pauli_cells(const DensityMatrix& state,
                                               size_t n_labels, size_t offset) {
  const auto exps = pauli_expectations(state);
  std::vector<std::optional<double>> cells(n_labels);
  for (size_t i = 0; i < exps.size(); ++i) cells[offset + i] = exps[i];
  return cells;
}

std::vector<std::string> union_labels() {
  std::vector<std::string> labels = pauli_labels(1);
  const auto& two = pauli_labels(2);
  labels.insert(labels.end(), two.begin(), two.end());
  return labels;
}

std::vector<int> integer_values(const std::vector<double>& values, int lo, int hi,
                                const char* what) {
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values) {
    const int n = static_cast<int>(std::llround(v));
    require(std::abs(v - n) <= 1e-9 && n >= lo && (hi < 0 || n < hi),
            std::string(what) + ": values must be integers in range");
    out.push_back(n);
  }
  return out;
}

std::vector<std::string> expand_arms(const std::vector<std::string>& prefixes,
                                     const std::vector<std::string>& base) {
  std::vector<std::string> out;
  for (const auto& p : prefixes)
    for (const auto& a : base) out.push_back(p.empty() ? a : p + "-" + a);
  return out;
}

void common_metadata(ExperimentResult& result, const RunContext& ctx,
                     const SweepSpec& spec) {
  result.metadata.emplace_back("mode", mode_string(spec));
  result.metadata.emplace_back("shots", shots_string(spec));
  result.metadata.emplace_back("decoherence", ctx.decoherence ? "on" : "off");
  result.metadata.emplace_back("qme_gates",
                               ctx.noisy_qme_gates ? "physical" : "virtual");
  if (!spec.exact)
    result.metadata.emplace_back("aggregation", "mean-over-trajectories");
  std::string arms;
  for (const auto& a : result.arms_emitted) {
    if (!arms.empty()) arms += ",";
    arms += a;
  }
  result.metadata.emplace_back("arms", arms);
}

// ---------------------------------------------------------------------
// fig1 family: per-state single-qubit channel comparison
// ---------------------------------------------------------------------

ExperimentResult run_state_grid_experiment(
    const std::string& name, const RunContext& ctx, const SweepSpec& spec,
    const std::vector<std::pair<std::string, StabilizerObservable>>& setups) {
  check_spec(spec);
  const auto grid = fig1_state_grid();
  const auto indices =
      integer_values(spec.values, 0, static_cast<int>(grid.size()), "state grid");

  ExperimentResult result;
  result.experiment = name;
  result.exp_labels = pauli_labels(1);
  std::vector<std::string> prefixes;
  for (const auto& [prefix, s] : setups) prefixes.push_back(prefix);
  result.arms_emitted = expand_arms(prefixes, spec.arms);

  struct Job {
    std::string arm;
    const StabilizerObservable* s;
    std::string base_arm;
    int value_index;
  };
  std::vector<Job> jobs;
  for (const auto& [prefix, s] : setups)
    for (const auto& base : spec.arms)
      for (size_t vi = 0; vi < indices.size(); ++vi)
        jobs.push_back({prefixes.empty() || prefix.empty() ? base : prefix + "-" + base,
                        &s, base, static_cast<int>(vi)});

  result.rows.resize(jobs.size());
  RandomStream master(spec.master_seed);

  auto run_job = [&](int j) {
    const Job& job = jobs[j];
    const int grid_index = indices[job.value_index];
    const DensityMatrix initial = DensityMatrix::from_bloch(grid[grid_index]);
    const StabilizerObservable& s = *job.s;
    const std::uint64_t key = point_key(job.arm, grid_index);

    Matrix state = initial.matrix();
    if (job.base_arm == "identity_gate") {
      if (ctx.noisy_qme_gates && ctx.decoherence)
        state = post_gate_decoherence_raw(state, ctx.device, false);
    } else if (job.base_arm == "stabilizer_gate") {
      state = s.unitary * state * s.unitary.adjoint();
      if (ctx.noisy_qme_gates && ctx.decoherence)
        state = post_gate_decoherence_raw(state, ctx.device, false);
    } else if (job.base_arm == "real_measurement") {
      state = s.projector_plus * state * s.projector_plus.adjoint() +
              s.projector_minus * state * s.projector_minus.adjoint();
    } else if (job.base_arm == "qme") {
      if (spec.exact) {
        state = apply_qme_exact_raw(state, s, ctx);
      } else {
        Matrix sum = Matrix::Zero(2, 2);
        for (int t = 0; t < spec.n_trajectories; ++t) {
          RandomStream stream =
              master.substream(hash_combine(key, static_cast<std::uint64_t>(t)));
          sum += apply_qme_sampled_raw(initial.matrix(), s, ctx, stream);
        }
        state = sum / static_cast<double>(spec.n_trajectories);
      }
    } else {
      throw std::invalid_argument("unsupported arm for this experiment: " +
                                  job.base_arm);
    }

    const DensityMatrix final_state = measure_state(DensityMatrix(state), spec, key);
    ResultRow row;
    row.arm = job.arm;
    row.x = static_cast<double>(grid_index);
    row.trace_distance = trace_distance(final_state, initial);
    row.fidelity = fidelity(final_state, initial);
    row.expectations = bloch_cells(final_state, result.exp_labels.size());
    row.shots = shots_string(spec);
    row.seed = spec.master_seed;
    row.mode = mode_string(spec);
    result.rows[j] = std::move(row);
  };

  run_points(static_cast<int>(jobs.size()), spec.exact ? 1 : ctx.threads, run_job);
  sort_rows(result);
  result.metadata.emplace_back("experiment", name);
  result.metadata.emplace_back("grid", "great-circle-xz-12+axis-states-6");
  for (const auto& [prefix, s] : setups)
    result.metadata.emplace_back(
        prefix.empty() ? "stabilizer" : "stabilizer." + prefix, s.label);
  common_metadata(result, ctx, spec);
  return result;
}

// ---------------------------------------------------------------------
// fig2 family: error-angle sweeps with SPAM-normalized 1-T
// ---------------------------------------------------------------------

struct AngleArmJob {
  std::string arm;
  std::string base_arm;
  int value_index;
  // 1-qubit panel when axes are empty; otherwise the transversal axes.
  bool two_qubit = false;
  Eigen::Vector3d axis1;
  Eigen::Vector3d axis2;
};

ExperimentResult run_angle_sweep(const std::string& name, const RunContext& ctx,
                                 const SweepSpec& spec,
                                 const std::vector<AngleArmJob>& jobs,
                                 std::vector<std::string> arms_emitted,
                                 std::vector<std::string> exp_labels,
                                 size_t two_qubit_offset) {
  ExperimentResult result;
  result.experiment = name;
  result.exp_labels = std::move(exp_labels);
  result.arms_emitted = std::move(arms_emitted);
  result.rows.resize(jobs.size());

  const BellCode code = make_code(ctx.code);
  PrepOptions prep;
  prep.via_circuit = ctx.prep_via_circuit;
  if (ctx.prep_via_circuit && ctx.decoherence) prep.device = ctx.device;
  const DensityMatrix initial_2q = prepare_logical(code, 1, prep);
  const DensityMatrix initial_1q = DensityMatrix::from_bloch(0, 0, 1);
  const StabilizerObservable s_z = pauli_string({Pauli::Z});
  RandomStream master(spec.master_seed);

  auto run_job = [&](int j) {
    const AngleArmJob& job = jobs[j];
    const double theta = spec.values[job.value_index];
    const DensityMatrix& initial = job.two_qubit ? initial_2q : initial_1q;
    const StabilizerObservable& s = job.two_qubit ? code.stabilizer : s_z;
    const std::uint64_t key = point_key(job.arm, job.value_index);

    Matrix error_u;
    if (job.two_qubit) {
      error_u = tensor(axis_rotation(job.axis1, theta), axis_rotation(job.axis2, theta));
    } else {
      error_u = axis_rotation(Eigen::Vector3d(1, 0, 0), theta);
    }
    Matrix state = error_u * initial.matrix() * error_u.adjoint();

    if (job.base_arm == "qme") {
      if (spec.exact) {
        state = apply_qme_exact_raw(state, s, ctx);
      } else {
        Matrix sum = Matrix::Zero(state.rows(), state.cols());
        const Matrix rotated = state;
        for (int t = 0; t < spec.n_trajectories; ++t) {
          RandomStream stream =
              master.substream(hash_combine(key, static_cast<std::uint64_t>(t)));
          sum += apply_qme_sampled_raw(rotated, s, ctx, stream);
        }
        state = sum / static_cast<double>(spec.n_trajectories);
      }
    } else if (job.base_arm != "none") {
      throw std::invalid_argument("unsupported arm for this experiment: " +
                                  job.base_arm);
    }

    const DensityMatrix final_state = measure_state(DensityMatrix(state), spec, key);
    ResultRow row;
    row.arm = job.arm;
    row.x = theta;
    row.trace_distance = trace_distance(final_state, initial);
    row.fidelity = fidelity(final_state, initial);
    row.expectations =
        job.two_qubit
            ? pauli_cells(final_state, result.exp_labels.size(), two_qubit_offset)
            : bloch_cells(final_state, result.exp_labels.size());
    row.shots = shots_string(spec);
    row.seed = spec.master_seed;
    row.mode = mode_string(spec);
    result.rows[j] = std::move(row);
  };

  run_points(static_cast<int>(jobs.size()), spec.exact ? 1 : ctx.threads, run_job);
  sort_rows(result);
  fill_norm_column(result);
  result.metadata.emplace_back("experiment", name);
  result.metadata.emplace_back("code", code_name_string(ctx.code));
  result.metadata.emplace_back("stabilizer", code.stabilizer.label);
  result.metadata.emplace_back(
      "prep", ctx.prep_via_circuit
                  ? preparation_label(preparation_circuit(ctx.code, 1))
                  : "exact");
  result.metadata.emplace_back("normalization", "per-arm-min-x-reference");
  common_metadata(result, ctx, spec);
  return result;
}

}  // namespace

std::vector<BlochVector> fig1_state_grid() {
  std::vector<BlochVector> grid;
  for (int k = 0; k < 12; ++k) {
    const double t = 2.0 * M_PI * k / 12.0;
    grid.push_back({std::sin(t), 0.0, std::cos(t)});
  }
  grid.push_back({0, 0, 1});
  grid.push_back({0, 0, -1});
  grid.push_back({1, 0, 0});
  grid.push_back({-1, 0, 0});
  grid.push_back({0, 1, 0});
  grid.push_back({0, -1, 0});
  return grid;
}

std::vector<double> default_values(const std::string& experiment) {
  std::vector<double> out;
  if (experiment == "fig1" || experiment == "supp-axes") {
    for (int i = 0; i < 18; ++i) out.push_back(i);
  } else if (experiment == "fig2" || experiment == "supp-transversal") {
    for (int i = 0; i < 25; ++i) out.push_back(1.2 * i / 24.0);
  } else if (experiment == "fig3") {
    for (int i = 0; i <= 40; ++i) out.push_back(i);
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  return out;
}

std::vector<std::string> default_arms(const std::string& experiment) {
  if (experiment == "fig1" || experiment == "supp-axes")
    return {"identity_gate", "stabilizer_gate", "qme", "real_measurement"};
  if (experiment == "fig2" || experiment == "fig3" ||
      experiment == "supp-transversal")
    return {"none", "qme"};
  throw std::invalid_argument("unknown experiment: " + experiment);
}

ExperimentResult run_fig1(const RunContext& ctx, const SweepSpec& spec) {
  return run_state_grid_experiment("fig1", ctx, spec,
                                   {{"", pauli_string({Pauli::Z})}});
}

ExperimentResult run_supp_axes(const RunContext& ctx, const SweepSpec& spec) {
  const double s = 1.0 / std::sqrt(2.0);
  return run_state_grid_experiment(
      "supp-axes", ctx, spec,
      {{"x", stabilizer_from_axis(1, 0, 0)}, {"xy", stabilizer_from_axis(s, s, 0)}});
}

ExperimentResult run_fig2(const RunContext& ctx, const SweepSpec& spec) {
  check_spec(spec);
  std::vector<AngleArmJob> jobs;
  std::vector<std::string> arms_emitted;
  const Eigen::Vector3d x_axis(1, 0, 0);
  for (const char* prefix : {"1q", "2q"}) {
    for (const auto& base : spec.arms) {
      const std::string arm = std::string(prefix) + "-" + base;
      arms_emitted.push_back(arm);
      for (size_t vi = 0; vi < spec.values.size(); ++vi) {
        AngleArmJob job;
        job.arm = arm;
        job.base_arm = base;
        job.value_index = static_cast<int>(vi);
        job.two_qubit = std::string(prefix) == "2q";
        job.axis1 = x_axis;
        job.axis2 = x_axis;
        jobs.push_back(job);
      }
    }
  }
  return run_angle_sweep("fig2", ctx, spec, jobs, arms_emitted, union_labels(), 3);
}

ExperimentResult run_supp_transversal(const RunContext& ctx, const SweepSpec& spec) {
  check_spec(spec);
  const double tilt = M_PI / 6.0;
  const Eigen::Vector3d x_axis(1, 0, 0);
  const Eigen::Vector3d y_axis(0, 1, 0);
  const Eigen::Vector3d tilted(std::cos(tilt), std::sin(tilt), 0);
  const std::vector<std::pair<std::string, std::pair<Eigen::Vector3d, Eigen::Vector3d>>>
      family = {{"xx", {x_axis, x_axis}},
                {"yy", {y_axis, y_axis}},
                {"xy", {x_axis, y_axis}},
                {"tilted", {tilted, tilted}}};

  std::vector<AngleArmJob> jobs;
  std::vector<std::string> arms_emitted;
  for (const auto& [member, axes] : family) {
    for (const auto& base : spec.arms) {
      const std::string arm = member + "-" + base;
      arms_emitted.push_back(arm);
      for (size_t vi = 0; vi < spec.values.size(); ++vi) {
        AngleArmJob job;
        job.arm = arm;
        job.base_arm = base;
        job.value_index = static_cast<int>(vi);
        job.two_qubit = true;
        job.axis1 = axes.first;
        job.axis2 = axes.second;
        jobs.push_back(job);
      }
    }
  }
  auto result = run_angle_sweep("supp-transversal", ctx, spec, jobs, arms_emitted,
                                pauli_labels(2), 0);
  result.metadata.emplace_back("error_family", "xx,yy,xy,tilted(pi/6-equatorial)");
  return result;
}

ExperimentResult run_fig3(const RunContext& ctx, const SweepSpec& spec) {
  check_spec(spec);
  std::vector<int> lengths = integer_values(spec.values, 0, -1, "fig3");
  std::vector<int> sorted_lengths = lengths;
  std::sort(sorted_lengths.begin(), sorted_lengths.end());
  for (size_t i = 0; i + 1 < sorted_lengths.size(); ++i)
    require(sorted_lengths[i] != sorted_lengths[i + 1],
            "fig3: duplicate sequence lengths");

  const BellCode code = make_code(ctx.code);
  PrepOptions prep;
  prep.via_circuit = ctx.prep_via_circuit;
  if (ctx.prep_via_circuit && ctx.decoherence) prep.device = ctx.device;
  const DensityMatrix initial = prepare_logical(code, 0, prep);

  ExperimentResult result;
  result.experiment = "fig3";
  result.exp_labels = pauli_labels(2);
  result.arms_emitted = spec.arms;

  auto advance_pair = [&](Matrix rho) {
    for (int gate = 0; gate < 2; ++gate) {
      rho = cz_with_errors_raw(rho, ctx.cz_errors);
      if (ctx.decoherence) rho = post_gate_decoherence_raw(rho, ctx.device, true);
    }
    return rho;
  };

  auto make_row = [&](const std::string& arm, int n, const DensityMatrix& state,
                      std::uint64_t key) {
    const DensityMatrix measured = measure_state(state, spec, key);
    ResultRow row;
    row.arm = arm;
    row.x = static_cast<double>(n);
    row.trace_distance = trace_distance(measured, initial);
    row.fidelity = fidelity(measured, initial);
    row.expectations = pauli_cells(measured, result.exp_labels.size(), 0);
    row.shots = shots_string(spec);
    row.seed = spec.master_seed;
    row.mode = mode_string(spec);
    return row;
  };

  RandomStream master(spec.master_seed);

  if (spec.exact) {
    for (const auto& arm : spec.arms) {
      require(arm == "none" || arm == "qme", "fig3: arms must be none or qme");
      Matrix rho = initial.matrix();
      int done = 0;
      for (int n : sorted_lengths) {
        while (done < n) {
          rho = advance_pair(std::move(rho));
          if (arm == "qme") rho = apply_qme_exact_raw(rho, code.stabilizer, ctx);
          ++done;
        }
        result.rows.push_back(
            make_row(arm, n, DensityMatrix(rho), point_key(arm, n)));
      }
    }
  } else {
    struct Point {
      std::string arm;
      int n;
    };
    std::vector<Point> points;
    for (const auto& arm : spec.arms) {
      require(arm == "none" || arm == "qme", "fig3: arms must be none or qme");
      for (int n : sorted_lengths) points.push_back({arm, n});
    }
    result.rows.resize(points.size());
    auto run_point = [&](int p) {
      const auto& [arm, n] = points[p];
      const std::uint64_t key = point_key(arm, n);
      Matrix mean = Matrix::Zero(4, 4);
      const int n_traj = arm == "qme" ? spec.n_trajectories : 1;
      for (int t = 0; t < n_traj; ++t) {
        RandomStream stream =
            master.substream(hash_combine(key, static_cast<std::uint64_t>(t)));
        Matrix rho = initial.matrix();
        for (int step = 0; step < n; ++step) {
          rho = advance_pair(std::move(rho));
          if (arm == "qme")
            rho = apply_qme_sampled_raw(rho, code.stabilizer, ctx, stream);
        }
        mean += rho;
      }
      mean /= static_cast<double>(n_traj);
      result.rows[p] = make_row(arm, n, DensityMatrix(mean), key);
    };
    run_points(static_cast<int>(points.size()), ctx.threads, run_point);
  }

  sort_rows(result);
  fill_norm_column(result);
  result.metadata.emplace_back("experiment", "fig3");
  result.metadata.emplace_back("code", code_name_string(ctx.code));
  result.metadata.emplace_back("stabilizer", code.stabilizer.label);
  result.metadata.emplace_back(
      "prep", ctx.prep_via_circuit
                  ? preparation_label(preparation_circuit(ctx.code, 0))
                  : "exact");
  result.metadata.emplace_back("normalization", "per-arm-min-x-reference");
  common_metadata(result, ctx, spec);
  return result;
}

ExperimentResult run_experiment(const std::string& name, const RunContext& ctx,
                                const SweepSpec& spec) {
  if (name == "fig1") return run_fig1(ctx, spec);
  if (name == "fig2") return run_fig2(ctx, spec);
  if (name == "fig3") return run_fig3(ctx, spec);
  if (name == "supp-axes") return run_supp_axes(ctx, spec);
  if (name == "supp-transversal") return run_supp_transversal(ctx, spec);
  throw std::invalid_argument("unknown experiment: " + name);
}

}  // namespace qmelab
