#include "qmelab/cli_app.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmelab/channels.hpp"
#include "qmelab/config.hpp"
#include "qmelab/fit.hpp"
#include "qmelab/result_io.hpp"
#include "qmelab/tomography.hpp"
#include "qmelab/version.hpp"

namespace qmelab {

namespace {

int env_threads() {
  const char* raw = std::getenv("QMELAB_THREADS");
  if (!raw || !*raw) return 0;  // 0 = auto
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 0)
    throw ConfigValidationError("QMELAB_THREADS: expected a non-negative integer");
  return static_cast<int>(v);
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string shots;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool exact = false;
  int trajectories = 0;
};

std::string coherence_summary(const QubitCoherence& c) {
  std::ostringstream os;
  os << "t1=" << format_double(c.t1) << ",t2r=" << format_double(c.t2r)
     << ",t1_cz=" << format_double(c.t1_cz) << ",t2r_cz=" << format_double(c.t2r_cz);
  return os.str();
}

Metadata standard_header(const std::string& subcommand, const Config& config) {
  Metadata header;
  header.emplace_back("tool", std::string(kToolName) + " " + kToolVersion);
  header.emplace_back("subcommand", subcommand);
  header.emplace_back("config_hash", config_hash(config));
  header.emplace_back("seed", std::to_string(config.seed));
  header.emplace_back("leakage_model", "transfer_10_from_11");
  header.emplace_back("error_order", "cz,cphase,rz,leakage");
  header.emplace_back("device.qubit1", coherence_summary(config.device.q1));
  header.emplace_back("device.qubit2", coherence_summary(config.device.q2));
  {
    std::ostringstream os;
    os << "t_1qb_ns=" << format_double(config.device.timing.t_1qb_ns)
       << ",t_cz_ns=" << format_double(config.device.timing.t_cz_ns)
       << ",gap_ns=" << format_double(config.device.timing.gap_ns);
    header.emplace_back("device.timing", os.str());
  }
  {
    std::ostringstream os;
    os << "phi=" << format_double(config.cz_errors.phi)
       << ",theta1=" << format_double(config.cz_errors.theta1)
       << ",theta2=" << format_double(config.cz_errors.theta2)
       << ",lam=" << format_double(config.cz_errors.lam);
    header.emplace_back("cz_errors", os.str());
  }
  return header;
}

Config load_config(const std::string& experiment, const CommonFlags& flags) {
  Config config =
      flags.config_path.empty() ? Config{} : parse_config(flags.config_path);
  config.experiment = experiment;
  if (flags.seed_given) config.seed = flags.seed;
  if (flags.exact) {
    config.sweep.exact = true;
    config.sweep.n_trajectories = 0;
  }
  if (flags.trajectories > 0) {
    config.sweep.exact = false;
    config.sweep.n_trajectories = flags.trajectories;
  }
  if (!flags.shots.empty()) {
    if (flags.shots == "exact") {
      config.sweep.shots = 0;
    } else {
      char* end = nullptr;
      const long v = std::strtol(flags.shots.c_str(), &end, 10);
      if (end == flags.shots.c_str() || *end != '\0' || v < 1)
        throw ConfigValidationError("--shots: expected \"exact\" or a positive integer");
      config.sweep.shots = static_cast<int>(v);
    }
  }
  if (!flags.out_path.empty()) config.output.path = flags.out_path;
  if (!flags.format.empty()) {
    if (flags.format != "csv" && flags.format != "json")
      throw ConfigValidationError("--format: must be csv or json");
    config.output.format = flags.format;
  }
  config.sweep.master_seed = config.seed;
  return config;
}

void run_experiment_command(const std::string& name, const CommonFlags& flags) {
  const Config config = load_config(name, flags);
  const RunContext ctx = run_context(config, env_threads());
  const SweepSpec spec = sweep_spec(config);
  const ExperimentResult result = run_experiment(name, ctx, spec);
  const Metadata header = standard_header(name, config);
  const std::string content = config.output.format == "csv"
                                  ? render_csv(result, header)
                                  : render_json(result, header);
  const std::string path = config.output.path.empty()
                               ? name + "." + config.output.format
                               : config.output.path;
  write_file_atomic(path, content);
  std::cout << name << ": " << result.rows.size() << " rows -> " << path << "\n";
}

// --- fit subcommand ---

FitProblem parse_snapshots_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigIoError("cannot open snapshots file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigSyntaxError(std::string("snapshots file is not valid JSON: ") +
                            e.what());
  }

  auto fail = [](const std::string& what) {
    throw ConfigValidationError("snapshots: " + what);
  };

  FitProblem problem;
  if (!root.is_object() || !root.contains("initial_state") ||
      !root.contains("snapshots"))
    fail("expected an object with initial_state and snapshots");

  const auto& init = root.at("initial_state");
  if (!init.is_array() || init.size() != 4) fail("initial_state must be 4x4");
  Matrix rho(4, 4);
  for (int i = 0; i < 4; ++i) {
    const auto& row = init.at(i);
    if (!row.is_array() || row.size() != 4) fail("initial_state must be 4x4");
    for (int j = 0; j < 4; ++j) {
      const auto& cell = row.at(j);
      if (!cell.is_array() || cell.size() != 2 || !cell.at(0).is_number() ||
          !cell.at(1).is_number())
        fail("initial_state entries must be [re, im] pairs");
      rho(i, j) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  problem.initial_state = DensityMatrix(rho).matrix();  // validates invariants

  if (root.contains("device") && !root.at("device").is_null()) {
    // Reuse the config parser for the device block.
    nlohmann::json wrapper;
    wrapper["device"] = root.at("device");
    problem.device = parse_config_text(wrapper.dump()).device;
  }

  const auto& snaps = root.at("snapshots");
  if (!snaps.is_array() || snaps.size() < 2) fail("need at least 2 snapshots");
  for (const auto& snap : snaps) {
    if (!snap.is_object() || !snap.contains("step")) fail("snapshot needs a step");
    FitSnapshot parsed;
    parsed.step = snap.at("step").get<int>();
    if (snap.contains("expectations")) {
      for (const auto& [key, value] : snap.at("expectations").items()) {
        if (!value.is_number()) fail("expectations must be numbers");
        parsed.expectations[key] = value.get<double>();
      }
    } else if (snap.contains("counts")) {
      const auto& counts = snap.at("counts");
      TomographyRecord record;
      record.shots_per_setting = counts.at("shots_per_setting").get<int>();
      if (counts.contains("seed"))
        record.seed = counts.at("seed").get<std::uint64_t>();
      for (const auto& s : counts.at("settings"))
        record.basis_settings.push_back(s.get<std::string>());
      for (const auto& hist : counts.at("histograms"))
        record.counts.push_back(hist.get<std::vector<long long>>());
      parsed.expectations = expectations_from_record(record);
    } else {
      fail("snapshot needs expectations or counts");
    }
    problem.snapshots.push_back(std::move(parsed));
  }

  for (const auto& extra : root.items()) {
    const std::string& key = extra.key();
    if (key != "initial_state" && key != "device" && key != "snapshots")
      fail("unknown key " + key);
  }
  return problem;
}

void run_fit_command(const std::string& snapshots_path, const CommonFlags& flags) {
  FitProblem problem = parse_snapshots_file(snapshots_path);
  const FitResult result = fit_cz_params(problem);

  nlohmann::ordered_json doc;
  doc["metadata"]["tool"] = std::string(kToolName) + " " + kToolVersion;
  doc["metadata"]["subcommand"] = "fit";
  doc["metadata"]["snapshots_file"] = snapshots_path;
  doc["metadata"]["leakage_model"] = "transfer_10_from_11";
  doc["metadata"]["error_order"] = "cz,cphase,rz,leakage";
  doc["result"]["phi"] = result.params.phi;
  doc["result"]["theta1"] = result.params.theta1;
  doc["result"]["theta2"] = result.params.theta2;
  doc["result"]["lam"] = result.params.lam;
  doc["result"]["residual_norm"] = result.residual_norm;
  doc["result"]["iterations"] = result.iterations;
  doc["result"]["converged"] = result.converged;

  const std::string path =
      flags.out_path.empty() ? std::string("fit_result.json") : flags.out_path;
  write_file_atomic(path, doc.dump(2) + "\n");
  std::cout << "fit: phi=" << format_double(result.params.phi)
            << " theta1=" << format_double(result.params.theta1)
            << " theta2=" << format_double(result.params.theta2)
            << " lam=" << format_double(result.params.lam)
            << " residual=" << format_double(result.residual_norm)
            << (result.converged ? "" : " (not converged)") << " -> " << path
            << "\n";
}

}  // namespace

ChannelVerification verify_channels(std::uint64_t seed) {
  RandomStream master(seed);
  ChannelVerification report;

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<StabilizerObservable> stabilizers = {
      pauli_string({Pauli::Z}), stabilizer_from_axis(1, 0, 0),
      stabilizer_from_axis(inv_sqrt2, inv_sqrt2, 0),
      pauli_string({Pauli::Z, Pauli::Z}), pauli_string({Pauli::X, Pauli::X})};

  RandomStream states = master.substream(1);
  for (const auto& s : stabilizers) {
    for (int i = 0; i < 200; ++i) {
      const DensityMatrix rho = random_density_matrix(s.n_qubits(), states);
      const DensityMatrix measured = measurement_channel(rho, s);
      const DensityMatrix dephased = dephasing_channel(rho, s);
      report.equivalence_residual =
          std::max(report.equivalence_residual,
                   max_abs(measured.matrix() - dephased.matrix()));
    }
  }

  RandomStream params = master.substream(2);
  for (int i = 0; i < 100; ++i) {
    const double g1 = 2.0 * params.uniform();
    const double gphi = 2.0 * params.uniform();
    const double t = 2.0 * params.uniform();
    report.completeness_residual =
        std::max(report.completeness_residual,
                 kraus_completeness_residual(amp_damp_kraus(g1, t)));
    report.completeness_residual =
        std::max(report.completeness_residual,
                 kraus_completeness_residual(dephase_kraus(gphi, t)));
  }
  for (double lam : {0.0, 0.01, 0.5, 1.0}) {
    report.completeness_residual =
        std::max(report.completeness_residual,
                 kraus_completeness_residual(leakage_kraus(lam)));
  }
  for (int i = 0; i < 50; ++i) {
    report.completeness_residual =
        std::max(report.completeness_residual,
                 kraus_completeness_residual(leakage_kraus(params.uniform())));
  }

  report.pass = report.equivalence_residual <= 1e-12 &&
                report.completeness_residual <= 1e-10;
  return report;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"density-matrix toolkit for measurement-emulation error mitigation"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string snapshots_path;
  int exit_code = kExitOk;

  auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option("--seed", flags.seed, "master seed (overrides config)")
        ->each([&flags](const std::string&) { flags.seed_given = true; });
    sub->add_option("--out", flags.out_path, "output path");
    sub->add_option("--format", flags.format, "csv|json");
    auto* exact = sub->add_flag("--exact", flags.exact, "exact channel mode");
    sub->add_option("--trajectories", flags.trajectories,
                    "sampled mode with N trajectories per point")
        ->excludes(exact);
    sub->add_option("--shots", flags.shots, "tomography shots per setting, or \"exact\"");
  };

  for (const std::string name :
       {"fig1", "fig2", "fig3", "supp-axes", "supp-transversal"}) {
    auto* sub = app.add_subcommand(name, "run the " + name + " sweep");
    add_common(sub);
    sub->callback([name, &flags] { run_experiment_command(name, flags); });
  }

  auto* fit = app.add_subcommand("fit", "fit CZ error parameters to snapshots");
  fit->add_option("--snapshots", snapshots_path, "snapshots JSON file")->required();
  fit->add_option("--out", flags.out_path, "output path");
  fit->callback([&snapshots_path, &flags] { run_fit_command(snapshots_path, flags); });

  auto* verify = app.add_subcommand("verify-channels",
                                    "check channel identities and Kraus completeness");
  verify->add_option("--seed", flags.seed, "master seed")
      ->each([&flags](const std::string&) { flags.seed_given = true; });
  verify->callback([&flags, &exit_code] {
    const std::uint64_t seed = flags.seed_given ? flags.seed : 42;
    const ChannelVerification report = verify_channels(seed);
    std::cout << "channel-equivalence max residual: "
              << format_double(report.equivalence_residual)
              << " (threshold 1e-12): "
              << (report.equivalence_residual <= 1e-12 ? "PASS" : "FAIL") << "\n";
    std::cout << "kraus-completeness max residual: "
              << format_double(report.completeness_residual)
              << " (threshold 1e-10): "
              << (report.completeness_residual <= 1e-10 ? "PASS" : "FAIL") << "\n";
    if (!report.pass) exit_code = kExitRuntime;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  } catch (const ConfigIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigSyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSyntax;
  } catch (const ConfigValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return exit_code;
}

}  // namespace qmelab
