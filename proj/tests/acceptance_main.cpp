// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Pass --cli <path-to-qmelab-binary> to enable the CLI
// determinism checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qmelab/channels.hpp"
#include "qmelab/codes.hpp"
#include "qmelab/experiments.hpp"
#include "qmelab/fit.hpp"
#include "qmelab/noise.hpp"
#include "qmelab/tomography.hpp"

using namespace qmelab;

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int id, const std::string& description, bool pass,
            const std::string& detail) {
  std::ostringstream line;
  line << "C" << (id < 10 ? "0" : "") << id << " " << (pass ? "PASS" : "FAIL") << " "
       << description << " (" << detail << ")";
  std::cout << line.str() << "\n";
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

const ResultRow& find_row(const ExperimentResult& result, const std::string& arm,
                          double x) {
  for (const auto& row : result.rows)
    if (row.arm == arm && std::abs(row.x - x) < 1e-12) return row;
  throw std::runtime_error("row not found");
}

Eigen::VectorXd polyfit(const std::vector<double>& xs, const std::vector<double>& ys,
                        int degree) {
  Eigen::MatrixXd vandermonde(xs.size(), degree + 1);
  Eigen::VectorXd rhs(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    double power = 1.0;
    for (int j = 0; j <= degree; ++j) {
      vandermonde(i, j) = power;
      power *= xs[i];
    }
    rhs[i] = ys[i];
  }
  return vandermonde.colPivHouseholderQr().solve(rhs);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------

void criterion_1_channel_equivalence() {
  Timer timer;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::vector<StabilizerObservable> stabilizers = {
      pauli_string({Pauli::Z}), stabilizer_from_axis(1, 0, 0),
      stabilizer_from_axis(inv_sqrt2, inv_sqrt2, 0),
      pauli_string({Pauli::Z, Pauli::Z}), pauli_string({Pauli::X, Pauli::X})};
  RandomStream rng(1001);
  double residual = 0.0;
  for (const auto& s : stabilizers) {
    for (int trial = 0; trial < 200; ++trial) {
      const DensityMatrix rho = random_density_matrix(s.n_qubits(), rng);
      residual = std::max(residual, (measurement_channel(rho, s).matrix() -
                                     dephasing_channel(rho, s).matrix())
                                        .cwiseAbs()
                                        .maxCoeff());
    }
  }
  const double elapsed = timer.seconds();
  report(1, "channel equivalence over {Z,X,(X+Y)/sqrt2,ZZ,XX} x 200 states",
         residual <= 1e-12 && elapsed < 1.0,
         "max residual " + fmt(residual) + ", " + fmt(elapsed) + " s");
}

void criterion_2_kraus_completeness() {
  RandomStream rng(1002);
  double residual = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    residual = std::max(residual, kraus_completeness_residual(amp_damp_kraus(
                                      2.0 * rng.uniform(), 2.0 * rng.uniform())));
    residual = std::max(residual, kraus_completeness_residual(dephase_kraus(
                                      2.0 * rng.uniform(), 2.0 * rng.uniform())));
    residual = std::max(
        residual, kraus_completeness_residual(leakage_kraus(rng.uniform())));
  }
  for (double lam : {0.0, 0.01, 0.5, 1.0})
    residual =
        std::max(residual, kraus_completeness_residual(leakage_kraus(lam)));

  // Negative control: the diagonal |10><10| placement of the second
  // leakage operator misses completeness by exactly diag(0,0,lam,-lam).
  double placement_error = 0.0;
  for (double lam : {0.01, 0.3, 1.0}) {
    Matrix l1 = Matrix::Identity(4, 4);
    l1(3, 3) = std::sqrt(1.0 - lam);
    Matrix l2 = Matrix::Zero(4, 4);
    l2(2, 2) = std::sqrt(lam);
    Matrix deviation =
        l1.adjoint() * l1 + l2.adjoint() * l2 - Matrix::Identity(4, 4);
    Matrix expected = Matrix::Zero(4, 4);
    expected(2, 2) = lam;
    expected(3, 3) = -lam;
    placement_error =
        std::max(placement_error, (deviation - expected).cwiseAbs().maxCoeff());
  }

  report(2, "Kraus completeness, corrected leakage pair; printed variant off by diag(0,0,l,-l)",
         residual <= 1e-12 && placement_error <= 1e-15,
         "max residual " + fmt(residual) + ", placement check " +
             fmt(placement_error));
}

void criterion_3_monte_carlo() {
  Timer timer;
  const StabilizerObservable z = pauli_string({Pauli::Z});
  const DensityMatrix plus = DensityMatrix::from_bloch(1, 0, 0);

  RandomStream rng_a(2021);
  const DensityMatrix mean_a = qme_trajectory_average(plus, z, 100000, rng_a);
  RandomStream rng_b(2021);
  const DensityMatrix mean_b = qme_trajectory_average(plus, z, 100000, rng_b);

  const double deviation =
      (mean_a.matrix() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
  const bool reproducible =
      (mean_a.matrix() - mean_b.matrix()).cwiseAbs().maxCoeff() == 0.0;
  const double elapsed = timer.seconds();
  report(3, "1e5 QME_Z trajectories on |+> land within 0.02 of 1/2, deterministically",
         deviation < 0.02 && reproducible && elapsed < 5.0,
         "max deviation " + fmt(deviation) + ", " + fmt(elapsed) + " s");
}

void criterion_4_first_order_insensitivity_1q() {
  RunContext ctx;
  ctx.decoherence = false;
  ctx.code = CodeName::zz;

  SweepSpec spec;
  spec.arms = {"none", "qme"};
  spec.values = default_values("fig2");
  const ExperimentResult curves = run_fig2(ctx, spec);

  double curve_error = 0.0;
  for (double theta : spec.values) {
    curve_error = std::max(curve_error,
                           std::abs(find_row(curves, "1q-none", theta).trace_distance -
                                    std::abs(std::sin(theta / 2))));
    curve_error = std::max(
        curve_error, std::abs(find_row(curves, "1q-qme", theta).trace_distance -
                              std::sin(theta / 2) * std::sin(theta / 2)));
  }

  // Central difference centered at theta = h; the curve is even in theta,
  // so a difference straddling zero would vanish identically.
  const double h = 1e-7;
  SweepSpec slope_spec;
  slope_spec.arms = {"none", "qme"};
  slope_spec.values = {0.0, h, 2 * h};
  const ExperimentResult stencil = run_fig2(ctx, slope_spec);
  auto slope = [&](const std::string& arm) {
    const double f0 = 1.0 - find_row(stencil, arm, 0.0).trace_distance;
    const double f2 = 1.0 - find_row(stencil, arm, 2 * h).trace_distance;
    return (f2 - f0) / (2 * h);
  };
  const double slope_plain = slope("1q-none");
  const double slope_qme = slope("1q-qme");

  report(4, "fig2 1q curves match |sin(t/2)| and sin^2(t/2); slopes -1/2 and 0 at zero",
         curve_error <= 1e-10 && std::abs(slope_plain + 0.5) <= 1e-6 &&
             std::abs(slope_qme) <= 1e-6,
         "curve err " + fmt(curve_error) + ", slopes " + fmt(slope_plain) + " / " +
             fmt(slope_qme));
}

void criterion_5_two_qubit_code_sweep() {
  RunContext ctx;
  ctx.decoherence = false;
  ctx.code = CodeName::zz;
  SweepSpec spec;
  spec.arms = {"none", "qme"};
  for (int i = 0; i <= 12; ++i) spec.values.push_back(3e-3 * i / 12.0);
  const ExperimentResult curves = run_fig2(ctx, spec);

  double oracle_error = 0.0;
  std::vector<double> xs, plain_ys, qme_ys;
  for (double theta : spec.values) {
    const double t_plain = find_row(curves, "2q-none", theta).trace_distance;
    const double t_qme = find_row(curves, "2q-qme", theta).trace_distance;
    oracle_error =
        std::max(oracle_error, std::abs(t_plain - std::abs(std::sin(theta))));
    oracle_error =
        std::max(oracle_error, std::abs(t_qme - std::sin(theta) * std::sin(theta)));
    xs.push_back(theta);
    plain_ys.push_back(1.0 - t_plain);
    qme_ys.push_back(1.0 - t_qme);
  }
  const double plain_coefficient = polyfit(xs, plain_ys, 3)[1];
  const double qme_coefficient = polyfit(xs, qme_ys, 3)[1];

  report(5, "fig2c ZZ code: |linear coefficient| < 1e-6 with QME_ZZ, > 0.1 without",
         std::abs(qme_coefficient) < 1e-6 && std::abs(plain_coefficient) > 0.1 &&
             oracle_error <= 1e-10,
         "coefficients " + fmt(plain_coefficient) + " / " + fmt(qme_coefficient) +
             ", oracle err " + fmt(oracle_error));
}

void criterion_6_fig3_landmarks() {
  Timer timer;
  const double delta = M_PI / 20.0;
  RunContext ctx;
  ctx.decoherence = false;
  ctx.code = CodeName::xx;
  ctx.cz_errors = {0.0, delta / 4.0, -delta / 4.0, 0.0};
  SweepSpec spec;
  spec.arms = {"none", "qme"};
  for (int n = 0; n <= 40; ++n) spec.values.push_back(n);
  const ExperimentResult curves = run_fig3(ctx, spec);

  double plain_error = 0.0;
  double qme_error = 0.0;
  bool monotone = true;
  double previous = 1.0 + 1e-12;
  for (int n = 0; n <= 40; ++n) {
    const double f_plain = find_row(curves, "none", n).fidelity;
    plain_error =
        std::max(plain_error,
                 std::abs(f_plain - std::pow(std::cos(n * delta / 2.0), 2)));
    const double f_qme = find_row(curves, "qme", n).fidelity;
    qme_error = std::max(
        qme_error, std::abs(f_qme - 0.5 * (1.0 + std::pow(std::cos(delta), n))));
    if (n > 0 && f_qme >= previous) monotone = false;
    previous = f_qme;
  }
  const double f10 = find_row(curves, "none", 10).fidelity;
  const double f40 = find_row(curves, "none", 40).fidelity;
  const double elapsed = timer.seconds();

  report(6, "fig3 landmarks: plunge to 0.5 at N=10, revival at N=40, monotone QME decay",
         plain_error <= 1e-10 && qme_error <= 1e-10 && monotone &&
             std::abs(f10 - 0.5) <= 1e-10 && std::abs(f40 - 1.0) <= 1e-10 &&
             elapsed < 2.0,
         "curve errs " + fmt(plain_error) + " / " + fmt(qme_error) + ", F(10) = " +
             fmt(f10) + ", " + fmt(elapsed) + " s");
}

void criterion_7_decoherence_decay() {
  RunContext ctx;  // characterized device, decoherence on
  ctx.code = CodeName::xx;
  ctx.cz_errors = {};
  SweepSpec spec;
  spec.arms = {"none"};
  for (int n = 0; n <= 40; ++n) spec.values.push_back(n);
  const ExperimentResult curves = run_fig3(ctx, spec);

  // Closed-form single-exponential composition for (|01>+|10>)/sqrt2:
  // F(N) = (a1^n + a2^n)/4 + (c1 c2)^n / 2 with n = 2N gates of
  // duration 65 ns at the CZ-trajectory coherence point.
  const TwoQubitDevice dev = default_device();
  const double t = dev.timing.step_cz_us();
  const double a1 = std::exp(-gamma1(dev.q1.t1_cz) * t);
  const double a2 = std::exp(-gamma1(dev.q2.t1_cz) * t);
  const double c1 = std::exp(-gamma1(dev.q1.t1_cz) * t / 2.0 -
                             gamma_phi(dev.q1.t1_cz, dev.q1.t2r_cz) * t);
  const double c2 = std::exp(-gamma1(dev.q2.t1_cz) * t / 2.0 -
                             gamma_phi(dev.q2.t1_cz, dev.q2.t2r_cz) * t);

  double error = 0.0;
  for (int n = 0; n <= 40; ++n) {
    const double gates = 2.0 * n;
    const double expected = 0.25 * (std::pow(a1, gates) + std::pow(a2, gates)) +
                            0.5 * std::pow(c1 * c2, gates);
    error = std::max(error,
                     std::abs(find_row(curves, "none", n).fidelity - expected));
  }
  report(7, "decoherence-only decay matches the closed-form exponential composition",
         error <= 1e-8, "max deviation " + fmt(error) + " over 40 steps");
}

void criterion_8_fit_recovery() {
  Timer timer;
  const CzErrorParams truth{0.05, 0.02, -0.03, 0.005};
  Vector psi(4);
  psi << 0.5, 0.5, 0.5, 0.5;
  const Matrix initial = DensityMatrix::pure(psi).matrix();
  const std::vector<int> steps{1, 2, 3, 4, 5, 6, 7, 8};

  FitProblem exact_problem;
  exact_problem.initial_state = initial;
  exact_problem.device = default_device();
  exact_problem.snapshots =
      make_synthetic_snapshots(initial, truth, exact_problem.device, steps, 0, 0);
  const FitResult exact_fit = fit_cz_params(exact_problem);
  const double exact_error =
      std::max({std::abs(exact_fit.params.phi - truth.phi),
                std::abs(exact_fit.params.theta1 - truth.theta1),
                std::abs(exact_fit.params.theta2 - truth.theta2),
                std::abs(exact_fit.params.lam - truth.lam)});

  std::vector<double> phi_err(20), t1_err(20), t2_err(20), lam_err(20);
  for (int seed = 0; seed < 20; ++seed) {
    FitProblem noisy;
    noisy.initial_state = initial;
    noisy.device = default_device();
    noisy.snapshots = make_synthetic_snapshots(initial, truth, noisy.device, steps,
                                               10000, 7000 + seed);
    const FitResult fit = fit_cz_params(noisy);
    phi_err[seed] = std::abs(fit.params.phi - truth.phi);
    t1_err[seed] = std::abs(fit.params.theta1 - truth.theta1);
    t2_err[seed] = std::abs(fit.params.theta2 - truth.theta2);
    lam_err[seed] = std::abs(fit.params.lam - truth.lam);
  }
  const double angle_median =
      std::max({median(phi_err), median(t1_err), median(t2_err)});
  const double lam_median = median(lam_err);
  const double elapsed = timer.seconds();

  report(8, "fit recovery: 1e-6 on exact data; 0.01 rad / 0.005 medians at 1e4 shots",
         exact_error <= 1e-6 && angle_median <= 0.01 && lam_median <= 0.005 &&
             elapsed < 60.0,
         "exact err " + fmt(exact_error) + ", medians " + fmt(angle_median) + " / " +
             fmt(lam_median) + ", " + fmt(elapsed) + " s");
}

void criterion_9_tomography() {
  RandomStream rng(1009);
  double roundtrip_error = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = trial % 2 == 0 ? 1 : 2;
    const DensityMatrix rho = random_density_matrix(n, rng);
    const ReconstructedState rec =
        reconstruct_from_expectations(exact_expectations(rho), n);
    roundtrip_error = std::max(
        roundtrip_error, (rec.rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff());
  }

  const DensityMatrix truth = random_density_matrix(2, rng);
  std::vector<double> medians;
  for (int shots : {100, 1000, 10000}) {
    std::vector<double> errors;
    for (int seed = 0; seed < 31; ++seed) {
      RandomStream sampler(4000 + seed);
      errors.push_back(
          trace_distance(reconstruct(take_tomography(truth, shots, sampler)).rho,
                         truth));
    }
    medians.push_back(median(errors));
  }
  const bool decreasing = medians[0] > medians[1] && medians[1] > medians[2];

  report(9, "tomography: exact round-trip to 1e-12; error medians fall with shots",
         roundtrip_error <= 1e-12 && decreasing,
         "roundtrip " + fmt(roundtrip_error) + ", medians " + fmt(medians[0]) + " > " +
             fmt(medians[1]) + " > " + fmt(medians[2]));
}

void criterion_10_cli_determinism(const std::string& cli) {
  if (cli.empty()) {
    report(10, "CLI byte-determinism across reruns and thread counts", false,
           "no --cli path provided");
    return;
  }
  const fs::path dir = fs::temp_directory_path() / "qmelab_acceptance";
  fs::create_directories(dir);

  const std::string config = (dir / "fig3.json").string();
  {
    std::ofstream out(config);
    out << R"({"cz_errors": {"theta1": 0.04, "theta2": -0.04},
               "sweep": {"values": [0,1,2,3,4,5,6,7,8]}})";
  }

  auto run = [&](const std::string& args, const std::string& out_file,
                 int threads) {
    std::ostringstream cmd;
    cmd << "QMELAB_THREADS=" << threads << " \"" << cli << "\" " << args << " --out "
        << out_file << " > /dev/null 2>&1";
    return std::system(cmd.str().c_str()) == 0;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  bool ok = true;
  // Exact mode: rerun and thread-count invariance.
  ok &= run("fig3 --config " + config + " --exact", (dir / "a.csv").string(), 1);
  ok &= run("fig3 --config " + config + " --exact", (dir / "b.csv").string(), 1);
  ok &= run("fig3 --config " + config + " --exact", (dir / "c.csv").string(), 4);
  const bool exact_same = slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                          slurp(dir / "a.csv") == slurp(dir / "c.csv");

  // Sampled mode with tomography noise: fixed master seed, varied threads.
  const std::string sampled_args =
      "fig2 --trajectories 50 --shots 512 --seed 11";
  ok &= run(sampled_args, (dir / "s1.csv").string(), 1);
  ok &= run(sampled_args, (dir / "s2.csv").string(), 4);
  ok &= run(sampled_args, (dir / "s3.csv").string(), 2);
  const bool sampled_same = slurp(dir / "s1.csv") == slurp(dir / "s2.csv") &&
                            slurp(dir / "s1.csv") == slurp(dir / "s3.csv");

  report(10, "CLI byte-determinism across reruns and thread counts",
         ok && exact_same && sampled_same,
         std::string("exact ") + (exact_same ? "stable" : "DRIFTS") + ", sampled " +
             (sampled_same ? "stable" : "DRIFTS"));
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

  criterion_1_channel_equivalence();
  criterion_2_kraus_completeness();
  criterion_3_monte_carlo();
  criterion_4_first_order_insensitivity_1q();
  criterion_5_two_qubit_code_sweep();
  criterion_6_fig3_landmarks();
  criterion_7_decoherence_decay();
  criterion_8_fit_recovery();
  criterion_9_tomography();
  criterion_10_cli_determinism(cli);

  if (g_failures == 0) {
    std::cout << "acceptance: all 10 criteria passed\n";
    return 0;
  }
  std::cout << "acceptance: " << g_failures << " criteria FAILED\n";
  return 1;
}
