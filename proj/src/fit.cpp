#include "qmelab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "qmelab/tomography.hpp"

namespace qmelab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double logit(double p) {
  const double clipped = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
  return std::log(clipped / (1.0 - clipped));
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

// Per-gate channel with the parameter-independent pieces prebuilt; the
// objective walks thousands of circuits, so this stays on fixed-size
// matrices.
struct ForwardModel {
  Eigen::Matrix4cd gate_u;
  std::vector<Eigen::Matrix4cd> leak;
  std::vector<Eigen::Matrix4cd> noise_q1;
  std::vector<Eigen::Matrix4cd> noise_q2;
};

Eigen::Matrix4cd kraus4(const Eigen::Matrix4cd& rho,
                        const std::vector<Eigen::Matrix4cd>& kraus) {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (const auto& k : kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

ForwardModel build_forward_model(const CzErrorParams& params,
                                 const std::optional<TwoQubitDevice>& device) {
  ForwardModel model;
  model.gate_u = cz_error_unitary(params);
  if (params.lam > 0.0)
    for (const auto& k : leakage_kraus(params.lam)) model.leak.push_back(k);
  if (device) {
    const double t = device->timing.step_cz_us();
    for (const auto& k :
         decoherence_kraus_embedded(2, 0, device->q1.during_cz(), t))
      model.noise_q1.push_back(k);
    for (const auto& k :
         decoherence_kraus_embedded(2, 1, device->q2.during_cz(), t))
      model.noise_q2.push_back(k);
  }
  return model;
}

Eigen::Matrix4cd advance_one_step(Eigen::Matrix4cd rho, const ForwardModel& model) {
  for (int gate = 0; gate < 2; ++gate) {
    rho = model.gate_u * rho * model.gate_u.adjoint();
    if (!model.leak.empty()) rho = kraus4(rho, model.leak);
    if (!model.noise_q1.empty()) {
      rho = kraus4(rho, model.noise_q1);
      rho = kraus4(rho, model.noise_q2);
    }
  }
  return rho;
}

CzErrorParams params_from_vec(const Eigen::VectorXd& v) {
  return {v[0], v[1], v[2], logistic(v[3])};
}

}  // namespace

void FitProblem::normalize() {
  require(snapshots.size() >= 2, "FitProblem: need at least 2 snapshots");
  std::sort(snapshots.begin(), snapshots.end(),
            [](const FitSnapshot& a, const FitSnapshot& b) { return a.step < b.step; });
  for (size_t i = 0; i + 1 < snapshots.size(); ++i)
    require(snapshots[i].step < snapshots[i + 1].step,
            "FitProblem: duplicate snapshot step");
  require(snapshots.front().step >= 0, "FitProblem: negative step index");
  require(initial_state.rows() == 4 && initial_state.cols() == 4,
          "FitProblem: initial state must be two-qubit");
}

std::vector<std::vector<double>> predict_expectations(const CzErrorParams& params,
                                                      const FitProblem& problem) {
  static const std::vector<Eigen::Matrix4cd> paulis = [] {
    std::vector<Eigen::Matrix4cd> out;
    for (const auto& l : pauli_labels(2)) out.push_back(pauli_from_label(l));
    return out;
  }();

  require(problem.initial_state.rows() == 4 && problem.initial_state.cols() == 4,
          "predict_expectations: initial state must be two-qubit");
  const ForwardModel model = build_forward_model(params, problem.device);
  std::vector<std::vector<double>> out;
  Eigen::Matrix4cd rho = problem.initial_state;
  int current = 0;
  for (const auto& snap : problem.snapshots) {
    while (current < snap.step) {
      rho = advance_one_step(rho, model);
      ++current;
    }
    std::vector<double> exps;
    exps.reserve(paulis.size());
    for (const auto& p : paulis) exps.push_back((rho * p).trace().real());
    out.push_back(std::move(exps));
  }
  return out;
}

double fit_objective(const CzErrorParams& params, const FitProblem& problem) {
  const auto predicted = predict_expectations(params, problem);
  const auto& labels = pauli_labels(2);
  double sum = 0.0;
  for (size_t i = 0; i < problem.snapshots.size(); ++i) {
    const auto& measured = problem.snapshots[i].expectations;
    for (size_t j = 0; j < labels.size(); ++j) {
      const auto it = measured.find(labels[j]);
      require(it != measured.end(),
              "fit snapshot is missing expectation " + labels[j]);
      const double r = it->second - predicted[i][j];
      sum += r * r;
    }
  }
  return sum;
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 0; i < n; ++i) xs[i + 1][i] += opts.initial_step;
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  NelderMeadResult result;
  result.first_move = Eigen::VectorXd::Zero(n);
  bool first_recorded = false;

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> xs2(n + 1);
    std::vector<double> fs2(n + 1);
    for (int i = 0; i <= n; ++i) {
      xs2[i] = xs[idx[i]];
      fs2[i] = fs[idx[i]];
    }
    xs.swap(xs2);
    fs.swap(fs2);
  };

  auto record_first = [&](const Eigen::VectorXd& x_new) {
    if (!first_recorded) {
      result.first_move = x_new - x0;
      first_recorded = true;
    }
  };

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    order();
    double max_dist = 0.0;
    for (int i = 1; i <= n; ++i)
      max_dist = std::max(max_dist, (xs[i] - xs[0]).norm());
    if (max_dist < opts.simplex_tol ||
        fs[n] - fs[0] <= opts.f_tol + 1e-12 * std::abs(fs[0])) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - xs[n]);
    const double f_reflected = f(reflected);
    if (f_reflected < fs[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[n]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        record_first(expanded);
        xs[n] = expanded;
        fs[n] = f_expanded;
      } else {
        record_first(reflected);
        xs[n] = reflected;
        fs[n] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fs[n - 1]) {
      record_first(reflected);
      xs[n] = reflected;
      fs[n] = f_reflected;
      continue;
    }
    const Eigen::VectorXd contracted = centroid + 0.5 * (xs[n] - centroid);
    const double f_contracted = f(contracted);
    if (f_contracted < fs[n]) {
      record_first(contracted);
      xs[n] = contracted;
      fs[n] = f_contracted;
      continue;
    }
    // Shrink toward the best vertex.
    for (int i = 1; i <= n; ++i) {
      xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
      fs[i] = f(xs[i]);
    }
  }
  order();
  result.x = xs[0];
  result.fx = fs[0];
  result.iterations = iter;
  return result;
}

FitResult fit_cz_params(const FitProblem& problem, const CzErrorParams& initial_guess) {
  FitProblem sorted = problem;
  sorted.normalize();

  const auto objective = [&sorted](const Eigen::VectorXd& v) {
    return fit_objective(params_from_vec(v), sorted);
  };

  const double lam0 = std::max(initial_guess.lam, 0.01);
  std::vector<Eigen::VectorXd> starts;
  auto add_start = [&](double phi, double t1, double t2) {
    Eigen::VectorXd v(4);
    v << phi, t1, t2, logit(lam0);
    starts.push_back(v);
  };
  add_start(initial_guess.phi, initial_guess.theta1, initial_guess.theta2);
  const double b = 0.1;
  add_start(b, b, b);
  add_start(b, -b, -b);
  add_start(-b, b, -b);
  add_start(-b, -b, b);

  NelderMeadOptions opts;
  std::vector<NelderMeadResult> runs(starts.size());
  {
    // Multi-starts are independent; run them on separate threads.
    std::vector<std::thread> pool;
    for (size_t i = 0; i < starts.size(); ++i)
      pool.emplace_back([&, i] { runs[i] = nelder_mead(objective, starts[i], opts); });
    for (auto& t : pool) t.join();
  }
  bool have_best = false;
  NelderMeadResult best;
  for (const auto& run : runs) {
    if (!have_best || run.fx < best.fx ||
        (run.fx == best.fx && run.x.norm() < best.x.norm())) {
      best = run;
      have_best = true;
    }
  }

  FitResult out;
  out.params = params_from_vec(best.x);
  out.params.phi = wrap_angle(out.params.phi);
  out.params.theta1 = wrap_angle(out.params.theta1);
  out.params.theta2 = wrap_angle(out.params.theta2);
  out.residual_norm = std::sqrt(std::max(best.fx, 0.0));
  out.iterations = best.iterations;
  out.converged = best.converged;
  return out;
}

std::vector<FitSnapshot> make_synthetic_snapshots(const Matrix& initial_state,
                                                  const CzErrorParams& truth,
                                                  const std::optional<TwoQubitDevice>& device,
                                                  const std::vector<int>& steps,
                                                  int shots, std::uint64_t seed) {
  std::vector<FitSnapshot> out;
  const ForwardModel model = build_forward_model(truth, device);
  Eigen::Matrix4cd rho = initial_state;
  int current = 0;
  std::vector<int> sorted_steps = steps;
  std::sort(sorted_steps.begin(), sorted_steps.end());
  RandomStream master(seed);
  for (int step : sorted_steps) {
    while (current < step) {
      rho = advance_one_step(rho, model);
      ++current;
    }
    FitSnapshot snap;
    snap.step = step;
    const DensityMatrix state{rho};
    if (shots <= 0) {
      snap.expectations = exact_expectations(state);
    } else {
      RandomStream sub = master.substream(static_cast<std::uint64_t>(step));
      snap.expectations =
          expectations_from_record(take_tomography(state, shots, sub));
    }
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace qmelab
