#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qmelab/tomography.hpp"
#include "test_util.hpp"

using namespace qmelab;
using namespace qmelab::test;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_SUITE_BEGIN("tomography");

TEST_CASE("measurement sampling follows the Born rule") {
  RandomStream rng(51);

  // Z-eigenstate: every shot lands in outcome 0.
  const auto certain = simulate_measurement(zero_state(), "Z", 500, rng);
  CHECK(certain[0] == 500);
  CHECK(certain[1] == 0);

  // |+> in the Z basis: binomial 3-sigma window around one half.
  const auto balanced = simulate_measurement(plus_state(), "Z", 10000, rng);
  const double fraction = balanced[0] / 10000.0;
  CHECK(std::abs(fraction - 0.5) < 0.015);

  // Bell state in ZZ: outcomes 00 and 11 only.
  const auto bell = simulate_measurement(phi_plus(), "ZZ", 4000, rng);
  CHECK(bell[1] == 0);
  CHECK(bell[2] == 0);
  CHECK(std::abs(bell[0] / 4000.0 - 0.5) < 0.024);

  // |+> in the X basis is deterministic.
  const auto aligned = simulate_measurement(plus_state(), "X", 100, rng);
  CHECK(aligned[0] == 100);

  CHECK_THROWS_AS(simulate_measurement(zero_state(), "Z", 0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_measurement(zero_state(), "ZZ", 10, rng),
                  std::invalid_argument);
}

TEST_CASE("marginal estimates converge at the 3/sqrt(shots) level") {
  RandomStream rng(52);
  const DensityMatrix rho = random_density_matrix(2, rng);
  const int shots = 40000;
  RandomStream sampler(53);
  const auto record = take_tomography(rho, shots, sampler);
  const auto estimates = expectations_from_record(record);
  const auto exact = exact_expectations(rho);
  for (const auto& [label, value] : exact)
    CHECK(std::abs(estimates.at(label) - value) < 3.0 / std::sqrt(shots) + 0.005);
}

TEST_CASE("linear inversion round-trips exact expectations") {
  RandomStream rng(54);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = trial % 2 == 0 ? 1 : 2;
    const DensityMatrix rho = random_density_matrix(n, rng);
    const ReconstructedState rec =
        reconstruct_from_expectations(exact_expectations(rho), n);
    REQUIRE(max_entry_diff(rec.rho.matrix(), rho.matrix()) <= 1e-12);
    REQUIRE(rec.psd_projection_distance <= 1e-12);
  }
}

TEST_CASE("reconstruction from shot data approaches the true state") {
  RandomStream state_rng(55);
  const DensityMatrix truth = plus_state();
  RandomStream sampler(56);
  const auto record = take_tomography(truth, 10000, sampler);
  const ReconstructedState rec = reconstruct(record);
  CHECK(trace_distance(rec.rho, truth) < 0.03);
  CHECK(rec.raw_expectations.size() == 3);
  (void)state_rng;
}

TEST_CASE("psd projection engages on unphysical expectation inputs") {
  // Deliberately overlong Bloch vector: |r| = 1.5.
  std::map<std::string, double> expectations{{"X", 1.5}, {"Y", 0.0}, {"Z", 0.0}};
  const ReconstructedState rec = reconstruct_from_expectations(expectations, 1);
  CHECK(rec.psd_projection_distance > 0.0);
  CHECK(hermitian_eigenvalues(rec.rho.matrix()).minCoeff() >= -1e-12);
  CHECK(std::abs(rec.rho.matrix().trace().real() - 1.0) <= 1e-12);
}

TEST_CASE("reconstruction rejects incomplete basis sets") {
  RandomStream rng(57);
  TomographyRecord record = take_tomography(plus_state(), 100, rng);
  record.basis_settings.pop_back();
  record.counts.pop_back();
  CHECK_THROWS_AS(reconstruct(record), std::invalid_argument);

  std::map<std::string, double> missing{{"X", 0.1}, {"Y", 0.0}};
  CHECK_THROWS_AS(reconstruct_from_expectations(missing, 1), std::invalid_argument);
}

TEST_CASE("reconstruction error shrinks with shot count (median over seeds)") {
  RandomStream state_rng(58);
  const DensityMatrix truth = random_density_matrix(2, state_rng);
  std::vector<double> medians;
  for (int shots : {100, 10000}) {
    std::vector<double> errors;
    for (int seed = 0; seed < 50; ++seed) {
      RandomStream sampler(1000 + seed);
      const auto record = take_tomography(truth, shots, sampler);
      errors.push_back(trace_distance(reconstruct(record).rho, truth));
    }
    medians.push_back(median(errors));
  }
  CHECK(medians[1] < medians[0]);
}

TEST_CASE("spam normalization") {
  const std::vector<std::pair<double, double>> curve{{0.0, 0.95}, {0.4, 0.80}};
  const auto normalized = spam_normalize(curve);
  CHECK(normalized[0].second == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normalized[1].second == doctest::Approx(0.8 / 0.95).epsilon(1e-12));
  CHECK(normalized[1].second == doctest::Approx(0.8421).epsilon(1e-4));

  // A noiseless curve has reference 1 and passes through unchanged.
  const std::vector<std::pair<double, double>> clean{{0.0, 1.0}, {0.3, 0.7}};
  const auto same = spam_normalize(clean);
  CHECK(same[0].second == 1.0);
  CHECK(same[1].second == 0.7);

  const std::vector<std::pair<double, double>> bad{{0.0, 0.0}, {0.1, 0.5}};
  CHECK_THROWS_AS(spam_normalize(bad), std::invalid_argument);
}

TEST_SUITE_END();
