#pragma once

#include <stdexcept>
#include <string>

#include "qmelab/experiments.hpp"

namespace qmelab {

// Missing or unreadable file.
struct ConfigIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed JSON.
struct ConfigSyntaxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Unknown key or invariant violation; the message carries the field path.
struct ConfigValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputSpec {
  std::string path;  // empty: derive from experiment name
  std::string format = "csv";
};

// One validated configuration document. Sweep values and arms may stay
// empty here; per-experiment defaults are filled when the run starts.
struct Config {
  std::string experiment;
  std::uint64_t seed = 42;
  CodeName code = CodeName::xx;
  bool code_given = false;
  TwoQubitDevice device = default_device();
  CzErrorParams cz_errors;
  bool decoherence = true;
  bool noisy_qme_gates = false;
  bool prep_via_circuit = false;
  SweepSpec sweep;  // master_seed mirrors `seed`
  OutputSpec output;
};

// Strict parse: unknown keys are rejected with their full path.
Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text);

// FNV-1a over the canonical serialization of the semantically meaningful
// fields (everything except the output block). 16 hex digits.
std::string config_hash(const Config& config);

// Default code per experiment: zz for fig2/supp-transversal, xx for fig3.
CodeName effective_code(const Config& config);

RunContext run_context(const Config& config, int threads);
SweepSpec sweep_spec(const Config& config);

}  // namespace qmelab
