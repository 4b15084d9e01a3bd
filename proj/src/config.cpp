#include "qmelab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qmelab {

namespace {

using nlohmann::json;

void fail(const std::string& path, const std::string& what) {
  throw ConfigValidationError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (allowed.count(key) == 0)
      fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& path, const char* key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

QubitCoherence parse_coherence(const json& obj, const std::string& path,
                               const QubitCoherence& defaults) {
  check_keys(obj, path, {"t1_us", "t2r_us", "t1_cz_us", "t2r_cz_us"});
  QubitCoherence c;
  c.t1 = get_number(obj, path, "t1_us", defaults.t1);
  c.t2r = get_number(obj, path, "t2r_us", defaults.t2r);
  c.t1_cz = get_number(obj, path, "t1_cz_us", defaults.t1_cz);
  c.t2r_cz = get_number(obj, path, "t2r_cz_us", defaults.t2r_cz);
  if (c.t1 <= 0.0) fail(path + ".t1_us", "must be positive");
  if (c.t2r <= 0.0) fail(path + ".t2r_us", "must be positive");
  if (c.t1_cz <= 0.0) fail(path + ".t1_cz_us", "must be positive");
  if (c.t2r_cz <= 0.0) fail(path + ".t2r_cz_us", "must be positive");
  if (c.t2r > 2.0 * c.t1)
    fail(path + ".t2r_us", "T2R exceeds 2*T1 (negative pure-dephasing rate)");
  if (c.t2r_cz > 2.0 * c.t1_cz)
    fail(path + ".t2r_cz_us", "T2R exceeds 2*T1 (negative pure-dephasing rate)");
  return c;
}

const std::set<std::string> kKnownArms = {"none", "qme", "real_measurement",
                                          "identity_gate", "stabilizer_gate"};

}  // namespace

Config parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigSyntaxError(std::string("config is not valid JSON: ") + e.what());
  }

  check_keys(root, "",
             {"experiment", "seed", "code", "device", "cz_errors", "decoherence",
              "qme", "prep", "sweep", "output"});

  Config config;
  config.experiment = get_string(root, "", "experiment", "");
  if (root.contains("seed")) {
    const auto& v = root.at("seed");
    if (!v.is_number_integer() && !v.is_number_unsigned())
      fail("seed", "expected an integer");
    config.seed = v.get<std::uint64_t>();
  }
  if (root.contains("code")) {
    const std::string code = get_string(root, "", "code", "");
    if (code != "zz" && code != "xx") fail("code", "must be \"zz\" or \"xx\"");
    config.code = code_name_from_string(code);
    config.code_given = true;
  }

  if (root.contains("device")) {
    const auto& device = root.at("device");
    check_keys(device, "device", {"qubit1", "qubit2", "timing"});
    if (device.contains("qubit1"))
      config.device.q1 =
          parse_coherence(device.at("qubit1"), "device.qubit1", config.device.q1);
    if (device.contains("qubit2"))
      config.device.q2 =
          parse_coherence(device.at("qubit2"), "device.qubit2", config.device.q2);
    if (device.contains("timing")) {
      const auto& timing = device.at("timing");
      check_keys(timing, "device.timing", {"t_1qb_ns", "t_cz_ns", "gap_ns"});
      auto& t = config.device.timing;
      t.t_1qb_ns = get_number(timing, "device.timing", "t_1qb_ns", t.t_1qb_ns);
      t.t_cz_ns = get_number(timing, "device.timing", "t_cz_ns", t.t_cz_ns);
      t.gap_ns = get_number(timing, "device.timing", "gap_ns", t.gap_ns);
      if (t.t_1qb_ns < 0) fail("device.timing.t_1qb_ns", "must be >= 0");
      if (t.t_cz_ns < 0) fail("device.timing.t_cz_ns", "must be >= 0");
      if (t.gap_ns < 0) fail("device.timing.gap_ns", "must be >= 0");
    }
  }

  if (root.contains("cz_errors")) {
    const auto& cz = root.at("cz_errors");
    check_keys(cz, "cz_errors", {"phi", "theta1", "theta2", "lam"});
    config.cz_errors.phi = get_number(cz, "cz_errors", "phi", 0.0);
    config.cz_errors.theta1 = get_number(cz, "cz_errors", "theta1", 0.0);
    config.cz_errors.theta2 = get_number(cz, "cz_errors", "theta2", 0.0);
    config.cz_errors.lam = get_number(cz, "cz_errors", "lam", 0.0);
    if (config.cz_errors.lam < 0.0 || config.cz_errors.lam > 1.0)
      fail("cz_errors.lam", "must be in [0,1]");
  }

  config.decoherence = get_bool(root, "", "decoherence", true);

  if (root.contains("qme")) {
    const auto& qme = root.at("qme");
    check_keys(qme, "qme", {"noisy_gates"});
    config.noisy_qme_gates = get_bool(qme, "qme", "noisy_gates", false);
  }
  if (root.contains("prep")) {
    const auto& prep = root.at("prep");
    check_keys(prep, "prep", {"via_circuit"});
    config.prep_via_circuit = get_bool(prep, "prep", "via_circuit", false);
  }

  if (root.contains("sweep")) {
    const auto& sweep = root.at("sweep");
    check_keys(sweep, "sweep", {"values", "arms", "mode", "shots"});
    if (sweep.contains("values")) {
      const auto& values = sweep.at("values");
      if (!values.is_array() || values.empty())
        fail("sweep.values", "expected a non-empty array of numbers");
      for (const auto& v : values) {
        if (!v.is_number()) fail("sweep.values", "expected numbers");
        config.sweep.values.push_back(v.get<double>());
      }
    }
    if (sweep.contains("arms")) {
      const auto& arms = sweep.at("arms");
      if (!arms.is_array() || arms.empty())
        fail("sweep.arms", "expected a non-empty array of strings");
      for (const auto& a : arms) {
        if (!a.is_string()) fail("sweep.arms", "expected strings");
        const std::string arm = a.get<std::string>();
        if (kKnownArms.count(arm) == 0) fail("sweep.arms", "unknown arm " + arm);
        config.sweep.arms.push_back(arm);
      }
    }
    if (sweep.contains("mode")) {
      const auto& mode = sweep.at("mode");
      if (mode.is_string()) {
        if (mode.get<std::string>() != "exact")
          fail("sweep.mode", "must be \"exact\" or {\"trajectories\": N}");
        config.sweep.exact = true;
      } else if (mode.is_object()) {
        check_keys(mode, "sweep.mode", {"trajectories"});
        if (!mode.contains("trajectories") ||
            !mode.at("trajectories").is_number_integer())
          fail("sweep.mode.trajectories", "expected an integer");
        const long long n = mode.at("trajectories").get<long long>();
        if (n < 1) fail("sweep.mode.trajectories", "must be >= 1");
        config.sweep.exact = false;
        config.sweep.n_trajectories = static_cast<int>(n);
      } else {
        fail("sweep.mode", "must be \"exact\" or {\"trajectories\": N}");
      }
    }
    if (sweep.contains("shots")) {
      const auto& shots = sweep.at("shots");
      if (shots.is_string()) {
        if (shots.get<std::string>() != "exact")
          fail("sweep.shots", "must be \"exact\" or a positive integer");
        config.sweep.shots = 0;
      } else if (shots.is_number_integer()) {
        const long long n = shots.get<long long>();
        if (n < 1) fail("sweep.shots", "must be >= 1");
        config.sweep.shots = static_cast<int>(n);
      } else {
        fail("sweep.shots", "must be \"exact\" or a positive integer");
      }
    }
  }

  if (root.contains("output")) {
    const auto& output = root.at("output");
    check_keys(output, "output", {"path", "format"});
    config.output.path = get_string(output, "output", "path", "");
    config.output.format = get_string(output, "output", "format", "csv");
    if (config.output.format != "csv" && config.output.format != "json")
      fail("output.format", "must be \"csv\" or \"json\"");
  }

  config.sweep.master_seed = config.seed;
  return config;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigIoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

CodeName effective_code(const Config& config) {
  if (config.code_given) return config.code;
  if (config.experiment == "fig2" || config.experiment == "supp-transversal")
    return CodeName::zz;
  return CodeName::xx;
}

std::string config_hash(const Config& config) {
  nlohmann::json j;
  j["experiment"] = config.experiment;
  j["seed"] = config.seed;
  j["code"] = code_name_string(effective_code(config));
  j["device"]["qubit1"] = {{"t1_us", config.device.q1.t1},
                           {"t2r_us", config.device.q1.t2r},
                           {"t1_cz_us", config.device.q1.t1_cz},
                           {"t2r_cz_us", config.device.q1.t2r_cz}};
  j["device"]["qubit2"] = {{"t1_us", config.device.q2.t1},
                           {"t2r_us", config.device.q2.t2r},
                           {"t1_cz_us", config.device.q2.t1_cz},
                           {"t2r_cz_us", config.device.q2.t2r_cz}};
  j["device"]["timing"] = {{"t_1qb_ns", config.device.timing.t_1qb_ns},
                           {"t_cz_ns", config.device.timing.t_cz_ns},
                           {"gap_ns", config.device.timing.gap_ns}};
  j["cz_errors"] = {{"phi", config.cz_errors.phi},
                    {"theta1", config.cz_errors.theta1},
                    {"theta2", config.cz_errors.theta2},
                    {"lam", config.cz_errors.lam}};
  j["decoherence"] = config.decoherence;
  j["qme"]["noisy_gates"] = config.noisy_qme_gates;
  j["prep"]["via_circuit"] = config.prep_via_circuit;
  j["sweep"] = {{"values", config.sweep.values.empty()
                               ? nlohmann::json("default")
                               : nlohmann::json(config.sweep.values)},
                {"arms", config.sweep.arms.empty()
                             ? nlohmann::json("default")
                             : nlohmann::json(config.sweep.arms)},
                {"exact", config.sweep.exact},
                {"trajectories", config.sweep.n_trajectories},
                {"shots", config.sweep.shots}};

  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return std::string(hex);
}

RunContext run_context(const Config& config, int threads) {
  RunContext ctx;
  ctx.device = config.device;
  ctx.cz_errors = config.cz_errors;
  ctx.code = effective_code(config);
  ctx.decoherence = config.decoherence;
  ctx.noisy_qme_gates = config.noisy_qme_gates;
  ctx.prep_via_circuit = config.prep_via_circuit;
  ctx.threads = threads;
  return ctx;
}

SweepSpec sweep_spec(const Config& config) {
  if (config.experiment.empty())
    throw ConfigValidationError("experiment: none selected");
  SweepSpec spec = config.sweep;
  if (spec.values.empty()) spec.values = default_values(config.experiment);
  if (spec.arms.empty()) spec.arms = default_arms(config.experiment);
  spec.master_seed = config.seed;
  return spec;
}

}  // namespace qmelab
