#pragma once

#include <cstdint>
#include <string>

namespace qmelab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitSyntax = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitRuntime = 4;

struct ChannelVerification {
  double equivalence_residual = 0.0;   // max |M(rho) - D(rho)| elementwise
  double completeness_residual = 0.0;  // max ||sum K^dagger K - 1||_max
  bool pass = false;
};

// Channel-equivalence over {Z, X, (X+Y)/sqrt2, ZZ, XX} on 200 random
// states each, plus Kraus completeness across randomized parameters.
ChannelVerification verify_channels(std::uint64_t seed);

// Full command-line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace qmelab
