#pragma once

namespace qmelab {

inline constexpr const char* kToolName = "qmelab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace qmelab
