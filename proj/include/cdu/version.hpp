#pragma once

namespace cdu {

// Git-describe-style version string, baked at release time.
inline constexpr const char* kVersion = "cdu-0.1.0";

}  // namespace cdu
