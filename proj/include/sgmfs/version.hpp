#pragma once

namespace sgmfs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sgmfs
