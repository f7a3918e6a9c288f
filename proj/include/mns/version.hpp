#pragma once

namespace mns {

inline constexpr const char* version_string = "1.0.0";

} // namespace mns
