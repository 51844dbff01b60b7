#pragma once

#include <string_view>

namespace ilw {

/// Library version plus `git describe` output captured at configure time.
std::string_view version_string() noexcept;

}  // namespace ilw
