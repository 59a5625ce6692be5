#pragma once

#include <string_view>

namespace dronesim {

/// git-describe style version string baked in at configure time.
std::string_view version();

}  // namespace dronesim
