#pragma once

#include <string_view>

namespace lightray {

/// Package version plus the git revision the build was configured from.
std::string_view version_string();

}  // namespace lightray
