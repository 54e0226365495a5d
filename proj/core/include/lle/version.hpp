#pragma once

#include <string_view>

namespace lle {

/// git-describe style build identifier, fixed at configure time.
std::string_view version_string();

}  // namespace lle
