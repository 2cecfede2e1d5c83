#pragma once

#include <string>
#include <utility>
#include <vector>

namespace refl {

// Parses a flat key=value config file. Blank lines and '#' comments are
// skipped; anything else without '=' is an error. Keys keep file order.
std::vector<std::pair<std::string, std::string>> parse_key_value_file(
    const std::string& path);

}  // namespace refl
