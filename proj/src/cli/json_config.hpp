#pragma once

#include <string>
#include <vector>

namespace rppg::cli {

// Expands a flat JSON object {"flag-name": value} into argv tokens. Keys already
// present in `given` (as --name or --name=...) are skipped so flags win over
// the file. Arrays become one flag followed by each element; booleans become bare flags.
// Throws rppg::Error(kFormat) for unreadable or non-object JSON.
std::vector<std::string> config_tokens(const std::string& path, const std::vector<std::string>& given);

}  // namespace rppg::cli
