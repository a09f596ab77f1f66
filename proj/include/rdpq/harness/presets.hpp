#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdpq/harness/config.hpp"

namespace rdpq {

std::vector<std::string> presetNames();
std::optional<std::string> presetText(std::string_view name);
/// Throws ConfigError for unknown names.
ScenarioConfig presetConfig(std::string_view name);

}  // namespace rdpq
