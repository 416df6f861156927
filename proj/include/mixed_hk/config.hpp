#pragma once

#include <iosfwd>
#include <string>

#include "mixed_hk/simulate.hpp"

namespace mixed_hk {

/// Reads an INI-style model configuration:
///
///     n = 3
///     d = 2
///     epsilon = 1
///     max_steps = 100
///     [schedule]
///     kind = constant
///     alpha = 0.5 0.5 0
///     [initial]
///     source = inline
///     coords = 0 0; 1 0; 0.5 1
///
/// Keys may also be written dotted at top level (`schedule.kind = ...`).
/// Every error is a ConfigError carrying the line number.
ModelConfig parse_config(std::istream& in);
ModelConfig parse_config_file(const std::string& path);
ModelConfig parse_config_string(const std::string& text);

/// Emits a file that parse_config turns back into an equal ModelConfig.
std::string format_config(const ModelConfig& config);

}  // namespace mixed_hk
