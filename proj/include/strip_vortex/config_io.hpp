#pragma once

#include <filesystem>
#include <string>

#include "strip_vortex/run_config.hpp"

namespace strip_vortex {

/// Parse a YAML run configuration of one-level tables. Omitted keys keep their defaults.
/// Unknown keys and malformed values throw ErrorKind::Parse; values that break an invariant
/// throw ErrorKind::Configuration naming the field.
RunConfig parse_config(const std::string& text);

/// Read and parse a configuration file. Throws ErrorKind::Io if it cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Emit every field so that parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Parse "pi/N" or a decimal spacing that divides pi.
Spacing parse_spacing(const std::string& text, const std::string& field);
std::string format_spacing(const Spacing& spacing);

RegionKind parse_region(const std::string& text, const std::string& field);

}  // namespace strip_vortex
