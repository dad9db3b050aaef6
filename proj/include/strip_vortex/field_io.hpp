#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "strip_vortex/geometry.hpp"

namespace strip_vortex {

/// Scalar samples on a point set, written as CSV rows (x1, x2, value) under a comment header.
struct FieldFile {
    std::string quantity;
    std::string units;
    std::string grid;  // description of the sampling lattice
    std::vector<Vec2> points;
    std::vector<double> values;

    /// CRC-32 of the grid description and the point coordinates.
    std::uint32_t grid_hash() const;
};

/// Write with 17 significant digits. Throws ErrorKind::Precondition for an empty or
/// inconsistent field and ErrorKind::Io if the file cannot be written.
void write_field(const FieldFile& field, const std::filesystem::path& path);

/// Read a field and verify its grid hash. Throws ErrorKind::Parse on a malformed file or a
/// hash mismatch and ErrorKind::Io if the file cannot be read.
FieldFile read_field(const std::filesystem::path& path);

/// Fixed 17-significant-digit text of a double, as used in field files.
std::string format_value(double v);

}  // namespace strip_vortex
