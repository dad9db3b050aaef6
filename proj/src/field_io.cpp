#include "strip_vortex/field_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/crc.hpp>

#include "strip_vortex/errors.hpp"

namespace strip_vortex {

namespace {

constexpr const char* kColumns = "x1,x2,value";

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint32_t FieldFile::grid_hash() const {
    boost::crc_32_type crc;
    crc.process_bytes(grid.data(), grid.size());
    for (const Vec2& p : points) {
        const std::string row = format_value(p.x1) + "," + format_value(p.x2) + "\n";
        crc.process_bytes(row.data(), row.size());
    }
    return crc.checksum();
}

void write_field(const FieldFile& field, const std::filesystem::path& path) {
    if (field.points.empty()) fail(ErrorKind::Precondition, "refusing to write empty field " + field.quantity);
    if (field.points.size() != field.values.size()) {
        fail(ErrorKind::Precondition, "field " + field.quantity + " has mismatched point and value counts");
    }
    std::ostringstream out;
    char hash[16];
    std::snprintf(hash, sizeof hash, "%08" PRIx32, field.grid_hash());
    out << "# quantity: " << field.quantity << "\n"
        << "# units: " << field.units << "\n"
        << "# grid: " << field.grid << "\n"
        << "# rows: " << field.points.size() << "\n"
        << "# grid_crc32: " << hash << "\n"
        << kColumns << "\n";
    for (std::size_t k = 0; k < field.points.size(); ++k) {
        out << format_value(field.points[k].x1) << ',' << format_value(field.points[k].x2) << ','
            << format_value(field.values[k]) << '\n';
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    file << out.str();
    if (!file.flush()) fail(ErrorKind::Io, "failed writing " + path.string());
}

FieldFile read_field(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) fail(ErrorKind::Io, "cannot read " + path.string());
    FieldFile field;
    std::string line, declared_hash;
    std::size_t declared_rows = 0, number = 0;
    bool columns = false;
    while (std::getline(file, line)) {
        ++number;
        if (!columns) {
            if (starts_with(line, "# quantity: ")) field.quantity = line.substr(12);
            else if (starts_with(line, "# units: ")) field.units = line.substr(9);
            else if (starts_with(line, "# grid: ")) field.grid = line.substr(8);
            else if (starts_with(line, "# rows: ")) declared_rows = std::stoull(line.substr(8));
            else if (starts_with(line, "# grid_crc32: ")) declared_hash = line.substr(14);
            else if (line == kColumns) columns = true;
            else fail(ErrorKind::Parse, path.string() + ":" + std::to_string(number) + ": unexpected header line");
            continue;
        }
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
            fail(ErrorKind::Parse, path.string() + ":" + std::to_string(number) + ": expected three columns");
        }
        field.points.push_back({parse_double(a, path, number), parse_double(b, path, number)});
        field.values.push_back(parse_double(c, path, number));
    }
    if (!columns || field.points.empty()) fail(ErrorKind::Parse, path.string() + ": no data rows");
    if (field.points.size() != declared_rows) {
        fail(ErrorKind::Parse, path.string() + ": header declares " + std::to_string(declared_rows) + " rows, found " +
                                   std::to_string(field.points.size()));
    }
    char hash[16];
    std::snprintf(hash, sizeof hash, "%08" PRIx32, field.grid_hash());
    if (declared_hash != hash) {
        fail(ErrorKind::Parse, path.string() + ": grid hash mismatch (header " + declared_hash + ", data " + hash + ")");
    }
    return field;
}

}  // namespace strip_vortex
