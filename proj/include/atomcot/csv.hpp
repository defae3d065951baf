#pragma once

/**
 * Minimal CSV writer/reader for the report files. Fields containing commas,
 * quotes or newlines are quoted per RFC 4180; floats are printed with 17
 * significant digits so a reparse recovers the exact double.
 */

#include <filesystem>
#include <string>
#include <vector>

namespace atomcot::csv {

std::string escape(const std::string& field);
std::string format_double(double v);

using Row = std::vector<std::string>;

void write_csv(const std::filesystem::path& path, const Row& header,
               const std::vector<Row>& rows);

/// Parses a CSV file; the first row is returned separately as the header.
std::pair<Row, std::vector<Row>> read_csv(const std::filesystem::path& path);

}  // namespace atomcot::csv
