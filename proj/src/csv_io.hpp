#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcvmd/series.hpp"

namespace mcvmd::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // columns[c][row]

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::optional<std::size_t> find(std::string_view name) const;
};

/// Column pairing of a record: section i is (x column, y column).
using SectionColumns = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal form that parses back to the same double; "nan" for NaN.
std::string format_double(double v);

CsvTable parse_csv(std::string_view text, const std::string& source = "<input>");
CsvTable read_csv(const std::filesystem::path& path);

/// "x1:y1,x2:y2" -> pairs. Empty string gives an empty mapping (auto-detect).
SectionColumns parse_section_map(std::string_view spec);

/// Builds a record from a table. Without a mapping the columns x1, y1, x2, y2, ...
/// are used. The sample rate comes from `sample_rate` if given, else from the
/// `t` column.
MultiSectionRecordd record_from_table(const CsvTable& table, std::optional<double> sample_rate,
                                      const SectionColumns& mapping = {});

std::string record_to_csv(const MultiSectionRecordd& record);

std::string table_to_csv(const std::vector<std::string>& header, const std::vector<const Vector<double>*>& columns);

/// Writes through a temporary file in the same directory, then renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace mcvmd::io
