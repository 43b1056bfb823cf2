#ifndef MELKIT_IO_HPP
#define MELKIT_IO_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace melkit::io {

/// Column-oriented numeric table with ordered metadata, the common shape of
/// every CSV/JSON artifact this tool writes.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta; // echoed config etc.
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Format a double with 17 significant digits (round-trips exactly).
std::string format_full(double x);

/// CSV dialect: '#'-prefixed key=value metadata lines, then a header row,
/// then comma-separated data rows; LF line endings.
std::string table_to_csv(const Table& t);

/// JSON form: {"meta": {...}, "columns": [...], "data": [[...], ...]}.
nlohmann::ordered_json table_to_json(const Table& t);

Table table_from_json(const nlohmann::ordered_json& j);

enum class Format { csv, json };

/// Write the table to path in the requested format.  Throws ComputationError
/// on I/O failure.
void emit_table(const Table& t, const std::filesystem::path& path, Format f);

void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace melkit::io

#endif
