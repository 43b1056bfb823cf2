#include "melkit/io.hpp"
#include "melkit/errors.hpp"

#include <cstdio>
#include <fstream>

namespace melkit::io {

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string table_to_csv(const Table& t) {
    std::string out;
    for (const auto& [k, v] : t.meta) out += "# " + k + "=" + v + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ",";
        out += t.columns[c];
    }
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += format_full(row[c]);
        }
        out += "\n";
    }
    return out;
}

nlohmann::ordered_json table_to_json(const Table& t) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    nlohmann::ordered_json j;
    j["meta"] = std::move(meta);
    j["columns"] = t.columns;
    j["data"] = t.rows;
    return j;
}

Table table_from_json(const nlohmann::ordered_json& j) {
    Table t;
    for (const auto& [k, v] : j.at("meta").items())
        t.meta.emplace_back(k, v.get<std::string>());
    t.columns = j.at("columns").get<std::vector<std::string>>();
    t.rows = j.at("data").get<std::vector<std::vector<double>>>();
    return t;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ComputationError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f.good()) throw ComputationError("write failed: " + path.string());
}

void emit_table(const Table& t, const std::filesystem::path& path, Format f) {
    if (f == Format::csv)
        write_text_file(path, table_to_csv(t));
    else
        write_text_file(path, table_to_json(t).dump(2) + "\n");
}

} // namespace melkit::io
