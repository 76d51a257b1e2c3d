#include "ede/mapping/records.hpp"

#include "ede/error.hpp"
#include "ede/util/files.hpp"

#include "json.hpp"

#include <algorithm>

namespace ede::mapping {

RawRecord::RawRecord(std::initializer_list<Field> fields) {
    for (const auto& f : fields) set(f.first, f.second);
}

void RawRecord::set(std::string_view name, std::optional<std::string> value) {
    for (auto& f : fields_) {
        if (f.first == name) {
            f.second = std::move(value);
            return;
        }
    }
    fields_.emplace_back(std::string(name), std::move(value));
}

std::optional<std::string> RawRecord::get(std::string_view name) const {
    for (const auto& f : fields_) {
        if (f.first == name) return f.second;
    }
    return std::nullopt;
}

bool RawRecord::has_field(std::string_view name) const {
    return std::any_of(fields_.begin(), fields_.end(), [&](const Field& f) { return f.first == name; });
}

bool RawRecord::rename(std::string_view from, std::string_view to) {
    auto it = std::find_if(fields_.begin(), fields_.end(), [&](const Field& f) { return f.first == from; });
    if (it == fields_.end()) return false;
    if (from == to) return true;
    auto value = std::move(it->second);
    auto existing = std::find_if(fields_.begin(), fields_.end(), [&](const Field& f) { return f.first == to; });
    if (existing != fields_.end()) {
        existing->second = std::move(value);
        fields_.erase(std::find_if(fields_.begin(), fields_.end(), [&](const Field& f) { return f.first == from; }));
    } else {
        it->first = std::string(to);
        it->second = std::move(value);
    }
    return true;
}

std::string_view to_string(SourceFormat format) {
    return format == SourceFormat::Csv ? "csv" : "jsonl";
}

namespace {

struct Cell {
    std::string text;
    bool quoted = false;
};

/// Splits CSV text into rows of cells; quoted cells may span lines.
std::vector<std::pair<std::size_t, std::vector<Cell>>> split_csv(std::string_view text) {
    std::vector<std::pair<std::size_t, std::vector<Cell>>> rows;
    std::size_t pos = 0;
    std::size_t line = 1;
    while (pos < text.size()) {
        std::size_t row_line = line;
        std::vector<Cell> row;
        bool row_done = false;
        while (!row_done) {
            Cell cell;
            if (pos < text.size() && text[pos] == '"') {
                cell.quoted = true;
                ++pos;
                while (true) {
                    if (pos >= text.size()) throw ParseError(row_line, 0, "unterminated quoted CSV field");
                    char c = text[pos++];
                    if (c == '"') {
                        if (pos < text.size() && text[pos] == '"') {
                            cell.text.push_back('"');
                            ++pos;
                            continue;
                        }
                        break;
                    }
                    if (c == '\n') ++line;
                    cell.text.push_back(c);
                }
                if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
                    throw ParseError(line, 0, "unexpected character after closing quote");
                }
            } else {
                while (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
                    if (text[pos] == '"') throw ParseError(line, 0, "quote inside unquoted CSV field");
                    cell.text.push_back(text[pos++]);
                }
            }
            row.push_back(std::move(cell));
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                continue;
            }
            if (pos < text.size() && text[pos] == '\r') ++pos;
            if (pos < text.size() && text[pos] == '\n') ++pos;
            ++line;
            row_done = true;
        }
        // Lines holding a single empty unquoted cell are blank lines.
        if (row.size() == 1 && !row[0].quoted && row[0].text.empty()) continue;
        rows.emplace_back(row_line, std::move(row));
    }
    return rows;
}

bool needs_quotes(const std::string& s) {
    return s.empty() || s.find_first_of(",\"\r\n") != std::string::npos;
}

void append_cell(std::string& out, const std::optional<std::string>& value) {
    if (!value) return;
    if (!needs_quotes(*value)) {
        out += *value;
        return;
    }
    out.push_back('"');
    for (char c : *value) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace

RecordTable read_csv(std::string_view text) {
    RecordTable table;
    auto rows = split_csv(text);
    if (rows.empty()) return table;
    for (auto& cell : rows[0].second) {
        if (cell.text.empty()) throw ParseError(rows[0].first, 0, "empty CSV header field");
        if (std::find(table.header.begin(), table.header.end(), cell.text) != table.header.end()) {
            throw ParseError(rows[0].first, 0, "duplicate CSV header field '" + cell.text + "'");
        }
        table.header.push_back(cell.text);
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        auto& [line, cells] = rows[r];
        if (cells.size() != table.header.size()) {
            throw ParseError(line, 0, "expected " + std::to_string(table.header.size()) + " CSV fields, found " +
                                          std::to_string(cells.size()));
        }
        RawRecord record;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!cells[i].quoted && cells[i].text.empty()) {
                record.set(table.header[i], std::nullopt);
            } else {
                record.set(table.header[i], std::move(cells[i].text));
            }
        }
        table.records.push_back(std::move(record));
    }
    return table;
}

RecordTable read_json_lines(std::string_view text) {
    RecordTable table;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        nlohmann::ordered_json obj;
        try {
            obj = nlohmann::ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, 0, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(line_no, 0, "expected a JSON object");
        RawRecord record;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const auto& v = it.value();
            std::optional<std::string> value;
            if (v.is_string()) {
                value = v.get<std::string>();
            } else if (v.is_number() || v.is_boolean()) {
                value = v.dump();
            } else if (!v.is_null()) {
                throw ParseError(line_no, 0, "field '" + it.key() + "' is not a flat value");
            }
            record.set(it.key(), std::move(value));
            if (std::find(table.header.begin(), table.header.end(), it.key()) == table.header.end()) {
                table.header.push_back(it.key());
            }
        }
        table.records.push_back(std::move(record));
    }
    return table;
}

RecordTable read_records(const std::filesystem::path& path, SourceFormat format) {
    auto text = util::read_file(path);
    try {
        return format == SourceFormat::Csv ? read_csv(text) : read_json_lines(text);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), path.string() + ": " + e.what());
    }
}

std::string write_csv(const RecordTable& table) {
    std::string out;
    if (table.header.empty()) return out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i != 0) out.push_back(',');
        append_cell(out, table.header[i]);
    }
    out.push_back('\n');
    for (const auto& record : table.records) {
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (i != 0) out.push_back(',');
            append_cell(out, record.get(table.header[i]));
        }
        out.push_back('\n');
    }
    return out;
}

std::vector<std::string> header_of(const std::vector<RawRecord>& records) {
    std::vector<std::string> header;
    for (const auto& r : records) {
        for (const auto& f : r.fields()) {
            if (std::find(header.begin(), header.end(), f.first) == header.end()) header.push_back(f.first);
        }
    }
    return header;
}

}  // namespace ede::mapping
