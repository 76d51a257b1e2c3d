#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ede::mapping {

/// One raw input row: ordered, uniquely named fields. A field may be present
/// with a missing value (empty CSV cell, JSON null).
class RawRecord {
public:
    using Field = std::pair<std::string, std::optional<std::string>>;

    RawRecord() = default;
    RawRecord(std::initializer_list<Field> fields);

    /// Replaces the value of an existing field or appends a new one.
    void set(std::string_view name, std::optional<std::string> value);
    /// Value of `name`; nullopt if absent or missing.
    std::optional<std::string> get(std::string_view name) const;
    bool has_field(std::string_view name) const;
    /// Returns false if `from` is absent. An existing `to` field is overwritten.
    bool rename(std::string_view from, std::string_view to);

    const std::vector<Field>& fields() const noexcept { return fields_; }

    friend bool operator==(const RawRecord&, const RawRecord&) = default;

private:
    std::vector<Field> fields_;
};

enum class SourceFormat { Csv, JsonLines };

std::string_view to_string(SourceFormat format);

struct RecordTable {
    std::vector<std::string> header;
    std::vector<RawRecord> records;
};

/// RFC 4180 CSV with a header row. Unquoted empty cells are missing values,
/// a quoted empty cell ("") is an empty string. Throws ParseError (with line)
/// on ragged rows or broken quoting.
RecordTable read_csv(std::string_view text);

/// One flat JSON object per line; strings, numbers and booleans become
/// strings, null becomes a missing value. The header is the union of keys in
/// first-seen order.
RecordTable read_json_lines(std::string_view text);

RecordTable read_records(const std::filesystem::path& path, SourceFormat format);

/// Inverse of read_csv for any table whose records only use header fields.
std::string write_csv(const RecordTable& table);

/// Header derived from records: field names in first-seen order.
std::vector<std::string> header_of(const std::vector<RawRecord>& records);

}  // namespace ede::mapping
