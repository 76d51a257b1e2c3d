#pragma once

#include "ede/mapping/records.hpp"
#include "ede/rdf/graph.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ede::mapping {

/// String with {field} placeholders, e.g. "http://w3id.org/energy/capacity/{country}-{year}".
class Template {
public:
    /// Throws ValidationError on an unclosed or empty placeholder.
    static Template parse(std::string_view text);

    /// Placeholder names in order of appearance (may repeat).
    std::vector<std::string> fields() const;

    /// Substitutes record values, percent-encoding everything outside the
    /// RFC 3986 unreserved set. Nullopt if a referenced value is missing.
    std::optional<std::string> render(const RawRecord& record) const;

    const std::string& text() const noexcept { return text_; }

    friend bool operator==(const Template& a, const Template& b) { return a.text_ == b.text_; }

private:
    struct Segment {
        bool is_field;
        std::string value;
    };
    std::string text_;
    std::vector<Segment> segments_;
};

std::string percent_encode(std::string_view value);

struct RecordFilter {
    std::string field;
    std::string equals;
};

struct LogicalSource {
    /// Key used to route records to this map; defaults to `path`.
    std::string name;
    std::string path;
    SourceFormat format = SourceFormat::Csv;
    /// Declared schema; when non-empty, placeholders are checked at parse time.
    std::vector<std::string> fields;
    std::optional<RecordFilter> filter;
};

/// Literal built from a field value, typed by `datatype` or tagged by `language`.
struct FieldObject {
    std::string field;
    std::optional<std::string> datatype;
    std::optional<std::string> language;
};

struct ConstantObject {
    rdf::Term term;
};

/// IRI rendered from a template.
struct TemplateObject {
    Template iri;
};

using ObjectSpec = std::variant<FieldObject, ConstantObject, TemplateObject>;

struct PredicateObjectMap {
    std::string predicate;
    ObjectSpec object;
};

struct TripleMap {
    std::string id;
    LogicalSource source;
    Template subject;
    std::optional<std::string> subject_class;
    std::vector<PredicateObjectMap> predicate_objects;

    /// Every field the map reads (templates, field objects, filter).
    std::vector<std::string> referenced_fields() const;
};

struct MappingDocument {
    std::vector<TripleMap> maps;
};

/// Parses the YAML mapping dialect:
///
///   prefixes: {energy: "http://w3id.org/energy/"}
///   maps:
///     - id: capacity
///       source: {path: capacity.csv, format: csv, fields: [...], filter: {field: f, equals: v}}
///       subject: {template: "http://.../{id}", class: energy:GenerationCapacity}
///       po:
///         - {predicate: energy:country, field: country}
///         - {predicate: energy:measure, field: measure, datatype: xsd:decimal}
///         - {predicate: energy:productionType, template: "http://.../{type}"}
///         - {predicate: energy:source, constant: energy:TransparencyPlatform}
///
/// A `constant` is an IRI when written as <iri> or with a declared prefix,
/// otherwise a literal (optionally with datatype/language).
/// Throws ConfigError with the key path ("maps[0].po[2].field").
MappingDocument parse_mapping(std::string_view text);

/// Throws ConfigError naming the first referenced field missing from `header`.
void check_fields(const TripleMap& map, std::size_t map_index, const std::vector<std::string>& header);

struct RecordError {
    std::size_t map_index;
    std::size_t record_index;
    std::string message;
};

struct MappingResult {
    rdf::Graph graph;
    std::vector<RecordError> errors;
};

/// Applies every map of the document to `records`.
MappingResult apply_mapping(const MappingDocument& doc, std::span<const RawRecord> records);

/// Applies each map to the records of its source name; maps whose source is
/// absent from `by_source` contribute nothing.
MappingResult apply_mapping(const MappingDocument& doc,
                            const std::map<std::string, std::vector<RawRecord>>& by_source);

/// Reads every distinct logical source (paths relative to `base_dir`) and
/// checks its header against the maps reading it.
std::map<std::string, std::vector<RawRecord>> load_sources(const MappingDocument& doc,
                                                           const std::filesystem::path& base_dir);

/// Largest possible output: per map, accepted records × (class triple + po entries).
std::size_t triple_bound(const MappingDocument& doc,
                         const std::map<std::string, std::vector<RawRecord>>& by_source);

std::optional<SourceFormat> format_from_name(std::string_view name);

}  // namespace ede::mapping
