#pragma once

#include "ede/rdf/graph.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ede::shapes {

enum class NodeKind { Iri, Literal };

struct PropertyConstraint {
    std::string path;
    std::optional<std::size_t> min_count{};
    std::optional<std::size_t> max_count{};
    std::optional<std::string> datatype{};
    std::optional<NodeKind> node_kind{};
    std::optional<std::string> value_class{};
    std::optional<std::vector<rdf::Term>> in{};
};

struct Shape {
    std::string id;
    std::string target_class;
    std::vector<PropertyConstraint> properties;
};

// Constraint kind names as they appear in reports.
inline constexpr std::string_view kMinCount = "min-count";
inline constexpr std::string_view kMaxCount = "max-count";
inline constexpr std::string_view kDatatype = "datatype";
inline constexpr std::string_view kNodeKind = "node-kind";
inline constexpr std::string_view kClass = "class";
inline constexpr std::string_view kIn = "in";

struct Violation {
    rdf::Term focus_node;
    std::string shape_id;
    std::string constraint;
    std::string path;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool conforms() const noexcept { return violations.empty(); }
    std::size_t count(std::string_view constraint) const;
};

/// Parses the YAML shape dialect:
///
///   prefixes: {energy: "http://w3id.org/energy/"}
///   shapes:
///     - id: CapacityShape
///       target_class: energy:GenerationCapacity
///       properties:
///         - {path: energy:country, min_count: 1, max_count: 1, node_kind: Literal}
///         - {path: energy:measure, datatype: xsd:decimal}
///         - {path: energy:productionType, class: energy:ProductionType}
///         - {path: energy:agg_year, in: ["2019", "2020"]}
///
/// `in` entries are IRIs when written <iri> or with a declared prefix,
/// otherwise plain literals. Throws ConfigError with the key path.
std::vector<Shape> parse_shapes(std::string_view text);

/// One violation per (focus node, failed constraint), sorted by focus node,
/// then path; constraints of one property keep declared order.
ValidationReport validate(const rdf::Graph& graph, const std::vector<Shape>& shapes);

/// {"conforms": bool, "violations": [{focusNode, shape, constraint, path, message}]}
std::string report_to_json(const ValidationReport& report);

}  // namespace ede::shapes
