#pragma once

#include "ede/rdf/term.hpp"

#include "json.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ede::sparql {

using Row = std::vector<std::optional<rdf::Term>>;

/// Variable header plus rows aligned with it; an empty optional is an
/// unbound variable.
struct SolutionSequence {
    std::vector<std::string> variables;
    std::vector<Row> rows;

    std::optional<std::size_t> column(std::string_view variable) const;

    /// Orders rows column by column: unbound first, then by N-Triples text.
    void sort_rows();
    /// Removes duplicate rows (implies sort_rows()).
    void deduplicate();

    /// Rows as a set, for order-insensitive comparison.
    std::set<Row> tuple_set() const;
};

/// SPARQL 1.1 Query Results JSON: {"head":{"vars":[...]},"results":{"bindings":[...]}}.
/// Rows are emitted in sort_rows() order; unbound variables are omitted.
nlohmann::json results_to_json(const SolutionSequence& solutions);
/// Inverse of results_to_json. Throws ede::Error on malformed documents.
SolutionSequence results_from_json(const nlohmann::json& doc);

/// Pretty-printed JSON text (two-space indent, trailing newline).
std::string serialize_results(const SolutionSequence& solutions);
SolutionSequence parse_results(std::string_view text);

}  // namespace ede::sparql
