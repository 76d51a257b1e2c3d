#pragma once

#include "ede/rdf/graph.hpp"
#include "ede/sparql/query.hpp"
#include "ede/sparql/results.hpp"

namespace ede::sparql {

/// Evaluates the basic graph pattern with index nested-loop joins. Patterns
/// run in greedy selectivity order (most bound positions first, then the
/// smallest index bucket). Filters apply as soon as their variable is bound;
/// DISTINCT and LIMIT apply last, on sorted rows.
SolutionSequence evaluate(const Query& query, const rdf::Graph& graph);

/// True if `value` satisfies the filter. Two numeric XSD literals compare by
/// value; otherwise = and != test term identity and the ordering operators
/// compare lexical forms, failing when only one side is numeric. An unbound
/// value never satisfies a filter.
bool filter_accepts(const Filter& filter, const rdf::Term* value);

bool is_numeric_datatype(std::string_view datatype_iri);

/// The pattern execution order chosen by evaluate(), as indexes into
/// query.patterns.
std::vector<std::size_t> plan_order(const Query& query, const rdf::Graph& graph);

}  // namespace ede::sparql
