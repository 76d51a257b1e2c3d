#pragma once

#include "ede/rdf/term.hpp"

#include <compare>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ede::sparql {

/// A query variable; the name excludes the leading '?' or '$'.
struct Variable {
    std::string name;

    friend bool operator==(const Variable&, const Variable&) = default;
    friend std::strong_ordering operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<rdf::Term, Variable>;

inline bool is_variable(const PatternTerm& t) { return std::holds_alternative<Variable>(t); }
inline const Variable* as_variable(const PatternTerm& t) { return std::get_if<Variable>(&t); }
inline const rdf::Term* as_term(const PatternTerm& t) { return std::get_if<rdf::Term>(&t); }

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;

    /// Distinct variable names in subject, predicate, object order.
    std::vector<std::string> variables() const;

    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op);

/// `?variable <op> constant`. Constant-on-the-left input is normalised by
/// mirroring the operator.
struct Filter {
    Variable variable;
    CompareOp op;
    rdf::Term constant;

    friend bool operator==(const Filter&, const Filter&) = default;
};

/// Parsed query with every prefixed name already expanded.
struct Query {
    /// Declared prefixes in declaration order (kept for printing only).
    std::vector<std::pair<std::string, std::string>> prefixes;
    std::vector<Variable> projection;
    bool select_all = false;
    bool distinct = false;
    std::vector<TriplePattern> patterns;
    std::vector<Filter> filters;
    std::optional<std::size_t> limit;

    /// Variables of all patterns in first-appearance order.
    std::vector<std::string> pattern_variables() const;
    /// Projected names; `SELECT *` resolves to pattern_variables().
    std::vector<std::string> projected_names() const;
    /// Projected variables that occur in no pattern and no filter. They stay
    /// unbound in every solution.
    std::vector<std::string> unbound_projection() const;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Renders SPARQL text that parses back to an equal Query. IRIs are
/// abbreviated with the declared prefixes where the local part allows it.
std::string to_string(const Query& query);
std::string to_string(const TriplePattern& pattern,
                      const std::vector<std::pair<std::string, std::string>>& prefixes = {});
std::string to_string(const PatternTerm& term,
                      const std::vector<std::pair<std::string, std::string>>& prefixes = {});

}  // namespace ede::sparql
