#pragma once

#include "ede/error.hpp"
#include "ede/sparql/query.hpp"

#include <string>
#include <string_view>

namespace ede::sparql {

/// A prefixed name used a prefix with no PREFIX declaration.
class UndeclaredPrefixError : public ParseError {
public:
    UndeclaredPrefixError(std::size_t line, std::size_t column, std::string prefix)
        : ParseError(line, column, "undeclared prefix '" + prefix + ":'"), prefix_(std::move(prefix)) {}

    const std::string& prefix() const noexcept { return prefix_; }

private:
    std::string prefix_;
};

/// Parses the supported subset:
///
///   PREFIX label: <iri> ...
///   SELECT [DISTINCT] (?var ... | *)
///   [WHERE] { triple patterns separated by '.', with ';' and ',' lists,
///             FILTER(?v op constant [&& ...]) }
///   [LIMIT n]
///
/// Keywords are case-insensitive, `a` stands for rdf:type, `$x` equals `?x`.
/// Prefixed names are expanded immediately.
Query parse_query(std::string_view text);

}  // namespace ede::sparql
