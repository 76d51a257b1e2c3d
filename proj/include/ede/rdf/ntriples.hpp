#pragma once

#include "ede/rdf/graph.hpp"

#include <string>
#include <string_view>

namespace ede::rdf {

/// Parses N-Triples text. Blank and '#' comment lines are skipped. Stops at
/// the first malformed line with a ParseError carrying its line number.
Graph parse_ntriples(std::string_view text);

/// One statement per line, lines sorted bytewise, each terminated by '\n'.
/// Equal graphs serialize to identical bytes.
std::string serialize_ntriples(const Graph& graph);

/// Appends UTF-8 for code point `cp` to `out`. Returns false for surrogates
/// and values beyond U+10FFFF.
bool append_utf8(std::string& out, char32_t cp);

}  // namespace ede::rdf
