#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace ede::rdf {

inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";

/// True when `iri` has a URI scheme followed by ':' and none of the characters
/// that cannot appear inside an N-Triples IRI reference (whitespace, <>"{}|^`\).
bool is_valid_iri(std::string_view iri);
bool is_valid_blank_label(std::string_view label);
bool is_valid_language_tag(std::string_view tag);

/// An RDF term: IRI, literal or blank node. Comparison is purely syntactic;
/// "01"^^xsd:integer and "1"^^xsd:integer are different terms.
class Term {
public:
    enum class Kind : std::uint8_t { Iri, Literal, BlankNode };

    /// Throws ValidationError if `value` is not a valid IRI.
    static Term iri(std::string value);
    /// Literal with explicit datatype; defaults to xsd:string.
    static Term literal(std::string lexical, std::string datatype = std::string(kXsdString));
    /// Language-tagged string; datatype is rdf:langString.
    static Term lang_literal(std::string lexical, std::string language);
    static Term blank(std::string label);

    Kind kind() const noexcept { return kind_; }
    bool is_iri() const noexcept { return kind_ == Kind::Iri; }
    bool is_literal() const noexcept { return kind_ == Kind::Literal; }
    bool is_blank() const noexcept { return kind_ == Kind::BlankNode; }

    /// IRI string, literal lexical form, or blank node label.
    const std::string& value() const noexcept { return value_; }
    /// Datatype IRI of a literal; empty for IRIs and blank nodes.
    const std::string& datatype() const noexcept { return datatype_; }
    /// Language tag of a literal, empty when absent.
    const std::string& language() const noexcept { return language_; }

    /// N-Triples rendering: <iri>, "lex"^^<dt>, "lex"@lang or _:label.
    std::string to_ntriples() const;

    friend bool operator==(const Term&, const Term&) = default;
    friend std::strong_ordering operator<=>(const Term&, const Term&) = default;

private:
    Term(Kind kind, std::string value, std::string datatype, std::string language)
        : kind_(kind),
          value_(std::move(value)),
          datatype_(std::move(datatype)),
          language_(std::move(language)) {}

    Kind kind_;
    std::string value_;
    std::string datatype_;
    std::string language_;
};

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept;
};

/// Escapes a lexical form for use between double quotes in N-Triples or SPARQL.
std::string escape_string(std::string_view text);

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    std::string to_ntriples() const;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend std::strong_ordering operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept;
};

/// Throws ValidationError if the subject is a literal or the predicate is not an IRI.
void validate(const Triple& triple);

}  // namespace ede::rdf
