#include "ede/rdf/term.hpp"

#include "ede/error.hpp"

#include <cctype>

namespace ede::rdf {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void hash_combine(std::size_t& seed, std::size_t value) {
    seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

bool is_valid_iri(std::string_view iri) {
    auto colon = iri.find(':');
    if (colon == std::string_view::npos || colon == 0 || !is_alpha(iri[0])) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        char c = iri[i];
        if (!is_alnum(c) && c != '+' && c != '-' && c != '.') return false;
    }
    for (char c : iri) {
        auto u = static_cast<unsigned char>(c);
        if (u <= 0x20) return false;
        switch (c) {
            case '<': case '>': case '"': case '{': case '}':
            case '|': case '^': case '`': case '\\':
                return false;
            default:
                break;
        }
    }
    return true;
}

bool is_valid_blank_label(std::string_view label) {
    if (label.empty() || label.back() == '.') return false;
    for (char c : label) {
        if (!is_alnum(c) && c != '_' && c != '-' && c != '.') return false;
    }
    return true;
}

bool is_valid_language_tag(std::string_view tag) {
    if (tag.empty()) return false;
    bool first = true;
    std::size_t run = 0;
    for (char c : tag) {
        if (c == '-') {
            if (run == 0) return false;
            first = false;
            run = 0;
            continue;
        }
        if (first ? !is_alpha(c) : !is_alnum(c)) return false;
        ++run;
    }
    return run > 0;
}

Term Term::iri(std::string value) {
    if (!is_valid_iri(value)) throw ValidationError("invalid IRI '" + value + "'");
    return Term(Kind::Iri, std::move(value), {}, {});
}

Term Term::literal(std::string lexical, std::string datatype) {
    if (datatype.empty()) datatype = std::string(kXsdString);
    if (!is_valid_iri(datatype)) throw ValidationError("invalid datatype IRI '" + datatype + "'");
    if (datatype == kRdfLangString) {
        throw ValidationError("rdf:langString literal requires a language tag");
    }
    return Term(Kind::Literal, std::move(lexical), std::move(datatype), {});
}

Term Term::lang_literal(std::string lexical, std::string language) {
    if (!is_valid_language_tag(language)) {
        throw ValidationError("invalid language tag '" + language + "'");
    }
    return Term(Kind::Literal, std::move(lexical), std::string(kRdfLangString), std::move(language));
}

Term Term::blank(std::string label) {
    if (!is_valid_blank_label(label)) throw ValidationError("invalid blank node label '" + label + "'");
    return Term(Kind::BlankNode, std::move(label), {}, {});
}

std::string escape_string(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    static constexpr char kHex[] = "0123456789ABCDEF";
                    out += "\\u00";
                    out.push_back(kHex[(c >> 4) & 0xf]);
                    out.push_back(kHex[c & 0xf]);
                } else {
                    out.push_back(c);
                }
        }
    }
    return out;
}

std::string Term::to_ntriples() const {
    switch (kind_) {
        case Kind::Iri:
            return "<" + value_ + ">";
        case Kind::BlankNode:
            return "_:" + value_;
        case Kind::Literal: {
            std::string out = "\"" + escape_string(value_) + "\"";
            if (!language_.empty()) return out + "@" + language_;
            if (datatype_ != kXsdString) out += "^^<" + datatype_ + ">";
            return out;
        }
    }
    return {};
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
    std::size_t seed = static_cast<std::size_t>(t.kind());
    hash_combine(seed, std::hash<std::string>{}(t.value()));
    if (t.is_literal()) {
        hash_combine(seed, std::hash<std::string>{}(t.datatype()));
        hash_combine(seed, std::hash<std::string>{}(t.language()));
    }
    return seed;
}

std::string Triple::to_ntriples() const {
    return subject.to_ntriples() + " " + predicate.to_ntriples() + " " + object.to_ntriples() + " .";
}

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
    TermHash h;
    std::size_t seed = h(t.subject);
    hash_combine(seed, h(t.predicate));
    hash_combine(seed, h(t.object));
    return seed;
}

void validate(const Triple& triple) {
    if (triple.subject.is_literal()) {
        throw ValidationError("triple subject must be an IRI or blank node, got literal " +
                              triple.subject.to_ntriples());
    }
    if (!triple.predicate.is_iri()) {
        throw ValidationError("triple predicate must be an IRI, got " + triple.predicate.to_ntriples());
    }
}

}  // namespace ede::rdf
