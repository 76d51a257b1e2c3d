#include "ede/rdf/prefixes.hpp"

#include "ede/error.hpp"
#include "ede/rdf/term.hpp"

namespace ede::rdf {

PrefixMap::PrefixMap() {
    declare("rdf", std::string(kRdf));
    declare("rdfs", std::string(kRdfs));
    declare("xsd", std::string(kXsd));
    declare("owl", std::string(kOwl));
    declare("prov", "http://www.w3.org/ns/prov#");
}

void PrefixMap::declare(std::string label, std::string base) {
    entries_[std::move(label)] = std::move(base);
}

std::optional<std::string> PrefixMap::lookup(std::string_view label) const {
    auto it = entries_.find(std::string(label));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string PrefixMap::expand(std::string_view text) const {
    std::string out;
    if (text.size() >= 2 && text.front() == '<' && text.back() == '>') {
        out = std::string(text.substr(1, text.size() - 2));
    } else if (auto colon = text.find(':'); colon != std::string_view::npos) {
        auto label = text.substr(0, colon);
        auto local = text.substr(colon + 1);
        if (auto base = lookup(label)) {
            out = *base + std::string(local);
        } else if (local.starts_with("//") || label == "urn") {
            out = std::string(text);
        } else {
            throw ValidationError("undeclared prefix '" + std::string(label) + "'");
        }
    } else {
        throw ValidationError("'" + std::string(text) + "' is neither an IRI nor a prefixed name");
    }
    if (!is_valid_iri(out)) throw ValidationError("invalid IRI '" + out + "'");
    return out;
}

}  // namespace ede::rdf
