#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ede::rdf {

/// Prefix label → namespace IRI, used by the YAML document dialects to
/// shorten IRIs. rdf, rdfs, xsd, owl and prov are predeclared.
class PrefixMap {
public:
    PrefixMap();

    void declare(std::string label, std::string base);
    std::optional<std::string> lookup(std::string_view label) const;

    /// Expands "<iri>", "label:local" (label declared) or an absolute IRI.
    /// Throws ValidationError when the result is not a valid IRI.
    std::string expand(std::string_view text) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace ede::rdf
