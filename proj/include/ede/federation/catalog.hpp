#pragma once

#include "ede/rdf/graph.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ede::federation {

/// Capability metadata of one source: which classes and predicates its graph
/// can answer. A class entry of "*" matches any class.
struct SourceDescription {
    std::string id;
    std::string endpoint;
    /// Contract the consumer presents to this source; may be empty for local use.
    std::string contract;
    std::vector<std::string> classes;
    std::set<std::string> predicates;
    std::map<std::string, std::size_t> predicate_counts;

    bool class_wildcard() const;
    bool has_class(std::string_view iri) const;

    friend bool operator==(const SourceDescription&, const SourceDescription&) = default;
};

struct FederationCatalog {
    /// Node id the federation engine acts as when talking to sources.
    std::string consumer;
    std::vector<SourceDescription> sources;

    const SourceDescription* find(std::string_view id) const;
};

/// Describes a graph: its rdf:type objects, its predicates and their counts.
SourceDescription describe_graph(std::string id, const rdf::Graph& graph);

/// Parses a catalog document:
///
///   consumer: tso
///   prefixes: {energy: "http://w3id.org/energy/"}
///   sources:
///     - id: local
///       endpoint: 127.0.0.1:7401
///       contract: tso-local-2020
///       classes: [energy:GenerationCapacity]
///       predicates: [energy:country, energy:measure]
///
/// Throws ConfigError on structural problems, duplicate ids, an empty source
/// list or a source without predicates.
FederationCatalog parse_catalog(std::string_view text);

nlohmann::json description_to_json(const SourceDescription& source);
/// Throws ede::Error on malformed input.
SourceDescription description_from_json(const nlohmann::json& doc);

}  // namespace ede::federation
