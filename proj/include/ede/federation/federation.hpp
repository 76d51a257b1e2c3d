#pragma once

#include "ede/error.hpp"
#include "ede/federation/catalog.hpp"
#include "ede/sparql/query.hpp"
#include "ede/sparql/results.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ede::federation {

/// A triple pattern no catalog source can answer.
class UnanswerablePatternError : public Error {
public:
    UnanswerablePatternError(std::size_t index, const std::string& pattern)
        : Error("no source can answer pattern " + std::to_string(index) + ": " + pattern), index_(index) {}

    std::size_t pattern_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A source failed or refused a subquery. No partial answer is returned.
class FederationError : public Error {
public:
    FederationError(std::string source, const std::string& message)
        : Error("source '" + source + "': " + message), source_(std::move(source)) {}

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
};

/// Relevant source ids per pattern index.
using SourceSelection = std::vector<std::set<std::string>>;

/// True if `source` may hold matches for `pattern`.
bool is_relevant(const sparql::TriplePattern& pattern, const SourceDescription& source);

SourceSelection select_sources(const sparql::Query& query, const FederationCatalog& catalog);

struct Subquery {
    /// Sources the subquery is sent to; results are unioned.
    std::vector<std::string> sources;
    sparql::Query query;
    std::vector<std::size_t> pattern_indices;
};

struct JoinEdge {
    std::size_t left;
    std::size_t right;
    std::vector<std::string> shared;

    bool cartesian() const noexcept { return shared.empty(); }
};

struct DecomposedQuery {
    sparql::Query original;
    std::vector<Subquery> subqueries;
    std::vector<JoinEdge> join_graph;
    /// Filters evaluated after the joins.
    std::vector<sparql::Filter> residual_filters;
};

struct DecomposeOptions {
    /// Push single-variable filters into every subquery binding the variable.
    bool push_filters = true;
};

/// Patterns whose only relevant source is S form one subquery for S; a
/// pattern with several relevant sources forms its own subquery sent to all
/// of them.
DecomposedQuery decompose(const sparql::Query& query, const SourceSelection& selection,
                          DecomposeOptions options = {});

/// Answers subquery text for one source. Implementations must tolerate
/// concurrent calls.
class SourceClient {
public:
    virtual ~SourceClient() = default;
    virtual sparql::SolutionSequence query(const std::string& query_text) = 0;
};

using ClientMap = std::map<std::string, std::shared_ptr<SourceClient>>;

struct ExecuteOptions {
    /// Fixed join order as subquery indexes; default is greedy by ascending size.
    std::optional<std::vector<std::size_t>> join_order;
};

/// Dispatches subqueries concurrently, unions per-subquery results and joins
/// them. Throws FederationError if any source fails.
sparql::SolutionSequence execute_federated(const DecomposedQuery& plan, const ClientMap& clients,
                                           ExecuteOptions options = {});

/// Builds a client for a catalog source (e.g. a connector client).
using ClientFactory = std::function<std::shared_ptr<SourceClient>(const SourceDescription&)>;

/// parse -> select_sources -> decompose -> execute_federated. Clients are
/// created only after the query has been parsed and planned.
sparql::SolutionSequence federated_query(const std::string& text, const FederationCatalog& catalog,
                                         const ClientFactory& make_client);

/// Plan as JSON: subqueries (sources, pattern indexes, text), join edges and
/// residual filters.
nlohmann::ordered_json plan_to_json(const DecomposedQuery& plan);

/// Evaluates subquery text against an in-memory graph.
class LocalGraphClient : public SourceClient {
public:
    explicit LocalGraphClient(std::shared_ptr<const rdf::Graph> graph) : graph_(std::move(graph)) {}
    sparql::SolutionSequence query(const std::string& query_text) override;

private:
    std::shared_ptr<const rdf::Graph> graph_;
};

}  // namespace ede::federation
