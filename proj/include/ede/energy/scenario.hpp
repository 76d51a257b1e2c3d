#pragma once

#include "ede/connector/client.hpp"
#include "ede/connector/node.hpp"
#include "ede/connector/server.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ede::energy {

enum class StepKind { Catalog, Query, Federate, Publish };

std::string_view to_string(StepKind kind);

struct FederateSource {
    std::string node;
    std::string contract;
};

struct ScenarioStep {
    std::string tag;
    StepKind kind = StepKind::Query;
    std::string note;
    std::string sender;
    /// Catalog and query steps.
    std::string receiver;
    std::string contract;
    /// Query and federate steps.
    std::string query;
    std::vector<FederateSource> sources;
    /// Publish steps: N-Triples inserted into the sender's graph.
    std::string payload;
    /// Rejection the step must provoke; unset means it must be served.
    std::optional<connector::RejectionReason> expect;
};

struct ScenarioScript {
    std::vector<ScenarioStep> steps;

    /// Requirement tags RQ-1..RQ-8 that no step carries.
    std::vector<std::string> missing_tags() const;
};

/// Scenario file:
///
///   steps:
///     - tag: RQ-2
///       kind: query            # catalog | query | federate | publish
///       sender: tso
///       receiver: supplier
///       contract: c-tso-supplier
///       query: "SELECT ..."    # or query_file: q.rq
///       expect: CONTRACT_EXPIRED
///     - tag: RQ-4
///       kind: federate
///       sender: tso
///       sources: [{node: tso, contract: c-tso-local}, {node: supplier, contract: c-tso-supplier}]
///       query_file: ../queries/load_bids.rq
///     - tag: RQ-7
///       kind: publish
///       sender: supplier
///       payload: forecast.nt
///
/// Files resolve against `base_dir` and are read at parse time.
ScenarioScript parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
ScenarioScript load_scenario(const std::filesystem::path& file);

struct Exchange {
    std::string receiver;
    connector::MessageType request;
    std::optional<connector::MessageType> response;
    std::string correlation_id;
    std::optional<std::uint64_t> provenance_record_id;
    std::optional<connector::RejectionReason> rejection;
};

struct TranscriptEntry {
    std::size_t step = 0;
    std::string tag;
    StepKind kind = StepKind::Query;
    std::string sender;
    std::string receiver;
    std::vector<Exchange> exchanges;
    std::size_t rows = 0;
    std::size_t inserted = 0;
    std::optional<connector::RejectionReason> expected;
    bool ok = true;
    std::string message;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;
    /// Tag and message of the step that failed the scenario, if any.
    std::optional<std::string> failed_tag;
    std::string failure;

    bool ok() const noexcept { return !failed_tag; }
    std::set<std::string> tags() const;
    std::size_t rejections(connector::RejectionReason reason) const;
};

nlohmann::ordered_json entry_to_json(const TranscriptEntry& entry);
/// One JSON object per line.
std::string transcript_to_jsonl(const Transcript& transcript);

struct ScenarioNode {
    connector::Node* node = nullptr;
    std::shared_ptr<connector::Transport> transport;
};

using ScenarioNodes = std::map<std::string, ScenarioNode>;

/// Runs the steps in order. A step that is rejected without expecting it,
/// or that expects a rejection it does not get, stops the run and marks the
/// transcript failed with the step's tag.
Transcript run_scenario(const ScenarioScript& script, const ScenarioNodes& nodes);

/// Cross-checks the transcript against the serving nodes' provenance logs:
/// every response must carry a record id that exists on the receiver with
/// the same correlation id and a matching activity, and each node's log
/// must pass audit_log(). Returns the problems found.
std::vector<std::string> verify_transcript(const Transcript& transcript, const ScenarioNodes& nodes);

/// Node list file: `nodes: [nodes/tso/node.yaml, ...]`, relative to the file.
std::vector<connector::NodeConfig> load_node_list(const std::filesystem::path& file);

/// Nodes built from configs and served over TCP in this process.
class NodeNetwork {
public:
    /// With `ephemeral_ports` every node listens on 127.0.0.1:0 instead of
    /// its configured address.
    explicit NodeNetwork(const std::vector<connector::NodeConfig>& configs, bool ephemeral_ports = true);
    ~NodeNetwork();

    NodeNetwork(const NodeNetwork&) = delete;
    NodeNetwork& operator=(const NodeNetwork&) = delete;

    connector::Node& node(const std::string& id);
    std::string endpoint(const std::string& id) const;
    std::vector<std::string> ids() const;

    /// TCP transports to every node.
    ScenarioNodes handles();
    void stop();

private:
    std::map<std::string, std::unique_ptr<connector::Node>> nodes_;
    std::map<std::string, std::unique_ptr<connector::Server>> servers_;
};

}  // namespace ede::energy
