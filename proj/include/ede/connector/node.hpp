#pragma once

#include "ede/connector/authorize.hpp"
#include "ede/connector/provenance.hpp"
#include "ede/federation/catalog.hpp"
#include "ede/rdf/graph.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ede::connector {

/// Node configuration file:
///
///   id: tso
///   resource: tso-load
///   listen: 127.0.0.1:7401
///   graphs: [tso.nt]
///   materialize: [mappings/load.yaml]
///   contracts: contracts.yaml
///   provenance_log: logs/tso.jsonl
///
/// Relative paths resolve against the config file's directory. Mapping
/// documents under `materialize` are applied at startup; their logical
/// sources resolve against the mapping document's directory.
struct NodeConfig {
    std::string id;
    std::string resource;
    std::string listen = "127.0.0.1:0";
    std::vector<std::filesystem::path> graphs;
    std::vector<std::filesystem::path> materialize;
    std::filesystem::path contracts;
    std::optional<std::filesystem::path> provenance_log;
};

NodeConfig parse_node_config(std::string_view text, const std::filesystem::path& base_dir);
NodeConfig load_node_config(const std::filesystem::path& file);

/// A data-space node: one graph resource behind contract checks. Requests
/// are handled concurrently against immutable graph snapshots; every decoded
/// request leaves exactly one provenance record.
class Node {
public:
    using Clock = std::function<util::Timestamp()>;

    Node(NodeIdentity identity, ContractStore contracts, rdf::Graph graph,
         std::unique_ptr<ProvenanceLog> log = std::make_unique<ProvenanceLog>(), Clock clock = util::now_utc);

    /// Loads graphs, materializes mappings, reads contracts and opens the log.
    static std::unique_ptr<Node> from_config(const NodeConfig& config);

    const NodeIdentity& identity() const noexcept { return identity_; }
    const ContractStore& contracts() const noexcept { return contracts_; }
    const ProvenanceLog& provenance() const noexcept { return *log_; }

    Message handle(const Message& request);
    Message handle(const Message& request, util::Timestamp now);

    /// Decodes, handles and encodes one wire payload. Returns nullopt when no
    /// response can be addressed (invalid JSON or no correlation id); such
    /// payloads are not logged.
    std::optional<std::string> handle_payload(std::string_view payload);

    std::shared_ptr<const rdf::Graph> snapshot() const;
    /// Copy-on-write insert; readers keep their snapshot. Returns the new size.
    std::size_t publish(const rdf::Graph& additions);

    /// Capability description of the current graph.
    federation::SourceDescription describe() const;
    void set_endpoint(std::string endpoint);

private:
    Message respond(const Message& request, util::Timestamp now, ProvenanceRecord draft, MessageType type,
                    nlohmann::json body);

    NodeIdentity identity_;
    ContractStore contracts_;
    std::unique_ptr<ProvenanceLog> log_;
    Clock clock_;
    mutable std::mutex mutex_;
    std::shared_ptr<const rdf::Graph> graph_;
    std::string endpoint_;
};

}  // namespace ede::connector
