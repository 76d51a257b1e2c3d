#include "ede/energy/scenario.hpp"

#include "ede/error.hpp"
#include "ede/federation/federation.hpp"
#include "ede/rdf/ntriples.hpp"
#include "ede/sparql/results.hpp"
#include "ede/util/files.hpp"
#include "ede/util/yaml.hpp"

#include <fmt/core.h>

#include <mutex>

namespace ede::energy {

namespace fs = std::filesystem;
using connector::MessageType;
using connector::RejectionReason;
using util::index_path;
using util::key_path;

std::string_view to_string(StepKind kind) {
    switch (kind) {
        case StepKind::Catalog: return "catalog";
        case StepKind::Query: return "query";
        case StepKind::Federate: return "federate";
        case StepKind::Publish: return "publish";
    }
    return "query";
}

std::vector<std::string> ScenarioScript::missing_tags() const {
    std::set<std::string> seen;
    for (const auto& s : steps) seen.insert(s.tag);
    std::vector<std::string> missing;
    for (int i = 1; i <= 8; ++i) {
        auto tag = fmt::format("RQ-{}", i);
        if (!seen.count(tag)) missing.push_back(tag);
    }
    return missing;
}

ScenarioScript parse_scenario(std::string_view text, const fs::path& base_dir) {
    auto root = util::load_yaml(text);
    ScenarioScript script;
    if (!root || root.IsNull()) return script;
    util::expect_map(root, "");
    util::check_keys(root, "", {"steps"});
    auto steps = root["steps"];
    if (!steps || steps.IsNull()) return script;
    util::expect_sequence(steps, "steps");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        auto path = index_path("steps", i);
        const auto& node = steps[i];
        util::expect_map(node, path);
        util::check_keys(node, path,
                         {"tag", "kind", "note", "sender", "receiver", "contract", "query", "query_file", "sources",
                          "payload", "expect"});
        ScenarioStep step;
        step.tag = util::require_string(node, path, "tag");
        step.note = util::optional_string(node, path, "note").value_or("");
        step.sender = util::require_string(node, path, "sender");
        auto kind = util::require_string(node, path, "kind");
        if (kind == "catalog") {
            step.kind = StepKind::Catalog;
        } else if (kind == "query") {
            step.kind = StepKind::Query;
        } else if (kind == "federate") {
            step.kind = StepKind::Federate;
        } else if (kind == "publish") {
            step.kind = StepKind::Publish;
        } else {
            throw ConfigError(key_path(path, "kind"), "unknown step kind '" + kind + "'");
        }
        if (step.kind == StepKind::Catalog || step.kind == StepKind::Query) {
            step.receiver = util::require_string(node, path, "receiver");
            step.contract = util::require_string(node, path, "contract");
        }
        if (step.kind == StepKind::Query || step.kind == StepKind::Federate) {
            auto inline_query = util::optional_string(node, path, "query");
            auto query_file = util::optional_string(node, path, "query_file");
            if (inline_query.has_value() == query_file.has_value()) {
                throw ConfigError(path, "exactly one of 'query' or 'query_file' is required");
            }
            step.query = inline_query ? *inline_query : util::read_file(util::resolve(base_dir, *query_file));
        }
        if (step.kind == StepKind::Federate) {
            auto sources_path = key_path(path, "sources");
            auto sources = util::require(node, path, "sources");
            util::expect_sequence(sources, sources_path);
            if (sources.size() == 0) throw ConfigError(sources_path, "at least one source is required");
            for (std::size_t j = 0; j < sources.size(); ++j) {
                auto spath = index_path(sources_path, j);
                util::expect_map(sources[j], spath);
                util::check_keys(sources[j], spath, {"node", "contract"});
                step.sources.push_back(
                    {util::require_string(sources[j], spath, "node"), util::require_string(sources[j], spath, "contract")});
            }
        }
        if (step.kind == StepKind::Publish) {
            step.payload = util::read_file(util::resolve(base_dir, util::require_string(node, path, "payload")));
        }
        if (auto expect = util::optional_string(node, path, "expect")) {
            step.expect = connector::rejection_reason_from_string(*expect);
            if (!step.expect) throw ConfigError(key_path(path, "expect"), "unknown rejection reason '" + *expect + "'");
        }
        script.steps.push_back(std::move(step));
    }
    return script;
}

ScenarioScript load_scenario(const fs::path& file) { return parse_scenario(util::read_file(file), file.parent_path()); }

std::set<std::string> Transcript::tags() const {
    std::set<std::string> out;
    for (const auto& e : entries) out.insert(e.tag);
    return out;
}

std::size_t Transcript::rejections(RejectionReason reason) const {
    std::size_t n = 0;
    for (const auto& e : entries) {
        for (const auto& x : e.exchanges) n += x.rejection == reason;
    }
    return n;
}

nlohmann::ordered_json entry_to_json(const TranscriptEntry& entry) {
    nlohmann::ordered_json out;
    out["step"] = entry.step;
    out["tag"] = entry.tag;
    out["kind"] = to_string(entry.kind);
    out["sender"] = entry.sender;
    if (!entry.receiver.empty()) out["receiver"] = entry.receiver;
    auto& exchanges = out["exchanges"] = nlohmann::ordered_json::array();
    for (const auto& x : entry.exchanges) {
        nlohmann::ordered_json j;
        j["receiver"] = x.receiver;
        j["requestType"] = to_string(x.request);
        j["responseType"] = x.response ? nlohmann::ordered_json(to_string(*x.response)) : nullptr;
        j["correlationId"] = x.correlation_id;
        j["provenanceRecordId"] = x.provenance_record_id ? nlohmann::ordered_json(*x.provenance_record_id) : nullptr;
        if (x.rejection) j["rejection"] = to_string(*x.rejection);
        exchanges.push_back(std::move(j));
    }
    if (entry.kind == StepKind::Publish) {
        out["inserted"] = entry.inserted;
    } else if (entry.kind != StepKind::Catalog) {
        out["rows"] = entry.rows;
    }
    out["expected"] = entry.expected ? to_string(*entry.expected) : "served";
    out["ok"] = entry.ok;
    if (!entry.message.empty()) out["message"] = entry.message;
    return out;
}

std::string transcript_to_jsonl(const Transcript& transcript) {
    std::string out;
    for (const auto& e : transcript.entries) out += entry_to_json(e).dump() + "\n";
    return out;
}

namespace {

// Forwards to another transport and notes every exchange.
class RecordingTransport : public connector::Transport {
public:
    RecordingTransport(std::shared_ptr<connector::Transport> inner, std::string receiver,
                       std::vector<Exchange>& log, std::mutex& mutex)
        : inner_(std::move(inner)), receiver_(std::move(receiver)), log_(log), mutex_(mutex) {}

    connector::Message roundtrip(const connector::Message& request) override {
        Exchange x{receiver_, request.type, std::nullopt, request.correlation_id, std::nullopt, std::nullopt};
        try {
            auto response = inner_->roundtrip(request);
            x.response = response.type;
            if (auto it = response.body.find("provenanceRecordId"); it != response.body.end() && it->is_number_unsigned()) {
                x.provenance_record_id = it->get<std::uint64_t>();
            }
            if (response.type == MessageType::Rejection) {
                x.rejection = connector::rejection_reason_from_string(response.body.value("reason", std::string()));
            }
            record(std::move(x));
            return response;
        } catch (...) {
            record(std::move(x));
            throw;
        }
    }

private:
    void record(Exchange x) {
        std::lock_guard lock(mutex_);
        log_.push_back(std::move(x));
    }

    std::shared_ptr<connector::Transport> inner_;
    std::string receiver_;
    std::vector<Exchange>& log_;
    std::mutex& mutex_;
};

const ScenarioNode& find_node(const ScenarioNodes& nodes, const std::string& id) {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw Error("unknown node '" + id + "'");
    return it->second;
}

void run_step(const ScenarioStep& step, const ScenarioNodes& nodes, TranscriptEntry& entry) {
    std::mutex mutex;
    auto transport_to = [&](const std::string& id) {
        return std::make_shared<RecordingTransport>(find_node(nodes, id).transport, id, entry.exchanges, mutex);
    };
    switch (step.kind) {
        case StepKind::Catalog: {
            connector::ConnectorClient client(transport_to(step.receiver), step.sender);
            auto response = client.catalog(step.contract);
            if (response.type != MessageType::Rejection) connector::expect_type(response, MessageType::CatalogResponse);
            break;
        }
        case StepKind::Query: {
            connector::ConnectorClient client(transport_to(step.receiver), step.sender);
            auto response = client.query(step.contract, step.query);
            if (response.type == MessageType::Rejection) break;
            connector::expect_type(response, MessageType::QueryResult);
            entry.rows = sparql::results_from_json(response.body.at("results")).rows.size();
            break;
        }
        case StepKind::Federate: {
            federation::FederationCatalog catalog;
            catalog.consumer = step.sender;
            std::map<std::string, std::shared_ptr<connector::Transport>> transports;
            for (const auto& source : step.sources) {
                auto transport = transport_to(source.node);
                transports[source.node] = transport;
                connector::ConnectorClient client(transport, step.sender);
                auto response = client.catalog(source.contract);
                if (response.type == MessageType::Rejection) return;
                connector::expect_type(response, MessageType::CatalogResponse);
                auto description = federation::description_from_json(response.body.at("source"));
                description.id = source.node;
                description.contract = source.contract;
                catalog.sources.push_back(std::move(description));
            }
            auto factory = [&](const federation::SourceDescription& source) -> std::shared_ptr<federation::SourceClient> {
                return std::make_shared<connector::ContractSourceClient>(transports.at(source.id), step.sender,
                                                                         source.contract);
            };
            try {
                entry.rows = federation::federated_query(step.query, catalog, factory).rows.size();
            } catch (const federation::FederationError&) {
                // A source rejection is reported through the recorded exchange.
                for (const auto& x : entry.exchanges) {
                    if (x.rejection) return;
                }
                throw;
            }
            break;
        }
        case StepKind::Publish: {
            auto* node = find_node(nodes, step.sender).node;
            if (!node) throw Error("node '" + step.sender + "' is not local; cannot publish");
            auto additions = rdf::parse_ntriples(step.payload);
            auto before = node->snapshot()->size();
            entry.inserted = node->publish(additions) - before;
            break;
        }
    }
}

}  // namespace

Transcript run_scenario(const ScenarioScript& script, const ScenarioNodes& nodes) {
    Transcript transcript;
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        TranscriptEntry entry;
        entry.step = i + 1;
        entry.tag = step.tag;
        entry.kind = step.kind;
        entry.sender = step.sender;
        entry.receiver = step.receiver;
        entry.expected = step.expect;
        try {
            run_step(step, nodes, entry);
        } catch (const std::exception& e) {
            entry.ok = false;
            entry.message = e.what();
        }
        std::optional<RejectionReason> rejection;
        for (const auto& x : entry.exchanges) {
            if (x.rejection && !rejection) rejection = x.rejection;
        }
        if (entry.ok) {
            if (step.expect && rejection != step.expect) {
                entry.ok = false;
                entry.message = rejection ? fmt::format("expected {}, got {}", to_string(*step.expect), to_string(*rejection))
                                          : fmt::format("expected {}, request was served", to_string(*step.expect));
            } else if (!step.expect && rejection) {
                entry.ok = false;
                entry.message = fmt::format("unexpected rejection {}", to_string(*rejection));
            }
        }
        bool failed = !entry.ok;
        if (failed) {
            transcript.failed_tag = step.tag;
            transcript.failure = fmt::format("{} (step {}): {}", step.tag, entry.step, entry.message);
        }
        transcript.entries.push_back(std::move(entry));
        if (failed) break;
    }
    return transcript;
}

std::vector<std::string> verify_transcript(const Transcript& transcript, const ScenarioNodes& nodes) {
    std::vector<std::string> problems;
    std::map<std::string, std::map<std::uint64_t, connector::ProvenanceRecord>> logs;
    for (const auto& [id, handle] : nodes) {
        if (!handle.node) continue;
        auto records = handle.node->provenance().records();
        for (const auto& finding : connector::audit_log(records, handle.node->contracts(), handle.node->identity())) {
            problems.push_back(fmt::format("{}: record {}: {}", id, finding.record_id, finding.problem));
        }
        for (auto& r : records) logs[id].emplace(r.id, std::move(r));
    }
    for (const auto& entry : transcript.entries) {
        for (const auto& x : entry.exchanges) {
            auto where = fmt::format("step {} ({}) -> {}", entry.step, entry.tag, x.receiver);
            if (!x.response) {
                problems.push_back(where + ": no response");
                continue;
            }
            if (!x.provenance_record_id) {
                problems.push_back(where + ": response without provenance record id");
                continue;
            }
            auto log = logs.find(x.receiver);
            if (log == logs.end()) continue;
            auto it = log->second.find(*x.provenance_record_id);
            if (it == log->second.end()) {
                problems.push_back(fmt::format("{}: record {} missing", where, *x.provenance_record_id));
                continue;
            }
            const auto& record = it->second;
            if (record.correlation_id != x.correlation_id) {
                problems.push_back(fmt::format("{}: record {} has correlation id {}", where, record.id, record.correlation_id));
            }
            auto expected = *x.response == MessageType::Rejection        ? connector::Activity::QueryRejected
                            : *x.response == MessageType::CatalogResponse ? connector::Activity::CatalogServed
                                                                          : connector::Activity::QueryServed;
            if (record.activity != expected) {
                problems.push_back(fmt::format("{}: record {} is {}", where, record.id, to_string(record.activity)));
            }
        }
    }
    return problems;
}

std::vector<connector::NodeConfig> load_node_list(const fs::path& file) {
    auto root = util::load_yaml(util::read_file(file));
    util::expect_map(root, "");
    util::check_keys(root, "", {"nodes"});
    auto list = util::string_list(util::require(root, "", "nodes"), "nodes");
    std::vector<connector::NodeConfig> configs;
    for (const auto& entry : list) configs.push_back(connector::load_node_config(util::resolve(file.parent_path(), entry)));
    return configs;
}

NodeNetwork::NodeNetwork(const std::vector<connector::NodeConfig>& configs, bool ephemeral_ports) {
    try {
        for (auto config : configs) {
            if (nodes_.count(config.id)) throw ConfigError("nodes", "duplicate node id '" + config.id + "'");
            if (ephemeral_ports) config.listen = "127.0.0.1:0";
            auto node = connector::Node::from_config(config);
            auto server = std::make_unique<connector::Server>(*node, config.listen);
            server->start();
            servers_[config.id] = std::move(server);
            nodes_[config.id] = std::move(node);
        }
    } catch (...) {
        stop();
        throw;
    }
}

NodeNetwork::~NodeNetwork() { stop(); }

void NodeNetwork::stop() {
    for (auto& [id, server] : servers_) server->stop();
}

connector::Node& NodeNetwork::node(const std::string& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error("unknown node '" + id + "'");
    return *it->second;
}

std::string NodeNetwork::endpoint(const std::string& id) const {
    auto it = servers_.find(id);
    if (it == servers_.end()) throw Error("unknown node '" + id + "'");
    return it->second->endpoint();
}

std::vector<std::string> NodeNetwork::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, node] : nodes_) out.push_back(id);
    return out;
}

ScenarioNodes NodeNetwork::handles() {
    ScenarioNodes out;
    for (const auto& [id, node] : nodes_) {
        out[id] = {node.get(), std::make_shared<connector::TcpTransport>(endpoint(id))};
    }
    return out;
}

}  // namespace ede::energy
