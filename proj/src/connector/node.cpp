#include "ede/connector/node.hpp"

#include "ede/error.hpp"
#include "ede/mapping/mapping.hpp"
#include "ede/rdf/ntriples.hpp"
#include "ede/sparql/evaluator.hpp"
#include "ede/sparql/parser.hpp"
#include "ede/util/digest.hpp"
#include "ede/util/files.hpp"
#include "ede/util/yaml.hpp"

namespace ede::connector {

NodeConfig parse_node_config(std::string_view text, const std::filesystem::path& base_dir) {
    YAML::Node root = util::load_yaml(text);
    util::check_keys(root, "", {"id", "resource", "listen", "graphs", "materialize", "contracts", "provenance_log"});
    NodeConfig c;
    c.id = util::require_string(root, "", "id");
    c.resource = util::require_string(root, "", "resource");
    if (c.id.empty()) throw ConfigError("id", "must not be empty");
    if (c.resource.empty()) throw ConfigError("resource", "must not be empty");
    c.listen = util::optional_string(root, "", "listen").value_or(c.listen);
    auto paths = [&](std::string_view key) {
        std::vector<std::filesystem::path> out;
        if (auto node = root[std::string(key)]; node && !node.IsNull()) {
            for (const auto& p : util::string_list(node, key)) out.push_back(util::resolve(base_dir, p));
        }
        return out;
    };
    c.graphs = paths("graphs");
    c.materialize = paths("materialize");
    c.contracts = util::resolve(base_dir, util::require_string(root, "", "contracts"));
    if (auto log = util::optional_string(root, "", "provenance_log")) c.provenance_log = util::resolve(base_dir, *log);
    return c;
}

NodeConfig load_node_config(const std::filesystem::path& file) {
    return parse_node_config(util::read_file(file), file.parent_path());
}

Node::Node(NodeIdentity identity, ContractStore contracts, rdf::Graph graph, std::unique_ptr<ProvenanceLog> log,
           Clock clock)
    : identity_(std::move(identity)),
      contracts_(std::move(contracts)),
      log_(std::move(log)),
      clock_(std::move(clock)),
      graph_(std::make_shared<const rdf::Graph>(std::move(graph))) {}

std::unique_ptr<Node> Node::from_config(const NodeConfig& config) {
    rdf::Graph graph;
    for (const auto& path : config.graphs) graph.merge(rdf::parse_ntriples(util::read_file(path)));
    for (const auto& path : config.materialize) {
        auto doc = mapping::parse_mapping(util::read_file(path));
        auto sources = mapping::load_sources(doc, path.parent_path());
        auto result = mapping::apply_mapping(doc, sources);
        if (!result.errors.empty()) {
            const auto& e = result.errors.front();
            throw Error(path.string() + ": record " + std::to_string(e.record_index) + ": " + e.message);
        }
        graph.merge(result.graph);
    }
    auto contracts = parse_contracts(util::read_file(config.contracts));
    auto log = config.provenance_log ? std::make_unique<ProvenanceLog>(*config.provenance_log)
                                     : std::make_unique<ProvenanceLog>();
    auto node = std::make_unique<Node>(NodeIdentity{config.id, config.resource}, std::move(contracts), std::move(graph),
                                       std::move(log));
    node->set_endpoint(config.listen);
    return node;
}

std::shared_ptr<const rdf::Graph> Node::snapshot() const {
    std::lock_guard lock(mutex_);
    return graph_;
}

std::size_t Node::publish(const rdf::Graph& additions) {
    std::lock_guard lock(mutex_);
    auto next = std::make_shared<rdf::Graph>(*graph_);
    next->merge(additions);
    graph_ = next;
    return next->size();
}

federation::SourceDescription Node::describe() const {
    auto d = federation::describe_graph(identity_.id, *snapshot());
    std::lock_guard lock(mutex_);
    d.endpoint = endpoint_;
    return d;
}

void Node::set_endpoint(std::string endpoint) {
    std::lock_guard lock(mutex_);
    endpoint_ = std::move(endpoint);
}

namespace {

std::string reason_text(RejectionReason reason, const Message& request, const ContractStore& contracts) {
    std::string contract = request.body.value("contractId", std::string());
    const Contract* c = contracts.find(contract);
    switch (reason) {
        case RejectionReason::UnknownContract: return "no contract '" + contract + "'";
        case RejectionReason::NotAuthorized:
            return "contract '" + contract + "' does not grant '" + request.sender + "' access to this resource";
        case RejectionReason::ContractNotYetValid:
            return "contract '" + contract + "' is valid from " + (c ? util::format_rfc3339(c->not_before) : "?");
        case RejectionReason::ContractExpired:
            return "contract '" + contract + "' expired at " + (c ? util::format_rfc3339(c->expiry) : "?");
        case RejectionReason::OperationNotPermitted: return "contract '" + contract + "' does not permit this operation";
        case RejectionReason::Malformed: return "malformed request";
        case RejectionReason::Internal: return "internal error";
    }
    return "";
}

nlohmann::json rejection_body(RejectionReason reason, std::string text) {
    return {{"reason", to_string(reason)}, {"text", std::move(text)}};
}

}  // namespace

Message Node::respond(const Message& request, util::Timestamp now, ProvenanceRecord draft, MessageType type,
                      nlohmann::json body) {
    log_->append(std::move(draft), [&](ProvenanceRecord& record) {
        body["provenanceRecordId"] = record.id;
        record.result_digest = canonical_digest(body);
    });
    return Message{type, identity_.id, request.correlation_id, now, std::move(body)};
}

Message Node::handle(const Message& request) { return handle(request, clock_()); }

Message Node::handle(const Message& request, util::Timestamp now) {
    ProvenanceRecord draft;
    draft.node = identity_.id;
    draft.consumer = request.sender;
    draft.correlation_id = request.correlation_id;
    draft.request_digest = canonical_digest(request.body);
    draft.timestamp = now;
    if (request.type == MessageType::CatalogRequest) draft.operation = Operation::Catalog;
    if (request.type == MessageType::QueryRequest) draft.operation = Operation::Query;
    if (auto it = request.body.find("contractId"); it != request.body.end() && it->is_string()) {
        draft.contract = it->get<std::string>();
    }

    auto reject = [&](RejectionReason reason, std::string text) {
        draft.activity = Activity::QueryRejected;
        draft.reason = reason;
        return respond(request, now, std::move(draft), MessageType::Rejection, rejection_body(reason, std::move(text)));
    };

    if (auto reason = authorize(request, contracts_, identity_, now)) {
        std::string text = *reason == RejectionReason::Malformed
                               ? "expected a CatalogRequest or QueryRequest with a string contractId"
                               : reason_text(*reason, request, contracts_);
        return reject(*reason, std::move(text));
    }

    if (request.type == MessageType::CatalogRequest) {
        draft.activity = Activity::CatalogServed;
        return respond(request, now, std::move(draft), MessageType::CatalogResponse,
                       {{"source", federation::description_to_json(describe())}});
    }

    auto query_it = request.body.find("query");
    if (query_it == request.body.end() || !query_it->is_string()) {
        return reject(RejectionReason::Malformed, "QueryRequest body lacks a string 'query'");
    }
    sparql::Query query;
    try {
        query = sparql::parse_query(query_it->get<std::string>());
    } catch (const ParseError& e) {
        return reject(RejectionReason::Malformed, std::string("query: ") + e.what());
    }
    nlohmann::json results;
    try {
        results = sparql::results_to_json(sparql::evaluate(query, *snapshot()));
    } catch (const std::exception& e) {
        return reject(RejectionReason::Internal, e.what());
    }
    draft.activity = Activity::QueryServed;
    return respond(request, now, std::move(draft), MessageType::QueryResult, {{"results", std::move(results)}});
}

std::optional<std::string> Node::handle_payload(std::string_view payload) {
    Message request;
    try {
        request = decode(payload);
    } catch (const MalformedMessage& e) {
        if (!e.correlation_id()) return std::nullopt;
        auto now = clock_();
        ProvenanceRecord draft;
        draft.node = identity_.id;
        draft.consumer = e.sender();
        draft.correlation_id = *e.correlation_id();
        draft.request_digest = util::sha256_hex(payload);
        draft.timestamp = now;
        draft.activity = Activity::QueryRejected;
        draft.reason = RejectionReason::Malformed;
        Message shell{MessageType::Rejection, e.sender(), *e.correlation_id(), now, {}};
        return encode(respond(shell, now, std::move(draft), MessageType::Rejection,
                              rejection_body(RejectionReason::Malformed, e.what())));
    }
    return encode(handle(request));
}

}  // namespace ede::connector
