#pragma once

#include "ede/connector/message.hpp"
#include "ede/federation/federation.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace ede::connector {

class Node;

/// Carries one request to a node and returns its response.
class Transport {
public:
    virtual ~Transport() = default;
    virtual Message roundtrip(const Message& request) = 0;
};

/// One TCP connection per exchange; safe for concurrent use.
class TcpTransport : public Transport {
public:
    explicit TcpTransport(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(30));
    Message roundtrip(const Message& request) override;

private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
};

/// Calls the node directly, still encoding both messages to JSON text.
class InProcessTransport : public Transport {
public:
    explicit InProcessTransport(Node& node) : node_(node) {}
    Message roundtrip(const Message& request) override;

private:
    Node& node_;
};

/// The node refused the request.
class RejectedError : public Error {
public:
    RejectedError(RejectionReason reason, const std::string& text)
        : Error(std::string(to_string(reason)) + ": " + text), reason_(reason) {}

    RejectionReason reason() const noexcept { return reason_; }

private:
    RejectionReason reason_;
};

class ConnectorClient {
public:
    ConnectorClient(std::shared_ptr<Transport> transport, std::string sender);

    /// Raw exchanges; the response may be a Rejection.
    Message catalog(const std::string& contract_id);
    Message query(const std::string& contract_id, const std::string& query_text);

    const std::string& sender() const noexcept { return sender_; }

private:
    Message exchange(Message request);

    std::shared_ptr<Transport> transport_;
    std::string sender_;
};

/// Throws RejectedError for a Rejection and Error for an unexpected type.
void expect_type(const Message& response, MessageType type);

/// Federation source backed by a connector: sends QueryRequests under one
/// contract and unwraps the results.
class ContractSourceClient : public federation::SourceClient {
public:
    ContractSourceClient(std::shared_ptr<Transport> transport, std::string sender, std::string contract_id);
    sparql::SolutionSequence query(const std::string& query_text) override;

private:
    ConnectorClient client_;
    std::string contract_id_;
};

/// Client factory for federated_query(): TCP to each source's endpoint,
/// presenting the source's catalog contract as `consumer`.
federation::ClientFactory tcp_client_factory(std::string consumer,
                                             std::chrono::milliseconds timeout = std::chrono::seconds(30));

}  // namespace ede::connector
