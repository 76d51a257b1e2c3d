#include "ede/connector/client.hpp"

#include "ede/connector/node.hpp"
#include "ede/connector/wire.hpp"

#include <unistd.h>

namespace ede::connector {

TcpTransport::TcpTransport(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

Message TcpTransport::roundtrip(const Message& request) {
    int fd = connect_to(endpoint_, static_cast<int>(timeout_.count()));
    try {
        write_frame(fd, encode(request));
        auto payload = read_frame(fd);
        ::close(fd);
        if (!payload) throw Error(endpoint_ + " closed the connection without a response");
        return decode(*payload);
    } catch (...) {
        ::close(fd);
        throw;
    }
}

Message InProcessTransport::roundtrip(const Message& request) {
    auto payload = node_.handle_payload(encode(request));
    if (!payload) throw Error("node " + node_.identity().id + " dropped the request");
    return decode(*payload);
}

ConnectorClient::ConnectorClient(std::shared_ptr<Transport> transport, std::string sender)
    : transport_(std::move(transport)), sender_(std::move(sender)) {}

Message ConnectorClient::exchange(Message request) {
    auto response = transport_->roundtrip(request);
    if (response.correlation_id != request.correlation_id) {
        throw Error("response correlation id '" + response.correlation_id + "' does not match request '" +
                    request.correlation_id + "'");
    }
    return response;
}

Message ConnectorClient::catalog(const std::string& contract_id) {
    return exchange(make_catalog_request(sender_, next_correlation_id(sender_), contract_id, util::now_utc()));
}

Message ConnectorClient::query(const std::string& contract_id, const std::string& query_text) {
    return exchange(make_query_request(sender_, next_correlation_id(sender_), contract_id, query_text, util::now_utc()));
}

void expect_type(const Message& response, MessageType type) {
    if (response.type == MessageType::Rejection) {
        auto reason = rejection_reason_from_string(response.body.value("reason", std::string()));
        throw RejectedError(reason.value_or(RejectionReason::Internal), response.body.value("text", std::string()));
    }
    if (response.type != type) {
        throw Error("expected " + std::string(to_string(type)) + ", received " + std::string(to_string(response.type)));
    }
}

ContractSourceClient::ContractSourceClient(std::shared_ptr<Transport> transport, std::string sender,
                                           std::string contract_id)
    : client_(std::move(transport), std::move(sender)), contract_id_(std::move(contract_id)) {}

sparql::SolutionSequence ContractSourceClient::query(const std::string& query_text) {
    auto response = client_.query(contract_id_, query_text);
    expect_type(response, MessageType::QueryResult);
    auto it = response.body.find("results");
    if (it == response.body.end()) throw Error("QueryResult without results");
    return sparql::results_from_json(*it);
}

federation::ClientFactory tcp_client_factory(std::string consumer, std::chrono::milliseconds timeout) {
    return [consumer = std::move(consumer), timeout](const federation::SourceDescription& source) {
        if (source.endpoint.empty()) throw Error("no endpoint configured");
        auto transport = std::make_shared<TcpTransport>(source.endpoint, timeout);
        return std::make_shared<ContractSourceClient>(transport, consumer, source.contract);
    };
}

}  // namespace ede::connector
