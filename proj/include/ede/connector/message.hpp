#pragma once

#include "ede/error.hpp"
#include "ede/util/time.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace ede::connector {

enum class MessageType { CatalogRequest, CatalogResponse, QueryRequest, QueryResult, Rejection };

enum class RejectionReason {
    NotAuthorized,
    ContractExpired,
    ContractNotYetValid,
    UnknownContract,
    OperationNotPermitted,
    Malformed,
    Internal,
};

std::string_view to_string(MessageType type);
std::optional<MessageType> message_type_from_string(std::string_view text);
/// Wire code, e.g. "CONTRACT_EXPIRED".
std::string_view to_string(RejectionReason reason);
std::optional<RejectionReason> rejection_reason_from_string(std::string_view text);

struct Message {
    MessageType type;
    std::string sender;
    std::string correlation_id;
    util::Timestamp issued;
    nlohmann::json body = nlohmann::json::object();

    friend bool operator==(const Message&, const Message&) = default;
};

/// The envelope could not be decoded. `correlation_id` is set when the
/// document still carried one, so a Rejection can echo it.
class MalformedMessage : public Error {
public:
    MalformedMessage(const std::string& message, std::optional<std::string> correlation_id, std::string sender = {})
        : Error(message), correlation_id_(std::move(correlation_id)), sender_(std::move(sender)) {}

    const std::optional<std::string>& correlation_id() const noexcept { return correlation_id_; }
    const std::string& sender() const noexcept { return sender_; }

private:
    std::optional<std::string> correlation_id_;
    std::string sender_;
};

nlohmann::json to_json(const Message& message);
/// Throws MalformedMessage on a bad envelope.
Message message_from_json(const nlohmann::json& doc);
std::string encode(const Message& message);
/// Throws MalformedMessage, with no correlation id when the text is not JSON.
Message decode(std::string_view text);

/// SHA-256 of the canonical form: sorted keys, no insignificant whitespace.
std::string canonical_digest(const nlohmann::json& value);

Message make_catalog_request(std::string sender, std::string correlation_id, std::string contract_id,
                             util::Timestamp issued);
Message make_query_request(std::string sender, std::string correlation_id, std::string contract_id,
                           std::string query, util::Timestamp issued);

/// Fresh correlation id: "<prefix>-<counter>-<random hex>".
std::string next_correlation_id(std::string_view prefix);

}  // namespace ede::connector
