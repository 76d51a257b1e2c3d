#include "ede/connector/message.hpp"

#include "ede/util/digest.hpp"

#include <array>
#include <atomic>
#include <random>

#include <fmt/core.h>

namespace ede::connector {

namespace {

constexpr std::array<std::pair<MessageType, std::string_view>, 5> kTypes{{
    {MessageType::CatalogRequest, "CatalogRequest"},
    {MessageType::CatalogResponse, "CatalogResponse"},
    {MessageType::QueryRequest, "QueryRequest"},
    {MessageType::QueryResult, "QueryResult"},
    {MessageType::Rejection, "Rejection"},
}};

constexpr std::array<std::pair<RejectionReason, std::string_view>, 7> kReasons{{
    {RejectionReason::NotAuthorized, "NOT_AUTHORIZED"},
    {RejectionReason::ContractExpired, "CONTRACT_EXPIRED"},
    {RejectionReason::ContractNotYetValid, "CONTRACT_NOT_YET_VALID"},
    {RejectionReason::UnknownContract, "UNKNOWN_CONTRACT"},
    {RejectionReason::OperationNotPermitted, "OPERATION_NOT_PERMITTED"},
    {RejectionReason::Malformed, "MALFORMED"},
    {RejectionReason::Internal, "INTERNAL"},
}};

}  // namespace

std::string_view to_string(MessageType type) {
    for (const auto& [t, name] : kTypes) {
        if (t == type) return name;
    }
    return "?";
}

std::optional<MessageType> message_type_from_string(std::string_view text) {
    for (const auto& [t, name] : kTypes) {
        if (name == text) return t;
    }
    return std::nullopt;
}

std::string_view to_string(RejectionReason reason) {
    for (const auto& [r, name] : kReasons) {
        if (r == reason) return name;
    }
    return "?";
}

std::optional<RejectionReason> rejection_reason_from_string(std::string_view text) {
    for (const auto& [r, name] : kReasons) {
        if (name == text) return r;
    }
    return std::nullopt;
}

nlohmann::json to_json(const Message& message) {
    return {{"type", to_string(message.type)},
            {"sender", message.sender},
            {"correlationId", message.correlation_id},
            {"issued", util::format_rfc3339(message.issued)},
            {"body", message.body}};
}

Message message_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw MalformedMessage("message is not a JSON object", std::nullopt);
    std::optional<std::string> correlation;
    if (auto it = doc.find("correlationId"); it != doc.end() && it->is_string() && !it->get<std::string>().empty()) {
        correlation = it->get<std::string>();
    }
    std::string sender;
    if (auto it = doc.find("sender"); it != doc.end() && it->is_string()) sender = it->get<std::string>();
    auto fail = [&](const std::string& what) { throw MalformedMessage(what, correlation, sender); };

    if (!correlation) fail("missing correlationId");
    Message m;
    m.correlation_id = *correlation;
    auto type = doc.find("type");
    if (type == doc.end() || !type->is_string()) fail("missing message type");
    auto parsed = message_type_from_string(type->get<std::string>());
    if (!parsed) fail("unknown message type '" + type->get<std::string>() + "'");
    m.type = *parsed;
    if (sender.empty()) fail("missing sender");
    m.sender = sender;
    auto issued = doc.find("issued");
    if (issued == doc.end() || !issued->is_string()) fail("missing issued timestamp");
    auto t = util::parse_rfc3339(issued->get<std::string>());
    if (!t) fail("malformed issued timestamp");
    m.issued = *t;
    auto body = doc.find("body");
    if (body == doc.end() || !body->is_object()) fail("missing body object");
    m.body = *body;
    return m;
}

std::string encode(const Message& message) { return to_json(message).dump(); }

Message decode(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedMessage(std::string("invalid JSON: ") + e.what(), std::nullopt);
    }
    return message_from_json(doc);
}

std::string canonical_digest(const nlohmann::json& value) {
    return util::sha256_hex(value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

Message make_catalog_request(std::string sender, std::string correlation_id, std::string contract_id,
                             util::Timestamp issued) {
    return {MessageType::CatalogRequest, std::move(sender), std::move(correlation_id), issued,
            {{"contractId", std::move(contract_id)}}};
}

Message make_query_request(std::string sender, std::string correlation_id, std::string contract_id,
                           std::string query, util::Timestamp issued) {
    return {MessageType::QueryRequest, std::move(sender), std::move(correlation_id), issued,
            {{"contractId", std::move(contract_id)}, {"query", std::move(query)}}};
}

std::string next_correlation_id(std::string_view prefix) {
    static std::atomic<std::uint64_t> counter{0};
    static const std::uint32_t salt = std::random_device{}();
    return fmt::format("{}-{}-{:08x}", prefix, ++counter, salt);
}

}  // namespace ede::connector
