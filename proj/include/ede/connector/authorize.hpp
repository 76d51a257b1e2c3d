#pragma once

#include "ede/connector/contract.hpp"
#include "ede/connector/message.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace ede::connector {

/// Identity of the node enforcing contracts.
struct NodeIdentity {
    std::string id;
    std::string resource;
};

struct AccessRequest {
    std::string sender;
    std::string contract_id;
    Operation operation;
};

/// Nullopt means allow. Checks, in order: the contract exists, the sender is
/// its consumer and this node its provider and resource, not_before <= now <
/// expiry, and the operation is permitted.
std::optional<RejectionReason> authorize(const AccessRequest& request, const ContractStore& contracts,
                                         const NodeIdentity& node, util::Timestamp now);

/// Same for a CatalogRequest or QueryRequest message; any other message, or
/// one without a string contractId, yields MALFORMED.
std::optional<RejectionReason> authorize(const Message& request, const ContractStore& contracts,
                                         const NodeIdentity& node, util::Timestamp now);

}  // namespace ede::connector
