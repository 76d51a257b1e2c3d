#include "ede/connector/authorize.hpp"

namespace ede::connector {

std::optional<RejectionReason> authorize(const AccessRequest& request, const ContractStore& contracts,
                                         const NodeIdentity& node, util::Timestamp now) {
    const Contract* c = contracts.find(request.contract_id);
    if (c == nullptr) return RejectionReason::UnknownContract;
    if (c->consumer != request.sender || c->provider != node.id || c->resource != node.resource) {
        return RejectionReason::NotAuthorized;
    }
    if (now < c->not_before) return RejectionReason::ContractNotYetValid;
    if (now >= c->expiry) return RejectionReason::ContractExpired;
    if (!c->operations.count(request.operation)) return RejectionReason::OperationNotPermitted;
    return std::nullopt;
}

std::optional<RejectionReason> authorize(const Message& request, const ContractStore& contracts,
                                         const NodeIdentity& node, util::Timestamp now) {
    Operation op;
    if (request.type == MessageType::CatalogRequest) {
        op = Operation::Catalog;
    } else if (request.type == MessageType::QueryRequest) {
        op = Operation::Query;
    } else {
        return RejectionReason::Malformed;
    }
    auto it = request.body.find("contractId");
    if (it == request.body.end() || !it->is_string()) return RejectionReason::Malformed;
    return authorize(AccessRequest{request.sender, it->get<std::string>(), op}, contracts, node, now);
}

}  // namespace ede::connector
