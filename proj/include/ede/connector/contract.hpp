#pragma once

#include "ede/util/time.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ede::connector {

enum class Operation { Catalog, Query };

std::string_view to_string(Operation op);
std::optional<Operation> operation_from_string(std::string_view text);

/// Usage contract between a provider node and a consumer node for one resource.
struct Contract {
    std::string id;
    std::string provider;
    std::string consumer;
    std::string resource;
    std::set<Operation> operations;
    util::Timestamp not_before;
    util::Timestamp expiry;
    std::string purpose;

    /// Throws ValidationError on empty ids or not_before >= expiry.
    void validate() const;

    friend bool operator==(const Contract&, const Contract&) = default;
};

class ContractStore {
public:
    ContractStore() = default;
    explicit ContractStore(std::vector<Contract> contracts);

    /// Throws ValidationError on an invalid contract or a duplicate id.
    void add(Contract contract);
    const Contract* find(std::string_view id) const;
    std::vector<Contract> all() const;
    std::size_t size() const noexcept { return contracts_.size(); }

private:
    std::map<std::string, Contract, std::less<>> contracts_;
};

/// Contracts file: a YAML list of contracts.
///
///   - id: tso-supplier-2020
///     provider: supplier
///     consumer: tso
///     resource: supplier-bids
///     operations: [catalog, query]
///     not_before: 2020-01-01T00:00:00Z
///     expiry: 2100-01-01T00:00:00Z
///     purpose: balancing
///
/// A top-level `contracts:` key holding the list is accepted too.
/// Throws ConfigError with the key path.
ContractStore parse_contracts(std::string_view text);

}  // namespace ede::connector
