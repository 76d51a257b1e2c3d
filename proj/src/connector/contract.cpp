#include "ede/connector/contract.hpp"

#include "ede/error.hpp"
#include "ede/util/yaml.hpp"

namespace ede::connector {

using util::index_path;
using util::key_path;

std::string_view to_string(Operation op) {
    return op == Operation::Catalog ? "catalog" : "query";
}

std::optional<Operation> operation_from_string(std::string_view text) {
    if (text == "catalog") return Operation::Catalog;
    if (text == "query") return Operation::Query;
    return std::nullopt;
}

void Contract::validate() const {
    if (id.empty() || provider.empty() || consumer.empty() || resource.empty()) {
        throw ValidationError("contract '" + id + "': id, provider, consumer and resource must be non-empty");
    }
    if (not_before >= expiry) throw ValidationError("contract '" + id + "': not_before must precede expiry");
}

ContractStore::ContractStore(std::vector<Contract> contracts) {
    for (auto& c : contracts) add(std::move(c));
}

void ContractStore::add(Contract contract) {
    contract.validate();
    auto id = contract.id;
    if (!contracts_.emplace(id, std::move(contract)).second) throw ValidationError("duplicate contract id '" + id + "'");
}

const Contract* ContractStore::find(std::string_view id) const {
    auto it = contracts_.find(id);
    return it == contracts_.end() ? nullptr : &it->second;
}

std::vector<Contract> ContractStore::all() const {
    std::vector<Contract> out;
    for (const auto& [id, c] : contracts_) out.push_back(c);
    return out;
}

namespace {

util::Timestamp timestamp(const YAML::Node& node, const std::string& path, std::string_view key) {
    auto text = util::require_string(node, path, key);
    auto t = util::parse_rfc3339(text);
    if (!t) throw ConfigError(key_path(path, key), "expected an RFC 3339 timestamp, found '" + text + "'");
    return *t;
}

}  // namespace

ContractStore parse_contracts(std::string_view text) {
    YAML::Node root = util::load_yaml(text);
    std::string base;
    if (root.IsMap()) {
        util::check_keys(root, "", {"contracts"});
        root = util::require(root, "", "contracts");
        base = "contracts";
    }
    util::expect_sequence(root, base);
    ContractStore store;
    for (std::size_t i = 0; i < root.size(); ++i) {
        auto path = index_path(base, i);
        const YAML::Node& node = root[i];
        util::check_keys(node, path, {"id", "provider", "consumer", "resource", "operations", "not_before", "expiry", "purpose"});
        Contract c;
        c.id = util::require_string(node, path, "id");
        c.provider = util::require_string(node, path, "provider");
        c.consumer = util::require_string(node, path, "consumer");
        c.resource = util::require_string(node, path, "resource");
        auto opath = key_path(path, "operations");
        auto ops = util::string_list(util::require(node, path, "operations"), opath);
        for (std::size_t j = 0; j < ops.size(); ++j) {
            auto op = operation_from_string(ops[j]);
            if (!op) throw ConfigError(index_path(opath, j), "unknown operation '" + ops[j] + "' (catalog or query)");
            c.operations.insert(*op);
        }
        c.not_before = timestamp(node, path, "not_before");
        c.expiry = timestamp(node, path, "expiry");
        c.purpose = util::optional_string(node, path, "purpose").value_or("");
        try {
            store.add(std::move(c));
        } catch (const ValidationError& e) {
            throw ConfigError(path, e.what());
        }
    }
    return store;
}

}  // namespace ede::connector
