#include "ede/connector/provenance.hpp"

#include "ede/error.hpp"
#include "ede/util/files.hpp"

#include <sstream>

namespace ede::connector {

std::string_view to_string(Activity activity) {
    switch (activity) {
        case Activity::QueryServed: return "query-served";
        case Activity::QueryRejected: return "query-rejected";
        case Activity::CatalogServed: return "catalog-served";
    }
    return "?";
}

std::optional<Activity> activity_from_string(std::string_view text) {
    if (text == "query-served") return Activity::QueryServed;
    if (text == "query-rejected") return Activity::QueryRejected;
    if (text == "catalog-served") return Activity::CatalogServed;
    return std::nullopt;
}

nlohmann::json to_json(const ProvenanceRecord& r) {
    nlohmann::json doc{{"id", r.id},
                       {"activity", to_string(r.activity)},
                       {"node", r.node},
                       {"consumer", r.consumer},
                       {"contract", r.contract ? nlohmann::json(*r.contract) : nlohmann::json()},
                       {"operation", r.operation ? nlohmann::json(to_string(*r.operation)) : nlohmann::json()},
                       {"correlationId", r.correlation_id},
                       {"requestDigest", r.request_digest},
                       {"resultDigest", r.result_digest},
                       {"timestamp", util::format_rfc3339(r.timestamp)}};
    if (r.reason) doc["reason"] = to_string(*r.reason);
    return doc;
}

ProvenanceRecord record_from_json(const nlohmann::json& doc) {
    try {
        ProvenanceRecord r;
        r.id = doc.at("id").get<std::uint64_t>();
        auto activity = activity_from_string(doc.at("activity").get<std::string>());
        if (!activity) throw Error("unknown activity");
        r.activity = *activity;
        r.node = doc.at("node").get<std::string>();
        r.consumer = doc.at("consumer").get<std::string>();
        if (!doc.at("contract").is_null()) r.contract = doc.at("contract").get<std::string>();
        if (!doc.at("operation").is_null()) {
            r.operation = operation_from_string(doc.at("operation").get<std::string>());
            if (!r.operation) throw Error("unknown operation");
        }
        if (doc.contains("reason")) {
            r.reason = rejection_reason_from_string(doc.at("reason").get<std::string>());
            if (!r.reason) throw Error("unknown rejection reason");
        }
        r.correlation_id = doc.at("correlationId").get<std::string>();
        r.request_digest = doc.at("requestDigest").get<std::string>();
        r.result_digest = doc.at("resultDigest").get<std::string>();
        auto t = util::parse_rfc3339(doc.at("timestamp").get<std::string>());
        if (!t) throw Error("malformed timestamp");
        r.timestamp = *t;
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed provenance record: ") + e.what());
    } catch (const Error& e) {
        throw Error(std::string("malformed provenance record: ") + e.what());
    }
}

ProvenanceLog::ProvenanceLog(const std::filesystem::path& file) {
    if (std::filesystem::exists(file)) {
        records_ = read_provenance_log(file);
        if (!records_.empty()) next_id_ = records_.back().id + 1;
    } else if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
    file_.emplace(file, std::ios::app);
    if (!*file_) throw Error("cannot open provenance log " + file.string());
}

ProvenanceRecord ProvenanceLog::append(ProvenanceRecord draft, const std::function<void(ProvenanceRecord&)>& complete) {
    std::lock_guard lock(mutex_);
    draft.id = next_id_;
    if (complete) complete(draft);
    if (file_) {
        *file_ << to_json(draft).dump() << '\n';
        file_->flush();
        if (!*file_) throw Error("failed to write provenance log");
    }
    ++next_id_;
    records_.push_back(draft);
    return draft;
}

std::vector<ProvenanceRecord> ProvenanceLog::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t ProvenanceLog::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::vector<ProvenanceRecord> read_provenance_log(const std::filesystem::path& file) {
    std::istringstream in(util::read_file(file));
    std::vector<ProvenanceRecord> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(number, 0, e.what());
        } catch (const Error& e) {
            throw ParseError(number, 0, e.what());
        }
    }
    return out;
}

std::vector<AuditFinding> audit_log(const std::vector<ProvenanceRecord>& records, const ContractStore& contracts,
                                    const NodeIdentity& node) {
    std::vector<AuditFinding> findings;
    std::optional<std::uint64_t> previous;
    for (const auto& r : records) {
        if (previous && r.id <= *previous) findings.push_back({r.id, "record id does not increase"});
        previous = r.id;
        if (r.node != node.id) findings.push_back({r.id, "record belongs to node '" + r.node + "'"});
        if (r.activity == Activity::QueryRejected) continue;
        auto expected = r.activity == Activity::QueryServed ? Operation::Query : Operation::Catalog;
        if (r.operation != expected) {
            findings.push_back({r.id, "operation does not match activity"});
            continue;
        }
        if (!r.contract) {
            findings.push_back({r.id, "served without a contract"});
            continue;
        }
        if (auto reason = authorize(AccessRequest{r.consumer, *r.contract, expected}, contracts, node, r.timestamp)) {
            findings.push_back({r.id, "served although the contract check gives " + std::string(to_string(*reason))});
        }
    }
    return findings;
}

}  // namespace ede::connector
