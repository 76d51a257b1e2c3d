#pragma once

#include "ede/connector/authorize.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ede::connector {

enum class Activity { QueryServed, QueryRejected, CatalogServed };

std::string_view to_string(Activity activity);
std::optional<Activity> activity_from_string(std::string_view text);

struct ProvenanceRecord {
    std::uint64_t id = 0;
    Activity activity = Activity::QueryRejected;
    std::string node;
    std::string consumer;
    std::optional<std::string> contract;
    std::optional<Operation> operation;
    std::optional<RejectionReason> reason;
    std::string correlation_id;
    std::string request_digest;
    std::string result_digest;
    util::Timestamp timestamp;

    friend bool operator==(const ProvenanceRecord&, const ProvenanceRecord&) = default;
};

nlohmann::json to_json(const ProvenanceRecord& record);
/// Throws ede::Error on malformed input.
ProvenanceRecord record_from_json(const nlohmann::json& doc);

/// Append-only provenance log with strictly increasing record ids. Appends
/// are serialized; with a file, each record is written as one JSON line and
/// flushed before append() returns.
class ProvenanceLog {
public:
    /// In-memory log.
    ProvenanceLog() = default;
    /// File-backed log; existing records are loaded and ids continue after them.
    explicit ProvenanceLog(const std::filesystem::path& file);

    ProvenanceLog(const ProvenanceLog&) = delete;
    ProvenanceLog& operator=(const ProvenanceLog&) = delete;

    /// Assigns the next id, runs `complete` on the record (to fill fields
    /// that depend on the id, like the digest of a body embedding it), then
    /// appends. Returns the stored record.
    ProvenanceRecord append(ProvenanceRecord draft,
                            const std::function<void(ProvenanceRecord&)>& complete = {});

    std::vector<ProvenanceRecord> records() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::vector<ProvenanceRecord> records_;
    std::uint64_t next_id_ = 1;
    std::optional<std::ofstream> file_;
};

std::vector<ProvenanceRecord> read_provenance_log(const std::filesystem::path& file);

struct AuditFinding {
    std::uint64_t record_id;
    std::string problem;
};

/// Replays the log against the contract store: ids must strictly increase,
/// and every served record must be authorized at its own timestamp.
std::vector<AuditFinding> audit_log(const std::vector<ProvenanceRecord>& records, const ContractStore& contracts,
                                    const NodeIdentity& node);

}  // namespace ede::connector
