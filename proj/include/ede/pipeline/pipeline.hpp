#pragma once

#include "ede/mapping/mapping.hpp"
#include "ede/pipeline/linking.hpp"
#include "ede/pipeline/preprocess.hpp"
#include "ede/shapes/shapes.hpp"
#include "ede/util/time.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ede::pipeline {

enum class ViolationPolicy { Block, Warn };

struct SourceEntry {
    /// Logical source name the mapping refers to; defaults to the file name.
    std::string name;
    std::filesystem::path path;
    mapping::SourceFormat format = mapping::SourceFormat::Csv;
    std::vector<PreprocessStep> steps;
};

struct LinkingConfig {
    LinkSpec spec;
    std::filesystem::path reference;
};

/// Pipeline file:
///
///   sources:
///     - name: capacity.csv
///       path: raw/capacity.csv
///       format: csv
///       preprocess:
///         - {kind: rename-field, from: prod_type, to: type}
///         - {kind: scale-numeric, field: measure, factor: 0.001}
///         - {kind: aggregate, group_by: [plant, date], sum: measure}
///         - {kind: drop-missing, field: measure}
///   mapping: mappings/capacity.yaml
///   shapes: shapes/capacity.yaml
///   linking: {label_predicate: rdfs:label, reference: reference/registry.nt}
///   load: {target: out/graph.nt, provenance: out/provenance.nt, report: out/report.json}
///   staging: out/staging
///   on_violation: block
///
/// `shapes` and `linking` are optional. Relative paths resolve against
/// the pipeline file's directory.
struct PipelineConfig {
    std::vector<SourceEntry> sources;
    std::filesystem::path mapping;
    std::optional<std::filesystem::path> shapes;
    std::optional<LinkingConfig> linking;
    std::filesystem::path target;
    std::filesystem::path provenance;
    std::optional<std::filesystem::path> report;
    std::filesystem::path staging;
    ViolationPolicy policy = ViolationPolicy::Block;
};

PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& file);

struct StageReport {
    std::string name;
    bool executed = false;
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    util::Timestamp started{};
    util::Timestamp ended{};
    /// Digests of consumed and produced artifacts (staged by content).
    std::vector<std::string> used;
    std::vector<std::string> generated;
};

struct RunReport {
    std::vector<StageReport> stages;
    std::optional<std::string> aborted_stage;
    std::string error;
    bool conforms = true;
    std::vector<shapes::Violation> violations;
    bool loaded = false;
    std::string load_note;
    std::size_t link_count = 0;
    std::vector<AmbiguousLabel> ambiguous_links;
    std::vector<RecordError> preprocess_errors;
    std::vector<mapping::RecordError> mapping_errors;
    /// Output graph digest under "graph" plus one entry per staged input.
    std::map<std::string, std::string> output_digests;
    rdf::Graph graph;
    rdf::Graph provenance;

    const StageReport* stage(std::string_view name) const;
};

inline constexpr const char* kStageNames[] = {"staging", "preprocess", "mapping", "linking", "validation", "load"};

/// Runs staging, preprocess, mapping, linking, validation and load in order.
/// A stage failure stops the run and is recorded in the report; the
/// provenance graph and (if configured) the report file are still written.
/// Throws ConfigError if a referenced file is missing at start.
RunReport run_pipeline(const PipelineConfig& config);

nlohmann::ordered_json report_to_json(const RunReport& report);

/// urn:sha256:<hex>
std::string entity_iri(const std::string& digest);

}  // namespace ede::pipeline
