#pragma once

#include "ede/rdf/graph.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace ede::energy {

/// Portable draws on top of mt19937_64 (whose output sequence is fixed by the
/// standard, unlike the std distributions).
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);
    /// Uniform in [lo, hi].
    long long between(long long lo, long long hi);
    /// Uniform in [0, 1).
    double unit();

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

private:
    std::mt19937_64 engine_;
};

struct CapacityRow {
    std::string country;
    std::string type;
    long long measure;
    int year;
};

/// Generation-capacity table: unique (country, type, year) rows for
/// 2018-2020. The 2020 rows hold exactly one WindPower row and at least one
/// Coal row.
std::vector<CapacityRow> generate_capacity(std::uint64_t seed);

/// Relative path -> file content.
using FixtureSet = std::map<std::string, std::string>;

/// Complete fixture tree for four nodes (tso, supplier, producer, wiki):
/// raw CSVs, mappings, node configs, contracts, reference graph, shapes,
/// seeded defects, queries, federation catalogs, scenario script and a
/// pipeline config. A pure function of `seed`.
FixtureSet generate_fixtures(std::uint64_t seed);

void write_fixtures(const FixtureSet& fixtures, const std::filesystem::path& dir);

/// SHA-256 over all paths and contents.
std::string fixture_digest(const FixtureSet& fixtures);

struct SeededDefect {
    rdf::Term focus;
    std::string constraint;
    std::string path;
};

struct DefectFixture {
    rdf::Graph graph;
    std::vector<SeededDefect> manifest;
};

/// Capacity graph conforming to the capacity shapes, with `count` defects
/// seeded on distinct focus nodes; each defect causes exactly one violation.
/// With `fixed_kinds` the defects cycle through missing country, wrong
/// measure datatype and a second agg_year; otherwise kinds are drawn.
DefectFixture generate_defects(std::uint64_t seed, std::size_t count, bool fixed_kinds = false);

nlohmann::ordered_json manifest_to_json(const std::vector<SeededDefect>& manifest);

/// The shape document shipped with the fixtures.
std::string capacity_shapes_text();

}  // namespace ede::energy
