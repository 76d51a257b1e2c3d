#include "ede/pipeline/preprocess.hpp"

#include "ede/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include <fmt/core.h>

namespace ede::pipeline {

using mapping::RawRecord;

std::string_view step_name(const PreprocessStep& step) {
    static constexpr std::string_view names[] = {"rename-field", "scale-numeric", "aggregate", "drop-missing"};
    return names[step.index()];
}

void validate(const PreprocessStep& step) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RenameField>) {
                if (s.from.empty() || s.to.empty()) throw ValidationError("rename-field needs non-empty from and to");
            } else if constexpr (std::is_same_v<T, ScaleNumeric>) {
                if (s.field.empty()) throw ValidationError("scale-numeric needs a field");
                if (!std::isfinite(s.factor) || s.factor == 0.0) {
                    throw ValidationError("scale-numeric factor must be finite and non-zero");
                }
            } else if constexpr (std::is_same_v<T, Aggregate>) {
                if (s.group_by.empty()) throw ValidationError("aggregate needs at least one group-by field");
                if (s.sum.empty()) throw ValidationError("aggregate needs a sum field");
                if (std::find(s.group_by.begin(), s.group_by.end(), s.sum) != s.group_by.end()) {
                    throw ValidationError("aggregate sum field '" + s.sum + "' is also a group-by field");
                }
            } else {
                if (s.field.empty()) throw ValidationError("drop-missing needs a field");
            }
        },
        step);
}

std::optional<long double> parse_number(std::string_view text) {
    std::size_t i = 0;
    auto digits = [&] {
        std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
        return i - start;
    };
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
    std::size_t whole = digits();
    std::size_t frac = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        frac = digits();
    }
    if (whole + frac == 0) return std::nullopt;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
        if (digits() == 0) return std::nullopt;
    }
    if (i != text.size()) return std::nullopt;
    std::string copy(text);
    long double value = std::strtold(copy.c_str(), nullptr);
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

std::string canonical_decimal(long double value) {
    auto text = fmt::format("{:.9f}", static_cast<double>(value));
    if (text.find('.') != std::string::npos) {
        while (text.back() == '0') text.pop_back();
        if (text.back() == '.') text.pop_back();
    }
    if (text == "-0") text = "0";
    return text;
}

namespace {

void apply(const RenameField& s, std::size_t, PreprocessResult& r) {
    auto& header = r.table.header;
    auto from = std::find(header.begin(), header.end(), s.from);
    if (from != header.end()) {
        header.erase(std::remove(header.begin(), header.end(), s.to), header.end());
        from = std::find(header.begin(), header.end(), s.from);
        *from = s.to;
    }
    for (auto& record : r.table.records) record.rename(s.from, s.to);
}

void apply(const ScaleNumeric& s, std::size_t step, PreprocessResult& r) {
    std::vector<RawRecord> kept;
    for (std::size_t i = 0; i < r.table.records.size(); ++i) {
        auto& record = r.table.records[i];
        if (auto value = record.get(s.field)) {
            auto number = parse_number(*value);
            if (!number) {
                r.errors.push_back({step, i, "field '" + s.field + "' is not numeric: '" + *value + "'"});
                continue;
            }
            record.set(s.field, canonical_decimal(*number * static_cast<long double>(s.factor)));
        }
        kept.push_back(std::move(record));
    }
    r.table.records = std::move(kept);
}

void apply(const Aggregate& s, std::size_t step, PreprocessResult& r) {
    using Key = std::vector<std::optional<std::string>>;
    std::map<Key, std::size_t> index;
    std::vector<std::pair<Key, std::optional<long double>>> groups;
    for (std::size_t i = 0; i < r.table.records.size(); ++i) {
        const auto& record = r.table.records[i];
        std::optional<long double> summand;
        if (auto value = record.get(s.sum)) {
            summand = parse_number(*value);
            if (!summand) {
                r.errors.push_back({step, i, "field '" + s.sum + "' is not numeric: '" + *value + "'"});
                continue;
            }
        }
        Key key;
        for (const auto& f : s.group_by) key.push_back(record.get(f));
        auto [it, inserted] = index.try_emplace(key, groups.size());
        if (inserted) groups.push_back({key, std::nullopt});
        auto& total = groups[it->second].second;
        if (summand) total = total.value_or(0.0L) + *summand;
    }
    r.table.records.clear();
    for (const auto& [key, total] : groups) {
        RawRecord out;
        for (std::size_t k = 0; k < s.group_by.size(); ++k) out.set(s.group_by[k], key[k]);
        out.set(s.sum, total ? std::optional<std::string>(canonical_decimal(*total)) : std::nullopt);
        r.table.records.push_back(std::move(out));
    }
    r.table.header = s.group_by;
    r.table.header.push_back(s.sum);
}

void apply(const DropMissing& s, std::size_t, PreprocessResult& r) {
    std::erase_if(r.table.records, [&](const RawRecord& record) { return !record.get(s.field).has_value(); });
}

}  // namespace

PreprocessResult preprocess(const mapping::RecordTable& input, const std::vector<PreprocessStep>& steps) {
    for (const auto& step : steps) validate(step);
    PreprocessResult result{input, {}};
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::visit([&](const auto& s) { apply(s, i, result); }, steps[i]);
    }
    return result;
}

PreprocessResult preprocess(const std::vector<mapping::RawRecord>& records, const std::vector<PreprocessStep>& steps) {
    return preprocess(mapping::RecordTable{mapping::header_of(records), records}, steps);
}

}  // namespace ede::pipeline
