#pragma once

#include "ede/mapping/records.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ede::pipeline {

struct RenameField {
    std::string from;
    std::string to;
};

struct ScaleNumeric {
    std::string field;
    double factor = 1.0;
};

/// One output record per distinct group-by key (first-seen order) holding the
/// group-by fields and the sum of `sum`. Missing summands are skipped; a group
/// without any summand gets a missing sum.
struct Aggregate {
    std::vector<std::string> group_by;
    std::string sum;
};

struct DropMissing {
    std::string field;
};

using PreprocessStep = std::variant<RenameField, ScaleNumeric, Aggregate, DropMissing>;

std::string_view step_name(const PreprocessStep& step);

/// Throws ValidationError: zero or non-finite factor, empty group-by, empty names.
void validate(const PreprocessStep& step);

struct RecordError {
    std::size_t step;
    std::size_t record;
    std::string message;
};

struct PreprocessResult {
    mapping::RecordTable table;
    std::vector<RecordError> errors;
};

/// Applies the steps in order. A non-numeric value under scale-numeric or
/// aggregate drops that record and is tallied in `errors`.
PreprocessResult preprocess(const mapping::RecordTable& input, const std::vector<PreprocessStep>& steps);
PreprocessResult preprocess(const std::vector<mapping::RawRecord>& records, const std::vector<PreprocessStep>& steps);

/// Whole-string decimal number (optional sign, digits, optional fraction,
/// optional exponent). Nullopt otherwise.
std::optional<long double> parse_number(std::string_view text);

/// Fixed-point, at most 9 fractional digits, trailing zeros and a trailing
/// "." trimmed, "-0" normalised to "0".
std::string canonical_decimal(long double value);

}  // namespace ede::pipeline
