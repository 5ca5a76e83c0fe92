#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mwlab {

using Json = nlohmann::ordered_json;

enum class LemmaId {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    THM1,
    CARRY,
    TYPE1,
    TYPE2,
    QUADFORM,
    SPLIT,
};

std::string_view to_string(LemmaId id);
LemmaId parse_lemma_id(std::string_view name);

/// Outcome of one inequality check. `params` is an insertion-ordered object
/// so that serialized reports are byte-stable.
struct CheckReport {
    LemmaId lemma_id = LemmaId::L1;
    Json params = Json::object();
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::optional<double> fitted_constant;
    bool pass = false;

    friend bool operator==(const CheckReport&, const CheckReport&) = default;
};

/// lhs / rhs, with 0/0 = 0.
double safe_ratio(double lhs, double rhs);

/// A JSON number, or "inf"/"-inf"/"nan" as a string for non-finite values.
Json json_number(double value);

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);
double parse_number(std::string_view text);

Json to_json(const CheckReport& report);
CheckReport report_from_json(const Json& j);

inline constexpr std::string_view kCsvHeader =
    "lemma_id,lambda,params_json,lhs,rhs,ratio,fitted_constant,pass";

/// One header line plus one RFC-4180 row per report.
std::string emit_csv(std::span<const CheckReport> reports);
std::vector<CheckReport> parse_csv(std::string_view text);

struct RunManifest {
    std::string command;
    Json config = Json::object();
    std::uint64_t seed = 0;
    std::string artifact_version = MWLAB_VERSION;
    std::optional<std::string> started;
    std::optional<std::string> finished;
    std::vector<CheckReport> reports;
    Json summary = Json::object();

    bool all_pass() const;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

Json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& j);
std::string serialize_manifest(const RunManifest& manifest);
RunManifest parse_manifest(std::string_view text);

/// Per-lemma aggregate: counts, failures, min/max of fitted constants and ratios.
Json summarize(std::span<const CheckReport> reports);

}  // namespace mwlab
