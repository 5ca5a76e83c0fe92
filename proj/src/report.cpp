#include "mwlab/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

#include "mwlab/limits.hpp"

namespace mwlab {

namespace {

constexpr std::array<std::pair<LemmaId, std::string_view>, 12> kLemmaNames{{
    {LemmaId::L1, "L1"},
    {LemmaId::L2, "L2"},
    {LemmaId::L3, "L3"},
    {LemmaId::L4, "L4"},
    {LemmaId::L5, "L5"},
    {LemmaId::L6, "L6"},
    {LemmaId::THM1, "THM1"},
    {LemmaId::CARRY, "CARRY"},
    {LemmaId::TYPE1, "TYPE1"},
    {LemmaId::TYPE2, "TYPE2"},
    {LemmaId::QUADFORM, "QUADFORM"},
    {LemmaId::SPLIT, "SPLIT"},
}};

double number_from_json(const Json& j)
{
    if (j.is_string()) return parse_number(j.get<std::string>());
    return j.get<double>();
}

std::string quote_csv(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> split_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw ArgumentError("unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

// JSON has no inf/nan; those travel as strings.
Json json_number(double v)
{
    if (std::isfinite(v)) return v;
    return format_number(v);
}

std::string_view to_string(LemmaId id)
{
    for (const auto& [value, name] : kLemmaNames) {
        if (value == id) return name;
    }
    return "?";
}

LemmaId parse_lemma_id(std::string_view name)
{
    for (const auto& [value, n] : kLemmaNames) {
        if (n == name) return value;
    }
    throw ArgumentError("unknown lemma id '" + std::string(name) + "'");
}

double safe_ratio(double lhs, double rhs)
{
    if (rhs == 0.0) {
        return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return lhs / rhs;
}

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw ArgumentError("cannot format number");
    return std::string(buf.data(), end);
}

double parse_number(std::string_view text)
{
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ArgumentError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

Json to_json(const CheckReport& report)
{
    Json j;
    j["lemma_id"] = std::string(to_string(report.lemma_id));
    j["params"] = report.params;
    j["lhs"] = json_number(report.lhs);
    j["rhs"] = json_number(report.rhs);
    j["ratio"] = json_number(report.ratio);
    j["fitted_constant"] = report.fitted_constant ? json_number(*report.fitted_constant) : Json(nullptr);
    j["pass"] = report.pass;
    return j;
}

CheckReport report_from_json(const Json& j)
{
    CheckReport r;
    r.lemma_id = parse_lemma_id(j.at("lemma_id").get<std::string>());
    r.params = j.at("params");
    r.lhs = number_from_json(j.at("lhs"));
    r.rhs = number_from_json(j.at("rhs"));
    r.ratio = number_from_json(j.at("ratio"));
    if (const auto& f = j.at("fitted_constant"); !f.is_null()) {
        r.fitted_constant = number_from_json(f);
    }
    r.pass = j.at("pass").get<bool>();
    return r;
}

std::string emit_csv(std::span<const CheckReport> reports)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : reports) {
        std::string lambda;
        if (auto it = r.params.find("lambda"); it != r.params.end() && it->is_number_integer()) {
            lambda = std::to_string(it->get<std::int64_t>());
        }
        out += to_string(r.lemma_id);
        out += ',' + lambda;
        out += ',' + quote_csv(r.params.dump());
        out += ',' + format_number(r.lhs);
        out += ',' + format_number(r.rhs);
        out += ',' + format_number(r.ratio);
        out += ',' + (r.fitted_constant ? format_number(*r.fitted_constant) : std::string());
        out += r.pass ? ",true\n" : ",false\n";
    }
    return out;
}

std::vector<CheckReport> parse_csv(std::string_view text)
{
    auto rows = split_csv(text);
    if (rows.empty()) throw ArgumentError("CSV is missing its header");
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
        header += (i ? "," : "") + rows[0][i];
    }
    if (header != kCsvHeader) throw ArgumentError("unexpected CSV header: " + header);

    std::vector<CheckReport> reports;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 8) {
            throw ArgumentError("CSV row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                                " fields, expected 8");
        }
        CheckReport r;
        r.lemma_id = parse_lemma_id(row[0]);
        r.params = Json::parse(row[2]);
        r.lhs = parse_number(row[3]);
        r.rhs = parse_number(row[4]);
        r.ratio = parse_number(row[5]);
        if (!row[6].empty()) r.fitted_constant = parse_number(row[6]);
        if (row[7] != "true" && row[7] != "false") {
            throw ArgumentError("CSV pass column must be true or false");
        }
        r.pass = row[7] == "true";
        reports.push_back(std::move(r));
    }
    return reports;
}

bool RunManifest::all_pass() const
{
    for (const auto& r : reports) {
        if (!r.pass) return false;
    }
    return true;
}

Json to_json(const RunManifest& m)
{
    Json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["seed"] = m.seed;
    j["artifact_version"] = m.artifact_version;
    j["started"] = m.started ? Json(*m.started) : Json(nullptr);
    j["finished"] = m.finished ? Json(*m.finished) : Json(nullptr);
    Json reports = Json::array();
    for (const auto& r : m.reports) reports.push_back(to_json(r));
    j["reports"] = std::move(reports);
    j["summary"] = m.summary;
    return j;
}

RunManifest manifest_from_json(const Json& j)
{
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.artifact_version = j.at("artifact_version").get<std::string>();
    if (!j.at("started").is_null()) m.started = j.at("started").get<std::string>();
    if (!j.at("finished").is_null()) m.finished = j.at("finished").get<std::string>();
    for (const auto& r : j.at("reports")) m.reports.push_back(report_from_json(r));
    m.summary = j.value("summary", Json::object());
    return m;
}

std::string serialize_manifest(const RunManifest& manifest)
{
    return to_json(manifest).dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text)
{
    try {
        return manifest_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
        throw ArgumentError(std::string("malformed manifest: ") + e.what());
    }
}

Json summarize(std::span<const CheckReport> reports)
{
    struct Acc {
        std::size_t count = 0;
        std::size_t failures = 0;
        std::optional<double> min_fit, max_fit;
        std::optional<double> min_ratio, max_ratio;
    };
    std::map<int, Acc> by_lemma;
    std::size_t failures = 0;
    for (const auto& r : reports) {
        auto& acc = by_lemma[static_cast<int>(r.lemma_id)];
        ++acc.count;
        if (!r.pass) {
            ++acc.failures;
            ++failures;
        }
        if (r.fitted_constant && std::isfinite(*r.fitted_constant)) {
            const double f = *r.fitted_constant;
            acc.min_fit = acc.min_fit ? std::min(*acc.min_fit, f) : f;
            acc.max_fit = acc.max_fit ? std::max(*acc.max_fit, f) : f;
        }
        if (std::isfinite(r.ratio)) {
            acc.min_ratio = acc.min_ratio ? std::min(*acc.min_ratio, r.ratio) : r.ratio;
            acc.max_ratio = acc.max_ratio ? std::max(*acc.max_ratio, r.ratio) : r.ratio;
        }
    }
    Json lemmas = Json::object();
    for (const auto& [id, acc] : by_lemma) {
        Json a;
        a["count"] = acc.count;
        a["failures"] = acc.failures;
        a["min_fitted_constant"] = acc.min_fit ? json_number(*acc.min_fit) : Json(nullptr);
        a["max_fitted_constant"] = acc.max_fit ? json_number(*acc.max_fit) : Json(nullptr);
        a["min_ratio"] = acc.min_ratio ? json_number(*acc.min_ratio) : Json(nullptr);
        a["max_ratio"] = acc.max_ratio ? json_number(*acc.max_ratio) : Json(nullptr);
        lemmas[std::string(to_string(static_cast<LemmaId>(id)))] = std::move(a);
    }
    Json out;
    out["total"] = reports.size();
    out["failures"] = failures;
    out["by_lemma"] = std::move(lemmas);
    return out;
}

}  // namespace mwlab
