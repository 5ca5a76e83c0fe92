#include "mwlab/lemma_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "mwlab/approximant.hpp"
#include "mwlab/parallel.hpp"

namespace mwlab {

namespace {

Json mask_params(const WalshMask& mask)
{
    Json p;
    p["lambda"] = mask.lambda();
    p["mask"] = mask.bits();
    p["weight"] = mask.weight();
    return p;
}

int ceil_log2(std::uint64_t n)
{
    return n <= 1 ? 0 : 64 - std::countl_zero(n - 1);
}

void require_stream_lambda(int lambda, const ResourceLimits& limits)
{
    require_table(lambda, 2 * sizeof(double), limits, "frequency streaming");
    if (lambda > kMaxStreamLambda) {
        throw ResourceError("frequency streaming at lambda=" + std::to_string(lambda) + " requires " +
                            table_bytes(lambda, 2 * sizeof(double)) +
                            " of magnitude tables; lemma checks stream lambda <= 16");
    }
}

}  // namespace

Json CheckTolerances::to_json() const
{
    Json j;
    j["absolute"] = absolute;
    j["lemma1_bracket"] = lemma1_bracket;
    j["lemma2_floor"] = lemma2_floor;
    j["lemma4_bracket"] = lemma4_bracket;
    j["lemma5_bracket"] = lemma5_bracket;
    j["approximant_sup"] = approximant_sup;
    return j;
}

CheckTolerances CheckTolerances::from_json(const Json& j)
{
    CheckTolerances t;
    t.absolute = j.value("absolute", t.absolute);
    t.lemma1_bracket = j.value("lemma1_bracket", t.lemma1_bracket);
    t.lemma2_floor = j.value("lemma2_floor", t.lemma2_floor);
    t.lemma4_bracket = j.value("lemma4_bracket", t.lemma4_bracket);
    t.lemma5_bracket = j.value("lemma5_bracket", t.lemma5_bracket);
    t.approximant_sup = j.value("approximant_sup", t.approximant_sup);
    return t;
}

double explicit_l1_bound(int m)
{
    return std::pow(2.0 + std::numbers::sqrt2, m / 4.0);
}

LemmaChecker::LemmaChecker(int lambda, CheckTolerances tolerances, const ResourceLimits& limits)
    : tol_(tolerances), table_((require_stream_lambda(lambda, limits), lambda), limits)
{
}

void LemmaChecker::check_mask(const WalshMask& mask) const
{
    if (mask.lambda() != lambda()) {
        throw ArgumentError("mask lambda " + std::to_string(mask.lambda()) + " does not match checker lambda " +
                            std::to_string(lambda()));
    }
}

CheckReport LemmaChecker::lemma1(const WalshMask& mask) const
{
    check_mask(mask);
    CheckReport r{LemmaId::L1, mask_params(mask)};
    r.lhs = table_.l1(mask, FullRange{});
    const int weight = mask.weight();
    if (weight == 0) {
        // l1 of w_empty is 1 = (C lambda)^0: informational
        r.rhs = 1.0;
        r.ratio = safe_ratio(r.lhs, r.rhs);
        r.pass = true;
        r.params["note"] = "empty mask";
        return r;
    }
    const double fitted = std::pow(r.lhs, 1.0 / weight) / lambda();
    r.rhs = std::pow(tol_.lemma1_bracket * lambda(), weight);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.fitted_constant = fitted;
    r.pass = fitted <= tol_.lemma1_bracket;
    return r;
}

CheckReport LemmaChecker::lemma2(const WalshMask& mask) const
{
    check_mask(mask);
    CheckReport r{LemmaId::L2, mask_params(mask)};
    r.lhs = table_.sup(mask);
    const int weight = mask.weight();
    if (weight == 0 || mask.bits() == 1) {
        r.rhs = 1.0;
        r.ratio = safe_ratio(r.lhs, r.rhs);
        r.pass = true;
        r.params["skip"] = weight == 0 ? "empty mask" : "w_A is the single character e(x/2)";
        if (weight > 0) r.fitted_constant = 0.0 - std::log2(r.lhs) / weight;
        return r;
    }
    const double fitted = 0.0 - std::log2(r.lhs) / weight;
    r.rhs = std::exp2(-tol_.lemma2_floor * weight);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.fitted_constant = fitted;
    r.pass = fitted >= tol_.lemma2_floor - tol_.absolute;
    return r;
}

CheckReport LemmaChecker::lemma3(const WalshMask& mask) const
{
    check_mask(mask);
    CheckReport r{LemmaId::L3, mask_params(mask)};
    r.lhs = table_.l1(mask, FullRange{});
    r.rhs = explicit_l1_bound(lambda());
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.pass = r.lhs <= r.rhs + tol_.absolute;
    return r;
}

CheckReport LemmaChecker::lemma4(int r_bits, std::uint64_t a, const WalshMask& mask) const
{
    check_mask(mask);
    const ResidueClass cls{a, r_bits};
    validate_selector(cls, lambda());
    CheckReport r{LemmaId::L4, mask_params(mask)};
    r.params["r"] = r_bits;
    r.params["a"] = a;
    r.lhs = r_bits == 0 ? table_.l1(mask, FullRange{}) : table_.l1(mask, cls);
    r.rhs = explicit_l1_bound(lambda() - r_bits);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.fitted_constant = r.ratio;
    r.pass = r.ratio <= tol_.lemma4_bracket;
    return r;
}

CheckReport LemmaChecker::lemma6(const FrequencyInterval& interval, const WalshMask& mask) const
{
    check_mask(mask);
    validate_selector(interval, lambda());
    const std::uint64_t length = interval.end - interval.begin;
    const int m = ceil_log2(length);
    CheckReport r{LemmaId::L6, mask_params(mask)};
    r.params["j_begin"] = interval.begin;
    r.params["j_end"] = interval.end;
    r.params["m"] = m;
    r.lhs = table_.l1(mask, interval);
    r.rhs = explicit_l1_bound(m);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.pass = r.lhs <= r.rhs + tol_.absolute;
    return r;
}

CheckReport check_lemma1(const WalshMask& mask, const CheckTolerances& tol)
{
    return LemmaChecker(mask.lambda(), tol).lemma1(mask);
}

CheckReport check_lemma2(const WalshMask& mask, const CheckTolerances& tol)
{
    return LemmaChecker(mask.lambda(), tol).lemma2(mask);
}

CheckReport check_lemma3(const WalshMask& mask, const CheckTolerances& tol)
{
    return LemmaChecker(mask.lambda(), tol).lemma3(mask);
}

CheckReport check_lemma4(int r, std::uint64_t a, const WalshMask& mask, const CheckTolerances& tol)
{
    return LemmaChecker(mask.lambda(), tol).lemma4(r, a, mask);
}

CheckReport check_lemma6(const FrequencyInterval& interval, const WalshMask& mask, const CheckTolerances& tol)
{
    return LemmaChecker(mask.lambda(), tol).lemma6(interval, mask);
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw ArgumentError("slope fit needs at least two matched points");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0) throw ArgumentError("slope fit needs distinct abscissae");
    return sxy / sxx;
}

CheckReport check_lemma5(int lambda, int sigma, std::span<const int> t_grid, const WalshMask& mask,
                         const CheckTolerances& tol)
{
    if (mask.lambda() != lambda) {
        throw ArgumentError("mask lambda does not match");
    }
    if (sigma < 0 || sigma > lambda) {
        throw ArgumentError("sigma must lie in [0, lambda]");
    }
    if (t_grid.empty()) {
        throw ArgumentError("lemma 5 needs a nonempty t grid");
    }
    if (lambda > kMaxStreamLambda) {
        throw ResourceError("lemma 5 at lambda=" + std::to_string(lambda) + " requires " +
                            table_bytes(lambda, sizeof(std::complex<double>)) +
                            " per synthesized table; lemma checks run at lambda <= 16");
    }

    CheckReport r{LemmaId::L5, mask_params(mask)};
    r.params["sigma"] = sigma;
    r.params["t_grid"] = std::vector<int>(t_grid.begin(), t_grid.end());

    // tail l1 against 2^(sigma/4) C^((ln lambda)^2)
    r.lhs = l1_accumulate(mask, FullRange{});
    r.rhs = std::exp2(sigma / 4.0);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    const double log_lambda = std::log(static_cast<double>(lambda));
    const double fitted = std::pow(r.ratio, 1.0 / (log_lambda * log_lambda));
    r.fitted_constant = fitted;

    std::vector<double> ts, log_errors;
    Json errors = Json::array();
    Json regime = Json::array();
    bool support_ok = true;
    bool dominated = true;
    bool all_zero = true;
    double sup = 0.0;
    std::uint64_t max_support = 0;
    for (int t : t_grid) {
        ApproximantConfig cfg{lambda, sigma, t};
        const auto approx = build_approximant(mask, cfg);
        const double err = l2_error(approx);
        const auto support = check_support(approx, tol.absolute);
        support_ok = support_ok && support.within_band && support.max_support < cfg.band();
        dominated = dominated && support.dominated;
        max_support = std::max(max_support, support.max_support);
        sup = std::max(sup, approx.sup_norm());
        errors.push_back(json_number(err));
        regime.push_back(cfg.in_asymptotic_regime());
        if (err > 1e-14) all_zero = false;
        ts.push_back(t);
        log_errors.push_back(std::log2(std::max(err, 1e-300)));
    }
    double slope = 0.0;
    bool slope_ok = true;
    if (!all_zero) {
        if (ts.size() < 2) throw ArgumentError("error slope needs at least two t values");
        slope = least_squares_slope(ts, log_errors);
        slope_ok = slope < 0.0;
    }
    const bool sup_ok = sup <= tol.approximant_sup + tol.absolute;

    r.params["l2_errors"] = std::move(errors);
    r.params["error_log2_slope"] = all_zero ? Json(nullptr) : json_number(slope);
    r.params["max_support"] = max_support;
    r.params["support_ok"] = support_ok;
    r.params["dominated"] = dominated;
    r.params["sup_norm"] = json_number(sup);
    r.params["sup_ok"] = sup_ok;
    r.params["slope_ok"] = slope_ok;
    r.params["in_regime"] = std::move(regime);
    r.pass = fitted <= tol.lemma5_bracket && support_ok && dominated && sup_ok && slope_ok;
    return r;
}

std::string MaskFamily::to_string() const
{
    switch (kind) {
    case Kind::all: return "all";
    case Kind::structured: return "structured";
    case Kind::random: return "random:" + std::to_string(count);
    }
    return "structured";
}

MaskFamily MaskFamily::parse(std::string_view text)
{
    MaskFamily f;
    if (text == "all") {
        f.kind = Kind::all;
    } else if (text == "structured") {
        f.kind = Kind::structured;
    } else if (text.starts_with("random")) {
        f.kind = Kind::random;
        if (text.size() > 6) {
            if (text[6] != ':') throw ArgumentError("mask family 'random' takes ':count'");
            const std::string count(text.substr(7));
            std::size_t used = 0;
            unsigned long long n = 0;
            try {
                n = std::stoull(count, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != count.size() || count.empty() || n == 0) {
                throw ArgumentError("bad random mask count '" + count + "'");
            }
            f.count = n;
        }
    } else {
        throw ArgumentError("unknown mask family '" + std::string(text) + "'");
    }
    return f;
}

std::vector<WalshMask> structured_masks(int lambda)
{
    std::vector<std::uint64_t> bits{0};
    const std::uint64_t full = lambda == 0 ? 0 : (~std::uint64_t{0} >> (64 - lambda));
    for (int j = 0; j < lambda; ++j) bits.push_back(std::uint64_t{1} << j);
    bits.push_back(full);
    for (int step = 2; step <= 3; ++step) {
        for (int offset = 0; offset < step; ++offset) {
            std::uint64_t b = 0;
            for (int j = offset; j < lambda; j += step) b |= std::uint64_t{1} << j;
            bits.push_back(b);
        }
    }
    for (int s = 1; s < lambda; ++s) {
        bits.push_back(full & ~((std::uint64_t{1} << (lambda - s)) - 1));  // top s bits
        bits.push_back((std::uint64_t{1} << s) - 1);                       // bottom s bits
    }
    std::vector<WalshMask> out;
    std::set<std::uint64_t> seen;
    for (auto b : bits) {
        if (seen.insert(b).second) out.emplace_back(b, lambda);
    }
    return out;
}

std::vector<WalshMask> enumerate_masks(const MaskFamily& family, int lambda, std::uint64_t seed)
{
    switch (family.kind) {
    case MaskFamily::Kind::all: {
        if (lambda > kMaxExhaustiveLambda) {
            throw ArgumentError("exhaustive mask family is limited to lambda <= 14");
        }
        std::vector<WalshMask> out;
        out.reserve(std::size_t{1} << lambda);
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << lambda); ++b) out.emplace_back(b, lambda);
        return out;
    }
    case MaskFamily::Kind::random: {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(lambda), 0x6d61736bu};
        std::mt19937_64 rng(seq);
        const std::uint64_t limit = (std::uint64_t{1} << lambda) - 1;
        std::uniform_int_distribution<std::uint64_t> draw(0, limit);
        std::vector<WalshMask> out;
        for (std::size_t i = 0; i < family.count; ++i) out.emplace_back(draw(rng), lambda);
        return out;
    }
    case MaskFamily::Kind::structured: return structured_masks(lambda);
    }
    return {};
}

FrequencyInterval random_interval(int lambda, std::mt19937_64& rng)
{
    // log-uniform length in [1, 2^lambda - 1], then a uniform start in [1, 2^lambda - len]
    const std::uint64_t n = std::uint64_t{1} << lambda;
    std::uniform_int_distribution<int> scale(0, lambda);
    const int m = scale(rng);
    const std::uint64_t lo_len = m == 0 ? 1 : (std::uint64_t{1} << (m - 1));
    const std::uint64_t hi_len = std::min(n - 1, (std::uint64_t{1} << m));
    std::uniform_int_distribution<std::uint64_t> len_draw(std::min(lo_len, hi_len), hi_len);
    const std::uint64_t len = len_draw(rng);
    std::uniform_int_distribution<std::uint64_t> start_draw(1, n - len);
    const std::uint64_t begin = start_draw(rng);
    return {begin, begin + len};
}

Json ScanConfig::to_json() const
{
    Json j;
    j["lambda_min"] = lambda_min;
    j["lambda_max"] = lambda_max;
    j["masks"] = masks.to_string();
    Json ids = Json::array();
    for (auto id : lemmas) ids.push_back(std::string(mwlab::to_string(id)));
    j["lemmas"] = std::move(ids);
    j["lemma4_r"] = lemma4_r;
    j["lemma4_residues"] = lemma4_residues;
    j["lemma5_sigma"] = lemma5_sigma;
    j["lemma5_t"] = lemma5_t;
    j["lemma6_intervals"] = lemma6_intervals;
    j["tolerances"] = tolerances.to_json();
    j["seed"] = seed;
    return j;
}

ScanConfig ScanConfig::from_json(const Json& j)
{
    ScanConfig c;
    c.lambda_min = j.value("lambda_min", c.lambda_min);
    c.lambda_max = j.value("lambda_max", c.lambda_max);
    if (j.contains("masks")) c.masks = MaskFamily::parse(j.at("masks").get<std::string>());
    if (j.contains("lemmas")) {
        c.lemmas.clear();
        for (const auto& id : j.at("lemmas")) c.lemmas.push_back(parse_lemma_id(id.get<std::string>()));
    }
    c.lemma4_r = j.value("lemma4_r", c.lemma4_r);
    c.lemma4_residues = j.value("lemma4_residues", c.lemma4_residues);
    c.lemma5_sigma = j.value("lemma5_sigma", c.lemma5_sigma);
    c.lemma5_t = j.value("lemma5_t", c.lemma5_t);
    c.lemma6_intervals = j.value("lemma6_intervals", c.lemma6_intervals);
    if (j.contains("tolerances")) c.tolerances = CheckTolerances::from_json(j.at("tolerances"));
    c.seed = j.value("seed", c.seed);
    return c;
}

ScanResult run_scan(const ScanConfig& config, const ResourceLimits& limits)
{
    if (config.lambda_min < 1 || config.lambda_min > config.lambda_max + 1) {
        throw ArgumentError("scan needs 1 <= lambda_min and lambda_min <= lambda_max (or an empty range)");
    }
    for (const auto id : config.lemmas) {
        if (id == LemmaId::THM1 || id == LemmaId::CARRY || id == LemmaId::TYPE1 || id == LemmaId::TYPE2 ||
            id == LemmaId::QUADFORM || id == LemmaId::SPLIT) {
            throw ArgumentError("scan covers L1-L6; use the dedicated commands for " +
                                std::string(to_string(id)));
        }
    }
    auto wants = [&](LemmaId id) {
        return std::find(config.lemmas.begin(), config.lemmas.end(), id) != config.lemmas.end();
    };

    ScanResult result;
    for (int lambda = config.lambda_min; lambda <= config.lambda_max; ++lambda) {
        const LemmaChecker checker(lambda, config.tolerances, limits);
        const auto masks = enumerate_masks(config.masks, lambda, config.seed);
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(lambda), 0x70617261u};
        std::mt19937_64 rng(seq);

        // Jobs are laid out (and their random parameters drawn) sequentially.
        std::vector<std::function<CheckReport()>> jobs;
        for (const auto& mask : masks) {
            if (wants(LemmaId::L1)) jobs.emplace_back([&checker, mask] { return checker.lemma1(mask); });
            if (wants(LemmaId::L2)) jobs.emplace_back([&checker, mask] { return checker.lemma2(mask); });
            if (wants(LemmaId::L3)) jobs.emplace_back([&checker, mask] { return checker.lemma3(mask); });
            if (wants(LemmaId::L4)) {
                for (int r : config.lemma4_r) {
                    if (r < 0 || r >= lambda) continue;
                    std::uniform_int_distribution<std::uint64_t> draw(0, (std::uint64_t{1} << r) - 1);
                    for (std::size_t i = 0; i < config.lemma4_residues; ++i) {
                        const std::uint64_t a = draw(rng);
                        jobs.emplace_back([&checker, mask, r, a] { return checker.lemma4(r, a, mask); });
                    }
                }
            }
            if (wants(LemmaId::L6)) {
                for (std::size_t i = 0; i < config.lemma6_intervals; ++i) {
                    const auto interval = random_interval(lambda, rng);
                    jobs.emplace_back([&checker, mask, interval] { return checker.lemma6(interval, mask); });
                }
            }
        }
        if (wants(LemmaId::L5)) {
            for (int sigma : config.lemma5_sigma) {
                std::vector<int> ts;
                for (int t : config.lemma5_t) {
                    if (t >= 1 && sigma + t <= lambda - 1) ts.push_back(t);
                }
                if (sigma < 0 || sigma >= lambda || ts.size() < 2) continue;
                for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << sigma); ++sub) {
                    const WalshMask mask(sub << (lambda - sigma), lambda);
                    jobs.emplace_back([lambda, sigma, ts, mask, tol = config.tolerances] {
                        return check_lemma5(lambda, sigma, ts, mask, tol);
                    });
                }
            }
        }

        std::vector<CheckReport> reports(jobs.size());
        detail::parallel_for(jobs.size(), config.threads, [&](std::size_t i) { reports[i] = jobs[i](); });
        std::move(reports.begin(), reports.end(), std::back_inserter(result.reports));
    }
    result.summary = summarize(result.reports);
    return result;
}

}  // namespace mwlab
