#include "mwlab/sum_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "mwlab/parallel.hpp"

namespace mwlab {

namespace {

constexpr std::uint64_t kMaxWork = std::uint64_t{1} << 40;
constexpr std::uint64_t kChunk = 64;  // fixed partial-sum granularity over m

void require_work(std::uint64_t work, std::string_view what)
{
    if (work > kMaxWork) {
        throw ResourceError(std::string(what) + " needs " + std::to_string(work) +
                            " term evaluations; the desk-scale cap is 2^40");
    }
}

// Sums fn(m) over m in [lo, hi) in fixed-size chunks merged in order.
template <class Fn>
double chunked_sum(std::uint64_t lo, std::uint64_t hi, Fn&& fn)
{
    const std::uint64_t chunks = (hi - lo + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    detail::parallel_for(chunks, 0, [&](std::size_t c) {
        const std::uint64_t a = lo + c * kChunk;
        const std::uint64_t b = std::min(hi, a + kChunk);
        double s = 0.0;
        for (std::uint64_t m = a; m < b; ++m) s += fn(m);
        partial[c] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

Json bilinear_params(const BilinearConfig& c)
{
    Json p = c.to_json();
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------

CheckReport theorem_check(const ArithmeticSequence& seq, const ResourceLimits& limits, const FwhtOptions& options)
{
    const auto best = max_correlation(seq, limits, options);
    const int lambda = seq.lambda();
    CheckReport r{LemmaId::THM1};
    r.params["lambda"] = lambda;
    r.params["kind"] = std::string(to_string(seq.kind()));
    r.params["mask"] = best.mask.bits();
    r.params["weight"] = best.mask.weight();
    r.params["value"] = best.value;
    r.lhs = std::abs(static_cast<double>(best.value));
    r.rhs = std::exp2(lambda - std::pow(static_cast<double>(lambda), 0.1));
    r.ratio = safe_ratio(r.lhs, r.rhs);
    if (best.value != 0) {
        const double exponent = std::log2(r.lhs) / lambda;
        r.fitted_constant = exponent;
        r.params["exponent"] = exponent;
    } else {
        r.params["exponent"] = nullptr;
    }
    r.pass = r.lhs < r.rhs;
    return r;
}

std::vector<CheckReport> theorem_scan(FunctionKind kind, int lambda_min, int lambda_max,
                                      const ResourceLimits& limits, const FwhtOptions& options)
{
    if (kind != FunctionKind::moebius && kind != FunctionKind::liouville) {
        throw ArgumentError("theorem scan runs on moebius or liouville");
    }
    if (lambda_min < 1 || lambda_min > lambda_max) {
        throw ArgumentError("theorem scan needs 1 <= lambda_min <= lambda_max");
    }
    std::vector<CheckReport> out;
    for (int lambda = lambda_min; lambda <= lambda_max; ++lambda) {
        require_table(lambda, sizeof(std::int64_t), limits, "theorem scan");
        SieveOptions sieve_options;
        sieve_options.limits = limits;
        sieve_options.threads = options.threads;
        out.push_back(theorem_check(sieve(kind, lambda, sieve_options), limits, options));
    }
    return out;
}

// ---------------------------------------------------------------------------

CoefficientKind parse_coefficient_kind(std::string_view name)
{
    if (name == "ones") return CoefficientKind::ones;
    if (name == "random" || name == "random_signs") return CoefficientKind::random_signs;
    throw ArgumentError("unknown coefficient generator '" + std::string(name) + "'");
}

std::vector<double> make_coefficients(CoefficientKind kind, std::size_t count, std::uint64_t seed)
{
    std::vector<double> out(count, 1.0);
    if (kind == CoefficientKind::random_signs) {
        std::mt19937_64 rng(seed);
        for (auto& v : out) v = (rng() >> 63) ? -1.0 : 1.0;
    }
    return out;
}

void BilinearConfig::validate() const
{
    if (mu < 0 || nu < 0 || mu > nu) {
        throw ArgumentError("bilinear ranges need 0 <= mu <= nu");
    }
    if (product_bits() > WalshMask::kMaxLambda) {
        throw ArgumentError("range overflow: products need mu + nu + 2 <= 62 bits");
    }
    if (mask.bits() >> product_bits()) {
        throw ArgumentError("mask has bits at or above mu + nu + 2");
    }
    if (!alpha.empty() && alpha.size() != M()) throw ArgumentError("alpha must have M = 2^mu entries");
    if (!beta.empty() && beta.size() != N()) throw ArgumentError("beta must have N = 2^nu entries");
    auto bounded = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::abs(x) <= 1.0; });
    };
    if (!bounded(alpha) || !bounded(beta)) throw ArgumentError("coefficients must satisfy |c| <= 1");
    if (rho < 0 || K < 0) throw ArgumentError("rho and K must be nonnegative");
    if (!(epsilon > 0)) throw ArgumentError("epsilon must be positive");
}

void BilinearConfig::validate_shifts() const
{
    validate();
    if (rho + K >= 62 || (L() << K) >= N()) {
        throw ArgumentError("shifts need L 2^K < N: L=" + std::to_string(L()) + " K=" + std::to_string(K) +
                            " N=" + std::to_string(N()));
    }
}

std::vector<std::string> BilinearConfig::regime_flags() const
{
    std::vector<std::string> flags;
    if (100 * rho >= mu) flags.emplace_back("rho >= mu/100");
    const double er = epsilon * rho;
    if (er <= 0 || std::abs(er - std::round(er)) > 1e-12) flags.emplace_back("epsilon*rho not a positive integer");
    if (K != 0 && !(mu - rho <= K && K < lambda() - mu - rho)) {
        flags.emplace_back("K outside {0} or [mu-rho, lambda-mu-rho)");
    }
    return flags;
}

Json BilinearConfig::to_json() const
{
    Json j;
    j["lambda"] = lambda();
    j["mu"] = mu;
    j["nu"] = nu;
    j["mask"] = mask.bits();
    j["weight"] = mask.weight();
    j["rho"] = rho;
    j["K"] = K;
    j["epsilon"] = epsilon;
    j["alpha"] = alpha.empty() ? "ones" : "table";
    j["beta"] = beta.empty() ? "ones" : "table";
    j["regime_flags"] = regime_flags();
    return j;
}

double bilinear_sum(const BilinearConfig& c)
{
    c.validate();
    require_work(c.M() * c.N(), "bilinear sum");
    const std::uint64_t bits = c.mask.bits();
    return chunked_sum(c.M(), 2 * c.M(), [&](std::uint64_t m) {
        double inner = 0.0;
        for (std::uint64_t n = c.N(); n < 2 * c.N(); ++n) inner += c.beta_at(n) * walsh_sign(bits, m * n);
        return std::abs(inner);
    });
}

double bilinear_sum_signed(const BilinearConfig& c)
{
    c.validate();
    require_work(c.M() * c.N(), "bilinear sum");
    const std::uint64_t bits = c.mask.bits();
    return std::abs(chunked_sum(c.M(), 2 * c.M(), [&](std::uint64_t m) {
        double inner = 0.0;
        for (std::uint64_t n = c.N(); n < 2 * c.N(); ++n) inner += c.beta_at(n) * walsh_sign(bits, m * n);
        return c.alpha_at(m) * inner;
    }));
}

QuadraticForm shifted_quadratic_form(const BilinearConfig& c, ShiftPolicy policy)
{
    c.validate_shifts();
    const std::uint64_t M = c.M(), N = c.N(), L = c.L();
    require_work(M * N * (2 * L - 1), "shifted quadratic form");
    const std::uint64_t bits = c.mask.bits();
    const auto step = static_cast<std::int64_t>(std::uint64_t{1} << c.K);

    QuadraticForm q;
    q.policy = policy;
    q.prefactor = static_cast<double>(M) * static_cast<double>(N) / static_cast<double>(L);

    // chunk over n; each chunk reports (sum, clipped)
    const std::uint64_t chunks = (N + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    std::vector<std::uint64_t> clipped(chunks, 0);
    detail::parallel_for(chunks, 0, [&](std::size_t ci) {
        const std::uint64_t a = N + ci * kChunk;
        const std::uint64_t b = std::min(2 * N, a + kChunk);
        for (std::uint64_t n = a; n < b; ++n) {
            for (auto l = -static_cast<std::int64_t>(L) + 1; l < static_cast<std::int64_t>(L); ++l) {
                const auto shifted = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + l * step);
                if (shifted < N || shifted >= 2 * N) {
                    ++clipped[ci];
                    if (policy == ShiftPolicy::clip) continue;
                }
                std::int64_t inner = 0;
                for (std::uint64_t m = M; m < 2 * M; ++m) inner += walsh_sign(bits, (m * n) ^ (m * shifted));
                partial[ci] += static_cast<double>(std::llabs(inner));
            }
        }
    });
    for (std::uint64_t ci = 0; ci < chunks; ++ci) {
        q.value += partial[ci];
        q.clipped += clipped[ci];
    }
    return q;
}

double cauchy_schwarz_factor(const BilinearConfig& c)
{
    const double L = static_cast<double>(c.L());
    return static_cast<double>(c.M()) * (static_cast<double>(c.N()) + (L - 1) * std::ldexp(1.0, c.K)) / L;
}

CarryRate carry_truncation_rate(const BilinearConfig& c)
{
    c.validate_shifts();
    const std::uint64_t M = c.M(), N = c.N(), L = c.L();
    require_work(M * N * (2 * L), "carry truncation");
    CarryRate out;
    out.threshold = c.K + c.mu + c.rho + c.epsilon * c.rho;
    out.predicted = std::exp2(-c.epsilon * c.rho);
    if (L <= 1) return out;  // no nonzero shifts

    // digits j > threshold, i.e. j >= floor(threshold) + 1
    const int high_start = static_cast<int>(std::floor(out.threshold)) + 1;
    const std::uint64_t low_mask = (std::uint64_t{1} << c.K) - 1;
    const auto step = static_cast<std::int64_t>(std::uint64_t{1} << c.K);

    const std::uint64_t chunks = (M + kChunk - 1) / kChunk;
    struct Counts {
        std::uint64_t triples = 0, any = 0, low = 0, high = 0;
    };
    std::vector<Counts> partial(chunks);
    detail::parallel_for(chunks, 0, [&](std::size_t ci) {
        Counts cnt;
        const std::uint64_t a = M + ci * kChunk;
        const std::uint64_t b = std::min(2 * M, a + kChunk);
        for (std::uint64_t m = a; m < b; ++m) {
            for (std::uint64_t n = N; n < 2 * N; ++n) {
                const std::uint64_t x = m * n;
                for (auto l = -static_cast<std::int64_t>(L) + 1; l < static_cast<std::int64_t>(L); ++l) {
                    if (l == 0) continue;
                    const auto shifted = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + l * step);
                    const std::uint64_t d = x ^ (m * shifted);
                    const bool low = (d & low_mask) != 0;
                    const bool high = high_start < 64 && (d >> high_start) != 0;
                    ++cnt.triples;
                    cnt.low += low;
                    cnt.high += high;
                    cnt.any += (low || high);
                }
            }
        }
        partial[ci] = cnt;
    });
    for (const auto& cnt : partial) {
        out.triples += cnt.triples;
        out.differing += cnt.any;
        out.low_differing += cnt.low;
        out.high_differing += cnt.high;
    }
    const double total = static_cast<double>(out.triples);
    out.rate = out.differing / total;
    out.low_rate = out.low_differing / total;
    out.high_rate = out.high_differing / total;
    out.implied_constant = out.rate / out.predicted;
    return out;
}

double type1_sum(const WalshMask& mask, int mu, int nu)
{
    BilinearConfig c;
    c.mask = mask;
    c.mu = mu;
    c.nu = nu;
    return bilinear_sum(c);
}

FrequencyTest frequency_test_count(const WalshMask& mask, int mu, std::optional<double> threshold)
{
    const int lambda = mask.lambda();
    if (lambda > 16) {
        throw ResourceError("frequency test at lambda=" + std::to_string(lambda) + " requires " +
                            table_bytes(lambda, 2 * sizeof(double)) + "; streamed k needs lambda <= 16");
    }
    if (mu < 0 || 2 * mu > lambda) {
        throw ArgumentError("frequency test needs 0 <= mu <= lambda/2");
    }
    const std::uint64_t X = std::uint64_t{1} << lambda;
    const std::uint64_t M = std::uint64_t{1} << mu;
    const double N = std::ldexp(1.0, lambda - mu);
    FrequencyTest out;
    out.threshold = threshold.value_or(static_cast<double>(lambda) * lambda / N);

    const MagnitudeTable table(lambda);
    std::vector<double> mags(X);
    for (std::uint64_t k = 0; k < X; ++k) {
        mags[k] = table.magnitude(mask.bits(), k);
        out.sup = std::max(out.sup, mags[k]);
    }
    const double weighted = chunked_sum(M, 2 * M, [&](std::uint64_t m) {
        double s = 0.0;
        for (std::uint64_t k = 0; k < X; ++k) {
            const std::uint64_t t = (k * m) & (X - 1);
            const double dist = std::ldexp(static_cast<double>(std::min(t, X - t)), -lambda);
            if (dist < out.threshold) s += mags[k];
        }
        return s;
    });
    out.value = N * weighted;
    out.bound = N * static_cast<double>(M) * static_cast<double>(M) * lambda * lambda * out.sup;
    return out;
}

Json SplitConfig::to_json() const
{
    Json j;
    j["lambda"] = mask.lambda();
    j["mask"] = mask.bits();
    j["mu"] = mu;
    j["H"] = H;
    j["max_s2"] = max_s2;
    return j;
}

std::complex<double> square_wave_coefficient(int j, std::int64_t r)
{
    const std::int64_t P = std::int64_t{1} << (j + 1);
    const std::int64_t red = ((r % P) + P) % P;
    if (red % 2 == 0) return {0.0, 0.0};
    // (1/P) sum_{x<P/2} e(-rx/P) - (1/P) sum_{x>=P/2} e(-rx/P) = (4/P) / (1 - e(-r/P))
    const auto denom = 1.0 - std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(red) / P);
    return (4.0 / static_cast<double>(P)) / denom;
}

SpectralSplit spectral_split(const SplitConfig& config)
{
    const int lambda = config.mask.lambda();
    if (lambda > 16) {
        throw ResourceError("spectral split at lambda=" + std::to_string(lambda) + " requires " +
                            table_bytes(lambda, sizeof(std::complex<double>)) + "; evaluation needs lambda <= 16");
    }
    if (config.mu < 0 || 2 * config.mu > lambda) throw ArgumentError("split needs 0 <= 2 mu <= lambda");
    if (config.H < 0 || config.H > 20) throw ArgumentError("split needs 0 <= H <= 20");

    const int cut = lambda - 2 * config.mu;
    const std::uint64_t low_mask = (std::uint64_t{1} << cut) - 1;
    SpectralSplit out;
    out.s1 = WalshMask(config.mask.bits() & low_mask, lambda);
    out.s2 = WalshMask(config.mask.bits() & ~low_mask, lambda);
    const int s2_weight = out.s2.weight();
    if (s2_weight > config.max_s2) {
        throw ArgumentError("|S2| = " + std::to_string(s2_weight) + " exceeds the cap " + std::to_string(config.max_s2));
    }
    if (config.H * s2_weight >= 63 || (std::uint64_t{1} << (config.H * s2_weight)) > config.max_terms) {
        throw ResourceError("truncated product set would need up to 2^" + std::to_string(config.H * s2_weight) +
                            " terms; cap is " + std::to_string(config.max_terms));
    }
    out.size_bound = std::uint64_t{1} << (config.H * s2_weight);
    out.in_regime = s2_weight < config.regime_constant * config.H || s2_weight == 0;

    const std::uint64_t X = std::uint64_t{1} << lambda;
    // start from the constant 1 and multiply in each truncated factor
    std::map<std::uint64_t, std::complex<double>> terms{{0, {1.0, 0.0}}};
    for (int j : out.s2.positions()) {
        const std::int64_t P = std::int64_t{1} << (j + 1);
        const std::uint64_t keep = std::min<std::uint64_t>(std::uint64_t{1} << config.H, static_cast<std::uint64_t>(P / 2));
        // odd modes by decreasing magnitude: 1, -1, 3, -3, ...; r and -r coincide only for P = 2
        std::vector<std::int64_t> modes;
        for (std::int64_t a = 1; modes.size() < keep; a += 2) {
            modes.push_back(a);
            if (modes.size() < keep && ((-a % P) + P) % P != a % P) modes.push_back(-a);
        }
        std::map<std::uint64_t, std::complex<double>> next;
        for (const auto& [k, coef] : terms) {
            for (std::int64_t r : modes) {
                const std::uint64_t freq = reduce_frequency(r * (std::int64_t{1} << (lambda - j - 1)), lambda);
                next[(k + freq) & (X - 1)] += coef * square_wave_coefficient(j, r);
            }
        }
        terms = std::move(next);
    }
    for (const auto& [k, coef] : terms) {
        out.frequencies.push_back(k);
        out.coefficients.push_back(coef);
    }

    std::vector<std::complex<double>> roots(X);
    for (std::uint64_t i = 0; i < X; ++i) {
        roots[i] = std::polar(1.0, 2.0 * std::numbers::pi * std::ldexp(static_cast<double>(i), -lambda));
    }
    const std::uint64_t s2_bits = out.s2.bits();
    const double error = chunked_sum(0, X, [&](std::uint64_t x) {
        std::complex<double> acc{};
        for (std::size_t i = 0; i < out.frequencies.size(); ++i) {
            acc += out.coefficients[i] * roots[(out.frequencies[i] * x) & (X - 1)];
        }
        return std::abs(acc - static_cast<double>(walsh_sign(s2_bits, x)));
    });
    out.l1_error = error / static_cast<double>(X);
    return out;
}

// ---------------------------------------------------------------------------

CheckReport bilinear_report(const BilinearConfig& config)
{
    CheckReport r{LemmaId::TYPE2, bilinear_params(config)};
    r.lhs = bilinear_sum(config);
    r.rhs = static_cast<double>(config.M()) * static_cast<double>(config.N());
    r.ratio = safe_ratio(r.lhs, r.rhs);
    if (!config.alpha.empty()) r.params["signed_value"] = bilinear_sum_signed(config);
    r.pass = r.lhs <= r.rhs;
    return r;
}

CheckReport quadform_report(const BilinearConfig& config)
{
    const auto extended = shifted_quadratic_form(config, ShiftPolicy::extend);
    const auto clipped = shifted_quadratic_form(config, ShiftPolicy::clip);
    const double bilinear = bilinear_sum(config);
    CheckReport r{LemmaId::QUADFORM, bilinear_params(config)};
    r.params["quadratic_form"] = extended.value;
    r.params["quadratic_form_clipped"] = clipped.value;
    r.params["clipped_terms"] = extended.clipped;
    r.params["prefactor"] = extended.prefactor;
    r.params["diagonal"] = static_cast<double>(config.M()) * static_cast<double>(config.N());
    r.params["bilinear"] = bilinear;
    r.lhs = bilinear * bilinear;
    r.rhs = cauchy_schwarz_factor(config) * clipped.value;
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.pass = r.lhs <= r.rhs * (1.0 + 1e-12);
    return r;
}

CheckReport carry_report(const BilinearConfig& config, double bracket)
{
    const auto rate = carry_truncation_rate(config);
    CheckReport r{LemmaId::CARRY, bilinear_params(config)};
    r.params["triples"] = rate.triples;
    r.params["threshold"] = rate.threshold;
    r.params["low_rate"] = rate.low_rate;
    r.params["high_rate"] = rate.high_rate;
    r.params["bracket"] = bracket;
    r.lhs = rate.rate;
    r.rhs = rate.predicted;
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.fitted_constant = rate.implied_constant;
    r.pass = rate.low_differing == 0 && rate.implied_constant <= bracket;
    return r;
}

CheckReport type1_report(const WalshMask& mask, int mu, int nu)
{
    BilinearConfig c;
    c.mask = mask;
    c.mu = mu;
    c.nu = nu;
    CheckReport r{LemmaId::TYPE1};
    r.params["test"] = "sum";
    r.params["lambda"] = mu + nu;
    r.params["mu"] = mu;
    r.params["nu"] = nu;
    r.params["mask"] = mask.bits();
    r.params["weight"] = mask.weight();
    r.lhs = bilinear_sum(c);
    r.rhs = static_cast<double>(c.M()) * static_cast<double>(c.N());
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.pass = r.lhs <= r.rhs;
    return r;
}

CheckReport frequency_report(const WalshMask& mask, int mu, std::optional<double> threshold, double bracket)
{
    const auto test = frequency_test_count(mask, mu, threshold);
    CheckReport r{LemmaId::TYPE1};
    r.params["test"] = "frequency";
    r.params["lambda"] = mask.lambda();
    r.params["mu"] = mu;
    r.params["mask"] = mask.bits();
    r.params["weight"] = mask.weight();
    r.params["threshold"] = test.threshold;
    r.params["sup"] = test.sup;
    r.params["bracket"] = bracket;
    r.lhs = test.value;
    r.rhs = test.bound;
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.fitted_constant = r.ratio;
    r.pass = r.ratio <= bracket;
    return r;
}

CheckReport split_report(const SplitConfig& config, double bracket)
{
    const auto split = spectral_split(config);
    CheckReport r{LemmaId::SPLIT, config.to_json()};
    r.params["s1"] = split.s1.bits();
    r.params["s2"] = split.s2.bits();
    r.params["set_size"] = split.frequencies.size();
    r.params["size_bound"] = split.size_bound;
    r.params["in_regime"] = split.in_regime;
    r.params["bracket"] = bracket;
    r.lhs = split.l1_error;
    r.rhs = std::exp2(-config.H);
    r.ratio = safe_ratio(r.lhs, r.rhs);
    r.fitted_constant = r.ratio;
    r.pass = split.frequencies.size() <= split.size_bound && r.ratio <= bracket;
    return r;
}

}  // namespace mwlab
