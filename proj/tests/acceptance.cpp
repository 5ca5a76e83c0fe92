// Acceptance gate: one line per criterion. Run with --only N to select.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "mwlab/arith_sieve.hpp"
#include "mwlab/fwht.hpp"
#include "mwlab/lemma_lab.hpp"
#include "mwlab/sum_lab.hpp"
#include "mwlab/walsh.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

// Pinned tolerances and budgets.
constexpr double kProductFormulaTol = 1e-10;
constexpr double kExplicitBoundSlack = 1e-9;
constexpr double kReproducibilityTol = 1e-9;
constexpr double kSupSlack = 1e-9;
constexpr double kSupBound = 3.0;
constexpr double kCarryBracket = 8.0;
constexpr double kExponentCeiling = 0.75;
constexpr double kOneMinute = 60.0;
constexpr double kTenMinutes = 600.0;
constexpr double kMaxRssMiB = 100.0;
constexpr int kLemma6Pairs = 1000;
constexpr std::uint64_t kSeed = 20261016;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double peak_rss_mib()
{
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

template <class... Args>
std::string fmt(const char* f, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Verdict product_formula()
{
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::uint64_t compared = 0;
    for (int lambda = 1; lambda <= 10; ++lambda) {
        const std::uint64_t X = std::uint64_t{1} << lambda;
        std::vector<std::complex<double>> roots(X);
        for (std::uint64_t i = 0; i < X; ++i) {
            roots[i] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(X));
        }
        for (std::uint64_t a = 0; a < X; ++a) {
            const WalshMask mask(a, lambda);
            for (std::uint64_t k = 0; k < X; ++k) {
                std::complex<double> direct{};
                for (std::uint64_t x = 0; x < X; ++x) {
                    const auto& r = roots[(k * x) & (X - 1)];
                    direct += oracle::walsh(a, x) > 0 ? r : -r;
                }
                const double want = std::abs(direct) / static_cast<double>(X);
                worst = std::max(worst, std::abs(trig_magnitude(mask, k) - want));
                ++compared;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= kProductFormulaTol && elapsed < kOneMinute,
            fmt("%llu (mask, k) pairs for lambda 1..10, max |diff| %.3g (tol %.0e), %.1f s",
                static_cast<unsigned long long>(compared), worst, kProductFormulaTol, elapsed)};
}

Verdict fwht_exact()
{
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t inputs = 0, mismatches = 0;
    auto compare = [&](const std::vector<std::int64_t>& f) {
        auto fast = f;
        fwht_in_place(std::span<std::int64_t>(fast));
        mismatches += fast != oracle::naive_wht(f);
        ++inputs;
    };
    for (int lambda = 0; lambda <= 10; ++lambda) {
        const std::size_t X = std::size_t{1} << lambda;
        for (std::size_t i = 0; i < X; ++i) {
            std::vector<std::int64_t> delta(X, 0);
            delta[i] = 1;
            compare(delta);
        }
        for (std::int64_t c : {-1, 0, 1, 7}) compare(std::vector<std::int64_t>(X, c));
        for (std::uint64_t a = 0; a < X; ++a) {
            std::vector<std::int64_t> w(X);
            for (std::size_t x = 0; x < X; ++x) w[x] = oracle::walsh(a, x);
            compare(w);
        }
        if (lambda >= 1) {
            auto mu = sieve_moebius(lambda);
            compare(std::vector<std::int64_t>(mu.signs().begin(), mu.signs().end()));
        }
    }
    std::uint64_t law_failures = 0;
    std::mt19937_64 rng(kSeed);
    for (int lambda = 1; lambda <= 20; ++lambda) {
        auto mu = sieve_moebius(lambda);
        std::vector<std::int64_t> rnd(mu.size());
        for (auto& v : rnd) v = static_cast<std::int64_t>(rng() % 5) - 2;
        for (const auto& f : {std::vector<std::int64_t>(mu.signs().begin(), mu.signs().end()), rnd}) {
            auto g = f;
            fwht_in_place(std::span<std::int64_t>(g));
            __int128 ef = 0, eg = 0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                ef += static_cast<__int128>(f[i]) * f[i];
                eg += static_cast<__int128>(g[i]) * g[i];
            }
            law_failures += eg != ef * static_cast<__int128>(f.size());
            fwht_in_place(std::span<std::int64_t>(g));
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (g[i] != f[i] * static_cast<std::int64_t>(f.size())) {
                    ++law_failures;
                    break;
                }
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && law_failures == 0 && elapsed < kOneMinute,
            fmt("%llu inputs vs naive, %llu mismatches; involution/Parseval failures %llu for lambda <= 20; %.1f s",
                static_cast<unsigned long long>(inputs), static_cast<unsigned long long>(mismatches),
                static_cast<unsigned long long>(law_failures), elapsed)};
}

Verdict lemma3_all_masks()
{
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t checked = 0, failures = 0;
    double worst_ratio = 0.0;
    CheckTolerances tol;
    tol.absolute = kExplicitBoundSlack;
    for (int lambda = 1; lambda <= 12; ++lambda) {
        LemmaChecker checker(lambda, tol);
        for (std::uint64_t a = 0; a < (std::uint64_t{1} << lambda); ++a) {
            auto r = checker.lemma3(WalshMask(a, lambda));
            failures += !r.pass;
            worst_ratio = std::max(worst_ratio, r.ratio);
            ++checked;
        }
    }
    const double elapsed = seconds_since(start);
    return {failures == 0 && elapsed < kTenMinutes,
            fmt("%llu masks for lambda 1..12, %llu failures, max l1/bound %.4f, %.1f s",
                static_cast<unsigned long long>(checked), static_cast<unsigned long long>(failures), worst_ratio,
                elapsed)};
}

Verdict lemma6_random()
{
    std::uint64_t failures = 0, checked = 0;
    double worst_ratio = 0.0;
    CheckTolerances tol;
    tol.absolute = kExplicitBoundSlack;
    for (int lambda = 1; lambda <= 12; ++lambda) {
        std::mt19937_64 rng(kSeed + static_cast<std::uint64_t>(lambda));
        LemmaChecker checker(lambda, tol);
        for (int i = 0; i < kLemma6Pairs; ++i) {
            const WalshMask mask(rng() & ((std::uint64_t{1} << lambda) - 1), lambda);
            auto r = checker.lemma6(random_interval(lambda, rng), mask);
            failures += !r.pass;
            worst_ratio = std::max(worst_ratio, r.ratio);
            ++checked;
        }
    }
    return {failures == 0, fmt("%llu (A, J) pairs for lambda 1..12, %llu failures, max ratio %.4f",
                               static_cast<unsigned long long>(checked), static_cast<unsigned long long>(failures),
                               worst_ratio)};
}

struct Lemma2Minimum {
    double overall = INFINITY;
    std::uint64_t overall_mask = 0;
    int overall_lambda = 0;
    double without_character = INFINITY;  // A = {0} excluded
    std::uint64_t without_mask = 0;
};

Lemma2Minimum lemma2_minimum()
{
    Lemma2Minimum out;
    for (int lambda = 1; lambda <= 12; ++lambda) {
        const MagnitudeTable table(lambda);
        for (std::uint64_t a = 1; a < (std::uint64_t{1} << lambda); ++a) {
            const WalshMask mask(a, lambda);
            const double c = 0.0 - std::log2(table.sup(mask)) / mask.weight();
            if (c < out.overall) {
                out.overall = c;
                out.overall_mask = a;
                out.overall_lambda = lambda;
            }
            if (a != 1 && c < out.without_character) {
                out.without_character = c;
                out.without_mask = a;
            }
        }
    }
    return out;
}

Verdict lemma2_constant()
{
    const auto first = lemma2_minimum();
    const auto second = lemma2_minimum();
    const bool reproducible = std::abs(first.overall - second.overall) <= kReproducibilityTol &&
                              std::abs(first.without_character - second.without_character) <= kReproducibilityTol;
    const double floor = CheckTolerances{}.lemma2_floor;
    return {first.overall > 0.0 && reproducible,
            fmt("min c = %.17g at A = %llu (lambda %d), where w_A = e(x/2); reproducible %s; "
                "excluding A = {0}: min c = %.17g at A = %llu, floor %.2f %s",
                first.overall, static_cast<unsigned long long>(first.overall_mask), first.overall_lambda,
                reproducible ? "yes" : "no", first.without_character,
                static_cast<unsigned long long>(first.without_mask), floor,
                first.without_character >= floor ? "confirmed" : "violated")};
}

Verdict lemma5_suite()
{
    const int lambda = 14, sigma = 4;
    const std::vector<int> ts{3, 4, 5};
    int support_bad = 0, sup_bad = 0, slope_bad = 0, exact = 0;
    double max_sup = 0.0, max_slope = -INFINITY;
    for (std::uint64_t low = 0; low < (1u << sigma); ++low) {
        const WalshMask mask(low << (lambda - sigma), lambda);
        auto r = check_lemma5(lambda, sigma, ts, mask);
        support_bad += !(r.params["support_ok"].get<bool>());
        const double sup = r.params["sup_norm"].get<double>();
        max_sup = std::max(max_sup, sup);
        sup_bad += sup > kSupBound + kSupSlack;
        if (r.params["error_log2_slope"].is_null()) {
            ++exact;  // W_A = w_A exactly, no slope to fit
        } else {
            const double slope = r.params["error_log2_slope"].get<double>();
            max_slope = std::max(max_slope, slope);
            slope_bad += !(slope < 0.0);
        }
    }
    return {support_bad == 0 && sup_bad == 0 && slope_bad == 0,
            fmt("16 tail masks, t in {3,4,5}: support violations %d, max sup %.6f (bound %.0f + %.0e), "
                "largest slope %.4f, %d masks reproduced exactly",
                support_bad, max_sup, kSupBound, kSupSlack, max_slope, exact)};
}

Verdict carry_rate_grid()
{
    int failures = 0, cells = 0;
    double worst_implied = 0.0, worst_oracle_diff = 0.0;
    std::uint64_t low = 0;
    for (int mu : {4, 5}) {
        for (int rho : {1, 2}) {
            for (int K : {0, mu - rho}) {
                BilinearConfig c;
                c.mu = mu;
                c.nu = mu + 4;
                c.mask = WalshMask::empty(c.product_bits());
                c.rho = rho;
                c.K = K;
                c.epsilon = 0.5;
                const auto rate = carry_truncation_rate(c);
                worst_oracle_diff =
                    std::max(worst_oracle_diff, std::abs(rate.rate - oracle::carry_rate(mu, mu + 4, rho, K, rate.threshold)));
                worst_implied = std::max(worst_implied, rate.implied_constant);
                low += rate.low_differing;
                failures += !(rate.rate <= kCarryBracket * rate.predicted) || rate.low_differing != 0;
                ++cells;
            }
        }
    }
    return {failures == 0 && worst_oracle_diff == 0.0,
            fmt("%d grid cells, %d failures, max rate / 2^(-eps rho) = %.4f (bracket %.0f), "
                "j < K differences %llu, oracle mismatch %.3g",
                cells, failures, worst_implied, kCarryBracket, static_cast<unsigned long long>(low), worst_oracle_diff)};
}

Verdict theorem_grid()
{
    std::ostringstream detail;
    bool ok = true;
    double prev = INFINITY, at20 = 0.0, seconds20 = 0.0;
    for (int lambda : {12, 14, 16, 18, 20}) {
        const auto start = std::chrono::steady_clock::now();
        auto r = theorem_check(sieve_moebius(lambda));
        const double elapsed = seconds_since(start);
        const double exponent = r.fitted_constant.value_or(-INFINITY);
        ok = ok && r.pass && exponent <= prev;
        prev = exponent;
        if (lambda == 20) {
            at20 = exponent;
            seconds20 = elapsed;
        }
        detail << fmt("%d:%.4f ", lambda, exponent);
    }
    const double rss = peak_rss_mib();
    ok = ok && at20 <= kExponentCeiling && seconds20 < kOneMinute && rss < kMaxRssMiB;
    return {ok, fmt("exponents %s(ceiling %.2f at 20), lambda 20 in %.2f s, peak RSS %.1f MiB", detail.str().c_str(),
                    kExponentCeiling, seconds20, rss)};
}

Verdict sieve_oracle()
{
    const std::uint64_t limit = std::uint64_t{1} << 20;
    const auto mu = sieve_moebius(21);
    const auto li = sieve_liouville(21);
    const auto vm = sieve_von_mangoldt(21);
    std::uint64_t mismatches = 0;
    long mertens = 0, oracle_mertens = 0;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        const auto f = oracle::factorize(n);
        int m = 1, omega = 0;
        for (auto [p, e] : f) {
            omega += e;
            m = e > 1 ? 0 : -m;
        }
        const int l = omega % 2 ? -1 : 1;
        const double v = f.size() == 1 ? std::log(static_cast<double>(f[0].first)) : 0.0;
        mismatches += mu[n] != m || li[n] != l || vm[n] != v;
        if (n <= 1000000) {
            oracle_mertens += m;
            mertens += mu.signs()[n];
        }
    }
    return {mismatches == 0 && mertens == oracle_mertens,
            fmt("n in [1, 2^20]: %llu mismatches across three sieves; M(10^6) sieve %ld, oracle %ld",
                static_cast<unsigned long long>(mismatches), mertens, oracle_mertens)};
}

Verdict determinism()
{
    const std::vector<std::vector<std::string>> commands{
        {"--seed", "11", "scan", "--lambda-min", "8", "--lambda-max", "10", "--masks", "random:16"},
        {"--seed", "11", "lemma-check", "--lemma", "6", "--lambda", "12", "--masks", "random:50"},
        {"--seed", "11", "lemma-check", "--lemma", "4", "--lambda", "10", "--masks", "random:30"},
        {"--seed", "11", "theorem-scan", "--lambda-min", "8", "--lambda-max", "14"},
        {"--seed", "11", "bilinear", "--mu", "4", "--nu", "8", "--mask", "{9,11}", "--alpha", "random", "--beta", "random"},
        {"--seed", "11", "carry-rate"},
        {"--seed", "11", "--lambda", "12", "spectrum", "--top", "5"},
        {"--seed", "11", "--lambda", "12", "split", "--mu", "2", "--mask", "{9,10,11}", "--H", "3"},
        {"--seed", "11", "--format", "csv", "lemma-check", "--lemma", "5", "--lambda", "12"},
    };
    int differing = 0;
    for (const auto& args : commands) {
        std::string first;
        for (const char* threads : {"1", "3", "1"}) {
            auto with_threads = args;
            with_threads.insert(with_threads.begin(), {"--threads", threads});
            std::ostringstream out, err;
            cli::dispatch(with_threads, out, err);
            if (first.empty()) {
                first = out.str();
            } else if (out.str() != first) {
                ++differing;
            }
        }
        if (first.empty()) ++differing;
    }
    return {differing == 0, fmt("%zu commands x 3 runs (1 and 3 threads): %d byte differences", commands.size(),
                                differing)};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"mwlab acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Criteria to run (1-10)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"product formula vs direct exponential sum", product_formula},
        {"FWHT vs naive transform, involution, Parseval", fwht_exact},
        {"explicit l1 bound over every mask", lemma3_all_masks},
        {"interval l1 bound, seeded pairs", lemma6_random},
        {"sup-norm decay constant strictly positive", lemma2_constant},
        {"band-limited substitute suite", lemma5_suite},
        {"carry-truncation rate", carry_rate_grid},
        {"correlation scan against the theorem bound", theorem_grid},
        {"sieves vs trial division", sieve_oracle},
        {"byte-identical manifests", determinism},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        all = all && v.pass;
        std::printf("criterion %2d %s: %s: %s\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    v.detail.c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
