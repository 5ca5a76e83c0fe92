#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mwlab/limits.hpp"
#include "mwlab/report.hpp"
#include "mwlab/walsh.hpp"

namespace mwlab {

/// Brackets for the fitted-constant checks and the slack for explicit ones.
struct CheckTolerances {
    double absolute = 1e-9;
    double lemma1_bracket = 10.0;  // C in (C lambda)^|A|
    double lemma2_floor = 0.2;     // c in 2^(-c|A|)
    double lemma4_bracket = 4.0;   // implied constant over (2+sqrt2)^((lambda-r)/4)
    double lemma5_bracket = 10.0;  // C in C^((ln lambda)^2) 2^(sigma/4)
    double approximant_sup = 3.0;

    Json to_json() const;
    static CheckTolerances from_json(const Json& j);
};

/// Largest lambda for which the lemma checks stream every frequency.
inline constexpr int kMaxStreamLambda = 16;

/// (2 + sqrt 2)^(m/4): the explicit l1 bound for a lambda = m Walsh function.
double explicit_l1_bound(int m);

/// Per-lambda checker for the frequency-side inequalities; owns the cached
/// magnitude table so exhaustive mask sweeps stay cheap.
class LemmaChecker {
public:
    explicit LemmaChecker(int lambda, CheckTolerances tolerances = {}, const ResourceLimits& limits = {});

    int lambda() const noexcept { return table_.lambda(); }
    const CheckTolerances& tolerances() const noexcept { return tol_; }
    const MagnitudeTable& table() const noexcept { return table_; }

    /// l1 norm against (C lambda)^|A|; fitted C = l1^(1/|A|) / lambda.
    CheckReport lemma1(const WalshMask& mask) const;
    /// sup norm; fitted c = -log2(sup) / |A|. Skipped for A empty and for
    /// A = {0}, where w_A is the single character e(x/2).
    CheckReport lemma2(const WalshMask& mask) const;
    /// l1 norm <= (2+sqrt2)^(lambda/4), explicit.
    CheckReport lemma3(const WalshMask& mask) const;
    /// residue-class l1 over k = a (mod 2^r), implied constant against
    /// (2+sqrt2)^((lambda-r)/4).
    CheckReport lemma4(int r, std::uint64_t a, const WalshMask& mask) const;
    /// interval l1 <= (2+sqrt2)^(m/4), m = ceil(log2 |J|), explicit.
    CheckReport lemma6(const FrequencyInterval& interval, const WalshMask& mask) const;

private:
    void check_mask(const WalshMask& mask) const;

    CheckTolerances tol_;
    MagnitudeTable table_;
};

CheckReport check_lemma1(const WalshMask& mask, const CheckTolerances& tol = {});
CheckReport check_lemma2(const WalshMask& mask, const CheckTolerances& tol = {});
CheckReport check_lemma3(const WalshMask& mask, const CheckTolerances& tol = {});
CheckReport check_lemma4(int r, std::uint64_t a, const WalshMask& mask, const CheckTolerances& tol = {});
CheckReport check_lemma6(const FrequencyInterval& interval, const WalshMask& mask,
                         const CheckTolerances& tol = {});

/// Tail-mask suite for the band-limited substitute: l1 fit against
/// 2^(sigma/4), spectral support and domination, sup norm <= 3, and a
/// negative least-squares slope of log2(l2 error) across the t grid.
CheckReport check_lemma5(int lambda, int sigma, std::span<const int> t_grid, const WalshMask& mask,
                         const CheckTolerances& tol = {});

/// Least-squares slope of ys against xs.
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

struct MaskFamily {
    enum class Kind { all, random, structured };
    Kind kind = Kind::structured;
    std::size_t count = 64;  // random family size

    std::string to_string() const;
    static MaskFamily parse(std::string_view text);  // "all", "structured", "random[:count]"
};

inline constexpr int kMaxExhaustiveLambda = 14;

/// Empty set, singletons, full set, arithmetic progressions, tail and
/// prefix blocks, deduplicated in first-seen order.
std::vector<WalshMask> structured_masks(int lambda);
std::vector<WalshMask> enumerate_masks(const MaskFamily& family, int lambda, std::uint64_t seed);

struct ScanConfig {
    int lambda_min = 8;
    int lambda_max = 14;
    MaskFamily masks{};
    std::vector<LemmaId> lemmas{LemmaId::L1, LemmaId::L2, LemmaId::L3,
                                LemmaId::L4, LemmaId::L5, LemmaId::L6};
    std::vector<int> lemma4_r{2, 4, 6};
    std::size_t lemma4_residues = 4;  // residues a drawn per (mask, r)
    std::vector<int> lemma5_sigma{4};
    std::vector<int> lemma5_t{3, 4, 5};
    std::size_t lemma6_intervals = 8;  // intervals drawn per mask
    CheckTolerances tolerances{};
    std::uint64_t seed = 1;
    unsigned threads = 0;

    Json to_json() const;
    static ScanConfig from_json(const Json& j);
};

struct ScanResult {
    std::vector<CheckReport> reports;
    Json summary;
};

/// Deterministic batch over the grid: parameters are drawn sequentially from
/// the seed, checks run in parallel, reports come back in grid order.
ScanResult run_scan(const ScanConfig& config, const ResourceLimits& limits = {});

/// Seeded random interval of frequencies inside [1, 2^lambda).
FrequencyInterval random_interval(int lambda, std::mt19937_64& rng);

}  // namespace mwlab
