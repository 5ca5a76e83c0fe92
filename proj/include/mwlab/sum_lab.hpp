#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mwlab/arith_sieve.hpp"
#include "mwlab/fwht.hpp"
#include "mwlab/limits.hpp"
#include "mwlab/report.hpp"
#include "mwlab/walsh.hpp"

namespace mwlab {

// ---------------------------------------------------------------------------
// Correlation scans

/// max_A |sum_{n < 2^lambda} f(n) w_A(n)| against 2^(lambda - lambda^(1/10)).
CheckReport theorem_check(const ArithmeticSequence& seq, const ResourceLimits& limits = {},
                          const FwhtOptions& options = {});

std::vector<CheckReport> theorem_scan(FunctionKind kind, int lambda_min, int lambda_max,
                                      const ResourceLimits& limits = {}, const FwhtOptions& options = {});

// ---------------------------------------------------------------------------
// Bilinear sums. Dyadic ranges throughout: m ~ M means M <= m < 2M.

enum class CoefficientKind { ones, random_signs };

CoefficientKind parse_coefficient_kind(std::string_view name);
std::vector<double> make_coefficients(CoefficientKind kind, std::size_t count, std::uint64_t seed);

struct BilinearConfig {
    WalshMask mask;          // absolute bit positions in m*n, lambda <= mu + nu + 2
    int mu = 0;              // M = 2^mu
    int nu = 0;              // N = 2^nu, mu <= nu
    std::vector<double> alpha;  // length M, empty = all ones
    std::vector<double> beta;   // length N, empty = all ones
    int rho = 0;             // L = 2^rho
    int K = 0;               // shift scale
    double epsilon = 0.5;

    std::uint64_t M() const { return std::uint64_t{1} << mu; }
    std::uint64_t N() const { return std::uint64_t{1} << nu; }
    std::uint64_t L() const { return std::uint64_t{1} << rho; }
    int lambda() const { return mu + nu; }
    int product_bits() const { return mu + nu + 2; }

    double alpha_at(std::uint64_t m) const { return alpha.empty() ? 1.0 : alpha[m - M()]; }
    double beta_at(std::uint64_t n) const { return beta.empty() ? 1.0 : beta[n - N()]; }

    /// Ranges, coefficient tables and mask width.
    void validate() const;
    /// Additionally L 2^K < N, as the shifted sums need.
    void validate_shifts() const;
    /// Departures from the asymptotic regime (reported, not enforced).
    std::vector<std::string> regime_flags() const;
    Json to_json() const;
};

/// sum_{m ~ M} | sum_{n ~ N} beta_n w_S(mn) |.
double bilinear_sum(const BilinearConfig& config);

/// | sum_{m,n} alpha_m beta_n w_S(mn) |, for exploring concrete alpha.
double bilinear_sum_signed(const BilinearConfig& config);

enum class ShiftPolicy {
    extend,  // evaluate w_S at m(n + l 2^K) even when n + l 2^K leaves [N, 2N)
    clip,    // drop (n, l) pairs whose shifted point leaves [N, 2N)
};

struct QuadraticForm {
    double value = 0.0;              // sum_{n, |l| < L} | sum_m w_S(mn) w_S(m(n + l 2^K)) |
    std::uint64_t clipped = 0;       // (n, l) pairs with n + l 2^K outside [N, 2N)
    double prefactor = 0.0;          // M N / L
    ShiftPolicy policy = ShiftPolicy::extend;
};

QuadraticForm shifted_quadratic_form(const BilinearConfig& config, ShiftPolicy policy = ShiftPolicy::extend);

/// Multiplier in the exact chain bilinear^2 <= M (N + (L-1) 2^K) / L * Q_clip.
double cauchy_schwarz_factor(const BilinearConfig& config);

struct CarryRate {
    std::uint64_t triples = 0;
    std::uint64_t differing = 0;       // low or high digits differ
    std::uint64_t low_differing = 0;   // some digit j < K differs
    std::uint64_t high_differing = 0;  // some digit j > K + mu + rho + eps rho differs
    double threshold = 0.0;            // K + mu + rho + eps rho
    double rate = 0.0;
    double low_rate = 0.0;
    double high_rate = 0.0;
    double predicted = 0.0;  // 2^(-eps rho)
    double implied_constant = 0.0;
};

/// Exhaustive over m ~ M, n ~ N, 0 < |l| < L: compares digits of mn and m(n + l 2^K).
CarryRate carry_truncation_rate(const BilinearConfig& config);

/// sum_{m ~ 2^mu} | sum_{n ~ 2^nu} w_S(mn) |.
double type1_sum(const WalshMask& mask, int mu, int nu);

struct FrequencyTest {
    double value = 0.0;      // N sum_{m ~ M, k} |c_S(k)| 1[ ||km / 2^lambda|| < threshold ]
    double bound = 0.0;      // N M^2 lambda^2 ||c_S||_inf
    double threshold = 0.0;
    double sup = 0.0;
};

/// N = 2^(lambda - mu); threshold defaults to lambda^2 / N.
FrequencyTest frequency_test_count(const WalshMask& mask, int mu, std::optional<double> threshold = {});

struct SplitConfig {
    WalshMask mask;  // S, at lambda = mask.lambda()
    int mu = 0;
    int H = 1;
    int max_s2 = 8;
    double regime_constant = 1.0;  // |S2| < C H
    std::uint64_t max_terms = std::uint64_t{1} << 20;

    Json to_json() const;
};

struct SpectralSplit {
    WalshMask s1;  // S in [0, lambda - 2 mu)
    WalshMask s2;  // S in [lambda - 2 mu, lambda)
    std::vector<std::uint64_t> frequencies;  // truncated set, ascending mod 2^lambda
    std::vector<std::complex<double>> coefficients;
    std::uint64_t size_bound = 1;  // 2^(H |S2|)
    double l1_error = 0.0;         // 2^-lambda sum_x |T(x) - w_S2(x)|
    bool in_regime = true;
};

/// Coefficient of e(rx / 2^(j+1)) in h(x / 2^(j+1)) on the integers.
std::complex<double> square_wave_coefficient(int j, std::int64_t r);

/// Keeps the 2^H largest modes of each factor h(x / 2^(j+1)), j in S2, and
/// multiplies them out.
SpectralSplit spectral_split(const SplitConfig& config);

// ---------------------------------------------------------------------------
// Report builders used by the command line.

CheckReport bilinear_report(const BilinearConfig& config);
CheckReport quadform_report(const BilinearConfig& config);
CheckReport carry_report(const BilinearConfig& config, double bracket = 8.0);
CheckReport type1_report(const WalshMask& mask, int mu, int nu);
CheckReport frequency_report(const WalshMask& mask, int mu, std::optional<double> threshold,
                             double bracket = 4.0);
CheckReport split_report(const SplitConfig& config, double bracket = 4.0);

}  // namespace mwlab
