#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "mwlab/walsh.hpp"

namespace mwlab {

/// Parameters of the band-limited substitute W_A for a tail mask
/// A in [lambda - sigma, lambda).
struct ApproximantConfig {
    int lambda = 0;
    int sigma = 0;
    int t = 1;
    double regime_constant = 1.0;  // C in C (log lambda)^2 < t

    /// Cutoff scale K1 = 2^(t-1).
    std::uint64_t k1() const { return std::uint64_t{1} << (t - 1); }
    /// 2 K1 2^sigma = 2^(sigma+t): eta vanishes at and beyond this |k|.
    std::uint64_t band() const { return std::uint64_t{1} << (sigma + t); }
    double rho() const { return (t - 1) / 2.0; }

    /// C (ln lambda)^2 < t < (lambda - sigma)/2. Reported, not enforced.
    bool in_asymptotic_regime() const;

    /// Structural requirements: t >= 1, sigma >= 0, sigma + t <= lambda - 1.
    void validate() const;
};

/// Trapezoid: 1 for |z| < K1 2^sigma, 0 for |z| >= 2 K1 2^sigma, linear between.
double trapezoid_eta(double z, double k1, int sigma);

struct SampledApproximant {
    WalshMask mask;
    ApproximantConfig config;
    std::vector<std::complex<double>> values;  // W_A(x), x < 2^lambda

    double sup_norm() const;
};

inline constexpr int kDefaultSynthesisCap = 18;

/// W_A(x) = sum_k eta(k) c_A(k) e(kx / 2^lambda) with k taken in the
/// symmetric range (-2^(lambda-1), 2^(lambda-1)], by direct summation over
/// the supported frequencies.
SampledApproximant build_approximant(const WalshMask& mask, const ApproximantConfig& config,
                                     int synthesis_cap = kDefaultSynthesisCap);

/// (2^-lambda sum_x |W_A(x) - w_A(x)|^2)^(1/2).
double l2_error(const SampledApproximant& approx);

/// Normalized DFT 2^-lambda sum_x v(x) e(-kx / N) by radix-2 FFT; N = v.size().
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> values);

/// Spectral bookkeeping of a synthesized approximant against c_A.
struct SupportCheck {
    std::uint64_t max_support = 0;    // largest symmetric |k| with |coef| > tolerance
    double max_outside_band = 0.0;    // max |coef| over |k| >= band
    double max_excess = 0.0;          // max (|coef(k)| - |c_A(k)|)
    bool within_band = false;
    bool dominated = false;
};

SupportCheck check_support(const SampledApproximant& approx, double tolerance = 1e-9);

}  // namespace mwlab
