#include "mwlab/approximant.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace mwlab {

namespace {

std::vector<std::complex<double>> unit_roots(int lambda)
{
    const std::size_t n = std::size_t{1} << lambda;
    std::vector<std::complex<double>> roots(n);
    for (std::size_t i = 0; i < n; ++i) {
        roots[i] = std::polar(1.0, 2.0 * std::numbers::pi * std::ldexp(static_cast<double>(i), -lambda));
    }
    return roots;
}

// signed representative of k mod 2^lambda in (-2^(lambda-1), 2^(lambda-1)]
std::int64_t symmetric(std::uint64_t k, int lambda)
{
    const std::uint64_t n = std::uint64_t{1} << lambda;
    return k <= n / 2 ? static_cast<std::int64_t>(k) : static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n);
}

}  // namespace

bool ApproximantConfig::in_asymptotic_regime() const
{
    const double log_lambda = std::log(static_cast<double>(lambda));
    return regime_constant * log_lambda * log_lambda < t && 2.0 * t < lambda - sigma;
}

void ApproximantConfig::validate() const
{
    if (lambda < 2 || lambda > kMaxTrigLambda) {
        throw ArgumentError("approximant lambda must lie in [2, 52]");
    }
    if (sigma < 0 || t < 1) {
        throw ArgumentError("approximant needs sigma >= 0 and t >= 1");
    }
    if (sigma + t > lambda - 1) {
        throw ArgumentError("approximant band 2^(sigma+t) must not exceed 2^(lambda-1): sigma=" +
                            std::to_string(sigma) + " t=" + std::to_string(t) +
                            " lambda=" + std::to_string(lambda));
    }
}

double trapezoid_eta(double z, double k1, int sigma)
{
    const double inner = std::ldexp(k1, sigma);
    const double a = std::abs(z);
    if (a < inner) return 1.0;
    if (a >= 2.0 * inner) return 0.0;
    return 2.0 - a / inner;
}

double SampledApproximant::sup_norm() const
{
    double best = 0.0;
    for (const auto& v : values) best = std::max(best, std::abs(v));
    return best;
}

SampledApproximant build_approximant(const WalshMask& mask, const ApproximantConfig& config,
                                     int synthesis_cap)
{
    config.validate();
    if (mask.lambda() != config.lambda) {
        throw ArgumentError("mask lambda does not match approximant lambda");
    }
    if (config.lambda > synthesis_cap) {
        throw ResourceError("dense synthesis at lambda=" + std::to_string(config.lambda) +
                            " requires " + table_bytes(config.lambda, 2 * sizeof(std::complex<double>)) +
                            "; synthesis cap is lambda <= " + std::to_string(synthesis_cap));
    }
    const int lambda = config.lambda;
    const std::uint64_t tail_start = std::uint64_t{1} << (lambda - config.sigma);
    if ((mask.bits() & (tail_start - 1)) != 0) {
        throw ArgumentError("mask must lie in the tail window [lambda - sigma, lambda)");
    }

    const std::size_t n = std::size_t{1} << lambda;
    const auto roots = unit_roots(lambda);
    const double k1 = static_cast<double>(config.k1());
    const auto band = static_cast<std::int64_t>(config.band());

    struct Term {
        std::uint64_t k;
        std::complex<double> coef;
    };
    std::vector<Term> terms;
    for (std::int64_t ks = -band + 1; ks < band; ++ks) {
        const double eta = trapezoid_eta(static_cast<double>(ks), k1, config.sigma);
        if (eta == 0.0) continue;
        const std::uint64_t k = reduce_frequency(ks, lambda);
        const auto c = trig_coefficient(mask, k);
        if (c.magnitude == 0.0) continue;
        terms.push_back({k, eta * c.value});
    }

    SampledApproximant out{mask, config, std::vector<std::complex<double>>(n)};
    for (std::size_t x = 0; x < n; ++x) {
        std::complex<double> acc{};
        for (const auto& term : terms) {
            acc += term.coef * roots[(term.k * x) & (n - 1)];
        }
        out.values[x] = acc;
    }
    return out;
}

double l2_error(const SampledApproximant& approx)
{
    double sum = 0.0;
    const std::uint64_t bits = approx.mask.bits();
    for (std::size_t x = 0; x < approx.values.size(); ++x) {
        sum += std::norm(approx.values[x] - static_cast<double>(walsh_sign(bits, x)));
    }
    return std::sqrt(sum / static_cast<double>(approx.values.size()));
}

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> values)
{
    const std::size_t n = values.size();
    if (n == 0 || !std::has_single_bit(n)) {
        throw ArgumentError("dft length must be a power of two");
    }
    const int lambda = std::countr_zero(n);
    std::vector<std::complex<double>> a(values.begin(), values.end());
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto roots = unit_roots(lambda);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t i = 0; i < len / 2; ++i) {
                // e(-i/len) = conj(root[i * n/len])
                const auto w = std::conj(roots[i * stride]);
                const auto u = a[base + i];
                const auto v = a[base + i + len / 2] * w;
                a[base + i] = u + v;
                a[base + i + len / 2] = u - v;
            }
        }
    }
    const double scale = std::ldexp(1.0, -lambda);
    for (auto& v : a) v *= scale;
    return a;
}

SupportCheck check_support(const SampledApproximant& approx, double tolerance)
{
    const auto coef = dft(approx.values);
    const int lambda = approx.config.lambda;
    const auto band = approx.config.band();
    SupportCheck out;
    for (std::size_t k = 0; k < coef.size(); ++k) {
        const double mag = std::abs(coef[k]);
        const auto ks = static_cast<std::uint64_t>(std::llabs(symmetric(k, lambda)));
        if (mag > tolerance) out.max_support = std::max(out.max_support, ks);
        if (ks >= band) out.max_outside_band = std::max(out.max_outside_band, mag);
        out.max_excess = std::max(out.max_excess, mag - trig_magnitude(approx.mask, k));
    }
    out.within_band = out.max_outside_band <= tolerance;
    out.dominated = out.max_excess <= tolerance;
    return out;
}

}  // namespace mwlab
