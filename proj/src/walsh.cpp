#include "mwlab/walsh.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mwlab {

namespace {

void check_mask_lambda(int lambda)
{
    if (lambda < 0 || lambda > WalshMask::kMaxLambda) {
        throw ArgumentError("mask lambda must lie in [0, 62], got " + std::to_string(lambda));
    }
}

void check_trig_lambda(int lambda)
{
    if (lambda > kMaxTrigLambda) {
        throw ArgumentError("trigonometric coefficients need lambda <= 52");
    }
}

void check_frequency(std::uint64_t k, int lambda)
{
    if (k >> lambda) {
        throw ArgumentError("frequency " + std::to_string(k) + " outside [0, 2^" +
                            std::to_string(lambda) + ")");
    }
}

// theta_j = k 2^{j-lambda} mod 1 as an exact dyadic double in [0, 1)
double dyadic_angle(std::uint64_t k, int j, int lambda)
{
    const int bits = lambda - j;
    return std::ldexp(static_cast<double>(k & ((std::uint64_t{1} << bits) - 1)), -bits);
}

template <class Visit>
void for_each_selected(int lambda, const FrequencySelector& selector, Visit&& visit)
{
    validate_selector(selector, lambda);
    if (std::holds_alternative<FullRange>(selector)) {
        const std::uint64_t n = std::uint64_t{1} << lambda;
        for (std::uint64_t k = 0; k < n; ++k) visit(k);
    } else if (const auto* rc = std::get_if<ResidueClass>(&selector)) {
        const std::uint64_t step = std::uint64_t{1} << rc->r;
        const std::uint64_t n = std::uint64_t{1} << lambda;
        for (std::uint64_t k = rc->a; k < n; k += step) visit(k);
    } else {
        const auto& iv = std::get<FrequencyInterval>(selector);
        for (std::uint64_t k = iv.begin; k < iv.end; ++k) visit(k);
    }
}

}  // namespace

WalshMask::WalshMask(std::uint64_t bits, int lambda) : bits_(bits), lambda_(lambda)
{
    check_mask_lambda(lambda);
    if (bits >> lambda) {
        throw ArgumentError("mask bits exceed lambda=" + std::to_string(lambda));
    }
}

WalshMask WalshMask::from_positions(std::span<const int> positions, int lambda)
{
    check_mask_lambda(lambda);
    std::uint64_t bits = 0;
    for (int j : positions) {
        if (j < 0 || j >= lambda) {
            throw ArgumentError("mask position " + std::to_string(j) + " outside [0, " +
                                std::to_string(lambda) + ")");
        }
        bits |= std::uint64_t{1} << j;
    }
    return WalshMask(bits, lambda);
}

WalshMask WalshMask::full(int lambda)
{
    check_mask_lambda(lambda);
    return WalshMask(lambda == 0 ? 0 : (~std::uint64_t{0} >> (64 - lambda)), lambda);
}

std::vector<int> WalshMask::positions() const
{
    std::vector<int> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
        out.push_back(std::countr_zero(b));
    }
    return out;
}

WalshMask WalshMask::symmetric_difference(const WalshMask& other) const
{
    if (other.lambda_ != lambda_) {
        throw ArgumentError("masks live in different lambda");
    }
    return WalshMask(bits_ ^ other.bits_, lambda_);
}

int step_h(double x)
{
    const double frac = x - std::floor(x);
    return frac < 0.5 ? 1 : -1;
}

int walsh_eval(const WalshMask& mask, std::uint64_t x)
{
    if (x >> mask.lambda()) {
        throw ArgumentError("walsh_eval: x=" + std::to_string(x) + " outside [0, 2^" +
                            std::to_string(mask.lambda()) + ")");
    }
    return walsh_sign(mask.bits(), x);
}

std::uint64_t reduce_frequency(std::int64_t k, int lambda)
{
    check_mask_lambda(lambda);
    const std::uint64_t modulus_mask = (std::uint64_t{1} << lambda) - 1;
    return static_cast<std::uint64_t>(k) & modulus_mask;  // two's complement wraps mod 2^64
}

TrigCoefficient trig_coefficient(const WalshMask& mask, std::uint64_t k)
{
    const int lambda = mask.lambda();
    check_trig_lambda(lambda);
    check_frequency(k, lambda);
    // j not in A: (1 + e(-theta))/2 = e(-theta/2) cos(pi theta)
    // j in A:     (1 - e(-theta))/2 = i e(-theta/2) sin(pi theta)
    double amplitude = 1.0;
    double half_turns = 0.0;  // accumulated phase, in units of pi
    for (int j = 0; j < lambda; ++j) {
        const double theta = dyadic_angle(k, j, lambda);
        if (mask.contains(j)) {
            amplitude *= std::sin(std::numbers::pi * theta);
            half_turns += 0.5;
        } else {
            amplitude *= std::cos(std::numbers::pi * theta);
        }
        half_turns -= theta;
        half_turns -= 2.0 * std::floor(half_turns / 2.0);
    }
    TrigCoefficient c;
    c.k = k;
    c.value = std::polar(amplitude, std::numbers::pi * half_turns);
    c.magnitude = std::abs(amplitude);
    return c;
}

double trig_magnitude(const WalshMask& mask, std::uint64_t k)
{
    const int lambda = mask.lambda();
    check_trig_lambda(lambda);
    check_frequency(k, lambda);
    double m = 1.0;
    for (int j = 0; j < lambda; ++j) {
        const double angle = std::numbers::pi * dyadic_angle(k, j, lambda);
        m *= mask.contains(j) ? std::abs(std::sin(angle)) : std::abs(std::cos(angle));
    }
    return m;
}

void validate_selector(const FrequencySelector& selector, int lambda)
{
    if (const auto* rc = std::get_if<ResidueClass>(&selector)) {
        if (rc->r < 0 || rc->r >= lambda) {
            throw ArgumentError("residue class needs 0 <= r < lambda");
        }
        if (rc->a >= (std::uint64_t{1} << rc->r)) {
            throw ArgumentError("residue a=" + std::to_string(rc->a) + " must be < 2^r=" +
                                std::to_string(std::uint64_t{1} << rc->r));
        }
    } else if (const auto* iv = std::get_if<FrequencyInterval>(&selector)) {
        if (iv->begin >= iv->end) {
            throw ArgumentError("empty frequency interval");
        }
        if (iv->end > (std::uint64_t{1} << lambda)) {
            throw ArgumentError("frequency interval exceeds 2^lambda");
        }
    }
}

double l1_accumulate(const WalshMask& mask, const FrequencySelector& selector)
{
    check_trig_lambda(mask.lambda());
    double sum = 0.0;
    for_each_selected(mask.lambda(), selector,
                      [&](std::uint64_t k) { sum += trig_magnitude(mask, k); });
    return sum;
}

double sup_magnitude(const WalshMask& mask)
{
    check_trig_lambda(mask.lambda());
    double best = 0.0;
    for_each_selected(mask.lambda(), FullRange{},
                      [&](std::uint64_t k) { best = std::max(best, trig_magnitude(mask, k)); });
    return best;
}

MagnitudeTable::MagnitudeTable(int lambda, const ResourceLimits& limits) : lambda_(lambda)
{
    check_trig_lambda(lambda);
    require_table(lambda, 2 * sizeof(double), limits, "magnitude table");
    const std::size_t n = std::size_t{1} << lambda;
    cos_.resize(n);
    sin_.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double angle = std::numbers::pi * std::ldexp(static_cast<double>(t), -lambda);
        cos_[t] = std::abs(std::cos(angle));
        sin_[t] = std::abs(std::sin(angle));
    }
}

double MagnitudeTable::l1(const WalshMask& mask, const FrequencySelector& selector) const
{
    if (mask.lambda() != lambda_) {
        throw ArgumentError("mask lambda does not match the table");
    }
    double sum = 0.0;
    for_each_selected(lambda_, selector, [&](std::uint64_t k) { sum += magnitude(mask.bits(), k); });
    return sum;
}

double MagnitudeTable::sup(const WalshMask& mask) const
{
    if (mask.lambda() != lambda_) {
        throw ArgumentError("mask lambda does not match the table");
    }
    double best = 0.0;
    for_each_selected(lambda_, FullRange{},
                      [&](std::uint64_t k) { best = std::max(best, magnitude(mask.bits(), k)); });
    return best;
}

}  // namespace mwlab
