#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mwlab/limits.hpp"

namespace mwlab {

/// A subset A of {0, ..., lambda-1}, bit j set iff j in A.
class WalshMask {
public:
    static constexpr int kMaxLambda = 62;

    WalshMask() = default;
    WalshMask(std::uint64_t bits, int lambda);

    static WalshMask from_positions(std::span<const int> positions, int lambda);
    static WalshMask empty(int lambda) { return WalshMask(0, lambda); }
    static WalshMask full(int lambda);

    std::uint64_t bits() const noexcept { return bits_; }
    int lambda() const noexcept { return lambda_; }
    int weight() const noexcept { return std::popcount(bits_); }
    bool contains(int j) const noexcept { return j >= 0 && j < 64 && ((bits_ >> j) & 1u); }
    bool is_empty() const noexcept { return bits_ == 0; }
    std::vector<int> positions() const;

    /// A symmetric-difference B; w_A * w_B = w_{A xor B}.
    WalshMask symmetric_difference(const WalshMask& other) const;

    friend bool operator==(const WalshMask&, const WalshMask&) = default;

private:
    std::uint64_t bits_ = 0;
    int lambda_ = 0;
};

/// The 1-periodic square wave: +1 on [0, 1/2), -1 on [1/2, 1).
int step_h(double x);

/// (-1)^{popcount(bits & x)}, no range check; any nonnegative integer works.
constexpr int walsh_sign(std::uint64_t bits, std::uint64_t x) noexcept
{
    return (std::popcount(bits & x) & 1) ? -1 : 1;
}

/// w_A(x) for x in [0, 2^lambda).
int walsh_eval(const WalshMask& mask, std::uint64_t x);

/// Coefficient of e(kx/2^lambda) in the expansion of w_A:
///   w_A(x) = sum_k c(k) e(kx / 2^lambda),  c(k) = 2^-lambda sum_x w_A(x) e(-kx / 2^lambda).
struct TrigCoefficient {
    std::uint64_t k = 0;
    std::complex<double> value;
    double magnitude = 0.0;
};

/// Largest lambda for which coefficient angles stay exact dyadic doubles.
inline constexpr int kMaxTrigLambda = 52;

/// Product formula, O(lambda).
TrigCoefficient trig_coefficient(const WalshMask& mask, std::uint64_t k);

/// |c(k)| = prod_{j not in A} |cos(pi k 2^{j-lambda})| prod_{j in A} |sin(pi k 2^{j-lambda})|.
double trig_magnitude(const WalshMask& mask, std::uint64_t k);

/// Reduces a signed frequency mod 2^lambda.
std::uint64_t reduce_frequency(std::int64_t k, int lambda);

struct FullRange {};
/// k = a (mod 2^r).
struct ResidueClass {
    std::uint64_t a = 0;
    int r = 0;
};
/// Half-open [begin, end) of frequencies.
struct FrequencyInterval {
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
};
using FrequencySelector = std::variant<FullRange, ResidueClass, FrequencyInterval>;

void validate_selector(const FrequencySelector& selector, int lambda);

/// Sum of |c(k)| over the selected frequencies, streamed.
double l1_accumulate(const WalshMask& mask, const FrequencySelector& selector);

/// max_k |c(k)|.
double sup_magnitude(const WalshMask& mask);

/// Cached |cos|, |sin| at the 2^lambda dyadic angles pi t / 2^lambda, so that
/// the magnitude product costs lambda lookups. Used for exhaustive mask scans.
class MagnitudeTable {
public:
    explicit MagnitudeTable(int lambda, const ResourceLimits& limits = {});

    int lambda() const noexcept { return lambda_; }
    double magnitude(std::uint64_t mask_bits, std::uint64_t k) const noexcept
    {
        double m = 1.0;
        for (int j = 0; j < lambda_; ++j) {
            const std::uint64_t t = (k & ((std::uint64_t{1} << (lambda_ - j)) - 1)) << j;
            m *= ((mask_bits >> j) & 1u) ? sin_[t] : cos_[t];
        }
        return m;
    }

    double l1(const WalshMask& mask, const FrequencySelector& selector) const;
    double sup(const WalshMask& mask) const;

private:
    int lambda_;
    std::vector<double> cos_;
    std::vector<double> sin_;
};

}  // namespace mwlab
