#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mwlab/arith_sieve.hpp"
#include "mwlab/limits.hpp"
#include "mwlab/walsh.hpp"

namespace mwlab {

struct FwhtOptions {
    std::size_t block = std::size_t{1} << 14;  // butterflies below this stride stay in-block
    unsigned threads = 0;
};

/// Unnormalized Walsh-Hadamard transform:
///   out[A] = sum_x f(x) (-1)^{popcount(A & x)}.
/// The integer overload is exact and throws ResourceError when
/// max|f| * 2^lambda could leave the int64 range.
void fwht_in_place(std::span<std::int64_t> buffer, const FwhtOptions& options = {});
void fwht_in_place(std::span<double> buffer, const FwhtOptions& options = {});

/// All 2^lambda Walsh correlations of a sequence, raw (exact sums) or
/// normalized by 2^-lambda.
class Spectrum {
public:
    Spectrum(int lambda, bool normalized, std::vector<std::int64_t> exact);
    Spectrum(int lambda, bool normalized, std::vector<double> real);

    int lambda() const noexcept { return lambda_; }
    bool normalized() const noexcept { return normalized_; }
    std::size_t size() const noexcept { return std::size_t{1} << lambda_; }

    /// Entries are exact int64 correlations (raw mode of a sign table).
    bool exact() const noexcept { return std::holds_alternative<std::vector<std::int64_t>>(entries_); }
    std::span<const std::int64_t> exact_entries() const;
    std::span<const double> real_entries() const;

    double operator[](std::uint64_t mask_bits) const;

private:
    int lambda_;
    bool normalized_;
    std::variant<std::vector<std::int64_t>, std::vector<double>> entries_;
};

Spectrum spectrum(const ArithmeticSequence& seq, bool normalized,
                  const ResourceLimits& limits = {}, const FwhtOptions& options = {});

struct Correlation {
    WalshMask mask;
    std::int64_t value = 0;
};

/// argmax_A |sum_n f(n) w_A(n)| for a sign table; ties go to the smallest mask.
Correlation max_correlation(const ArithmeticSequence& seq, const ResourceLimits& limits = {},
                            const FwhtOptions& options = {});
Correlation max_correlation(const Spectrum& raw);

}  // namespace mwlab
