#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "mwlab/limits.hpp"

namespace mwlab {

enum class FunctionKind : std::uint8_t {
    moebius = 0,
    liouville = 1,
    von_mangoldt = 2,
    custom = 3,
};

std::string_view to_string(FunctionKind kind);
FunctionKind parse_function_kind(std::string_view name);

/// Values of an arithmetic function on [0, 2^lambda), index 0 forced to 0.
///
/// Sign-valued functions (Moebius, Liouville, any {-1,0,1} custom table) are
/// stored as int8; everything else as double. The table is immutable once
/// built.
class ArithmeticSequence {
public:
    static ArithmeticSequence from_signs(int lambda, FunctionKind kind,
                                         std::vector<std::int8_t> values);
    static ArithmeticSequence from_reals(int lambda, FunctionKind kind,
                                         std::vector<double> values);

    int lambda() const noexcept { return lambda_; }
    FunctionKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return std::size_t{1} << lambda_; }

    /// True when entries are stored as exact small integers.
    bool integral() const noexcept { return !signs_.empty(); }

    std::span<const std::int8_t> signs() const;
    std::span<const double> reals() const;

    double operator[](std::size_t n) const
    {
        return integral() ? static_cast<double>(signs_[n]) : reals_[n];
    }

private:
    ArithmeticSequence(int lambda, FunctionKind kind) : lambda_(lambda), kind_(kind) {}

    int lambda_ = 0;
    FunctionKind kind_ = FunctionKind::custom;
    std::vector<std::int8_t> signs_;
    std::vector<double> reals_;
};

struct SieveOptions {
    ResourceLimits limits{};
    std::size_t segment_size = std::size_t{1} << 20;
    unsigned threads = 0;  // 0 = hardware concurrency
};

ArithmeticSequence sieve_moebius(int lambda, const SieveOptions& options = {});
ArithmeticSequence sieve_liouville(int lambda, const SieveOptions& options = {});
ArithmeticSequence sieve_von_mangoldt(int lambda, const SieveOptions& options = {});
ArithmeticSequence sieve(FunctionKind kind, int lambda, const SieveOptions& options = {});

/// Primes p <= limit, plain Eratosthenes.
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

// Binary dump: "AWS1", lambda (u8), kind (u8), then 2^lambda entries,
// int8 for sign tables and little-endian IEEE-754 doubles otherwise.
void write_sequence(std::ostream& out, const ArithmeticSequence& seq);
ArithmeticSequence read_sequence(std::istream& in);

}  // namespace mwlab
