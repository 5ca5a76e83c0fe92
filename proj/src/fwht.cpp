#include "mwlab/fwht.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "mwlab/parallel.hpp"

namespace mwlab {

namespace {

int checked_log2(std::size_t n)
{
    if (n == 0 || !std::has_single_bit(n)) {
        throw ArgumentError("transform length " + std::to_string(n) + " is not a power of two");
    }
    return std::countr_zero(n);
}

template <class T>
void butterfly_range(T* data, std::size_t lo, std::size_t hi, std::size_t half)
{
    // pairs (i, i+half) for i in [lo, hi) with bit `half` clear
    for (std::size_t base = lo; base < hi; base += 2 * half) {
        for (std::size_t i = base; i < base + half; ++i) {
            const T a = data[i];
            const T b = data[i + half];
            data[i] = a + b;
            data[i + half] = a - b;
        }
    }
}

template <class T>
void transform(std::span<T> buf, const FwhtOptions& options)
{
    const std::size_t n = buf.size();
    const std::size_t block = std::min(n, std::bit_floor(std::max<std::size_t>(options.block, 2)));
    T* data = buf.data();

    // Small strides: each block runs all of its stages while it is cache-resident.
    detail::parallel_for(n / block, options.threads, [&](std::size_t b) {
        for (std::size_t half = 1; half < block; half <<= 1) {
            butterfly_range(data, b * block, (b + 1) * block, half);
        }
    });
    // Large strides: one stage at a time, chunks of independent pairs in parallel.
    for (std::size_t half = block; half < n; half <<= 1) {
        const std::size_t chunks = n / (2 * half);
        detail::parallel_for(chunks, options.threads, [&](std::size_t c) {
            butterfly_range(data, c * 2 * half, (c + 1) * 2 * half, half);
        });
    }
}

}  // namespace

void fwht_in_place(std::span<std::int64_t> buffer, const FwhtOptions& options)
{
    const int lambda = checked_log2(buffer.size());
    std::uint64_t max_abs = 0;
    for (std::int64_t v : buffer) {
        if (v == std::numeric_limits<std::int64_t>::min()) {
            throw ResourceError("int64 transform input contains INT64_MIN");
        }
        max_abs = std::max<std::uint64_t>(max_abs, static_cast<std::uint64_t>(std::llabs(v)));
    }
    if (lambda >= 63 || max_abs > (static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) >> lambda)) {
        throw ResourceError("exact transform would overflow int64: max|f|=" + std::to_string(max_abs) +
                            " times 2^" + std::to_string(lambda));
    }
    transform(buffer, options);
}

void fwht_in_place(std::span<double> buffer, const FwhtOptions& options)
{
    checked_log2(buffer.size());
    transform(buffer, options);
}

Spectrum::Spectrum(int lambda, bool normalized, std::vector<std::int64_t> exact)
    : lambda_(lambda), normalized_(normalized), entries_(std::move(exact))
{
    if (normalized) {
        throw ArgumentError("normalized spectra are real-valued");
    }
    if (std::get<0>(entries_).size() != size()) {
        throw ArgumentError("spectrum length must be 2^lambda");
    }
}

Spectrum::Spectrum(int lambda, bool normalized, std::vector<double> real)
    : lambda_(lambda), normalized_(normalized), entries_(std::move(real))
{
    if (std::get<1>(entries_).size() != size()) {
        throw ArgumentError("spectrum length must be 2^lambda");
    }
}

std::span<const std::int64_t> Spectrum::exact_entries() const
{
    if (!exact()) {
        throw ArgumentError("spectrum is real-valued");
    }
    return std::get<0>(entries_);
}

std::span<const double> Spectrum::real_entries() const
{
    if (exact()) {
        throw ArgumentError("spectrum holds exact integers");
    }
    return std::get<1>(entries_);
}

double Spectrum::operator[](std::uint64_t mask_bits) const
{
    if (mask_bits >= size()) {
        throw ArgumentError("mask outside spectrum");
    }
    return exact() ? static_cast<double>(std::get<0>(entries_)[mask_bits])
                   : std::get<1>(entries_)[mask_bits];
}

Spectrum spectrum(const ArithmeticSequence& seq, bool normalized, const ResourceLimits& limits,
                  const FwhtOptions& options)
{
    const int lambda = seq.lambda();
    require_table(lambda, sizeof(double), limits, "spectrum");
    if (seq.integral()) {
        const auto signs = seq.signs();
        std::vector<std::int64_t> buf(signs.begin(), signs.end());
        fwht_in_place(buf, options);
        if (!normalized) {
            return Spectrum(lambda, false, std::move(buf));
        }
        std::vector<double> scaled(buf.size());
        std::transform(buf.begin(), buf.end(), scaled.begin(),
                       [lambda](std::int64_t v) { return std::ldexp(static_cast<double>(v), -lambda); });
        return Spectrum(lambda, true, std::move(scaled));
    }
    const auto reals = seq.reals();
    std::vector<double> buf(reals.begin(), reals.end());
    fwht_in_place(std::span<double>(buf), options);
    if (normalized) {
        for (double& v : buf) v = std::ldexp(v, -lambda);
    }
    return Spectrum(lambda, normalized, std::move(buf));
}

Correlation max_correlation(const Spectrum& raw)
{
    const auto entries = raw.exact_entries();
    std::size_t best = 0;
    for (std::size_t a = 1; a < entries.size(); ++a) {
        if (std::llabs(entries[a]) > std::llabs(entries[best])) {
            best = a;
        }
    }
    return {WalshMask(best, raw.lambda()), entries[best]};
}

Correlation max_correlation(const ArithmeticSequence& seq, const ResourceLimits& limits,
                            const FwhtOptions& options)
{
    if (!seq.integral()) {
        throw ArgumentError("max_correlation needs a {-1,0,1}-valued sequence");
    }
    return max_correlation(spectrum(seq, false, limits, options));
}

}  // namespace mwlab
