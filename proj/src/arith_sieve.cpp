#include "mwlab/arith_sieve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include "mwlab/parallel.hpp"

namespace mwlab {

namespace {

constexpr int kSieveLambdaCeiling = 32;  // residual products are uint32

void check_lambda(int lambda, std::size_t entry_bytes, const SieveOptions& options,
                  std::string_view what)
{
    if (lambda < 1) {
        throw ArgumentError("lambda must be at least 1");
    }
    if (lambda > kSieveLambdaCeiling) {
        throw ResourceError(std::string(what) + " at lambda=" + std::to_string(lambda) +
                            " requires " + table_bytes(lambda, entry_bytes) +
                            "; the sieve supports lambda <= 32");
    }
    require_table(lambda, entry_bytes, options.limits, what);
    if (options.segment_size == 0) {
        throw ArgumentError("segment size must be positive");
    }
}

std::uint32_t isqrt(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) {
        --r;
    }
    while ((r + 1) * (r + 1) <= n) {
        ++r;
    }
    return static_cast<std::uint32_t>(r);
}

std::uint64_t first_multiple(std::uint64_t p, std::uint64_t lo)
{
    return ((lo + p - 1) / p) * p;
}

// Runs body(lo, hi) over segments of [0, total), possibly in parallel.
template <class Body>
void for_each_segment(std::uint64_t total, const SieveOptions& options, Body&& body)
{
    const std::uint64_t seg = options.segment_size;
    const std::size_t count = static_cast<std::size_t>((total + seg - 1) / seg);
    detail::parallel_for(count, options.threads, [&](std::size_t i) {
        const std::uint64_t lo = i * seg;
        body(lo, std::min(total, lo + seg));
    });
}

}  // namespace

std::string_view to_string(FunctionKind kind)
{
    switch (kind) {
    case FunctionKind::moebius: return "moebius";
    case FunctionKind::liouville: return "liouville";
    case FunctionKind::von_mangoldt: return "von_mangoldt";
    case FunctionKind::custom: return "custom";
    }
    return "custom";
}

FunctionKind parse_function_kind(std::string_view name)
{
    if (name == "moebius" || name == "mu") return FunctionKind::moebius;
    if (name == "liouville") return FunctionKind::liouville;
    if (name == "von_mangoldt" || name == "lambda") return FunctionKind::von_mangoldt;
    if (name == "custom") return FunctionKind::custom;
    throw ArgumentError("unknown function kind '" + std::string(name) + "'");
}

ArithmeticSequence ArithmeticSequence::from_signs(int lambda, FunctionKind kind,
                                                  std::vector<std::int8_t> values)
{
    if (lambda < 0 || lambda > 62 || values.size() != (std::size_t{1} << lambda)) {
        throw ArgumentError("sign table length must be 2^lambda");
    }
    if (kind == FunctionKind::von_mangoldt) {
        throw ArgumentError("von Mangoldt values are real, not signs");
    }
    if (std::any_of(values.begin(), values.end(), [](std::int8_t v) { return v < -1 || v > 1; })) {
        throw ArgumentError("sign table entries must lie in {-1, 0, 1}");
    }
    ArithmeticSequence seq(lambda, kind);
    values[0] = 0;
    seq.signs_ = std::move(values);
    return seq;
}

ArithmeticSequence ArithmeticSequence::from_reals(int lambda, FunctionKind kind,
                                                  std::vector<double> values)
{
    if (lambda < 0 || lambda > 62 || values.size() != (std::size_t{1} << lambda)) {
        throw ArgumentError("value table length must be 2^lambda");
    }
    if (kind == FunctionKind::moebius || kind == FunctionKind::liouville) {
        throw ArgumentError("Moebius and Liouville tables are stored as signs");
    }
    ArithmeticSequence seq(lambda, kind);
    values[0] = 0.0;
    seq.reals_ = std::move(values);
    return seq;
}

std::span<const std::int8_t> ArithmeticSequence::signs() const
{
    if (!integral()) {
        throw ArgumentError("sequence '" + std::string(to_string(kind_)) +
                            "' is real-valued, not a sign table");
    }
    return signs_;
}

std::span<const double> ArithmeticSequence::reals() const
{
    if (integral()) {
        throw ArgumentError("sequence is stored as a sign table");
    }
    return reals_;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit)
{
    std::vector<std::uint32_t> primes;
    if (limit < 2) {
        return primes;
    }
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (composite[p]) {
            continue;
        }
        primes.push_back(static_cast<std::uint32_t>(p));
        for (std::uint64_t q = p * p; q <= limit; q += p) {
            composite[q] = true;
        }
    }
    return primes;
}

ArithmeticSequence sieve_moebius(int lambda, const SieveOptions& options)
{
    check_lambda(lambda, sizeof(std::int8_t), options, "Moebius sieve");
    const std::uint64_t total = std::uint64_t{1} << lambda;
    const auto primes = primes_up_to(isqrt(total - 1));
    std::vector<std::int8_t> mu(total);

    for_each_segment(total, options, [&](std::uint64_t lo, std::uint64_t hi) {
        const std::size_t len = hi - lo;
        std::span<std::int8_t> out(mu.data() + lo, len);
        std::fill(out.begin(), out.end(), std::int8_t{1});
        // product of the distinct small primes found so far
        std::vector<std::uint32_t> prod(len, 1);
        for (std::uint64_t p : primes) {
            if (p * p > hi - 1) {
                break;
            }
            for (std::uint64_t n = first_multiple(p, std::max<std::uint64_t>(lo, 1)); n < hi; n += p) {
                out[n - lo] = static_cast<std::int8_t>(-out[n - lo]);
                prod[n - lo] *= static_cast<std::uint32_t>(p);
            }
            const std::uint64_t p2 = p * p;
            for (std::uint64_t n = first_multiple(p2, std::max<std::uint64_t>(lo, 1)); n < hi; n += p2) {
                out[n - lo] = 0;
            }
        }
        // A squarefree n has at most one prime factor above sqrt(n).
        for (std::uint64_t n = std::max<std::uint64_t>(lo, 1); n < hi; ++n) {
            if (out[n - lo] != 0 && prod[n - lo] != n) {
                out[n - lo] = static_cast<std::int8_t>(-out[n - lo]);
            }
        }
        if (lo == 0) {
            out[0] = 0;
        }
    });
    return ArithmeticSequence::from_signs(lambda, FunctionKind::moebius, std::move(mu));
}

ArithmeticSequence sieve_liouville(int lambda, const SieveOptions& options)
{
    check_lambda(lambda, sizeof(std::int8_t), options, "Liouville sieve");
    const std::uint64_t total = std::uint64_t{1} << lambda;
    const auto primes = primes_up_to(isqrt(total - 1));
    std::vector<std::int8_t> liouville(total);

    for_each_segment(total, options, [&](std::uint64_t lo, std::uint64_t hi) {
        const std::size_t len = hi - lo;
        std::span<std::int8_t> out(liouville.data() + lo, len);
        std::fill(out.begin(), out.end(), std::int8_t{1});
        // product of the small prime powers dividing n (with multiplicity)
        std::vector<std::uint32_t> prod(len, 1);
        for (std::uint64_t p : primes) {
            if (p * p > hi - 1) {
                break;
            }
            for (std::uint64_t pk = p; pk < hi; pk *= p) {
                for (std::uint64_t n = first_multiple(pk, std::max<std::uint64_t>(lo, 1)); n < hi; n += pk) {
                    out[n - lo] = static_cast<std::int8_t>(-out[n - lo]);
                    prod[n - lo] *= static_cast<std::uint32_t>(p);
                }
            }
        }
        for (std::uint64_t n = std::max<std::uint64_t>(lo, 1); n < hi; ++n) {
            if (prod[n - lo] != n) {
                out[n - lo] = static_cast<std::int8_t>(-out[n - lo]);
            }
        }
        if (lo == 0) {
            out[0] = 0;
        }
    });
    return ArithmeticSequence::from_signs(lambda, FunctionKind::liouville, std::move(liouville));
}

ArithmeticSequence sieve_von_mangoldt(int lambda, const SieveOptions& options)
{
    check_lambda(lambda, sizeof(double), options, "von Mangoldt sieve");
    const std::uint64_t total = std::uint64_t{1} << lambda;
    const auto primes = primes_up_to(isqrt(total - 1));
    std::vector<double> values(total, 0.0);

    for_each_segment(total, options, [&](std::uint64_t lo, std::uint64_t hi) {
        const std::size_t len = hi - lo;
        std::vector<bool> composite(len, false);
        for (std::uint64_t p : primes) {
            if (p * p > hi - 1) {
                break;
            }
            for (std::uint64_t n = first_multiple(p, std::max(lo, p * p)); n < hi; n += p) {
                composite[n - lo] = true;
            }
        }
        for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n < hi; ++n) {
            if (!composite[n - lo]) {
                values[n] = std::log(static_cast<double>(n));
            }
        }
        // proper prime powers p^k, k >= 2, all have p <= sqrt(2^lambda)
        for (std::uint64_t p : primes) {
            if (p * p >= hi) {
                break;
            }
            const double logp = std::log(static_cast<double>(p));
            for (std::uint64_t pk = p * p; pk < hi; pk *= p) {
                if (pk >= lo) {
                    values[pk] = logp;
                }
            }
        }
    });
    return ArithmeticSequence::from_reals(lambda, FunctionKind::von_mangoldt, std::move(values));
}

ArithmeticSequence sieve(FunctionKind kind, int lambda, const SieveOptions& options)
{
    switch (kind) {
    case FunctionKind::moebius: return sieve_moebius(lambda, options);
    case FunctionKind::liouville: return sieve_liouville(lambda, options);
    case FunctionKind::von_mangoldt: return sieve_von_mangoldt(lambda, options);
    case FunctionKind::custom: break;
    }
    throw ArgumentError("custom sequences are supplied, not sieved");
}

namespace {

constexpr char kMagic[4] = {'A', 'W', 'S', '1'};

void put_u64_le(std::ostream& out, std::uint64_t v)
{
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    }
    out.write(bytes, 8);
}

std::uint64_t get_u64_le(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

}  // namespace

void write_sequence(std::ostream& out, const ArithmeticSequence& seq)
{
    out.write(kMagic, 4);
    out.put(static_cast<char>(seq.lambda()));
    out.put(static_cast<char>(seq.kind()));
    if (seq.integral()) {
        const auto signs = seq.signs();
        out.write(reinterpret_cast<const char*>(signs.data()),
                  static_cast<std::streamsize>(signs.size()));
    } else {
        for (double v : seq.reals()) {
            put_u64_le(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    if (!out) {
        throw ResourceError("failed writing sequence dump");
    }
}

ArithmeticSequence read_sequence(std::istream& in)
{
    char header[6];
    if (!in.read(header, 6) || !std::equal(header, header + 4, kMagic)) {
        throw ArgumentError("not an AWS1 sequence dump");
    }
    const int lambda = static_cast<unsigned char>(header[4]);
    const auto kind_byte = static_cast<unsigned char>(header[5]);
    if (kind_byte > static_cast<unsigned char>(FunctionKind::custom)) {
        throw ArgumentError("AWS1 dump has unknown kind byte " + std::to_string(kind_byte));
    }
    if (lambda > 40) {
        throw ArgumentError("AWS1 dump lambda out of range");
    }
    const auto kind = static_cast<FunctionKind>(kind_byte);
    std::vector<char> payload{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const std::size_t n = std::size_t{1} << lambda;

    // Custom tables carry no type byte; the payload length decides.
    const bool as_signs = kind == FunctionKind::moebius || kind == FunctionKind::liouville ||
                          (kind == FunctionKind::custom && payload.size() == n);
    if (as_signs) {
        if (payload.size() != n) {
            throw ArgumentError("AWS1 payload size mismatch for sign table");
        }
        std::vector<std::int8_t> values(n);
        std::transform(payload.begin(), payload.end(), values.begin(),
                       [](char c) { return static_cast<std::int8_t>(c); });
        return ArithmeticSequence::from_signs(lambda, kind, std::move(values));
    }
    if (payload.size() != 8 * n) {
        throw ArgumentError("AWS1 payload size mismatch for real table");
    }
    std::vector<double> values(n);
    const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = std::bit_cast<double>(get_u64_le(bytes + 8 * i));
    }
    return ArithmeticSequence::from_reals(lambda, kind, std::move(values));
}

}  // namespace mwlab
