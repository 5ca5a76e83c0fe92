#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mwlab {

/// Malformed input: bad ranges, masks outside their window, unknown names.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request that would exceed the configured memory budget or an exact
/// arithmetic range (64-bit accumulator overflow).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ResourceLimits {
    int max_lambda = 28;
    std::uint64_t max_bytes = std::uint64_t{4} << 30;

    /// Defaults, with max_bytes overridden by WSL_MAX_MEM_GIB when set.
    static ResourceLimits from_environment();

    void set_max_mem_gib(double gib);
};

/// Throws ResourceError unless a table of 2^lambda entries of the given
/// width fits both the lambda cap and the byte budget. The message names
/// the byte requirement.
void require_table(int lambda, std::size_t bytes_per_entry, const ResourceLimits& limits,
                   std::string_view what);

/// Human-readable byte count for 2^lambda * bytes_per_entry (exact below 2^64).
std::string table_bytes(int lambda, std::size_t bytes_per_entry);

}  // namespace mwlab
