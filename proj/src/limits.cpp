#include "mwlab/limits.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace mwlab {

ResourceLimits ResourceLimits::from_environment()
{
    ResourceLimits limits;
    if (const char* env = std::getenv("WSL_MAX_MEM_GIB"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        double gib = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(gib > 0)) {
            throw ArgumentError("WSL_MAX_MEM_GIB must be a positive number, got '" +
                                std::string(env) + "'");
        }
        limits.set_max_mem_gib(gib);
    }
    return limits;
}

void ResourceLimits::set_max_mem_gib(double gib)
{
    if (!(gib > 0)) {
        throw ArgumentError("--max-mem-gib must be positive");
    }
    max_bytes = static_cast<std::uint64_t>(std::ldexp(gib, 30));
}

std::string table_bytes(int lambda, std::size_t bytes_per_entry)
{
    std::ostringstream os;
    if (lambda >= 0 && lambda < 58) {
        os << ((std::uint64_t{1} << lambda) * bytes_per_entry) << " bytes";
    } else {
        os.precision(4);
        os << std::ldexp(static_cast<double>(bytes_per_entry), lambda) << " bytes";
    }
    return os.str();
}

void require_table(int lambda, std::size_t bytes_per_entry, const ResourceLimits& limits,
                   std::string_view what)
{
    if (lambda < 0) {
        throw ArgumentError("lambda must be nonnegative");
    }
    const bool too_long = lambda > limits.max_lambda;
    const bool too_big =
        lambda >= 58 || ((std::uint64_t{1} << lambda) * bytes_per_entry) > limits.max_bytes;
    if (too_long || too_big) {
        std::ostringstream os;
        os << std::string(what) << " at lambda=" << lambda << " requires "
           << table_bytes(lambda, bytes_per_entry) << " (2^" << lambda << " entries x "
           << bytes_per_entry << " bytes); limits are lambda <= " << limits.max_lambda
           << " and " << limits.max_bytes << " bytes";
        throw ResourceError(os.str());
    }
}

}  // namespace mwlab
