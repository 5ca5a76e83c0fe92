#include <doctest.h>

#include <random>

#include "mwlab/arith_sieve.hpp"
#include "mwlab/fwht.hpp"
#include "oracles.hpp"

using namespace mwlab;

TEST_CASE("integer transform equals the naive transform")
{
    std::mt19937_64 rng(7);
    for (int lambda = 0; lambda <= 8; ++lambda) {
        const std::size_t X = std::size_t{1} << lambda;
        std::vector<std::int64_t> f(X);
        for (auto& v : f) v = static_cast<std::int64_t>(rng() % 7) - 3;
        auto want = oracle::naive_wht(f);
        fwht_in_place(std::span<std::int64_t>(f));
        CHECK(f == want);
    }
}

TEST_CASE("small blocks and many threads give the same answer")
{
    std::mt19937_64 rng(3);
    std::vector<std::int64_t> f(std::size_t{1} << 12);
    for (auto& v : f) v = static_cast<std::int64_t>(rng() % 3) - 1;
    auto a = f, b = f;
    fwht_in_place(std::span<std::int64_t>(a));
    FwhtOptions opts;
    opts.block = 4;
    opts.threads = 3;
    fwht_in_place(std::span<std::int64_t>(b), opts);
    CHECK(a == b);
    CHECK(a == oracle::naive_wht(f));
}

TEST_CASE("real transform")
{
    std::vector<double> f{0.5, -1.0, 2.0, 0.0, 1.0, 1.0, -0.25, 3.0};
    auto want = oracle::naive_wht(f);
    fwht_in_place(std::span<double>(f));
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == doctest::Approx(want[i]));
}

TEST_CASE("involution and parseval, exact")
{
    auto mu = sieve_moebius(16);
    std::vector<std::int64_t> f(mu.signs().begin(), mu.signs().end());
    auto g = f;
    fwht_in_place(std::span<std::int64_t>(g));
    std::int64_t energy_f = 0, energy_g = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        energy_f += f[i] * f[i];
        energy_g += g[i] * g[i];
    }
    CHECK(energy_g == energy_f * static_cast<std::int64_t>(f.size()));
    fwht_in_place(std::span<std::int64_t>(g));
    for (auto& v : g) v >>= 16;
    CHECK(g == f);
}

TEST_CASE("transform errors")
{
    std::vector<std::int64_t> odd(3, 1);
    CHECK_THROWS_AS(fwht_in_place(std::span<std::int64_t>(odd)), ArgumentError);
    std::vector<std::int64_t> big(4, std::int64_t{1} << 62);
    CHECK_THROWS_AS(fwht_in_place(std::span<std::int64_t>(big)), ResourceError);
}

TEST_CASE("spectrum and maximal correlation")
{
    auto mu = sieve_moebius(2);
    auto s = spectrum(mu, false);
    REQUIRE(s.exact());
    // mu on [0,4) = 0, 1, -1, -1
    CHECK(s[0] == -1);
    CHECK(s[1] == -1);
    CHECK(s[2] == 3);
    CHECK(s[3] == -1);
    auto best = max_correlation(s);
    CHECK(best.mask.bits() == 2);
    CHECK(best.value == 3);
    auto norm = spectrum(mu, true);
    CHECK(norm[2] == doctest::Approx(0.75));

    auto zero = ArithmeticSequence::from_signs(5, FunctionKind::custom, std::vector<std::int8_t>(32, 0));
    auto z = max_correlation(zero);
    CHECK(z.value == 0);
    CHECK(z.mask.bits() == 0);

    auto vm = sieve_von_mangoldt(6);
    auto real = spectrum(vm, false);
    CHECK_FALSE(real.exact());
    CHECK_THROWS_AS(max_correlation(vm), ArgumentError);
}

TEST_CASE("spectrum respects limits")
{
    ResourceLimits small;
    small.max_bytes = 64;
    CHECK_THROWS_AS(spectrum(sieve_moebius(6), false, small), ResourceError);
}
