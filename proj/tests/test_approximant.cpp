#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mwlab/approximant.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

// W_A from the direct-sum coefficients and the trapezoid written out inline.
std::vector<std::complex<double>> oracle_approximant(std::uint64_t a, int lambda, int sigma, int t)
{
    const std::int64_t X = std::int64_t{1} << lambda;
    const double inner = std::ldexp(1.0, sigma + t - 1);
    std::vector<std::complex<double>> w(static_cast<std::size_t>(X));
    for (std::int64_t k = -2 * static_cast<std::int64_t>(inner) + 1; k < 2 * inner; ++k) {
        const double z = std::abs(static_cast<double>(k));
        const double eta = z < inner ? 1.0 : 2.0 - z / inner;
        const auto c = oracle::trig_coefficient(a, static_cast<std::uint64_t>((k % X + X) % X), lambda);
        for (std::int64_t x = 0; x < X; ++x) {
            const double phase = 2 * std::numbers::pi * static_cast<double>(((k * x) % X + X) % X) / static_cast<double>(X);
            w[static_cast<std::size_t>(x)] += eta * c * std::polar(1.0, phase);
        }
    }
    return w;
}

}  // namespace

TEST_CASE("trapezoid")
{
    CHECK(trapezoid_eta(0, 2, 3) == 1.0);
    CHECK(trapezoid_eta(15.9, 2, 3) == 1.0);
    CHECK(trapezoid_eta(16, 2, 3) == 1.0);
    CHECK(trapezoid_eta(24, 2, 3) == doctest::Approx(0.5));
    CHECK(trapezoid_eta(-24, 2, 3) == doctest::Approx(0.5));
    CHECK(trapezoid_eta(32, 2, 3) == 0.0);
    CHECK(trapezoid_eta(100, 2, 3) == 0.0);
}

TEST_CASE("config validation")
{
    ApproximantConfig c{10, 3, 6};
    CHECK_NOTHROW(c.validate());
    CHECK(c.band() == 512);
    CHECK(c.k1() == 32);
    c.t = 7;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    CHECK_THROWS_AS(ApproximantConfig({10, -1, 2}).validate(), ArgumentError);
    CHECK_THROWS_AS(ApproximantConfig({10, 2, 0}).validate(), ArgumentError);
    CHECK_FALSE(ApproximantConfig({14, 4, 4}).in_asymptotic_regime());
    CHECK_THROWS_AS(build_approximant(WalshMask(1, 10), {10, 3, 2}), ArgumentError);
    CHECK_THROWS_AS(build_approximant(WalshMask(0, 9), {10, 3, 2}), ArgumentError);
    CHECK_THROWS_AS(build_approximant(WalshMask(0, 20), {20, 3, 2}, 18), ResourceError);
}

TEST_CASE("synthesis matches the oracle")
{
    const int lambda = 8, sigma = 2, t = 3;
    const WalshMask a(0b11000000, lambda);
    auto approx = build_approximant(a, {lambda, sigma, t});
    auto want = oracle_approximant(a.bits(), lambda, sigma, t);
    for (std::size_t x = 0; x < want.size(); ++x) REQUIRE(std::abs(approx.values[x] - want[x]) < 1e-11);
}

TEST_CASE("dft equals the direct sum")
{
    std::vector<std::complex<double>> v(16);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {std::sin(double(i)), std::cos(3.0 * i)};
    auto got = dft(v);
    for (std::size_t k = 0; k < 16; ++k) {
        std::complex<double> s{};
        for (std::size_t x = 0; x < 16; ++x) s += v[x] * std::polar(1.0, -2 * std::numbers::pi * double(k * x % 16) / 16.0);
        CHECK(std::abs(got[k] - s / 16.0) < 1e-12);
    }
}

TEST_CASE("every tail mask: band, domination, sup")
{
    const int lambda = 10, sigma = 3;
    for (int t = 1; t <= 6; ++t) {
        for (std::uint64_t low = 0; low < 8; ++low) {
            const WalshMask a(low << (lambda - sigma), lambda);
            auto approx = build_approximant(a, {lambda, sigma, t});
            auto sc = check_support(approx);
            CHECK(sc.within_band);
            CHECK(sc.dominated);
            CHECK(sc.max_support < (std::uint64_t{1} << (sigma + t)));
            CHECK(approx.sup_norm() <= 3.0 + 1e-9);
        }
    }
}

TEST_CASE("error decreases with t")
{
    const WalshMask a(0b1011ull << 10, 14);
    double prev = 1e9;
    for (int t = 2; t <= 6; ++t) {
        const double e = l2_error(build_approximant(a, {14, 4, t}));
        CHECK(e < prev);
        prev = e;
    }
    CHECK(l2_error(build_approximant(WalshMask(0, 14), {14, 4, 3})) < 1e-12);
}

TEST_CASE("regression anchor: lambda 14, sigma 4, t 4, A = {10, 12}")
{
    const WalshMask a((1ull << 10) | (1ull << 12), 14);
    const double e = l2_error(build_approximant(a, {14, 4, 4}));
    auto want = oracle_approximant(a.bits(), 14, 4, 4);
    double s = 0.0;
    for (std::size_t x = 0; x < want.size(); ++x) s += std::norm(want[x] - double(oracle::walsh(a.bits(), x)));
    const double oracle_error = std::sqrt(s / double(want.size()));
    CHECK(e == doctest::Approx(oracle_error).epsilon(1e-10));
    CHECK(e == doctest::Approx(0.10792560750291708).epsilon(1e-10));
}
