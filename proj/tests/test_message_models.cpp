#include <stdexcept>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "rpsp/message_models.hpp"

using namespace rpsp;

namespace {

MessageSizeDistribution static_web() { return MessageSizeDistribution::lognormal(6.34, 2.07); }
MessageSizeDistribution dynamic_web() { return MessageSizeDistribution::weibull(4.02e-4, 1.9); }

// Max |ECDF - F| over the integer support of rounded-up draws. At integer x,
// Pr(ceil(X) <= x) = F(x), so the grid comparison carries no rounding bias.
double ks_against_cdf(const std::map<double, std::uint64_t>& counts, std::uint64_t n,
                      const MessageSizeDistribution& dist) {
    double d = 0.0;
    std::uint64_t acc = 0;
    for (const auto& [size, c] : counts) {
        acc += c;
        d = std::max(d, std::abs(static_cast<double>(acc) / n - dist.cdf(size)));
    }
    return d;
}

}  // namespace

TEST_CASE("cdf: step function, weibull origin, lognormal limit") {
    auto d = MessageSizeDistribution::discrete(PointMassLaw{{100, 500}, {0.3, 0.7}});
    CHECK(d.cdf(200) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.cdf(99) == 0.0);
    CHECK(d.cdf(100) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.cdf(500) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(dynamic_web().cdf(0.0) == 0.0);
    CHECK(dynamic_web().cdf(-5.0) == 0.0);
    CHECK(static_web().cdf(0.0) == 0.0);
    CHECK(static_web().cdf(1e9) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cdf is nondecreasing on an increasing grid") {
    for (const auto& d : {static_web(), dynamic_web()}) {
        double prev = -1.0;
        for (double x = 0.0; x < 2e5; x += 97.0) {
            const double f = d.cdf(x);
            CHECK(f >= prev);
            CHECK(f <= 1.0);
            prev = f;
        }
    }
}

TEST_CASE("mean: closed forms and measured check values") {
    // exp(mu + sigma^2/2) and Gamma(1 + 1/nu)/lambda
    CHECK(static_web().mean() ==
          doctest::Approx(std::exp(6.34 + 0.5 * 2.07 * 2.07)).epsilon(1e-12));
    CHECK(static_web().mean() == doctest::Approx(4827.0).epsilon(0.01));
    CHECK(dynamic_web().mean() == doctest::Approx(2207.37).epsilon(0.005));
    CHECK(MessageSizeDistribution::discrete(PointMassLaw{{100}, {1.0}}).mean() == 100.0);
}

TEST_CASE("sample: degenerate law always returns its point") {
    auto d = MessageSizeDistribution::discrete(PointMassLaw{{100}, {1.0}});
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) CHECK(d.sample(rng) == 100.0);
}

TEST_CASE("sample: lognormal mean within three standard errors") {
    auto d = static_web();
    std::mt19937_64 rng(2024);
    const std::size_t n = 1000000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += d.sample(rng);
    const double mean = d.mean();
    const double sd = mean * std::sqrt(std::expm1(2.07 * 2.07));
    const double se = sd / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n - mean) < 3.0 * se);
}

TEST_CASE("sample/cdf agreement: KS below 0.005 for every kind") {
    auto check_kind = [](const MessageSizeDistribution& d) {
        std::mt19937_64 rng(99);
        std::map<double, std::uint64_t> counts;
        const std::uint64_t n = 1000000;
        for (std::uint64_t i = 0; i < n; ++i) counts[d.sample(rng)] += 1;
        CHECK(ks_against_cdf(counts, n, d) < 0.005);
    };
    check_kind(dynamic_web());
    check_kind(static_web());
    check_kind(MessageSizeDistribution::discrete(
        PointMassLaw{{40, 100, 1500}, {0.25, 0.5, 0.25}}));
}

TEST_CASE("quantize: discrete laws pass through unchanged") {
    auto d = MessageSizeDistribution::discrete(PointMassLaw{{100, 500}, {0.3, 0.7}});
    auto q = d.quantize(1e-9);
    CHECK(q.law().sizes == d.law().sizes);
    CHECK(q.law().weights == d.law().weights);
}

TEST_CASE("quantize: weibull mean within 0.1% of the closed form") {
    auto q = dynamic_web().quantize(1e-9);
    // Rounding up to whole bytes shifts the mean by about half a byte.
    CHECK(q.mean() == doctest::Approx(dynamic_web().mean() + 0.5).epsilon(1e-3));
    CHECK(q.mean() == doctest::Approx(2207.37).epsilon(1e-3));
}

TEST_CASE("quantize: lognormal weights sum to one within 1e-12") {
    // The 1e-9 tail of this law truncates near 1.4e8 bytes, past the default
    // support cap; the cap has to be raised explicitly.
    auto q = static_web().quantize(1e-9, QuantizeOptions{2e8});
    double sum = 0.0, comp = 0.0;
    for (double w : q.law().weights) {
        double y = w - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(q.mean() == doctest::Approx(static_web().mean() + 0.5).epsilon(1e-3));
}

TEST_CASE("quantize: default support cap rejects the heavy lognormal tail") {
    CHECK_THROWS_AS(static_web().quantize(1e-9), std::invalid_argument);
    CHECK_THROWS_AS(static_web().quantize(1e-9, QuantizeOptions{1e6}), std::invalid_argument);
}

TEST_CASE("quantize: tail_mass outside (0, 1e-6] is rejected") {
    CHECK_THROWS_AS(dynamic_web().quantize(0.0), std::invalid_argument);
    CHECK_THROWS_AS(dynamic_web().quantize(1e-3), std::invalid_argument);
}

TEST_CASE("quantize: truncation moves the mean by at most tail * cap") {
    const double m9 = dynamic_web().quantize(1e-9).mean();
    const double m12 = dynamic_web().quantize(1e-12).mean();
    const double cap = static_cast<double>(dynamic_web().truncation_point(1e-12));
    CHECK(std::abs(m9 - m12) <= 1e-9 * cap);
}

TEST_CASE("empirical CSV round trip and diagnostics") {
    const std::string path_str =
        (std::filesystem::temp_directory_path() / "rpsp_empirical_test.csv").string();
    const char* path = path_str.c_str();
    {
        std::ofstream f(path);
        f << "size_bytes,probability\n1500,0.25\n40,0.5\n576,0.25\n";
    }
    auto d = MessageSizeDistribution::empirical_from_csv(path);
    CHECK(d.kind() == MessageKind::empirical);
    CHECK(d.is_discrete());
    CHECK(d.law().sizes == std::vector<double>{40, 576, 1500});  // sorted on load
    CHECK(d.mean() == doctest::Approx(0.5 * 40 + 0.25 * 576 + 0.25 * 1500));

    {
        std::ofstream f(path);
        f << "size,weight\n100,1\n";
    }
    CHECK_THROWS_WITH_AS(MessageSizeDistribution::empirical_from_csv(path),
                         doctest::Contains("size_bytes,probability"), std::runtime_error);
    {
        std::ofstream f(path);
        f << "size_bytes,probability\n100,0.9\n";
    }
    CHECK_THROWS_AS(MessageSizeDistribution::empirical_from_csv(path), std::runtime_error);
    std::remove(path);
}

TEST_CASE("invariants: invalid point-mass laws are rejected") {
    CHECK_THROWS_AS(MessageSizeDistribution::discrete(PointMassLaw{{100, 50}, {0.5, 0.5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MessageSizeDistribution::discrete(PointMassLaw{{0.0}, {1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MessageSizeDistribution::discrete(PointMassLaw{{100}, {0.5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MessageSizeDistribution::discrete(PointMassLaw{{100, 200}, {0.5, -0.5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MessageSizeDistribution::lognormal(6.34, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(MessageSizeDistribution::weibull(0.0, 1.9), std::invalid_argument);
}
