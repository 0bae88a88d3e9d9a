#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "uniq/errors.hpp"
#include "uniq/stats.hpp"

using namespace uniq;

TEST_CASE("boxplot of 1..9") {
    const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    const BoxStats s = boxplot_stats(v);
    CHECK(s.q1 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.median == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(s.q3 == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(s.iqr == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(s.lower_whisker == 1.0);
    CHECK(s.upper_whisker == 9.0);
    CHECK(s.outliers.empty());
}

TEST_CASE("boxplot of constant data collapses") {
    const std::vector<double> v(7, 4.25);
    const BoxStats s = boxplot_stats(v);
    CHECK(s.q1 == 4.25);
    CHECK(s.median == 4.25);
    CHECK(s.q3 == 4.25);
    CHECK(s.iqr == 0.0);
    CHECK(s.lower_whisker == 4.25);
    CHECK(s.upper_whisker == 4.25);
    CHECK(s.outliers.empty());
}

TEST_CASE("boxplot flags far point as outlier") {
    const std::vector<double> v = {1, 2, 3, 4, 100};
    const auto ob = testutil::oracle::boxplot(v);
    REQUIRE(100.0 > ob.q3 + 1.5 * (ob.q3 - ob.q1));
    const BoxStats s = boxplot_stats(v);
    REQUIRE(s.outliers.size() == 1);
    CHECK(s.outliers[0] == 100.0);
}

TEST_CASE("boxplot input validation") {
    CHECK_THROWS_AS(boxplot_stats(std::vector<double>{1.0}), TooFewValues);
    CHECK_THROWS_AS(boxplot_stats(std::vector<double>{1.0, std::nan("")}), NonFiniteInput);
}

TEST_CASE("boxplot matches brute-force oracle on random inputs") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> val(-50, 50);
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<std::size_t> len(2, 400);
        std::vector<double> v(len(rng));
        for (auto& x : v) x = val(rng);

        const BoxStats s = boxplot_stats(v);
        const auto o = testutil::oracle::boxplot(v);
        CHECK(s.q1 == doctest::Approx(o.q1).epsilon(1e-9));
        CHECK(s.median == doctest::Approx(o.median).epsilon(1e-9));
        CHECK(s.q3 == doctest::Approx(o.q3).epsilon(1e-9));
        CHECK(s.lower_whisker == o.lower_whisker);
        CHECK(s.upper_whisker == o.upper_whisker);
        CHECK(s.outliers == o.outliers);

        // partition property: inside the whisker span xor an outlier
        for (double x : v) {
            const bool inside = x >= s.lower_whisker && x <= s.upper_whisker;
            const bool outlier = std::count(s.outliers.begin(), s.outliers.end(), x) > 0;
            CHECK(inside != outlier);
        }
    }
}

TEST_CASE("pearson self and sign") {
    const std::vector<double> x = {0.1, 0.9, 0.3, 0.7};
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson worked example") {
    const std::vector<double> x = {1, 2, 3};
    const std::vector<double> y = {1, 2, 4};
    const double expected = 3.0 / std::sqrt(2.0 * 14.0 / 3.0);
    CHECK(pearson(x, y) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(pearson(x, y) == doctest::Approx(0.98198).epsilon(1e-5));
}

TEST_CASE("pearson errors") {
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}),
                    LengthMismatch);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), TooFewValues);
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    ZeroVariance);
}

TEST_CASE("pearson affine invariance and oracle agreement") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> val(-5, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::uniform_int_distribution<std::size_t> len(3, 500);
        std::vector<double> x(len(rng)), y(x.size());
        for (auto& v : x) v = val(rng);
        for (auto& v : y) v = val(rng);

        double r;
        try {
            r = pearson(x, y);
        } catch (const ZeroVariance&) {
            continue;
        }
        CHECK(r == doctest::Approx(testutil::oracle::pearson(x, y)).epsilon(1e-9));

        const double a = std::abs(val(rng)) + 0.1;
        const double b = val(rng);
        std::vector<double> scaled(x.size()), flipped(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            scaled[i] = a * x[i] + b;
            flipped[i] = -a * x[i] + b;
        }
        CHECK(pearson(scaled, y) == doctest::Approx(r).epsilon(1e-10));
        CHECK(pearson(flipped, y) == doctest::Approx(-r).epsilon(1e-10));
    }
}

TEST_CASE("normalized fall-off of the published blur row") {
    const std::vector<std::pair<std::string, double>> row = {
        {"baseline", 0.68}, {"blur:5", 0.65}, {"blur:9", 0.59}, {"blur:17", 0.27},
        {"blur:31", 0.13}};
    const auto out = normalized_falloff(row, "baseline");
    REQUIRE(out.size() == 5);
    CHECK(out[0].second == 1.0);
    CHECK(out[1].second == doctest::Approx(0.9559).epsilon(1e-4));
    CHECK(out[2].second == doctest::Approx(0.8676).epsilon(1e-4));
    CHECK(out[3].second == doctest::Approx(0.3971).epsilon(1e-4));
    CHECK(out[4].second == doctest::Approx(0.1912).epsilon(1e-4));
}

TEST_CASE("normalized fall-off degenerate cases") {
    const std::vector<std::pair<std::string, double>> equal = {
        {"baseline", 0.4}, {"blur:5", 0.4}, {"noise:0.3", 0.4}};
    for (const auto& [tag, v] : normalized_falloff(equal, "baseline")) CHECK(v == 1.0);

    CHECK_THROWS_AS(normalized_falloff({{"blur:5", 0.5}}, "baseline"), MissingBaseline);
    CHECK_THROWS_AS(normalized_falloff({{"baseline", 0.0}, {"blur:5", 0.5}}, "baseline"),
                    ZeroBaseline);
}
