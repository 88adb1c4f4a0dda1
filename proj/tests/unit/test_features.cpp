#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "seizure/features.hpp"
#include "seizure/ingest.hpp"
#include "support.hpp"

using namespace seizure;

namespace {

void require_close(double got, double want, double tol) {
    REQUIRE(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

DecompositionTree tone_tree(double hz) {
    const ToneComponent tone{hz, 1.0};
    const auto seg = synth_segment({&tone, 1}, 0.0, 4097, 173.61, 0);
    return decompose(seg.samples);
}

}  // namespace

TEST_CASE("band_stats hand examples", "[features]") {
    const std::vector<double> d{1, 2, 3, 4};
    const auto f = band_stats(d);
    REQUIRE(f.min == 1.0);
    REQUIRE(f.max == 4.0);
    REQUIRE(f.mean == 2.5);
    REQUIRE(f.median == 2.5);
    REQUIRE(f.std == Catch::Approx(1.29099).epsilon(1e-5));
    REQUIRE(f.variance == Catch::Approx(5.0 / 3.0).epsilon(1e-12));
    REQUIRE(f.energy == 30.0);

    const std::vector<double> unit{1, -1, -1, 1, 1, -1, 1};
    REQUIRE(band_stats(unit).entropy == 0.0);

    const std::vector<double> odd{9, -2, 4};
    REQUIRE(band_stats(odd).median == 4.0);

    // Zeros contribute nothing to the entropy sum.
    const std::vector<double> with_zero{0.0, 2.0, 0.0, -3.0};
    REQUIRE(band_stats(with_zero).entropy == Catch::Approx(4 * std::log(4.0) + 9 * std::log(9.0)));
}

TEST_CASE("skewness statistic of normal draws", "[features]") {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> normal;
    std::vector<double> d(10000);
    for (auto& v : d) v = normal(rng);
    REQUIRE(std::abs(band_stats(d).skewness_stat) < 0.1);
    FeatureOptions third;
    third.skewness = SkewnessForm::third_moment;
    REQUIRE(std::abs(band_stats(d, third).skewness_stat) < 0.1);

    // Uniform has excess kurtosis -1.2; the printed form tracks it.
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& v : d) v = uni(rng);
    REQUIRE(band_stats(d).skewness_stat == Catch::Approx(-1.2).margin(0.05));
}

TEST_CASE("degenerate and invalid bands", "[features]") {
    const std::vector<double> flat{5, 5, 5};
    REQUIRE_THROWS_AS(band_stats(flat), DegenerateBand);
    FeatureOptions lenient;
    lenient.degenerate = DegeneratePolicy::substitute_zero;
    const auto f = band_stats(flat, lenient);
    REQUIRE(f.skewness_stat == 0.0);
    REQUIRE(f.std == 0.0);
    REQUIRE(f.energy == 75.0);

    REQUIRE_THROWS_AS(band_stats(std::vector<double>{}), UsageError);
    REQUIRE_THROWS_AS(band_stats(std::vector<double>{1.0, NAN}), DataError);
}

TEST_CASE("band_stats matches brute force on short bands", "[features][property]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-50.0, 50.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 2 + rng() % 15;
        std::vector<double> d(n);
        for (auto& v : d) v = uni(rng);
        if (trial % 7 == 0) d[0] = 0.0;
        const auto got = band_stats(d);
        const auto want = oracle::band_stats(d);
        CAPTURE(trial, n);
        require_close(got.min, want.min, 1e-12);
        require_close(got.max, want.max, 1e-12);
        require_close(got.mean, want.mean, 1e-12);
        require_close(got.median, want.median, 1e-12);
        require_close(got.std, want.std, 1e-12);
        require_close(got.variance, want.variance, 1e-12);
        require_close(got.skewness_stat, want.skewness_stat, 1e-12);
        require_close(got.energy, want.energy, 1e-12);
        require_close(got.entropy, want.entropy, 1e-12);
        REQUIRE(got.min <= got.median);
        REQUIRE(got.median <= got.max);
        REQUIRE(got.min <= got.mean);
        REQUIRE(got.mean <= got.max);
    }
}

TEST_CASE("scaling and permutation", "[features][property]") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = test_support::random_signal(rng, 20 + rng() % 500);
        const double c = 0.1 + 10.0 * std::uniform_real_distribution<double>(0, 1)(rng);
        std::vector<double> scaled = d;
        for (auto& v : scaled) v *= c;
        const auto a = band_stats(d);
        const auto b = band_stats(scaled);
        require_close(b.min, c * a.min, 1e-9);
        require_close(b.max, c * a.max, 1e-9);
        require_close(b.mean, c * a.mean, 1e-9);
        require_close(b.median, c * a.median, 1e-9);
        require_close(b.std, c * a.std, 1e-9);
        require_close(b.variance, c * c * a.variance, 1e-9);
        require_close(b.energy, c * c * a.energy, 1e-9);
        require_close(b.skewness_stat, a.skewness_stat, 1e-9);
        require_close(b.entropy, c * c * a.entropy + c * c * std::log(c * c) * a.energy, 1e-9);

        std::vector<double> shuffled = d;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto s = band_stats(shuffled);
        REQUIRE(s.min == a.min);
        REQUIRE(s.max == a.max);
        REQUIRE(s.median == a.median);
        require_close(s.mean, a.mean, 1e-12);
        require_close(s.variance, a.variance, 1e-12);
        require_close(s.skewness_stat, a.skewness_stat, 1e-10);
        require_close(s.energy, a.energy, 1e-12);
        require_close(s.entropy, a.entropy, 1e-12);
    }
}

TEST_CASE("relative wave energy", "[features]") {
    std::mt19937_64 rng(3);
    const auto t = decompose(test_support::random_signal(rng, 4097));
    const auto rho = relative_wave_energy(t);
    REQUIRE(rho.size() == 5);
    double sum = 0.0;
    for (double r : rho) {
        REQUIRE(r >= 0.0);
        REQUIRE(r <= 1.0);
        sum += r;
    }
    REQUIRE(std::abs(sum - 1.0) < 1e-12);

    auto only_a4 = t;
    for (auto& d : only_a4.details) std::fill(d.begin(), d.end(), 0.0);
    REQUIRE(relative_wave_energy(only_a4) == std::vector<double>{0, 0, 0, 0, 1});

    auto zero = t;
    for (auto& d : zero.details) std::fill(d.begin(), d.end(), 0.0);
    std::fill(zero.approx.begin(), zero.approx.end(), 0.0);
    REQUIRE_THROWS_AS(relative_wave_energy(zero), ZeroEnergy);
    REQUIRE_THROWS_AS(feature_vector(zero), ZeroEnergy);
}

TEST_CASE("relative wave energy of tones", "[features]") {
    // D3 covers 10.85-21.7 Hz at 173.61 Hz; a 10 Hz tone straddles D3 and D4.
    REQUIRE(relative_wave_energy(tone_tree(16.0))[2] > 0.7);
    const auto r10 = relative_wave_energy(tone_tree(10.0));
    REQUIRE(r10[3] > 0.6);
    REQUIRE(r10[2] + r10[3] > 0.95);
}

TEST_CASE("feature vector layout", "[features]") {
    const auto names = feature_names();
    REQUIRE(names.size() == 50);
    REQUIRE(names[0] == "D1_min");
    REQUIRE(names[8] == "D1_rwe");
    REQUIRE(names[49] == "A4_entropy");
    REQUIRE(feature_index(BandId::D3, Stat::rwe) == 28);
    REQUIRE(feature_index(BandId::A4, Stat::entropy) == 49);

    std::mt19937_64 rng(4);
    const auto x = test_support::random_signal(rng, 4097);
    const auto t1 = decompose(x);
    const auto t2 = decompose(x);
    const auto v1 = feature_vector(t1, SetId::E);
    const auto v2 = feature_vector(t2, SetId::E);
    REQUIRE(v1.values.size() == 50);
    REQUIRE(v1.label == SetId::E);
    REQUIRE(std::memcmp(v1.values.data(), v2.values.data(), 50 * sizeof(double)) == 0);

    double rwe = 0.0;
    for (std::size_t b = 0; b < 5; ++b) {
        rwe += v1.values[b * 10 + 8];
        const auto bf = band_stats(t1.band(b));
        REQUIRE(v1.values[b * 10 + 0] == bf.min);
        REQUIRE(v1.values[b * 10 + 6] == bf.skewness_stat);
        REQUIRE(v1.values[b * 10 + 9] == bf.entropy);
    }
    for (double v : v1.values) REQUIRE(std::isfinite(v));
    REQUIRE(std::abs(rwe - 1.0) < 1e-9);
}
