#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "seizure/preprocess.hpp"
#include "support.hpp"

using namespace seizure;

namespace {

constexpr double kFs = 173.61;

// Exact magnitude of a bilinear-transformed Butterworth low-pass.
double warped_butterworth_magnitude(double f, double fc, double fs, int order) {
    const double r = std::tan(std::numbers::pi * f / fs) / std::tan(std::numbers::pi * fc / fs);
    return 1.0 / std::sqrt(1.0 + std::pow(r, 2 * order));
}

// Least-squares amplitude and phase of a sinusoid at `f` over [lo, hi).
std::pair<double, double> fit_tone(const std::vector<double>& x, double f, double fs, std::size_t lo, std::size_t hi) {
    double ss = 0, cc = 0, sc = 0, xs = 0, xc = 0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double t = 2.0 * std::numbers::pi * f * static_cast<double>(i) / fs;
        const double s = std::sin(t), c = std::cos(t);
        ss += s * s;
        cc += c * c;
        sc += s * c;
        xs += x[i] * s;
        xc += x[i] * c;
    }
    const double det = ss * cc - sc * sc;
    const double a = (xs * cc - xc * sc) / det;  // sin coefficient
    const double b = (xc * ss - xs * sc) / det;  // cos coefficient
    return {std::hypot(a, b), std::atan2(b, a)};
}

std::vector<double> tone(double f, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / kFs);
    return x;
}

}  // namespace

TEST_CASE("order-4 60 Hz design at the corpus rate", "[preprocess]") {
    const BiquadCascade c = design_butterworth_lowpass(4, 60.0, kFs);
    REQUIRE(c.sections.size() == 2);
    REQUIRE(c.magnitude(0.0, kFs) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(c.dc_gain == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(c.magnitude(60.0, kFs) == Catch::Approx(std::sqrt(0.5)).margin(1e-9));
    REQUIRE(c.magnitude(80.0, kFs) == Catch::Approx(warped_butterworth_magnitude(80.0, 60.0, kFs, 4)).margin(1e-12));
    // Frozen from scipy.signal.butter(4, 60, fs=173.61, output='sos').
    REQUIRE(c.magnitude(80.0, kFs) == Catch::Approx(0.00304093).margin(1e-7));
    for (const auto& s : c.sections) REQUIRE(s.stable());
}

TEST_CASE("designs across orders and cutoffs meet the Butterworth contract", "[preprocess][property]") {
    for (int order = 2; order <= 12; order += 2) {
        for (double fc : {5.0, 30.0, 60.0, 80.0}) {
            const BiquadCascade c = design_butterworth_lowpass(order, fc, kFs);
            CAPTURE(order, fc);
            REQUIRE(std::abs(c.magnitude(0.0, kFs) - 1.0) < 1e-9);
            REQUIRE(std::abs(c.magnitude(fc, kFs) - std::sqrt(0.5)) < 1e-6);
            for (const auto& s : c.sections) REQUIRE(s.stable());
            double prev = 2.0;
            for (int i = 0; i <= 400; ++i) {
                const double f = kFs / 2.0 * i / 400.0;
                const double m = c.magnitude(f, kFs);
                REQUIRE(m <= prev + 1e-12);
                REQUIRE(m == Catch::Approx(warped_butterworth_magnitude(f, fc, kFs, order)).margin(1e-9));
                prev = m;
            }
        }
    }
}

TEST_CASE("invalid designs are rejected", "[preprocess]") {
    REQUIRE_THROWS_AS(design_butterworth_lowpass(4, 0.0, kFs), DesignError);
    REQUIRE_THROWS_AS(design_butterworth_lowpass(4, 90.0, kFs), DesignError);
    REQUIRE_THROWS_AS(design_butterworth_lowpass(3, 60.0, kFs), DesignError);
    REQUIRE_THROWS_AS(design_butterworth_lowpass(14, 60.0, kFs), DesignError);
    REQUIRE_THROWS_AS(design_butterworth_lowpass(0, 60.0, kFs), DesignError);
}

TEST_CASE("impulse response decays", "[preprocess][property]") {
    const BiquadCascade c = design_butterworth_lowpass(4, 60.0, kFs);
    std::vector<double> imp(600, 0.0);
    imp[0] = 1.0;
    const auto h = lfilter(c, imp);
    auto tail = [&](std::size_t from) {
        double e = 0.0;
        for (std::size_t i = from; i < h.size(); ++i) e += h[i] * h[i];
        return e;
    };
    REQUIRE(tail(c.pad_length()) < 1e-12);
    REQUIRE(tail(c.settle_length()) < tail(c.settle_length() / 2));
    REQUIRE(tail(300) < 1e-30);
}

TEST_CASE("filtfilt passes constants and in-band tones", "[preprocess]") {
    const BiquadCascade c = design_butterworth_lowpass(4, 60.0, kFs);

    SECTION("constant signal") {
        const std::vector<double> x(500, 3.25);
        const auto y = filtfilt(c, x);
        REQUIRE(y.size() == x.size());
        for (double v : y) REQUIRE(v == Catch::Approx(3.25).margin(1e-6));
    }

    SECTION("10 Hz tone keeps amplitude and phase") {
        const auto x = tone(10.0, 4097);
        const auto y = filtfilt(c, x);
        const auto [amp, phase] = fit_tone(y, 10.0, kFs, 200, 3897);
        REQUIRE(amp == Catch::Approx(1.0).margin(1e-3));
        REQUIRE(std::abs(phase) < 1e-3);
        for (std::size_t i = 200; i < 3897; ++i) REQUIRE(std::abs(y[i] - x[i]) < 1e-3);
    }

    SECTION("80 Hz tone is attenuated by |H|^2") {
        const auto x = tone(80.0, 4097);
        const auto y = filtfilt(c, x);
        const double h = warped_butterworth_magnitude(80.0, 60.0, kFs, 4);
        const auto [amp, phase] = fit_tone(y, 80.0, kFs, 200, 3897);
        REQUIRE(amp == Catch::Approx(h * h).epsilon(0.02));
        REQUIRE(amp < 1e-5);
    }

    SECTION("too short") {
        REQUIRE_THROWS_AS(filtfilt(c, std::vector<double>(c.pad_length(), 1.0)), SignalTooShort);
        REQUIRE_NOTHROW(filtfilt(c, std::vector<double>(c.pad_length() + 1, 1.0)));
    }
}

TEST_CASE("filtfilt is linear and never amplifies energy", "[preprocess][property]") {
    std::mt19937_64 rng(12);
    for (int order = 2; order <= 8; order += 2) {
        const BiquadCascade c = design_butterworth_lowpass(order, 60.0, kFs);
        for (int trial = 0; trial < 25; ++trial) {
            const std::size_t n = 200 + rng() % 4000;
            auto x = test_support::random_signal(rng, n, 50.0);
            auto z = test_support::random_signal(rng, n, 5.0);
            if (trial % 5 == 1)
                for (std::size_t i = 0; i < n; ++i) x[i] += 400.0;  // large offset
            if (trial % 5 == 2)
                for (std::size_t i = 0; i < n; ++i) x[i] = (i < n / 2) ? -1.0 : 1.0;  // step
            if (trial % 5 == 3)
                for (std::size_t i = 0; i < n; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;  // Nyquist
            const double a = 1.7, b = -0.3;
            std::vector<double> mix(n);
            for (std::size_t i = 0; i < n; ++i) mix[i] = a * x[i] + b * z[i];

            const auto fx = filtfilt(c, x);
            const auto fz = filtfilt(c, z);
            const auto fm = filtfilt(c, mix);
            double scale = 0.0;
            for (double v : mix) scale = std::max(scale, std::abs(v));
            for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(fm[i] - (a * fx[i] + b * fz[i])) <= 1e-9 * scale);

            REQUIRE(test_support::energy(fx) <= test_support::energy(x) * (1.0 + 1e-6));
            REQUIRE(test_support::energy(fz) <= test_support::energy(z) * (1.0 + 1e-6));
        }
    }
}
