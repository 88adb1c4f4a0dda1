#pragma once

// Butterworth low-pass design (bilinear transform with pre-warping) realised
// as a cascade of second-order sections, and zero-phase forward-backward
// filtering.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "seizure/error.hpp"

namespace seizure {

// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    std::complex<double> response(double omega) const {
        const std::complex<double> z1 = std::polar(1.0, -omega);
        const std::complex<double> z2 = z1 * z1;
        return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
    }

    // Poles are inside the unit circle iff |a2| < 1 and |a1| < 1 + a2.
    bool stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

struct BiquadCascade {
    std::vector<Biquad> sections;
    double dc_gain = 1.0;
    int order = 0;

    std::complex<double> response(double freq_hz, double fs) const {
        const double omega = 2.0 * std::numbers::pi * freq_hz / fs;
        std::complex<double> h = 1.0;
        for (const auto& s : sections) h *= s.response(omega);
        return h;
    }

    double magnitude(double freq_hz, double fs) const { return std::abs(response(freq_hz, fs)); }

    // Samples after which the impulse response is treated as settled.
    std::size_t settle_length() const { return 6 * static_cast<std::size_t>(order); }
    std::size_t pad_length() const { return 3 * settle_length(); }
};

inline BiquadCascade design_butterworth_lowpass(int order, double cutoff_hz, double fs) {
    if (!(fs > 0.0)) throw DesignError("sampling rate must be positive");
    if (!(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0))
        throw DesignError("cutoff " + std::to_string(cutoff_hz) + " Hz outside (0, " + std::to_string(fs / 2.0) + ")");
    if (order < 2 || order > 12 || order % 2 != 0)
        throw DesignError("order must be even and in [2, 12], got " + std::to_string(order));

    // Pre-warped analog cutoff, with the bilinear factor 2*fs folded in.
    const double k = std::tan(std::numbers::pi * cutoff_hz / fs);
    const double k2 = k * k;

    BiquadCascade cascade;
    cascade.order = order;
    for (int i = 0; i < order / 2; ++i) {
        // Conjugate pole pair at angle theta: s^2 + 2 sin(theta) s + 1.
        const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order);
        const double damping = 2.0 * std::sin(theta);
        const double norm = 1.0 / (1.0 + damping * k + k2);
        Biquad s;
        s.b0 = k2 * norm;
        s.b1 = 2.0 * s.b0;
        s.b2 = s.b0;
        s.a1 = 2.0 * (k2 - 1.0) * norm;
        s.a2 = (1.0 - damping * k + k2) * norm;
        cascade.sections.push_back(s);
    }
    double g = 1.0;
    for (const auto& s : cascade.sections) g *= s.dc_gain();
    cascade.dc_gain = g;
    return cascade;
}

namespace detail {

// Transposed direct form II, in place. zi holds (z1, z2) per section.
inline void run_cascade(const BiquadCascade& c, std::vector<double>& x, std::span<const std::array<double, 2>> zi) {
    std::vector<std::array<double, 2>> state(zi.begin(), zi.end());
    for (std::size_t n = 0; n < x.size(); ++n) {
        double v = x[n];
        for (std::size_t j = 0; j < c.sections.size(); ++j) {
            const Biquad& s = c.sections[j];
            auto& z = state[j];
            const double y = s.b0 * v + z[0];
            z[0] = s.b1 * v - s.a1 * y + z[1];
            z[1] = s.b2 * v - s.a2 * y;
            v = y;
        }
        x[n] = v;
    }
}

// Per-section steady state for a constant input of value u.
inline std::vector<std::array<double, 2>> steady_state(const BiquadCascade& c, double u) {
    std::vector<std::array<double, 2>> zi;
    for (const auto& s : c.sections) {
        const double y = s.dc_gain() * u;
        const double z2 = s.b2 * u - s.a2 * y;
        const double z1 = s.b1 * u - s.a1 * y + z2;
        zi.push_back({z1, z2});
        u = y;
    }
    return zi;
}

}  // namespace detail

// Single causal pass from rest.
inline std::vector<double> lfilter(const BiquadCascade& c, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    std::vector<std::array<double, 2>> zero(c.sections.size(), {0.0, 0.0});
    detail::run_cascade(c, y, zero);
    return y;
}

// Forward-backward filtering with odd-reflection padding of pad_length()
// samples at each end. Net response is |H|^2 with zero phase.
inline std::vector<double> filtfilt(const BiquadCascade& c, std::span<const double> x) {
    const std::size_t pad = c.pad_length();
    if (x.size() <= pad) throw SignalTooShort("preprocess", x.size(), pad + 1);

    const std::size_t n = x.size();
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    const auto unit = detail::steady_state(c, 1.0);
    auto scaled = [&](double u) {
        auto z = unit;
        for (auto& s : z) s = {s[0] * u, s[1] * u};
        return z;
    };

    detail::run_cascade(c, ext, scaled(ext.front()));
    std::reverse(ext.begin(), ext.end());
    detail::run_cascade(c, ext, scaled(ext.front()));
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                               ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

}  // namespace seizure
