#pragma once

// Orthogonal Daubechies filter bank: filter construction, single analysis and
// synthesis steps, multi-level decomposition and per-band reconstruction.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seizure/error.hpp"

namespace seizure {

// Daubechies scaling filter with `vanishing_moments` vanishing moments
// (2 * vanishing_moments taps), built by spectral factorisation of the
// half-band polynomial and keeping the roots inside the unit circle, so the
// result is the minimum-phase filter normalised to sum sqrt(2).
inline std::vector<double> daubechies_scaling_filter(int vanishing_moments) {
    using cplx = std::complex<double>;
    const int n = vanishing_moments;
    if (n < 1 || n > 10) throw UsageError("dwt", "Daubechies order must be in [1, 10]");

    // P(y) = sum_{k<n} C(n-1+k, k) y^k, highest degree coefficient last.
    std::vector<double> p(static_cast<std::size_t>(n));
    double binom = 1.0;
    for (int k = 0; k < n; ++k) {
        p[static_cast<std::size_t>(k)] = binom;
        binom = binom * (n + k) / (k + 1);
    }

    auto eval = [&](cplx y) {
        cplx acc = 0.0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * y + *it;
        return acc;
    };
    auto eval_deriv = [&](cplx y) {
        cplx acc = 0.0;
        for (std::size_t k = p.size() - 1; k >= 1; --k) acc = acc * y + static_cast<double>(k) * p[k];
        return acc;
    };

    // Durand-Kerner on the monic polynomial, then Newton polishing.
    const int degree = n - 1;
    std::vector<cplx> roots;
    if (degree > 0) {
        const double lead = p.back();
        for (int i = 0; i < degree; ++i) roots.push_back(std::pow(cplx(0.4, 0.9), i));
        for (int iter = 0; iter < 2000; ++iter) {
            double change = 0.0;
            for (int i = 0; i < degree; ++i) {
                cplx denom = lead;
                for (int j = 0; j < degree; ++j)
                    if (j != i) denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
                const cplx step = eval(roots[static_cast<std::size_t>(i)]) / denom;
                roots[static_cast<std::size_t>(i)] -= step;
                change = std::max(change, std::abs(step));
            }
            if (change < 1e-15) break;
        }
        for (auto& r : roots) {
            for (int iter = 0; iter < 5; ++iter) {
                const cplx d = eval_deriv(r);
                if (std::abs(d) == 0.0) break;
                r -= eval(r) / d;
            }
        }
    }

    // Polynomial in z^-1: (1 + z^-1)^n * prod (1 - z_i z^-1) (1 - conj(z_i) z^-1) over
    // the minimum-phase root of z + 1/z = 2 - 4y for each root y.
    std::vector<cplx> poly{1.0};
    auto multiply = [&](cplx root) {
        std::vector<cplx> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= root * poly[i];
        }
        poly = std::move(next);
    };
    for (int i = 0; i < n; ++i) multiply(-1.0);
    for (const cplx y : roots) {
        const cplx b = 2.0 - 4.0 * y;
        const cplx disc = std::sqrt(b * b - 4.0);
        cplx z = (b + disc) / 2.0;
        if (std::abs(z) > 1.0) z = (b - disc) / 2.0;
        multiply(z);
    }

    std::vector<double> h(poly.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        h[i] = poly[i].real();
        sum += h[i];
    }
    for (auto& v : h) v *= std::sqrt(2.0) / sum;
    return h;
}

// Scaling (low-pass) filter h and wavelet (high-pass) filter
// g[k] = (-1)^k h[L-1-k].
struct WaveletFilterPair {
    std::vector<double> lowpass;
    std::vector<double> highpass;

    std::size_t length() const { return lowpass.size(); }

    static WaveletFilterPair from_scaling(std::vector<double> h) {
        WaveletFilterPair f;
        const std::size_t len = h.size();
        f.highpass.resize(len);
        for (std::size_t k = 0; k < len; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            f.highpass[k] = sign * h[len - 1 - k];
        }
        f.lowpass = std::move(h);
        return f;
    }
};

// 8-tap db4 pair; constructed once.
inline const WaveletFilterPair& db4_filters() {
    static const WaveletFilterPair filters = WaveletFilterPair::from_scaling(daubechies_scaling_filter(4));
    return filters;
}

enum class ExtensionMode { symmetric, periodic };

inline std::string_view to_string(ExtensionMode m) { return m == ExtensionMode::symmetric ? "symmetric" : "periodic"; }

inline std::optional<ExtensionMode> extension_mode_from_string(std::string_view s) {
    if (s == "symmetric" || s == "sym") return ExtensionMode::symmetric;
    if (s == "periodic" || s == "per" || s == "periodization") return ExtensionMode::periodic;
    return std::nullopt;
}

struct StepResult {
    std::vector<double> approx;
    std::vector<double> detail;
};

namespace detail {

inline std::ptrdiff_t wrap(std::ptrdiff_t i, std::ptrdiff_t n) {
    const std::ptrdiff_t m = i % n;
    return m < 0 ? m + n : m;
}

// Half-sample symmetric extension: x[-1] = x[0], x[n] = x[n-1].
inline std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
    const std::ptrdiff_t m = wrap(i, 2 * n);
    return m < n ? m : 2 * n - 1 - m;
}

}  // namespace detail

inline std::size_t step_output_length(std::size_t n, std::size_t filter_length, ExtensionMode mode) {
    return mode == ExtensionMode::periodic ? (n + 1) / 2 : (n + filter_length - 1) / 2;
}

// Coefficient o pairs with samples 2o + j - (L - 2), j = 0..L-1. In symmetric
// mode this is convolution with the reversed filter on the extended signal,
// keeping odd output positions; periodic mode wraps the same indices (odd
// lengths are first padded by repeating the last sample).
inline StepResult dwt_step(std::span<const double> x, const WaveletFilterPair& f, ExtensionMode mode) {
    const std::size_t len = f.length();
    if (x.size() < len) throw SignalTooShort("dwt", x.size(), len);

    const auto L = static_cast<std::ptrdiff_t>(len);
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const std::size_t out = step_output_length(x.size(), len, mode);
    const std::ptrdiff_t period = (mode == ExtensionMode::periodic) ? 2 * static_cast<std::ptrdiff_t>(out) : n;

    auto sample = [&](std::ptrdiff_t i) {
        if (mode == ExtensionMode::periodic) {
            const std::ptrdiff_t m = detail::wrap(i, period);
            return m < n ? x[static_cast<std::size_t>(m)] : x[static_cast<std::size_t>(n - 1)];
        }
        return x[static_cast<std::size_t>(detail::reflect(i, n))];
    };

    StepResult r;
    r.approx.resize(out);
    r.detail.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
        const std::ptrdiff_t base = 2 * static_cast<std::ptrdiff_t>(o) - (L - 2);
        double a = 0.0, d = 0.0;
        for (std::ptrdiff_t j = 0; j < L; ++j) {
            const double v = sample(base + j);
            a += f.lowpass[static_cast<std::size_t>(j)] * v;
            d += f.highpass[static_cast<std::size_t>(j)] * v;
        }
        r.approx[o] = a;
        r.detail[o] = d;
    }
    return r;
}

// Inverse of dwt_step for a signal of `output_length` samples.
inline std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail,
                                     const WaveletFilterPair& f, ExtensionMode mode, std::size_t output_length) {
    if (approx.size() != detail.size()) throw DimensionMismatch(approx.size(), detail.size());
    const auto L = static_cast<std::ptrdiff_t>(f.length());
    const auto count = static_cast<std::ptrdiff_t>(approx.size());

    if (mode == ExtensionMode::periodic) {
        const std::ptrdiff_t period = 2 * count;
        std::vector<double> y(static_cast<std::size_t>(period), 0.0);
        for (std::ptrdiff_t o = 0; o < count; ++o) {
            const double a = approx[static_cast<std::size_t>(o)];
            const double d = detail[static_cast<std::size_t>(o)];
            const std::ptrdiff_t base = 2 * o - (L - 2);
            for (std::ptrdiff_t j = 0; j < L; ++j) {
                const auto m = static_cast<std::size_t>(detail::wrap(base + j, period));
                y[m] += f.lowpass[static_cast<std::size_t>(j)] * a + f.highpass[static_cast<std::size_t>(j)] * d;
            }
        }
        y.resize(std::min(output_length, y.size()));
        return y;
    }

    const auto n = static_cast<std::ptrdiff_t>(output_length);
    std::vector<double> y(output_length, 0.0);
    for (std::ptrdiff_t m = 0; m < n; ++m) {
        double acc = 0.0;
        // Pairs (o, j) with 2o + j - (L - 2) == m.
        for (std::ptrdiff_t j = (m + L) % 2; j < L; j += 2) {
            const std::ptrdiff_t o = (m + L - 2 - j) / 2;
            if (o < 0 || o >= count) continue;
            acc += f.lowpass[static_cast<std::size_t>(j)] * approx[static_cast<std::size_t>(o)] +
                   f.highpass[static_cast<std::size_t>(j)] * detail[static_cast<std::size_t>(o)];
        }
        y[static_cast<std::size_t>(m)] = acc;
    }
    return y;
}

// Nominal four-level bands, finest first.
enum class BandId { D1 = 0, D2 = 1, D3 = 2, D4 = 3, A4 = 4 };

inline constexpr BandId kAllBands[] = {BandId::D1, BandId::D2, BandId::D3, BandId::D4, BandId::A4};

inline std::string_view band_label(BandId b) {
    constexpr std::string_view labels[] = {"D1", "D2", "D3", "D4", "A4"};
    return labels[static_cast<int>(b)];
}

inline std::string_view band_rhythm(BandId b) {
    constexpr std::string_view names[] = {"gamma", "beta", "alpha", "theta", "delta"};
    return names[static_cast<int>(b)];
}

struct DecompositionTree {
    int levels = 0;
    std::vector<std::vector<double>> details;  // details[k] is D(k+1)
    std::vector<double> approx;                // A(levels)
    ExtensionMode extension_mode = ExtensionMode::symmetric;
    std::size_t original_length = 0;
    std::vector<std::size_t> input_lengths;   // signal length entering each level
    WaveletFilterPair filters;

    // Bands in canonical order D1..D(levels), A(levels).
    std::size_t band_count() const { return static_cast<std::size_t>(levels) + 1; }

    std::span<const double> band(std::size_t index) const {
        if (index >= band_count()) throw UsageError("dwt", "band index " + std::to_string(index) + " out of range");
        return index < details.size() ? std::span<const double>(details[index]) : std::span<const double>(approx);
    }

    std::span<const double> band(BandId id) const {
        if (levels != 4) throw UsageError("dwt", "named bands require a 4-level tree");
        return band(static_cast<std::size_t>(id));
    }

    std::string band_name(std::size_t index) const {
        return index < details.size() ? "D" + std::to_string(index + 1) : "A" + std::to_string(levels);
    }
};

inline DecompositionTree decompose(std::span<const double> x, int levels = 4,
                                   ExtensionMode mode = ExtensionMode::symmetric,
                                   const WaveletFilterPair& filters = db4_filters()) {
    if (levels < 1 || levels > 10) throw LevelError(levels);
    const std::size_t need = (std::size_t{1} << levels) * filters.length();
    if (x.size() < need) throw SignalTooShort("dwt", x.size(), need);

    DecompositionTree tree;
    tree.levels = levels;
    tree.extension_mode = mode;
    tree.original_length = x.size();
    tree.filters = filters;

    std::vector<double> current(x.begin(), x.end());
    for (int k = 0; k < levels; ++k) {
        tree.input_lengths.push_back(current.size());
        StepResult r = dwt_step(current, filters, mode);
        tree.details.push_back(std::move(r.detail));
        current = std::move(r.approx);
    }
    tree.approx = std::move(current);
    return tree;
}

// Full inverse transform of (possibly modified) coefficients.
inline std::vector<double> reconstruct(const DecompositionTree& tree) {
    std::vector<double> current = tree.approx;
    for (int k = tree.levels - 1; k >= 0; --k) {
        const auto ku = static_cast<std::size_t>(k);
        current = idwt_step(current, tree.details[ku], tree.filters, tree.extension_mode, tree.input_lengths[ku]);
    }
    return current;
}

// Inverse transform with every band except `index` zeroed.
inline std::vector<double> reconstruct_band(const DecompositionTree& tree, std::size_t index) {
    if (index >= tree.band_count()) throw UsageError("dwt", "band index " + std::to_string(index) + " out of range");
    DecompositionTree only = tree;
    for (std::size_t k = 0; k < only.details.size(); ++k)
        if (k != index) std::fill(only.details[k].begin(), only.details[k].end(), 0.0);
    if (index != only.details.size()) std::fill(only.approx.begin(), only.approx.end(), 0.0);
    return reconstruct(only);
}

inline std::vector<double> reconstruct_band(const DecompositionTree& tree, BandId band) {
    if (tree.levels != 4) throw UsageError("dwt", "named bands require a 4-level tree");
    return reconstruct_band(tree, static_cast<std::size_t>(band));
}

struct BandRange {
    std::string name;                 // "D1" .. "A4"
    std::string rhythm;               // "gamma" .. "delta" for the nominal 4-level map
    std::optional<double> nominal_lo;
    std::optional<double> nominal_hi;
    double exact_lo = 0.0;            // dyadic split of [0, fs/2]
    double exact_hi = 0.0;
};

// Band-to-frequency table. Nominal ranges (for signals pre-limited to 60 Hz)
// exist only for four levels; exact dyadic ranges are always reported.
inline std::vector<BandRange> band_frequency_map(double fs, int levels = 4) {
    if (levels < 1 || levels > 10) throw LevelError(levels);
    constexpr double nominal[5][2] = {{30, 60}, {15, 30}, {8, 15}, {4, 8}, {0, 4}};
    std::vector<BandRange> out;
    for (int k = 1; k <= levels; ++k) {
        BandRange r;
        r.name = "D" + std::to_string(k);
        r.exact_lo = fs / std::ldexp(1.0, k + 1);
        r.exact_hi = fs / std::ldexp(1.0, k);
        out.push_back(std::move(r));
    }
    BandRange a;
    a.name = "A" + std::to_string(levels);
    a.exact_lo = 0.0;
    a.exact_hi = fs / std::ldexp(1.0, levels + 1);
    out.push_back(std::move(a));
    if (levels == 4) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].rhythm = std::string(band_rhythm(static_cast<BandId>(i)));
            out[i].nominal_lo = nominal[i][0];
            out[i].nominal_hi = nominal[i][1];
        }
    }
    return out;
}

}  // namespace seizure
