#pragma once

// Ten per-band statistics over wavelet coefficients and the canonical
// (band-major) feature vector built from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seizure/dwt.hpp"
#include "seizure/error.hpp"
#include "seizure/ingest.hpp"

namespace seizure {

inline constexpr std::size_t kFeaturesPerBand = 10;

inline constexpr std::array<std::string_view, kFeaturesPerBand> kFeatureStatNames = {
    "min", "max", "mean", "median", "std", "variance", "skewness", "energy", "rwe", "entropy"};

// Offsets within a band's block of ten.
enum class Stat : std::size_t { min, max, mean, median, std, variance, skewness, energy, rwe, entropy };

// `printed`: (1/N) sum ((D - mu) / sigma)^4 - 3, i.e. the excess-kurtosis form.
// `third_moment`: the conventional (1/N) sum ((D - mu) / sigma)^3.
enum class SkewnessForm { printed, third_moment };

// What to do with a band whose sample standard deviation is zero.
enum class DegeneratePolicy { error, substitute_zero };

struct FeatureOptions {
    SkewnessForm skewness = SkewnessForm::printed;
    DegeneratePolicy degenerate = DegeneratePolicy::error;
};

struct BandFeatures {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0;       // N - 1 denominator
    double variance = 0.0;  // std^2
    double skewness_stat = 0.0;
    double energy = 0.0;    // sum D^2
    double rwe = 0.0;       // energy / total energy over all bands
    double entropy = 0.0;   // sum D^2 log(D^2), 0 log 0 := 0

    std::array<double, kFeaturesPerBand> as_array() const {
        return {min, max, mean, median, std, variance, skewness_stat, energy, rwe, entropy};
    }
};

// All statistics except rwe, which needs the whole tree.
inline BandFeatures band_stats(std::span<const double> coeffs, const FeatureOptions& opts = {}) {
    if (coeffs.empty()) throw UsageError("features", "empty coefficient band");
    for (double v : coeffs)
        if (!std::isfinite(v)) throw DataError("features", "non-finite coefficient");

    const auto n = static_cast<double>(coeffs.size());
    BandFeatures f;
    const auto [lo, hi] = std::minmax_element(coeffs.begin(), coeffs.end());
    f.min = *lo;
    f.max = *hi;

    double sum = 0.0;
    for (double v : coeffs) sum += v;
    f.mean = sum / n;

    std::vector<double> sorted(coeffs.begin(), coeffs.end());
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    if (sorted.size() % 2 == 1) {
        f.median = sorted[mid];
    } else {
        const double upper = sorted[mid];
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
        f.median = 0.5 * (lower + upper);
    }

    double ss = 0.0;
    for (double v : coeffs) ss += (v - f.mean) * (v - f.mean);
    f.variance = coeffs.size() > 1 ? ss / (n - 1.0) : 0.0;
    f.std = std::sqrt(f.variance);

    if (f.std == 0.0) {
        if (opts.degenerate == DegeneratePolicy::error)
            throw DegenerateBand("zero standard deviation in a band of " + std::to_string(coeffs.size()) +
                                 " coefficients; skewness statistic undefined");
        f.skewness_stat = 0.0;
    } else {
        double acc = 0.0;
        for (double v : coeffs) {
            const double z = (v - f.mean) / f.std;
            acc += opts.skewness == SkewnessForm::printed ? z * z * z * z : z * z * z;
        }
        f.skewness_stat = acc / n - (opts.skewness == SkewnessForm::printed ? 3.0 : 0.0);
    }

    for (double v : coeffs) {
        const double e = v * v;
        f.energy += e;
        if (e > 0.0) f.entropy += e * std::log(e);
    }
    return f;
}

inline std::vector<double> band_energies(const DecompositionTree& tree) {
    std::vector<double> e;
    for (std::size_t b = 0; b < tree.band_count(); ++b) {
        double acc = 0.0;
        for (double v : tree.band(b)) acc += v * v;
        e.push_back(acc);
    }
    return e;
}

// rho_j = E_j / sum_k E_k, bands in canonical order.
inline std::vector<double> relative_wave_energy(const DecompositionTree& tree) {
    std::vector<double> e = band_energies(tree);
    double total = 0.0;
    for (double v : e) total += v;
    if (!(total > 0.0)) throw ZeroEnergy();
    for (auto& v : e) v /= total;
    return e;
}

// Canonical name of every column: "<band>_<stat>", band-major.
inline std::vector<std::string> feature_names(int levels = 4) {
    std::vector<std::string> names;
    for (int b = 0; b <= levels; ++b) {
        const std::string band = b < levels ? "D" + std::to_string(b + 1) : "A" + std::to_string(levels);
        for (auto stat : kFeatureStatNames) names.push_back(band + "_" + std::string(stat));
    }
    return names;
}

inline constexpr std::size_t feature_index(BandId band, Stat stat) {
    return static_cast<std::size_t>(band) * kFeaturesPerBand + static_cast<std::size_t>(stat);
}

struct FeatureVector {
    std::vector<double> values;  // 10 * (levels + 1); 50 for four levels
    std::optional<SetId> label;
};

inline FeatureVector feature_vector(const DecompositionTree& tree, std::optional<SetId> label = std::nullopt,
                                    const FeatureOptions& opts = {}) {
    const std::vector<double> rwe = relative_wave_energy(tree);
    FeatureVector fv;
    fv.label = label;
    fv.values.reserve(tree.band_count() * kFeaturesPerBand);
    for (std::size_t b = 0; b < tree.band_count(); ++b) {
        BandFeatures bf = band_stats(tree.band(b), opts);
        bf.rwe = rwe[b];
        for (double v : bf.as_array()) fv.values.push_back(v);
    }
    return fv;
}

}  // namespace seizure
