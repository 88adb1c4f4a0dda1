#pragma once

// Loading and labelling of single-channel EEG segments stored one sample per
// line, with the {Z,O,N,F,S}{001..100}.txt naming of the Bonn corpus.

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seizure/error.hpp"
#include "seizure/random.hpp"

namespace seizure {

inline constexpr double kCorpusSampleRate = 173.61;
inline constexpr std::size_t kCorpusSegmentLength = 4097;
inline constexpr int kSegmentsPerSet = 100;

enum class SetId { A, B, C, D, E };

inline constexpr SetId kAllSets[] = {SetId::A, SetId::B, SetId::C, SetId::D, SetId::E};

inline char set_letter(SetId s) { return static_cast<char>('A' + static_cast<int>(s)); }

// Filename prefix used by the public distribution.
inline char set_file_prefix(SetId s) {
    constexpr char prefixes[] = {'Z', 'O', 'N', 'F', 'S'};
    return prefixes[static_cast<int>(s)];
}

inline std::optional<SetId> set_from_letter(char c) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (c < 'A' || c > 'E') return std::nullopt;
    return static_cast<SetId>(c - 'A');
}

inline std::optional<SetId> set_from_file_prefix(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'Z': return SetId::A;
        case 'O': return SetId::B;
        case 'N': return SetId::C;
        case 'F': return SetId::D;
        case 'S': return SetId::E;
        default: return std::nullopt;
    }
}

struct EegSegment {
    std::vector<double> samples;
    double fs = kCorpusSampleRate;
    std::optional<SetId> set_id;
    int segment_index = 0;  // 1..100 for corpus files, 0 when unknown
};

struct SegmentCollection {
    SetId set_id = SetId::A;
    std::vector<EegSegment> segments;
};

enum class CaseId { Case1 = 1, Case2, Case3, Case4 };

// Binary task: one of A..D (positive, non-seizure) against E (negative, ictal).
struct CaseSpec {
    CaseId case_id = CaseId::Case1;
    SetId positive_set = SetId::A;
    SetId negative_set = SetId::E;

    static CaseSpec from_case(CaseId id) {
        return CaseSpec{id, static_cast<SetId>(static_cast<int>(id) - 1), SetId::E};
    }
    static CaseSpec from_number(int n) {
        if (n < 1 || n > 4) throw UsageError("ingest", "case must be 1..4, got " + std::to_string(n));
        return from_case(static_cast<CaseId>(n));
    }
    int number() const { return static_cast<int>(case_id); }
    std::string name() const {
        return std::string("Set ") + set_letter(positive_set) + " vs Set " + set_letter(negative_set);
    }
};

inline constexpr CaseId kAllCases[] = {CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4};

struct LoadOptions {
    // Strict: every line must hold a number and the count must equal expected_length.
    // Lenient: trailing blank lines are ignored and no length check is made.
    bool strict = true;
    std::size_t expected_length = kCorpusSegmentLength;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::optional<double> parse_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end != begin + text.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
    return v;
}

// "Z001.txt" -> (A, 1); unknown names give (nullopt, 0).
inline std::pair<std::optional<SetId>, int> parse_segment_name(const std::filesystem::path& path) {
    const std::string stem = path.stem().string();
    if (stem.empty()) return {std::nullopt, 0};
    auto set = set_from_file_prefix(stem[0]);
    int index = 0;
    if (set && stem.size() > 1 &&
        std::all_of(stem.begin() + 1, stem.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        index = std::stoi(stem.substr(1));
    } else {
        set.reset();
    }
    return {set, index};
}

}  // namespace detail

inline EegSegment load_segment(const std::filesystem::path& path, const LoadOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest", path.string() + ": cannot open file");

    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
    if (!opts.strict) {
        while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    }

    EegSegment seg;
    seg.samples.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string text = detail::trim(lines[i]);
        const auto v = detail::parse_number(text);
        if (!v) throw ParseError(path.string(), i + 1, text);
        seg.samples.push_back(*v);
    }
    if (opts.strict && seg.samples.size() != opts.expected_length)
        throw LengthError(path.string(), seg.samples.size(), opts.expected_length);
    if (seg.samples.empty()) throw ParseError(path.string(), 1, "");

    auto [set, index] = detail::parse_segment_name(path);
    seg.set_id = set;
    seg.segment_index = index;
    seg.fs = kCorpusSampleRate;
    return seg;
}

// Loads {prefix}001..{prefix}100 from dir. Filename matching ignores case so
// both .txt and .TXT distributions work.
inline SegmentCollection load_set(const std::filesystem::path& dir, SetId set, const LoadOptions& opts = {}) {
    std::map<int, std::filesystem::path> found;
    std::error_code ec;
    if (std::filesystem::is_directory(dir, ec)) {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
            if (ext != ".txt") continue;
            auto [s, index] = detail::parse_segment_name(entry.path());
            if (s == set && index >= 1 && index <= kSegmentsPerSet) found.emplace(index, entry.path());
        }
    }

    std::vector<int> missing;
    for (int i = 1; i <= kSegmentsPerSet; ++i)
        if (!found.contains(i)) missing.push_back(i);
    if (!missing.empty()) throw MissingFiles(dir.string(), std::move(missing));

    SegmentCollection out;
    out.set_id = set;
    out.segments.reserve(kSegmentsPerSet);
    for (const auto& [index, path] : found) out.segments.push_back(load_segment(path, opts));
    return out;
}

inline std::string segment_file_name(SetId set, int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%03d.txt", set_file_prefix(set), index);
    return buf;
}

// One value per line, printed with enough digits to round-trip.
inline void write_segment(const std::filesystem::path& path, std::span<const double> samples) {
    std::ofstream out(path);
    if (!out) throw DataError("ingest", path.string() + ": cannot write file");
    char buf[32];
    for (double v : samples) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
    if (!out) throw DataError("ingest", path.string() + ": write failed");
}

struct ToneComponent {
    double freq_hz = 0.0;
    double amplitude = 0.0;
};

// Sum of sinusoids plus white Gaussian noise. Deterministic for a fixed seed.
inline EegSegment synth_segment(std::span<const ToneComponent> components, double noise_std, std::size_t n, double fs,
                                std::uint64_t seed) {
    if (fs <= 0.0) throw UsageError("ingest", "sampling rate must be positive");
    if (n < 64) throw UsageError("ingest", "synthetic segment needs n >= 64");
    for (const auto& c : components)
        if (c.freq_hz >= fs / 2.0)
            throw AliasError("tone at " + std::to_string(c.freq_hz) + " Hz is at or above Nyquist (" +
                             std::to_string(fs / 2.0) + " Hz)");

    EegSegment seg;
    seg.fs = fs;
    seg.samples.assign(n, 0.0);
    for (const auto& c : components) {
        const double w = 2.0 * std::numbers::pi * c.freq_hz / fs;
        for (std::size_t i = 0; i < n; ++i) seg.samples[i] += c.amplitude * std::sin(w * static_cast<double>(i));
    }
    if (noise_std > 0.0) {
        Rng rng(seed);
        for (auto& v : seg.samples) v += noise_std * rng.normal();
    }
    return seg;
}

}  // namespace seizure
