#pragma once

// End-to-end orchestration used by the command-line tool:
// ingest -> low-pass -> decompose -> features -> cross-validated evaluation.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "seizure/classifiers.hpp"
#include "seizure/dwt.hpp"
#include "seizure/error.hpp"
#include "seizure/eval.hpp"
#include "seizure/feature_csv.hpp"
#include "seizure/features.hpp"
#include "seizure/ingest.hpp"
#include "seizure/plot.hpp"
#include "seizure/preprocess.hpp"
#include "seizure/random.hpp"
#include "seizure/report.hpp"

namespace seizure {

struct PipelineConfig {
    std::filesystem::path corpus = "corpus";
    bool synthetic = false;
    std::uint64_t seed = 0;
    bool strict = true;

    int filter_order = 4;
    double cutoff_hz = 60.0;

    int levels = 4;
    ExtensionMode mode = ExtensionMode::symmetric;
    SkewnessForm skewness = SkewnessForm::printed;
    DegeneratePolicy degenerate = DegeneratePolicy::error;

    std::vector<ClassifierKind> classifiers{ClassifierKind::svm, ClassifierKind::knn, ClassifierKind::nb};
    std::vector<int> cases{1, 2, 3, 4};
    double svm_c = 1.0;
    std::optional<double> svm_sigma;  // default sqrt(feature count)
    double svm_tol = 1e-3;
    int knn_k = 5;
    double nb_epsilon = -1.0;  // negative: 1e-9 * max training variance
    bool grid_search = true;

    int folds = 10;
    int repetitions = 10;
    Aggregation aggregation = Aggregation::micro;
    unsigned threads = 0;

    std::filesystem::path output = "out";
    std::optional<std::filesystem::path> features_dir;  // default <output>/features

    std::filesystem::path feature_dir() const { return features_dir.value_or(output / "features"); }
};

// Rejects invalid settings before any computation starts.
inline void validate(const PipelineConfig& c) {
    auto bad = [](const std::string& what) { throw UsageError("config", what); };
    if (c.filter_order < 2 || c.filter_order > 12 || c.filter_order % 2) bad("filter_order must be even in [2, 12]");
    if (!(c.cutoff_hz > 0.0 && c.cutoff_hz < kCorpusSampleRate / 2.0)) bad("cutoff_hz must lie in (0, fs/2)");
    if (c.levels < 1 || c.levels > 10) bad("levels must be in [1, 10]");
    if (c.classifiers.empty()) bad("no classifier selected");
    if (c.cases.empty()) bad("no case selected");
    for (int k : c.cases)
        if (k < 1 || k > 4) bad("case must be 1..4");
    if (!(c.svm_c > 0.0)) bad("svm_c must be > 0");
    if (c.svm_sigma && !(*c.svm_sigma > 0.0)) bad("svm_sigma must be > 0");
    if (!(c.svm_tol > 0.0)) bad("svm_tol must be > 0");
    if (c.knn_k < 1 || c.knn_k % 2 == 0) bad("knn_k must be an odd positive integer");
    if (c.folds < 2) bad("folds must be >= 2");
    if (c.repetitions < 1) bad("repetitions must be >= 1");
}

// Reads a flat JSON object whose keys mirror the command-line flags
// (e.g. "filter_order", "svm_c", "grid_search"). Unknown keys are errors.
inline void apply_config_file(PipelineConfig& c, const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("config", path.string() + ": cannot open");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config", path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config", path.string() + ": top level must be an object");

    auto err = [&](const std::string& key, const std::string& what) {
        throw UsageError("config", path.string() + ": '" + key + "' " + what);
    };
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "corpus") c.corpus = v.get<std::string>();
            else if (key == "synthetic") c.synthetic = v.get<bool>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "strict") c.strict = v.get<bool>();
            else if (key == "filter_order") c.filter_order = v.get<int>();
            else if (key == "cutoff_hz") c.cutoff_hz = v.get<double>();
            else if (key == "levels") c.levels = v.get<int>();
            else if (key == "mode") {
                auto m = extension_mode_from_string(v.get<std::string>());
                if (!m) err(key, "must be symmetric or periodic");
                c.mode = *m;
            } else if (key == "skewness") {
                const auto s = v.get<std::string>();
                if (s == "printed") c.skewness = SkewnessForm::printed;
                else if (s == "third_moment") c.skewness = SkewnessForm::third_moment;
                else err(key, "must be printed or third_moment");
            } else if (key == "degenerate") {
                const auto s = v.get<std::string>();
                if (s == "error") c.degenerate = DegeneratePolicy::error;
                else if (s == "zero") c.degenerate = DegeneratePolicy::substitute_zero;
                else err(key, "must be error or zero");
            } else if (key == "classifiers") {
                c.classifiers.clear();
                for (const auto& s : v) {
                    auto k = classifier_from_string(s.get<std::string>());
                    if (!k) err(key, "unknown classifier");
                    c.classifiers.push_back(*k);
                }
            } else if (key == "cases") c.cases = v.get<std::vector<int>>();
            else if (key == "svm_c") c.svm_c = v.get<double>();
            else if (key == "svm_sigma") c.svm_sigma = v.get<double>();
            else if (key == "svm_tol") c.svm_tol = v.get<double>();
            else if (key == "knn_k") c.knn_k = v.get<int>();
            else if (key == "nb_epsilon") c.nb_epsilon = v.get<double>();
            else if (key == "grid_search") c.grid_search = v.get<bool>();
            else if (key == "folds") c.folds = v.get<int>();
            else if (key == "repetitions") c.repetitions = v.get<int>();
            else if (key == "aggregation") {
                const auto s = v.get<std::string>();
                if (s == "micro") c.aggregation = Aggregation::micro;
                else if (s == "macro") c.aggregation = Aggregation::macro;
                else err(key, "must be micro or macro");
            } else if (key == "threads") c.threads = v.get<unsigned>();
            else if (key == "output") c.output = v.get<std::string>();
            else if (key == "features_dir") c.features_dir = v.get<std::string>();
            else err(key, "is not a recognised setting");
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config", path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Synthetic stand-in corpus

// Fixed spectral profile per set, loosely mimicking the recording conditions.
inline std::vector<ToneComponent> synthetic_profile(SetId set) {
    switch (set) {
        case SetId::A: return {{10.0, 15.0}, {20.0, 20.0}, {35.0, 8.0}};
        case SetId::B: return {{10.0, 50.0}, {20.0, 10.0}};
        case SetId::C: return {{3.0, 40.0}, {6.0, 30.0}, {12.0, 10.0}};
        case SetId::D: return {{4.0, 50.0}, {7.0, 25.0}, {14.0, 10.0}};
        case SetId::E: return {{3.0, 200.0}, {6.0, 100.0}, {12.0, 50.0}, {25.0, 20.0}};
    }
    return {};
}

inline double synthetic_noise(SetId set) {
    constexpr double noise[] = {20.0, 15.0, 25.0, 30.0, 60.0};
    return noise[static_cast<int>(set)];
}

// Segment `index` (1-based) of a synthetic set; tones are jittered in
// frequency (+-10%) and amplitude (x0.7..1.3) from the base seed.
inline EegSegment synthetic_corpus_segment(SetId set, int index, std::uint64_t seed,
                                           std::size_t n = kCorpusSegmentLength) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(set) + 1, static_cast<std::uint64_t>(index));
    Rng rng(s);
    std::vector<ToneComponent> tones = synthetic_profile(set);
    for (auto& t : tones) {
        t.freq_hz *= 1.0 + 0.2 * (rng.uniform() - 0.5);
        t.amplitude *= 0.7 + 0.6 * rng.uniform();
    }
    EegSegment seg = synth_segment(tones, synthetic_noise(set), n, kCorpusSampleRate, mix_seed(s, 1));
    seg.set_id = set;
    seg.segment_index = index;
    return seg;
}

// ---------------------------------------------------------------------------
// Feature extraction

inline std::filesystem::path resolve_set_dir(const std::filesystem::path& root, SetId set) {
    const char letter = set_letter(set), prefix = set_file_prefix(set);
    const std::string candidates[] = {std::string(1, letter), std::string(1, static_cast<char>(std::tolower(letter))),
                                      std::string(1, prefix), std::string(1, static_cast<char>(std::tolower(prefix)))};
    std::error_code ec;
    for (const auto& c : candidates)
        if (std::filesystem::is_directory(root / c, ec)) return root / c;
    return root;
}

inline SegmentCollection load_or_synthesize(const PipelineConfig& c, SetId set) {
    if (c.synthetic) {
        SegmentCollection col;
        col.set_id = set;
        for (int i = 1; i <= kSegmentsPerSet; ++i) col.segments.push_back(synthetic_corpus_segment(set, i, c.seed));
        return col;
    }
    LoadOptions opts;
    opts.strict = c.strict;
    return load_set(resolve_set_dir(c.corpus, set), set, opts);
}

inline FeatureOptions feature_options(const PipelineConfig& c) { return FeatureOptions{c.skewness, c.degenerate}; }

// Filters and decomposes one segment.
inline DecompositionTree analyse_segment(const PipelineConfig& c, const EegSegment& seg) {
    const BiquadCascade lp = design_butterworth_lowpass(c.filter_order, c.cutoff_hz, seg.fs);
    const std::vector<double> filtered = filtfilt(lp, seg.samples);
    return decompose(filtered, c.levels, c.mode);
}

inline std::string provenance(const PipelineConfig& c) {
    std::ostringstream ss;
    ss << "source=" << (c.synthetic ? "synthetic" : "corpus") << " seed=" << c.seed << " filter_order=" << c.filter_order
       << " cutoff_hz=" << c.cutoff_hz << " levels=" << c.levels << " mode=" << to_string(c.mode)
       << " skewness=" << (c.skewness == SkewnessForm::printed ? "printed" : "third_moment");
    return ss.str();
}

inline FeatureTable extract_set(const PipelineConfig& c, SetId set) {
    const SegmentCollection col = load_or_synthesize(c, set);
    FeatureTable t;
    t.columns = feature_names(c.levels);
    t.comments.push_back("seizure-features v1 set=" + std::string(1, set_letter(set)) + " " + provenance(c));
    t.rows = Matrix(0, t.columns.size());
    std::vector<std::vector<double>> rows(col.segments.size());
    parallel_for(col.segments.size(), c.threads, [&](std::size_t i) {
        const auto& seg = col.segments[i];
        try {
            rows[i] = feature_vector(analyse_segment(c, seg), set, feature_options(c)).values;
        } catch (const Error& e) {
            const std::string what = std::string("set ") + set_letter(set) + " segment " +
                                     std::to_string(seg.segment_index) + ": " + e.what();
            if (e.error_class() == ErrorClass::numerical) throw NumericalError(e.stage(), what);
            throw DataError(e.stage(), what);
        }
    });
    for (const auto& r : rows) {
        t.rows.append_row(r);
        t.labels.emplace_back(1, set_letter(set));
    }
    return t;
}

inline std::filesystem::path feature_file(const std::filesystem::path& dir, SetId set) {
    return dir / (std::string("features_") + set_letter(set) + ".csv");
}

// Writes features_A.csv .. features_E.csv and returns their paths.
inline std::vector<std::filesystem::path> cmd_extract(const PipelineConfig& c) {
    validate(c);
    const auto dir = c.feature_dir();
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> out;
    for (SetId s : kAllSets) {
        const auto path = feature_file(dir, s);
        write_feature_csv(path, extract_set(c, s));
        out.push_back(path);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

inline CvConfig cv_config(const PipelineConfig& c, ClassifierKind kind, std::size_t feature_count) {
    CvConfig cv;
    cv.classifier.kind = kind;
    cv.classifier.svm.c = c.svm_c;
    cv.classifier.svm.sigma = c.svm_sigma.value_or(std::sqrt(static_cast<double>(feature_count)));
    cv.classifier.svm.tol = c.svm_tol;
    cv.classifier.knn_k = c.knn_k;
    cv.classifier.nb_epsilon = c.nb_epsilon;
    cv.grid_search = c.grid_search;
    cv.k = c.folds;
    cv.repetitions = c.repetitions;
    cv.base_seed = c.seed;
    cv.aggregation = c.aggregation;
    cv.threads = c.threads;
    return cv;
}

inline Matrix load_feature_rows(const PipelineConfig& c, SetId set) {
    const auto path = feature_file(c.feature_dir(), set);
    FeatureTable t = read_feature_csv(path, feature_names(c.levels));
    for (std::size_t i = 0; i < t.labels.size(); ++i)
        if (t.labels[i] != std::string(1, set_letter(set)))
            throw SchemaError(path.string(), "row " + std::to_string(i + 1) + ", column 'label': expected '" +
                                                 std::string(1, set_letter(set)) + "', found '" + t.labels[i] + "'");
    return t.rows;
}

struct EvaluateResult {
    std::vector<CaseReport> reports;
    std::vector<std::filesystem::path> report_files;
    std::vector<std::filesystem::path> table_files;
    std::vector<std::string> failures;  // "case N / clf: message"
    bool ok() const { return failures.empty(); }
};

inline std::filesystem::path report_file(const std::filesystem::path& dir, int case_number, ClassifierKind k) {
    return dir / ("report_case" + std::to_string(case_number) + "_" + std::string(to_string(k)) + ".json");
}

// Runs every requested (case, classifier) pair. Feature CSVs are extracted
// first when absent. A failing pair is recorded and produces no report.
inline EvaluateResult cmd_evaluate(const PipelineConfig& c) {
    validate(c);
    bool have_all = true;
    for (SetId s : kAllSets) have_all = have_all && std::filesystem::exists(feature_file(c.feature_dir(), s));
    if (!have_all) cmd_extract(c);

    std::map<SetId, Matrix> rows;
    auto rows_for = [&](SetId s) -> const Matrix& {
        auto it = rows.find(s);
        if (it == rows.end()) it = rows.emplace(s, load_feature_rows(c, s)).first;
        return it->second;
    };

    const auto dir = c.output / "reports";
    std::filesystem::create_directories(dir);
    EvaluateResult res;
    for (ClassifierKind kind : c.classifiers) {
        std::vector<CaseReport> table_rows;
        for (int n : c.cases) {
            const CaseSpec spec = CaseSpec::from_number(n);
            try {
                const Matrix& pos = rows_for(spec.positive_set);
                const Matrix& neg = rows_for(spec.negative_set);
                CaseReport r = run_case(spec, pos, neg, cv_config(c, kind, pos.cols()));
                const auto path = report_file(dir, n, kind);
                write_report(path, r);
                res.report_files.push_back(path);
                table_rows.push_back(r);
                res.reports.push_back(std::move(r));
            } catch (const SchemaError&) {
                throw;
            } catch (const Error& e) {
                res.failures.push_back("case " + std::to_string(n) + " / " + std::string(to_string(kind)) + " [" +
                                       e.stage() + "]: " + e.what());
            }
        }
        if (!table_rows.empty()) {
            std::string title = "Classifier: " + std::string(to_string(kind)) + "  (" + std::to_string(c.repetitions) +
                                " x " + std::to_string(c.folds) + "-fold CV, seed " + std::to_string(c.seed) + ")";
            const auto path = dir / ("summary_" + std::string(to_string(kind)) + ".txt");
            write_text(path, summary_table(table_rows, title));
            res.table_files.push_back(path);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Plotting and raw decomposition output

inline EegSegment load_one_segment(const PipelineConfig& c, SetId set, int index) {
    if (index < 1 || index > kSegmentsPerSet)
        throw UsageError("plot", "segment index must be in 1..100, got " + std::to_string(index));
    if (c.synthetic) return synthetic_corpus_segment(set, index, c.seed);
    LoadOptions opts;
    opts.strict = c.strict;
    return load_segment(resolve_set_dir(c.corpus, set) / segment_file_name(set, index), opts);
}

// Original (filtered) trace followed by every reconstructed band.
inline std::vector<PlotTrace> band_traces(const PipelineConfig& c, const EegSegment& seg) {
    const BiquadCascade lp = design_butterworth_lowpass(c.filter_order, c.cutoff_hz, seg.fs);
    const std::vector<double> filtered = filtfilt(lp, seg.samples);
    const DecompositionTree tree = decompose(filtered, c.levels, c.mode);
    const auto ranges = band_frequency_map(seg.fs, c.levels);
    std::vector<PlotTrace> traces;
    traces.push_back({"signal", filtered});
    for (std::size_t b = 0; b < tree.band_count(); ++b) {
        std::string title = ranges[b].name;
        if (!ranges[b].rhythm.empty()) title += " (" + ranges[b].rhythm + ")";
        traces.push_back({title, reconstruct_band(tree, b)});
    }
    return traces;
}

inline std::string plot_svg(const PipelineConfig& c, const EegSegment& seg, const std::string& title) {
    const auto traces = band_traces(c, seg);
    return render_panels_svg(title, traces, seg.fs);
}

inline std::filesystem::path cmd_plot(const PipelineConfig& c, SetId set, int index,
                                      std::optional<std::filesystem::path> out = std::nullopt) {
    const EegSegment seg = load_one_segment(c, set, index);
    const auto path = out.value_or(c.output / "plots" / (std::string("bands_") + set_letter(set) +
                                                         std::to_string(index) + ".svg"));
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::string title = std::string("Set ") + set_letter(set) + ", segment " + std::to_string(index) +
                              (c.synthetic ? " (synthetic)" : "");
    write_text(path, plot_svg(c, seg, title));
    return path;
}

// Long-format coefficient table: band,index,coefficient.
inline std::string coefficients_csv(const DecompositionTree& tree) {
    std::string out = "band,index,coefficient\n";
    for (std::size_t b = 0; b < tree.band_count(); ++b) {
        const std::string name = tree.band_name(b);
        const auto coeffs = tree.band(b);
        for (std::size_t i = 0; i < coeffs.size(); ++i) out += name + "," + std::to_string(i) + "," + format_real(coeffs[i]) + "\n";
    }
    return out;
}

}  // namespace seizure
