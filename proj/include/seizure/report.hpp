#pragma once

// Structured (JSON) and tabular renderings of cross-validation results.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "seizure/eval.hpp"

namespace seizure {

inline constexpr int kReportFormatVersion = 1;

namespace detail {

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json metrics_json(const Metrics& m) {
    nlohmann::ordered_json j;
    j["accuracy"] = opt_json(m.accuracy);
    j["sensitivity"] = opt_json(m.sensitivity);
    j["specificity"] = opt_json(m.specificity);
    j["precision"] = opt_json(m.precision);
    j["f_measure"] = opt_json(m.f_measure);
    return j;
}

inline nlohmann::ordered_json confusion_json(const ConfusionMatrix& c) {
    return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

}  // namespace detail

inline nlohmann::ordered_json report_json(const CaseReport& r) {
    using nlohmann::ordered_json;
    const CvConfig& cfg = r.config;
    ordered_json j;
    j["format"] = "seizure-case-report";
    j["version"] = kReportFormatVersion;
    j["case"] = r.case_spec.number();
    j["case_name"] = r.case_spec.name();
    j["classifier"] = std::string(to_string(r.classifier));

    ordered_json c;
    c["k"] = cfg.k;
    c["repetitions"] = cfg.repetitions;
    c["base_seed"] = cfg.base_seed;
    c["aggregation"] = cfg.aggregation == Aggregation::micro ? "micro" : "macro";
    c["grid_search"] = cfg.grid_search && r.classifier == ClassifierKind::svm;
    switch (r.classifier) {
        case ClassifierKind::svm:
            c["svm_c"] = cfg.classifier.svm.c;
            c["svm_sigma"] = cfg.classifier.svm.sigma;
            c["svm_tol"] = cfg.classifier.svm.tol;
            if (cfg.grid_search) {
                c["grid_c"] = cfg.grid.c_values;
                c["grid_sigma_multipliers"] = cfg.grid.sigma_multipliers;
                c["inner_k"] = cfg.inner_k;
            }
            break;
        case ClassifierKind::knn: c["knn_k"] = cfg.classifier.knn_k; break;
        case ClassifierKind::nb:
            c["nb_epsilon"] = cfg.classifier.nb_epsilon < 0 ? ordered_json("default") : ordered_json(cfg.classifier.nb_epsilon);
            break;
    }
    j["config"] = c;
    j["seeds"] = r.seeds;

    ordered_json reps = ordered_json::array();
    for (std::size_t i = 0; i < r.folds.size(); ++i) {
        ordered_json rj;
        rj["seed"] = r.seeds[i];
        rj["confusion"] = detail::confusion_json(r.repetition_confusion[i]);
        rj["metrics"] = detail::metrics_json(r.repetition_metrics[i]);
        ordered_json folds = ordered_json::array();
        for (const auto& f : r.folds[i]) {
            ordered_json fj = detail::confusion_json(f.confusion);
            if (f.chosen) {
                fj["svm_c"] = f.chosen->c;
                fj["svm_sigma"] = f.chosen->sigma;
            }
            folds.push_back(fj);
        }
        rj["folds"] = folds;
        reps.push_back(rj);
    }
    j["repetitions"] = reps;
    j["average"] = detail::metrics_json(r.average);
    return j;
}

inline std::string format_metric(const std::optional<double>& v) {
    if (!v) return "undef";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

// Rows = cases, columns = the five averaged metrics.
inline std::string summary_table(std::span<const CaseReport> reports, const std::string& title) {
    std::string out = title + "\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %12s %15s %15s %13s %13s\n", "Cases for seizure", "Accuracy(%)",
                  "Sensitivity(%)", "Specificity(%)", "Precision(%)", "F-Measure(%)");
    out += line;
    out += std::string(91, '-') + "\n";
    for (const auto& r : reports) {
        const Metrics& m = r.average;
        std::snprintf(line, sizeof line, "%-18s %12s %15s %15s %13s %13s\n", r.case_spec.name().c_str(),
                      format_metric(m.accuracy).c_str(), format_metric(m.sensitivity).c_str(),
                      format_metric(m.specificity).c_str(), format_metric(m.precision).c_str(),
                      format_metric(m.f_measure).c_str());
        out += line;
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("io", path.string() + ": cannot write");
    os << text;
    if (!os) throw DataError("io", path.string() + ": write failed");
}

inline void write_report(const std::filesystem::path& path, const CaseReport& r) {
    write_text(path, report_json(r).dump(2) + "\n");
}

}  // namespace seizure
