#pragma once

// Stratified repeated k-fold cross-validation, confusion accounting and the
// five summary metrics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "seizure/classifiers.hpp"
#include "seizure/error.hpp"
#include "seizure/ingest.hpp"
#include "seizure/matrix.hpp"
#include "seizure/random.hpp"

namespace seizure {

struct FoldPlan {
    int k = 10;
    std::uint64_t seed = 0;
    std::vector<int> assignments;  // fold index per sample

    std::vector<std::size_t> test_indices(int fold) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            if (assignments[i] == fold) idx.push_back(i);
        return idx;
    }
    std::vector<std::size_t> train_indices(int fold) const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < assignments.size(); ++i)
            if (assignments[i] != fold) idx.push_back(i);
        return idx;
    }
};

// Each class is shuffled independently and dealt round-robin; the dealing
// offset carries over between classes so fold sizes differ by at most one.
inline FoldPlan stratified_kfold(std::span<const Label> labels, int k, std::uint64_t seed) {
    if (k < 2) throw UsageError("eval", "k must be at least 2");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(labels.size(), -1);

    Rng rng(seed);
    int offset = 0;
    for (Label cls : {Label::positive, Label::negative}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) members.push_back(i);
        if (members.size() < static_cast<std::size_t>(k)) throw TooFewSamples(members.size(), k);
        rng.shuffle(members.begin(), members.end());
        for (std::size_t r = 0; r < members.size(); ++r)
            plan.assignments[members[r]] = static_cast<int>((static_cast<std::size_t>(offset) + r) % static_cast<std::size_t>(k));
        offset = static_cast<int>((static_cast<std::size_t>(offset) + members.size()) % static_cast<std::size_t>(k));
    }
    return plan;
}

// Positive = non-seizure (A..D), negative = seizure (E).
struct ConfusionMatrix {
    long long tp = 0, tn = 0, fp = 0, fn = 0;

    long long total() const { return tp + tn + fp + fn; }

    void add(Label actual, Label predicted) {
        if (actual == Label::positive) (predicted == Label::positive ? tp : fn)++;
        else (predicted == Label::negative ? tn : fp)++;
    }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Percentages; nullopt marks a zero denominator.
struct Metrics {
    std::optional<double> accuracy;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> precision;
    std::optional<double> f_measure;
};

inline Metrics compute_metrics(const ConfusionMatrix& cm) {
    if (cm.tp < 0 || cm.tn < 0 || cm.fp < 0 || cm.fn < 0) throw DataError("eval", "negative confusion count");
    if (cm.total() == 0) throw EmptyMatrix();
    auto ratio = [](long long num, long long den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den) * 100.0;
    };
    Metrics m;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
    m.specificity = ratio(cm.tn, cm.tn + cm.fp);
    m.precision = ratio(cm.tp, cm.tp + cm.fp);
    if (m.precision && m.sensitivity && (*m.precision + *m.sensitivity) > 0.0)
        m.f_measure = 2.0 * (*m.precision * *m.sensitivity) / (*m.precision + *m.sensitivity);
    return m;
}

// Mean of each metric; undefined if any input is undefined.
inline Metrics average_metrics(std::span<const Metrics> all) {
    Metrics out;
    if (all.empty()) return out;
    auto avg = [&](auto field) -> std::optional<double> {
        double s = 0.0;
        for (const auto& m : all) {
            const std::optional<double>& v = m.*field;
            if (!v) return std::nullopt;
            s += *v;
        }
        return s / static_cast<double>(all.size());
    };
    out.accuracy = avg(&Metrics::accuracy);
    out.sensitivity = avg(&Metrics::sensitivity);
    out.specificity = avg(&Metrics::specificity);
    out.precision = avg(&Metrics::precision);
    out.f_measure = avg(&Metrics::f_measure);
    return out;
}

// micro: sum confusion over the folds of a repetition, then compute metrics.
// macro: compute metrics per fold and average them.
enum class Aggregation { micro, macro };

// per_fold: fit the standardiser on training rows only. all_rows deliberately
// leaks test rows into the fit; it exists so the leakage check can be tested.
enum class StandardizeScope { per_fold, all_rows };

struct SvmGrid {
    std::vector<double> c_values{0.1, 1.0, 10.0, 100.0};
    std::vector<double> sigma_multipliers{0.5, 1.0, 2.0, 4.0, 8.0};  // times sqrt(d)
};

struct CvConfig {
    ClassifierConfig classifier;
    bool grid_search = true;  // SVM only
    SvmGrid grid;
    int inner_k = 5;
    int k = 10;
    int repetitions = 10;
    std::uint64_t base_seed = 0;
    Aggregation aggregation = Aggregation::micro;
    StandardizeScope standardize_scope = StandardizeScope::per_fold;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct FoldResult {
    ConfusionMatrix confusion;
    std::optional<SvmParams> chosen;   // set when SVM was used
    std::vector<double> standardizer_mean;
};

struct CaseReport {
    CaseSpec case_spec;
    ClassifierKind classifier = ClassifierKind::svm;
    CvConfig config;
    std::vector<std::uint64_t> seeds;               // fold-plan seed per repetition
    std::vector<FoldPlan> plans;
    std::vector<std::vector<FoldResult>> folds;     // [repetition][fold]
    std::vector<ConfusionMatrix> repetition_confusion;
    std::vector<Metrics> repetition_metrics;
    Metrics average;
};

// Runs `body` for indices [0, count) over a small worker pool. Results must be
// written by index; the first exception by index is rethrown.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::exception_ptr> errors(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Accuracy of params over an inner stratified CV of (already standardised) rows.
inline double inner_cv_accuracy(const Matrix& z, std::span<const Label> y, const SvmParams& params,
                                const FoldPlan& plan) {
    long long correct = 0;
    for (int f = 0; f < plan.k; ++f) {
        const auto tr = plan.train_indices(f);
        const auto te = plan.test_indices(f);
        std::vector<Label> ytr;
        for (auto i : tr) ytr.push_back(y[i]);
        const SvmModel m = svm_train(z.select_rows(tr), ytr, params);
        for (auto i : te)
            if (svm_predict(m, z.row(i)).label == y[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(y.size());
}

// Exhaustive grid; ties keep the first point in (C, sigma) order.
inline SvmParams select_svm_params(const Matrix& z, std::span<const Label> y, const SvmParams& base,
                                   const SvmGrid& grid, int inner_k, std::uint64_t seed) {
    const FoldPlan plan = stratified_kfold(y, inner_k, seed);
    const double root_d = std::sqrt(static_cast<double>(z.cols()));
    SvmParams best = base;
    double best_acc = -1.0;
    for (double c : grid.c_values) {
        for (double mult : grid.sigma_multipliers) {
            SvmParams p = base;
            p.c = c;
            p.sigma = mult * root_d;
            const double acc = inner_cv_accuracy(z, y, p, plan);
            if (acc > best_acc) {
                best_acc = acc;
                best = p;
            }
        }
    }
    return best;
}

// Training + prediction for one fold. Receives standardised rows.
using FitPredict = std::function<std::vector<Label>(const Matrix& train, std::span<const Label> train_y,
                                                    const Matrix& test, std::uint64_t seed,
                                                    std::optional<SvmParams>& chosen)>;

inline FitPredict classifier_fit_predict(const CvConfig& cfg) {
    return [cfg](const Matrix& train, std::span<const Label> ty, const Matrix& test, std::uint64_t seed,
                 std::optional<SvmParams>& chosen) {
        std::vector<Label> out;
        out.reserve(test.rows());
        switch (cfg.classifier.kind) {
            case ClassifierKind::svm: {
                SvmParams p = cfg.classifier.svm;
                if (cfg.grid_search) p = select_svm_params(train, ty, p, cfg.grid, cfg.inner_k, seed);
                chosen = p;
                const SvmModel m = svm_train(train, ty, p);
                for (std::size_t i = 0; i < test.rows(); ++i) out.push_back(svm_predict(m, test.row(i)).label);
                break;
            }
            case ClassifierKind::knn: {
                const KnnModel m = knn_train(train, ty, cfg.classifier.knn_k);
                for (std::size_t i = 0; i < test.rows(); ++i) out.push_back(knn_predict(m, test.row(i)));
                break;
            }
            case ClassifierKind::nb: {
                const NbModel m = nb_train(train, ty, cfg.classifier.nb_epsilon);
                for (std::size_t i = 0; i < test.rows(); ++i) out.push_back(nb_predict(m, test.row(i)));
                break;
            }
        }
        return out;
    };
}

// Repeated stratified k-fold CV over raw feature rows. Repetition r uses fold
// seed base_seed + r; inner grid-search seeds are derived from (r, fold).
inline CaseReport cross_validate(const Matrix& x, std::span<const Label> y, const CvConfig& cfg,
                                 const FitPredict& fit_predict) {
    detail::require_rows(x, y);
    if (cfg.repetitions < 1) throw UsageError("eval", "repetitions must be >= 1");

    CaseReport rep;
    rep.classifier = cfg.classifier.kind;
    rep.config = cfg;
    const auto reps = static_cast<std::size_t>(cfg.repetitions);
    const auto k = static_cast<std::size_t>(cfg.k);
    for (std::size_t r = 0; r < reps; ++r) {
        rep.seeds.push_back(cfg.base_seed + r);
        rep.plans.push_back(stratified_kfold(y, cfg.k, rep.seeds.back()));
    }
    rep.folds.assign(reps, std::vector<FoldResult>(k));

    const Standardizer leaky = standardize_fit(x);
    parallel_for(reps * k, cfg.threads, [&](std::size_t unit) {
        const std::size_t r = unit / k, f = unit % k;
        const FoldPlan& plan = rep.plans[r];
        const auto tr = plan.train_indices(static_cast<int>(f));
        const auto te = plan.test_indices(static_cast<int>(f));
        const Matrix xtr = x.select_rows(tr);
        std::vector<Label> ytr;
        for (auto i : tr) ytr.push_back(y[i]);

        const Standardizer s = cfg.standardize_scope == StandardizeScope::per_fold ? standardize_fit(xtr) : leaky;
        FoldResult& out = rep.folds[r][f];
        out.standardizer_mean = s.mean;
        const auto pred = fit_predict(standardize_apply(s, xtr), ytr, standardize_apply(s, x.select_rows(te)),
                                      mix_seed(cfg.base_seed, r, f), out.chosen);
        if (pred.size() != te.size()) throw DataError("eval", "classifier returned wrong number of predictions");
        for (std::size_t i = 0; i < te.size(); ++i) out.confusion.add(y[te[i]], pred[i]);
    });

    for (std::size_t r = 0; r < reps; ++r) {
        ConfusionMatrix total;
        std::vector<Metrics> per_fold;
        for (const auto& fr : rep.folds[r]) {
            total += fr.confusion;
            per_fold.push_back(compute_metrics(fr.confusion));
        }
        rep.repetition_confusion.push_back(total);
        rep.repetition_metrics.push_back(cfg.aggregation == Aggregation::micro ? compute_metrics(total)
                                                                               : average_metrics(per_fold));
    }
    rep.average = average_metrics(rep.repetition_metrics);
    return rep;
}

// One binary case: rows of the positive set against rows of set E.
inline CaseReport run_case(const CaseSpec& spec, const Matrix& positive_rows, const Matrix& negative_rows,
                           const CvConfig& cfg) {
    if (positive_rows.cols() != negative_rows.cols())
        throw DimensionMismatch(positive_rows.cols(), negative_rows.cols());
    Matrix x(0, positive_rows.cols());
    std::vector<Label> y;
    for (std::size_t i = 0; i < positive_rows.rows(); ++i) {
        x.append_row(positive_rows.row(i));
        y.push_back(Label::positive);
    }
    for (std::size_t i = 0; i < negative_rows.rows(); ++i) {
        x.append_row(negative_rows.row(i));
        y.push_back(Label::negative);
    }
    CaseReport rep = cross_validate(x, y, cfg, classifier_fit_predict(cfg));
    rep.case_spec = spec;
    return rep;
}

}  // namespace seizure
