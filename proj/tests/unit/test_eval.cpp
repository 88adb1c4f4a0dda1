#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <random>
#include <mutex>
#include <set>

#include "seizure/eval.hpp"
#include "seizure/report.hpp"

using namespace seizure;

namespace {

std::vector<Label> balanced(std::size_t pos, std::size_t neg) {
    std::vector<Label> y(pos, Label::positive);
    y.insert(y.end(), neg, Label::negative);
    return y;
}

Matrix two_clouds(std::mt19937_64& rng, std::size_t per_class, std::size_t dims, double shift) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(0, dims);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        std::vector<double> r(dims);
        for (std::size_t j = 0; j < dims; ++j) r[j] = 10.0 * (j + 1) + g(rng) * (j + 1) + (i < per_class ? shift : 0.0);
        x.append_row(r);
    }
    return x;
}

// True if any fold's standardiser statistics differ from its own training rows.
bool standardizer_leaks(const CaseReport& rep, const Matrix& x) {
    for (std::size_t r = 0; r < rep.plans.size(); ++r)
        for (int f = 0; f < rep.plans[r].k; ++f) {
            const auto tr = rep.plans[r].train_indices(f);
            const auto& mean = rep.folds[r][static_cast<std::size_t>(f)].standardizer_mean;
            for (std::size_t j = 0; j < x.cols(); ++j) {
                double m = 0.0;
                for (auto i : tr) m += x(i, j);
                m /= static_cast<double>(tr.size());
                if (std::abs(m - mean[j]) > 1e-9 * std::max(1.0, std::abs(m))) return true;
            }
        }
    return false;
}

CvConfig quick(ClassifierKind kind, int reps = 2) {
    CvConfig cfg;
    cfg.classifier.kind = kind;
    cfg.grid_search = false;
    cfg.classifier.svm.sigma = 2.0;
    cfg.repetitions = reps;
    cfg.base_seed = 17;
    return cfg;
}

}  // namespace

TEST_CASE("stratified folds on a balanced case", "[eval]") {
    const auto y = balanced(100, 100);
    const auto plan = stratified_kfold(y, 10, 3);
    REQUIRE(plan.k == 10);
    std::set<std::size_t> seen;
    for (int f = 0; f < 10; ++f) {
        const auto te = plan.test_indices(f);
        const auto tr = plan.train_indices(f);
        REQUIRE(te.size() == 20);
        REQUIRE(tr.size() == 180);
        int pos = 0;
        for (auto i : te) {
            pos += y[i] == Label::positive;
            REQUIRE(seen.insert(i).second);
        }
        REQUIRE(pos == 10);
    }
    REQUIRE(seen.size() == 200);

    REQUIRE(stratified_kfold(y, 10, 3).assignments == plan.assignments);
    REQUIRE(stratified_kfold(y, 10, 4).assignments != plan.assignments);
    REQUIRE_THROWS_AS(stratified_kfold(balanced(5, 100), 10, 0), TooFewSamples);
    REQUIRE_THROWS_AS(stratified_kfold(y, 1, 0), UsageError);
}

TEST_CASE("fold plan invariants on unbalanced labels", "[eval][property]") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 9);
        const std::size_t pos = static_cast<std::size_t>(k) + rng() % 60, neg = static_cast<std::size_t>(k) + rng() % 60;
        auto y = balanced(pos, neg);
        std::shuffle(y.begin(), y.end(), rng);
        const auto plan = stratified_kfold(y, k, rng());
        std::size_t lo = y.size(), hi = 0;
        for (int f = 0; f < k; ++f) {
            const auto te = plan.test_indices(f);
            lo = std::min(lo, te.size());
            hi = std::max(hi, te.size());
            double p = 0;
            for (auto i : te) p += y[i] == Label::positive;
            const double expected = static_cast<double>(pos) / static_cast<double>(k);
            REQUIRE(std::abs(p - expected) < 1.0 + 1e-12);
        }
        REQUIRE(hi - lo <= 1);
    }
}

TEST_CASE("metrics of the reference confusion matrices", "[eval]") {
    auto row = [](const Metrics& m) {
        return format_metric(m.accuracy) + " " + format_metric(m.sensitivity) + " " + format_metric(m.specificity) +
               " " + format_metric(m.precision) + " " + format_metric(m.f_measure);
    };
    REQUIRE(row(compute_metrics({100, 100, 0, 0})) == "100.000 100.000 100.000 100.000 100.000");

    const auto t5 = compute_metrics({99, 100, 0, 1});
    REQUIRE(*t5.accuracy == 99.5);
    REQUIRE(*t5.sensitivity == 99.0);
    REQUIRE(*t5.specificity == 100.0);
    REQUIRE(*t5.precision == 100.0);
    REQUIRE(row(t5) == "99.500 99.000 100.000 100.000 99.497");

    const auto t6 = compute_metrics({100, 99, 1, 0});
    REQUIRE(*t6.accuracy == 99.5);
    REQUIRE(*t6.sensitivity == 100.0);
    REQUIRE(*t6.specificity == 99.0);
    REQUIRE(row(t6) == "99.500 100.000 99.000 99.010 99.502");
}

TEST_CASE("metric edge cases and identities", "[eval]") {
    REQUIRE_THROWS_AS(compute_metrics({}), EmptyMatrix);
    const auto all_neg = compute_metrics({0, 20, 0, 0});
    REQUIRE(*all_neg.accuracy == 100.0);
    REQUIRE_FALSE(all_neg.sensitivity);
    REQUIRE_FALSE(all_neg.precision);
    REQUIRE_FALSE(all_neg.f_measure);
    const auto wrong = compute_metrics({0, 0, 5, 5});
    REQUIRE(*wrong.precision == 0.0);
    REQUIRE_FALSE(wrong.f_measure);

    std::mt19937_64 rng(2);
    for (int t = 0; t < 1000; ++t) {
        const ConfusionMatrix cm{static_cast<long long>(1 + rng() % 100), static_cast<long long>(rng() % 100),
                                 static_cast<long long>(rng() % 100), static_cast<long long>(rng() % 100)};
        const auto m = compute_metrics(cm);
        for (auto v : {m.accuracy, m.sensitivity, m.specificity, m.precision, m.f_measure})
            if (v) {
                REQUIRE(*v >= 0.0);
                REQUIRE(*v <= 100.0);
            }
        const double p = *m.precision, s = *m.sensitivity;
        REQUIRE(std::abs(*m.f_measure - 2 * p * s / (p + s)) < 1e-9);
    }

    const std::vector<Metrics> two{compute_metrics({10, 10, 0, 0}), compute_metrics({5, 10, 0, 5})};
    const auto avg = average_metrics(two);
    REQUIRE(*avg.accuracy == Catch::Approx(87.5));
    REQUIRE(*avg.sensitivity == Catch::Approx(75.0));
    const std::vector<Metrics> with_hole{compute_metrics({10, 10, 0, 0}), all_neg};
    REQUIRE_FALSE(average_metrics(with_hole).sensitivity);
}

TEST_CASE("always-positive classifier", "[eval]") {
    std::mt19937_64 rng(4);
    const Matrix x = two_clouds(rng, 100, 3, 1.0);
    const auto y = balanced(100, 100);
    CvConfig cfg = quick(ClassifierKind::knn, 3);
    const FitPredict always = [](const Matrix&, std::span<const Label>, const Matrix& test, std::uint64_t,
                                 std::optional<SvmParams>&) { return std::vector<Label>(test.rows(), Label::positive); };
    const auto rep = cross_validate(x, y, cfg, always);
    REQUIRE(*rep.average.accuracy == 50.0);
    REQUIRE(*rep.average.sensitivity == 100.0);
    REQUIRE(*rep.average.specificity == 0.0);
}

TEST_CASE("cross validation bookkeeping", "[eval]") {
    std::mt19937_64 rng(5);
    const Matrix x = two_clouds(rng, 100, 4, 4.0);
    const auto y = balanced(100, 100);
    for (auto kind : {ClassifierKind::svm, ClassifierKind::knn, ClassifierKind::nb}) {
        for (auto agg : {Aggregation::micro, Aggregation::macro}) {
            CvConfig cfg = quick(kind, 3);
            cfg.aggregation = agg;
            cfg.threads = 1;  // assertions inside the callback
            std::atomic<int> calls{0};
            const FitPredict inner = classifier_fit_predict(cfg);
            const FitPredict counted = [&](const Matrix& tr, std::span<const Label> ty, const Matrix& te,
                                           std::uint64_t seed, std::optional<SvmParams>& chosen) {
                REQUIRE(tr.rows() == 180);
                REQUIRE(te.rows() == 20);
                ++calls;
                return inner(tr, ty, te, seed, chosen);
            };
            const auto rep = cross_validate(x, y, cfg, counted);
            REQUIRE(calls == 30);
            REQUIRE(rep.seeds == std::vector<std::uint64_t>{17, 18, 19});
            REQUIRE(rep.repetition_confusion.size() == 3);
            double acc = 0.0;
            for (std::size_t r = 0; r < 3; ++r) {
                REQUIRE(rep.repetition_confusion[r].total() == 200);
                ConfusionMatrix sum;
                std::vector<Metrics> per_fold;
                for (const auto& f : rep.folds[r]) {
                    sum += f.confusion;
                    per_fold.push_back(compute_metrics(f.confusion));
                }
                REQUIRE(sum == rep.repetition_confusion[r]);
                const double expect = agg == Aggregation::micro ? *compute_metrics(sum).accuracy
                                                                : *average_metrics(per_fold).accuracy;
                REQUIRE(*rep.repetition_metrics[r].accuracy == Catch::Approx(expect).epsilon(1e-12));
                acc += *rep.repetition_metrics[r].accuracy;
            }
            REQUIRE(std::abs(*rep.average.accuracy - acc / 3) < 1e-9);
            REQUIRE(*rep.average.accuracy > 90.0);
        }
    }
}

TEST_CASE("reports are independent of thread count", "[eval]") {
    std::mt19937_64 rng(6);
    const Matrix pos = two_clouds(rng, 100, 5, 1.0);
    Matrix a(0, 5), e(0, 5);
    for (std::size_t i = 0; i < 200; ++i) (i < 100 ? a : e).append_row(pos.row(i));
    CvConfig cfg = quick(ClassifierKind::svm, 1);
    cfg.grid_search = true;
    cfg.grid.c_values = {1.0, 10.0};
    cfg.grid.sigma_multipliers = {0.5, 1.0};
    cfg.threads = 1;
    const auto serial = run_case(CaseSpec::from_case(CaseId::Case1), a, e, cfg);
    cfg.threads = 4;
    const auto parallel = run_case(CaseSpec::from_case(CaseId::Case1), a, e, cfg);
    REQUIRE(report_json(serial).dump(2) == report_json(parallel).dump(2));
    for (const auto& f : serial.folds[0]) REQUIRE(f.chosen);
}

TEST_CASE("leakage check", "[eval][leakage]") {
    std::mt19937_64 rng(7);
    const Matrix x = two_clouds(rng, 100, 3, 1.5);
    const auto y = balanced(100, 100);

    CvConfig cfg = quick(ClassifierKind::nb, 1);
    std::vector<double> test_means;
    std::mutex mu;
    const FitPredict inner = classifier_fit_predict(cfg);
    const FitPredict probe = [&](const Matrix& tr, std::span<const Label> ty, const Matrix& te, std::uint64_t seed,
                                 std::optional<SvmParams>& chosen) {
        double m = 0.0;
        for (std::size_t i = 0; i < te.rows(); ++i) m += te(i, 0);
        {
            std::lock_guard lock(mu);
            test_means.push_back(m / static_cast<double>(te.rows()));
        }
        return inner(tr, ty, te, seed, chosen);
    };

    const auto honest = cross_validate(x, y, cfg, probe);
    REQUIRE_FALSE(standardizer_leaks(honest, x));
    REQUIRE(test_means.size() == 10);
    for (double m : test_means) REQUIRE(std::abs(m) > 1e-6);

    cfg.standardize_scope = StandardizeScope::all_rows;
    const auto leaky = cross_validate(x, y, cfg, classifier_fit_predict(cfg));
    REQUIRE(standardizer_leaks(leaky, x));
}
