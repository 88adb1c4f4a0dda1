#pragma once

// Binary classifiers over standardised feature vectors: soft-margin RBF SVM
// trained by SMO, k-nearest neighbours and Gaussian naive Bayes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "seizure/error.hpp"
#include "seizure/matrix.hpp"

namespace seizure {

// Positive = non-seizure sets A..D, negative = ictal set E.
enum class Label : int { negative = -1, positive = 1 };

inline int sign(Label l) { return static_cast<int>(l); }
inline Label label_from_sign(double v) { return v >= 0.0 ? Label::positive : Label::negative; }

namespace detail {

inline void require_both_classes(std::span<const Label> y) {
    const bool pos = std::find(y.begin(), y.end(), Label::positive) != y.end();
    const bool neg = std::find(y.begin(), y.end(), Label::negative) != y.end();
    if (!pos || !neg) throw SingleClass();
}

inline void require_rows(const Matrix& x, std::span<const Label> y) {
    if (x.rows() != y.size()) throw DimensionMismatch(x.rows(), y.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Standardisation

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;          // sample std, or 1 for constant columns
    std::vector<bool> constant_column;  // zero training variance: centred only

    std::size_t dims() const { return mean.size(); }

    std::vector<double> apply(std::span<const double> x) const {
        if (x.size() != mean.size()) throw DimensionMismatch(x.size(), mean.size());
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
        return out;
    }
};

inline Standardizer standardize_fit(const Matrix& x) {
    if (x.empty()) throw UsageError("classifiers", "cannot fit a standardizer on zero rows");
    const std::size_t n = x.rows(), d = x.cols();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    s.constant_column.assign(d, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
    for (auto& m : s.mean) m /= static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - s.mean[j]) * (x(i, j) - s.mean[j]);
        const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        if (sd > 0.0 && std::isfinite(sd)) {
            s.scale[j] = sd;
        } else {
            s.constant_column[j] = true;
        }
    }
    return s;
}

inline Matrix standardize_apply(const Standardizer& s, const Matrix& x) {
    Matrix out(0, x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) out.append_row(s.apply(x.row(i)));
    return out;
}

// ---------------------------------------------------------------------------
// RBF kernel

inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidSigma(sigma);
    return std::exp(-squared_distance(x, y) / (2.0 * sigma * sigma));
}

// ---------------------------------------------------------------------------
// SVM

struct SvmParams {
    double c = 1.0;
    double sigma = 1.0;
    double tol = 1e-3;          // bound on the maximal KKT violation at exit
    long long max_passes = 10000;  // iteration cap = max_passes * training size
};

struct SvmModel {
    Matrix support_vectors;
    std::vector<double> dual_coef;  // alpha_i * y_i per support vector
    double bias = 0.0;
    double sigma = 1.0;
    double c = 1.0;

    // Training diagnostics (not needed for prediction).
    std::vector<double> alpha;  // one per training row
    double dual_objective = 0.0;
    double kkt_gap = 0.0;
    long long iterations = 0;

    std::size_t dims() const { return support_vectors.cols(); }

    double decision(std::span<const double> x) const {
        if (x.size() != dims()) throw DimensionMismatch(x.size(), dims());
        const double inv = 1.0 / (2.0 * sigma * sigma);
        double f = bias;
        for (std::size_t i = 0; i < support_vectors.rows(); ++i)
            f += dual_coef[i] * std::exp(-squared_distance(support_vectors.row(i), x) * inv);
        return f;
    }
};

struct SvmPrediction {
    Label label = Label::positive;
    double margin = 0.0;
};

// Maximise sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij subject to
// 0 <= alpha_i <= C, sum alpha_i y_i = 0. Working pair = maximal violating
// pair; ties go to the lowest index.
inline SvmModel svm_train(const Matrix& x, std::span<const Label> labels, const SvmParams& params) {
    detail::require_rows(x, labels);
    detail::require_both_classes(labels);
    if (!(params.c > 0.0)) throw UsageError("classifiers", "box constraint C must be > 0");
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) throw InvalidSigma(params.sigma);
    if (!(params.tol > 0.0)) throw UsageError("classifiers", "SMO tolerance must be > 0");

    const std::size_t n = x.rows();
    const double c = params.c;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = sign(labels[i]);

    // Q_ij = y_i y_j K_ij, kept dense (training sets here are a few hundred rows).
    const double inv = 1.0 / (2.0 * params.sigma * params.sigma);
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = std::exp(-squared_distance(x.row(i), x.row(j)) * inv);
            q[i * n + j] = q[j * n + i] = y[i] * y[j] * k;
        }
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
    constexpr double kTau = 1e-12;

    auto in_up = [&](std::size_t t) { return (y[t] > 0) ? alpha[t] < c : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return (y[t] > 0) ? alpha[t] > 0.0 : alpha[t] < c; };

    const long long cap = params.max_passes * static_cast<long long>(n);
    long long iter = 0;
    double gap = 0.0;
    for (;; ++iter) {
        std::size_t i = n, j = n;
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -y[t] * grad[t];
            if (in_up(t) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(t) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        gap = gmax - gmin;
        if (i == n || j == n || gap < params.tol) break;
        if (iter >= cap)
            throw NonConvergence("SMO did not reach tolerance " + std::to_string(params.tol) + " within " +
                                 std::to_string(cap) + " iterations (violation " + std::to_string(gap) + ")");

        const double* qi = &q[i * n];
        const double* qj = &q[j * n];
        const double old_i = alpha[i], old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = 2.0 + 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = 2.0 - 2.0 * qi[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
    }

    // Bias: average over free vectors, else midpoint of the feasible interval.
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);

    SvmModel m;
    m.sigma = params.sigma;
    m.c = c;
    m.bias = -rho;
    m.alpha = alpha;
    m.iterations = iter;
    m.kkt_gap = gap;
    m.support_vectors = Matrix(0, x.cols());
    double obj = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        // 1/2 a'Qa - e'a = 1/2 a'(grad - (-e)) - e'a = 1/2 a'(grad + e) - e'a
        obj += alpha[t] * (0.5 * (grad[t] + 1.0) - 1.0);
        if (alpha[t] > 0.0) {
            m.support_vectors.append_row(x.row(t));
            m.dual_coef.push_back(alpha[t] * y[t]);
        }
    }
    m.dual_objective = -obj;
    return m;
}

// f(x) = 0 maps to the positive class.
inline SvmPrediction svm_predict(const SvmModel& model, std::span<const double> x) {
    const double f = model.decision(x);
    return {label_from_sign(f), f};
}

// ---------------------------------------------------------------------------
// k-NN

struct KnnModel {
    Matrix points;
    std::vector<Label> labels;
    int k = 5;

    std::size_t dims() const { return points.cols(); }
};

inline KnnModel knn_train(const Matrix& x, std::span<const Label> labels, int k) {
    detail::require_rows(x, labels);
    if (k < 1 || k % 2 == 0) throw UsageError("classifiers", "k must be an odd positive integer, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > x.rows())
        throw UsageError("classifiers", "k = " + std::to_string(k) + " exceeds the training-set size");
    return KnnModel{x, std::vector<Label>(labels.begin(), labels.end()), k};
}

// Majority vote over the k smallest Euclidean distances; equal distances are
// ordered by training index.
inline Label knn_predict(const KnnModel& model, std::span<const double> x) {
    if (x.size() != model.dims()) throw DimensionMismatch(x.size(), model.dims());
    if (model.points.empty()) throw UsageError("classifiers", "empty k-NN model");
    std::vector<std::pair<double, std::size_t>> d(model.points.rows());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = {squared_distance(model.points.row(i), x), i};
    const auto k = static_cast<std::size_t>(model.k);
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    int votes = 0;
    for (std::size_t i = 0; i < k; ++i) votes += sign(model.labels[d[i].second]);
    return votes >= 0 ? Label::positive : Label::negative;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

struct NbModel {
    // Index 0 = positive class, 1 = negative class.
    std::array<double, 2> prior{};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> variance;  // smoothed
    double epsilon = 0.0;

    std::size_t dims() const { return mean[0].size(); }
};

inline constexpr double kNbDefaultSmoothing = 1e-9;

// epsilon < 0 selects the default 1e-9 * (largest per-feature training variance).
inline NbModel nb_train(const Matrix& x, std::span<const Label> labels, double epsilon = -1.0) {
    detail::require_rows(x, labels);
    detail::require_both_classes(labels);
    const std::size_t n = x.rows(), d = x.cols();

    if (epsilon < 0.0) {
        double max_var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double m = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) m += x(i, j);
            m /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - m) * (x(i, j) - m);
            max_var = std::max(max_var, ss / static_cast<double>(n));
        }
        epsilon = kNbDefaultSmoothing * (max_var > 0.0 ? max_var : 1.0);
    }

    NbModel m;
    m.epsilon = epsilon;
    std::array<std::size_t, 2> count{};
    for (int c = 0; c < 2; ++c) {
        m.mean[c].assign(d, 0.0);
        m.variance[c].assign(d, 0.0);
    }
    auto cls = [&](std::size_t i) { return labels[i] == Label::positive ? 0 : 1; };
    for (std::size_t i = 0; i < n; ++i) {
        const int c = cls(i);
        ++count[c];
        for (std::size_t j = 0; j < d; ++j) m.mean[c][j] += x(i, j);
    }
    for (int c = 0; c < 2; ++c)
        for (auto& v : m.mean[c]) v /= static_cast<double>(count[c]);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = cls(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double r = x(i, j) - m.mean[c][j];
            m.variance[c][j] += r * r;
        }
    }
    for (int c = 0; c < 2; ++c) {
        m.prior[c] = static_cast<double>(count[c]) / static_cast<double>(n);
        for (auto& v : m.variance[c]) {
            v = v / static_cast<double>(count[c]) + epsilon;
            if (!(v > 0.0)) v = std::numeric_limits<double>::min();
        }
    }
    return m;
}

// Log of prior times likelihood for (positive, negative).
inline std::array<double, 2> nb_log_joint(const NbModel& m, std::span<const double> x) {
    if (x.size() != m.dims()) throw DimensionMismatch(x.size(), m.dims());
    constexpr double kLog2Pi = 1.8378770664093454836;
    std::array<double, 2> out{};
    for (int c = 0; c < 2; ++c) {
        double acc = std::log(m.prior[c]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double r = x[j] - m.mean[c][j];
            acc -= 0.5 * (kLog2Pi + std::log(m.variance[c][j]) + r * r / m.variance[c][j]);
        }
        out[c] = acc;
    }
    return out;
}

// Posterior probability of the positive class.
inline double nb_posterior_positive(const NbModel& m, std::span<const double> x) {
    const auto lj = nb_log_joint(m, x);
    return 1.0 / (1.0 + std::exp(lj[1] - lj[0]));
}

inline Label nb_predict(const NbModel& m, std::span<const double> x) {
    const auto lj = nb_log_joint(m, x);
    return lj[0] >= lj[1] ? Label::positive : Label::negative;
}

// ---------------------------------------------------------------------------
// Uniform front end used by the evaluation harness.

enum class ClassifierKind { svm, knn, nb };

inline std::string_view to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::svm: return "svm";
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::nb: return "nb";
    }
    return "?";
}

inline std::optional<ClassifierKind> classifier_from_string(std::string_view s) {
    if (s == "svm") return ClassifierKind::svm;
    if (s == "knn") return ClassifierKind::knn;
    if (s == "nb") return ClassifierKind::nb;
    return std::nullopt;
}

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::svm;
    SvmParams svm;
    int knn_k = 5;
    double nb_epsilon = -1.0;  // negative: data-dependent default
};

struct TrainedModel {
    Standardizer standardizer;
    std::variant<SvmModel, KnnModel, NbModel> model;

    ClassifierKind kind() const { return static_cast<ClassifierKind>(model.index()); }
};

// Fits the standardiser and classifier on the given (raw) training rows.
inline TrainedModel train_model(const ClassifierConfig& cfg, const Matrix& x, std::span<const Label> y) {
    TrainedModel tm;
    tm.standardizer = standardize_fit(x);
    const Matrix z = standardize_apply(tm.standardizer, x);
    switch (cfg.kind) {
        case ClassifierKind::svm: tm.model = svm_train(z, y, cfg.svm); break;
        case ClassifierKind::knn: tm.model = knn_train(z, y, cfg.knn_k); break;
        case ClassifierKind::nb: tm.model = nb_train(z, y, cfg.nb_epsilon); break;
    }
    return tm;
}

inline Label predict(const TrainedModel& tm, std::span<const double> raw) {
    const std::vector<double> z = tm.standardizer.apply(raw);
    return std::visit(
        [&](const auto& m) -> Label {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SvmModel>) return svm_predict(m, z).label;
            else if constexpr (std::is_same_v<T, KnnModel>) return knn_predict(m, z);
            else return nb_predict(m, z);
        },
        tm.model);
}

}  // namespace seizure
