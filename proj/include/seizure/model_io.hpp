#pragma once

// Portable text serialisation of trained models. Layout:
//
//   seizure-model 1
//   kind <svm|knn|nb>
//   dims <d>
//   standardizer.mean <d values>
//   standardizer.scale <d values>
//   standardizer.constant <d 0/1 flags>
//   ... kind-specific records ...
//   end
//
// Every real is written with 17 significant digits so loading reproduces the
// in-memory model bit for bit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "seizure/classifiers.hpp"
#include "seizure/error.hpp"

namespace seizure {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_record(std::ostream& os, const std::string& key, std::span<const double> values) {
    os << key << ' ' << values.size();
    for (double v : values) os << ' ' << fmt_real(v);
    os << '\n';
}

class RecordReader {
public:
    explicit RecordReader(std::istream& is) : is_(is) {}

    std::istringstream next(const std::string& key) {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_;
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string k;
            ss >> k;
            if (k != key) fail("expected '" + key + "', found '" + k + "'");
            return ss;
        }
        fail("unexpected end of file, expected '" + key + "'");
    }

    std::vector<double> reals(const std::string& key) {
        auto ss = next(key);
        std::size_t n = 0;
        if (!(ss >> n)) fail("missing count for '" + key + "'");
        std::vector<double> out(n);
        for (auto& v : out) {
            std::string tok;
            if (!(ss >> tok)) fail("too few values for '" + key + "'");
            char* end = nullptr;
            v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size()) fail("bad number '" + tok + "'");
        }
        return out;
    }

    template <typename T>
    T scalar(const std::string& key) {
        auto ss = next(key);
        T v{};
        if (!(ss >> v)) fail("bad value for '" + key + "'");
        return v;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw SchemaError("model line " + std::to_string(line_), what);
    }

private:
    std::istream& is_;
    std::size_t line_ = 0;
};

inline std::vector<double> labels_to_reals(std::span<const Label> ls) {
    std::vector<double> v;
    for (Label l : ls) v.push_back(sign(l));
    return v;
}

}  // namespace detail

inline void save_model(std::ostream& os, const TrainedModel& tm) {
    const auto& s = tm.standardizer;
    os << "seizure-model " << kModelFormatVersion << '\n';
    os << "kind " << to_string(tm.kind()) << '\n';
    os << "dims " << s.dims() << '\n';
    detail::write_record(os, "standardizer.mean", s.mean);
    detail::write_record(os, "standardizer.scale", s.scale);
    std::vector<double> flags;
    for (bool b : s.constant_column) flags.push_back(b ? 1.0 : 0.0);
    detail::write_record(os, "standardizer.constant", flags);

    if (const auto* m = std::get_if<SvmModel>(&tm.model)) {
        os << "svm.c " << detail::fmt_real(m->c) << '\n';
        os << "svm.sigma " << detail::fmt_real(m->sigma) << '\n';
        os << "svm.bias " << detail::fmt_real(m->bias) << '\n';
        detail::write_record(os, "svm.dual_coef", m->dual_coef);
        os << "svm.support_vectors " << m->support_vectors.rows() << '\n';
        for (std::size_t i = 0; i < m->support_vectors.rows(); ++i) detail::write_record(os, "sv", m->support_vectors.row(i));
    } else if (const auto* m = std::get_if<KnnModel>(&tm.model)) {
        os << "knn.k " << m->k << '\n';
        detail::write_record(os, "knn.labels", detail::labels_to_reals(m->labels));
        os << "knn.points " << m->points.rows() << '\n';
        for (std::size_t i = 0; i < m->points.rows(); ++i) detail::write_record(os, "pt", m->points.row(i));
    } else if (const auto* m = std::get_if<NbModel>(&tm.model)) {
        os << "nb.epsilon " << detail::fmt_real(m->epsilon) << '\n';
        detail::write_record(os, "nb.prior", m->prior);
        detail::write_record(os, "nb.positive.mean", m->mean[0]);
        detail::write_record(os, "nb.positive.variance", m->variance[0]);
        detail::write_record(os, "nb.negative.mean", m->mean[1]);
        detail::write_record(os, "nb.negative.variance", m->variance[1]);
    }
    os << "end\n";
}

inline TrainedModel load_model(std::istream& is) {
    detail::RecordReader rd(is);
    const int version = rd.scalar<int>("seizure-model");
    if (version != kModelFormatVersion) rd.fail("unsupported model version " + std::to_string(version));
    const auto kind = classifier_from_string(rd.scalar<std::string>("kind"));
    if (!kind) rd.fail("unknown classifier kind");
    const auto dims = rd.scalar<std::size_t>("dims");

    auto sized = [&](const std::string& key, std::size_t n) {
        auto v = rd.reals(key);
        if (v.size() != n) rd.fail("'" + key + "' has " + std::to_string(v.size()) + " values, expected " + std::to_string(n));
        return v;
    };
    auto rows = [&](const std::string& count_key, const std::string& row_key) {
        const auto n = rd.scalar<std::size_t>(count_key);
        Matrix m(0, dims);
        for (std::size_t i = 0; i < n; ++i) m.append_row(sized(row_key, dims));
        return m;
    };

    TrainedModel tm;
    tm.standardizer.mean = sized("standardizer.mean", dims);
    tm.standardizer.scale = sized("standardizer.scale", dims);
    for (double f : sized("standardizer.constant", dims)) tm.standardizer.constant_column.push_back(f != 0.0);

    switch (*kind) {
        case ClassifierKind::svm: {
            SvmModel m;
            m.c = rd.scalar<double>("svm.c");
            m.sigma = rd.scalar<double>("svm.sigma");
            m.bias = rd.scalar<double>("svm.bias");
            m.dual_coef = rd.reals("svm.dual_coef");
            m.support_vectors = rows("svm.support_vectors", "sv");
            if (m.support_vectors.rows() != m.dual_coef.size()) rd.fail("support vector count mismatch");
            tm.model = std::move(m);
            break;
        }
        case ClassifierKind::knn: {
            KnnModel m;
            m.k = rd.scalar<int>("knn.k");
            for (double v : rd.reals("knn.labels")) m.labels.push_back(v > 0 ? Label::positive : Label::negative);
            m.points = rows("knn.points", "pt");
            if (m.points.rows() != m.labels.size()) rd.fail("k-NN label count mismatch");
            tm.model = std::move(m);
            break;
        }
        case ClassifierKind::nb: {
            NbModel m;
            m.epsilon = rd.scalar<double>("nb.epsilon");
            const auto prior = sized("nb.prior", 2);
            m.prior = {prior[0], prior[1]};
            m.mean[0] = sized("nb.positive.mean", dims);
            m.variance[0] = sized("nb.positive.variance", dims);
            m.mean[1] = sized("nb.negative.mean", dims);
            m.variance[1] = sized("nb.negative.variance", dims);
            tm.model = std::move(m);
            break;
        }
    }
    rd.next("end");
    return tm;
}

inline void save_model(const std::filesystem::path& path, const TrainedModel& tm) {
    std::ofstream os(path);
    if (!os) throw DataError("io", path.string() + ": cannot write model");
    save_model(os, tm);
}

inline TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("io", path.string() + ": cannot open model");
    return load_model(is);
}

}  // namespace seizure
