// Command-line front end: extract, evaluate, plot, decompose.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seizure/pipeline.hpp"

namespace {

using seizure::PipelineConfig;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

// Every flag is optional so that config-file values survive unless a flag is
// given explicitly.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> corpus;
    bool synthetic = false;
    std::optional<std::uint64_t> seed;
    bool lenient = false;
    std::optional<int> filter_order;
    std::optional<double> cutoff_hz;
    std::optional<int> levels;
    std::optional<std::string> mode;
    std::optional<std::string> skewness;
    std::optional<std::string> degenerate;
    std::optional<std::string> output;
    std::optional<unsigned> threads;

    std::vector<std::string> classifiers;
    std::vector<int> cases;
    std::optional<double> svm_c;
    std::optional<double> svm_sigma;
    std::optional<double> svm_tol;
    std::optional<int> knn_k;
    std::optional<double> nb_epsilon;
    std::optional<std::string> grid_search;
    std::optional<int> folds;
    std::optional<int> repetitions;
    std::optional<std::string> aggregation;
    std::optional<std::string> features_dir;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON config file; flags override its values");
    cmd->add_option("--corpus", o.corpus, "corpus root (set folders or Z/O/N/F/S files)");
    cmd->add_flag("--synthetic", o.synthetic, "use the synthetic stand-in corpus");
    cmd->add_option("--seed", o.seed, "base seed for every random choice");
    cmd->add_flag("--lenient", o.lenient, "tolerate trailing blank lines and any length");
    cmd->add_option("--filter-order", o.filter_order, "Butterworth order (even, 2..12; default 4)");
    cmd->add_option("--cutoff-hz", o.cutoff_hz, "low-pass cutoff in Hz (default 60)");
    cmd->add_option("--levels", o.levels, "wavelet decomposition levels (default 4)");
    cmd->add_option("--mode", o.mode, "boundary extension: symmetric|periodic")->check(CLI::IsMember({"symmetric", "periodic"}));
    cmd->add_option("--skewness", o.skewness, "skewness statistic form: printed|third_moment")
        ->check(CLI::IsMember({"printed", "third_moment"}));
    cmd->add_option("--degenerate", o.degenerate, "zero-variance band policy: error|zero")->check(CLI::IsMember({"error", "zero"}));
    cmd->add_option("-o,--output", o.output, "output directory (default out)");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

void add_evaluate_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--classifier", o.classifiers, "svm|knn|nb (repeatable; default all)")
        ->check(CLI::IsMember({"svm", "knn", "nb"}));
    cmd->add_option("--case", o.cases, "case number 1..4 (repeatable; default all)")->check(CLI::Range(1, 4));
    cmd->add_option("--svm-c", o.svm_c, "SVM box constraint when grid search is off");
    cmd->add_option("--svm-sigma", o.svm_sigma, "RBF width when grid search is off (default sqrt(d))");
    cmd->add_option("--svm-tol", o.svm_tol, "SMO KKT tolerance (default 1e-3)");
    cmd->add_option("--knn-k", o.knn_k, "neighbours for k-NN (odd; default 5)");
    cmd->add_option("--nb-epsilon", o.nb_epsilon, "naive Bayes variance smoothing (default 1e-9 x max variance)");
    cmd->add_option("--grid-search", o.grid_search, "inner-CV search over C and sigma: on|off")->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--folds", o.folds, "cross-validation folds (default 10)");
    cmd->add_option("--repetitions", o.repetitions, "repeated CV runs (default 10)");
    cmd->add_option("--aggregation", o.aggregation, "micro|macro fold aggregation")->check(CLI::IsMember({"micro", "macro"}));
    cmd->add_option("--features-dir", o.features_dir, "feature CSV directory (default <output>/features)");
}

PipelineConfig build_config(const Overrides& o) {
    PipelineConfig c;
    if (o.config) seizure::apply_config_file(c, *o.config);
    if (o.corpus) c.corpus = *o.corpus;
    if (o.synthetic) c.synthetic = true;
    if (o.seed) c.seed = *o.seed;
    if (o.lenient) c.strict = false;
    if (o.filter_order) c.filter_order = *o.filter_order;
    if (o.cutoff_hz) c.cutoff_hz = *o.cutoff_hz;
    if (o.levels) c.levels = *o.levels;
    if (o.mode) c.mode = *seizure::extension_mode_from_string(*o.mode);
    if (o.skewness) c.skewness = *o.skewness == "printed" ? seizure::SkewnessForm::printed : seizure::SkewnessForm::third_moment;
    if (o.degenerate)
        c.degenerate = *o.degenerate == "error" ? seizure::DegeneratePolicy::error : seizure::DegeneratePolicy::substitute_zero;
    if (o.output) c.output = *o.output;
    if (o.threads) c.threads = *o.threads;
    if (!o.classifiers.empty()) {
        c.classifiers.clear();
        for (const auto& s : o.classifiers) c.classifiers.push_back(*seizure::classifier_from_string(s));
    }
    if (!o.cases.empty()) c.cases = o.cases;
    if (o.svm_c) c.svm_c = *o.svm_c;
    if (o.svm_sigma) c.svm_sigma = *o.svm_sigma;
    if (o.svm_tol) c.svm_tol = *o.svm_tol;
    if (o.knn_k) c.knn_k = *o.knn_k;
    if (o.nb_epsilon) c.nb_epsilon = *o.nb_epsilon;
    if (o.grid_search) c.grid_search = *o.grid_search == "on";
    if (o.folds) c.folds = *o.folds;
    if (o.repetitions) c.repetitions = *o.repetitions;
    if (o.aggregation) c.aggregation = *o.aggregation == "micro" ? seizure::Aggregation::micro : seizure::Aggregation::macro;
    if (o.features_dir) c.features_dir = *o.features_dir;
    return c;
}

seizure::SetId parse_set(const std::string& s) {
    if (s.size() == 1)
        if (auto id = seizure::set_from_letter(s[0])) return *id;
    throw seizure::UsageError("cli", "set must be one of A..E, got '" + s + "'");
}

int run(int argc, char** argv) {
    CLI::App app{"EEG seizure detection pipeline: wavelet sub-band features and cross-validated classifiers"};
    app.require_subcommand(1);
    Overrides o;

    auto* extract = app.add_subcommand("extract", "write per-set feature CSVs (features_A.csv .. features_E.csv)");
    add_common(extract, o);

    auto* evaluate = app.add_subcommand("evaluate", "cross-validate classifiers on the four X-vs-E cases");
    add_common(evaluate, o);
    add_evaluate_options(evaluate, o);

    std::string set_name = "A";
    int segment = 1;
    std::optional<std::string> plot_out;
    auto* plot = app.add_subcommand("plot", "render a segment and its five reconstructed bands as SVG");
    add_common(plot, o);
    plot->add_option("--set", set_name, "set A..E")->required();
    plot->add_option("--segment", segment, "segment index 1..100")->required();
    plot->add_option("--file", plot_out, "output SVG path");

    std::optional<std::string> input;
    std::optional<std::string> coeff_out;
    std::optional<std::string> decompose_plot;
    auto* dec = app.add_subcommand("decompose", "write the per-band wavelet coefficients of one segment");
    add_common(dec, o);
    dec->add_option("--input", input, "segment file (one sample per line)");
    dec->add_option("--set", set_name, "set A..E when --input is not given");
    dec->add_option("--segment", segment, "segment index 1..100 when --input is not given");
    dec->add_option("--file", coeff_out, "output CSV path (default stdout)");
    dec->add_option("--plot", decompose_plot, "also write a band-reconstruction SVG");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    PipelineConfig cfg = build_config(o);

    if (*extract) {
        for (const auto& p : seizure::cmd_extract(cfg)) std::cout << p.string() << '\n';
        return kOk;
    }
    if (*evaluate) {
        const auto res = seizure::cmd_evaluate(cfg);
        for (const auto& p : res.table_files) {
            std::ifstream is(p);
            std::cout << is.rdbuf() << '\n';
        }
        for (const auto& f : res.failures) std::cerr << "evaluate: " << f << '\n';
        return res.ok() ? kOk : kNumerical;
    }
    if (*plot) {
        std::cout << seizure::cmd_plot(cfg, parse_set(set_name), segment,
                                       plot_out ? std::optional<std::filesystem::path>(*plot_out) : std::nullopt)
                         .string()
                  << '\n';
        return kOk;
    }
    if (*dec) {
        seizure::EegSegment seg;
        if (input) {
            seizure::LoadOptions opts;
            opts.strict = cfg.strict;
            seg = seizure::load_segment(*input, opts);
        } else {
            seg = seizure::load_one_segment(cfg, parse_set(set_name), segment);
        }
        const auto tree = seizure::analyse_segment(cfg, seg);
        const std::string csv = seizure::coefficients_csv(tree);
        if (coeff_out) {
            seizure::write_text(*coeff_out, csv);
            std::cout << *coeff_out << '\n';
        } else {
            std::cout << csv;
        }
        if (decompose_plot) {
            seizure::write_text(*decompose_plot, seizure::plot_svg(cfg, seg, "decomposition"));
            std::cout << *decompose_plot << '\n';
        }
        return kOk;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const seizure::Error& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
        switch (e.error_class()) {
            case seizure::ErrorClass::usage: return kUsage;
            case seizure::ErrorClass::data: return kData;
            case seizure::ErrorClass::numerical: return kNumerical;
        }
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error [io]: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kData;
}
