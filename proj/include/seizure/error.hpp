#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seizure {

// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorClass { usage, data, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string stage, const std::string& what)
        : std::runtime_error(what), cls_(cls), stage_(std::move(stage)) {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    ErrorClass cls_;
    std::string stage_;
};

class DataError : public Error {
public:
    DataError(std::string stage, const std::string& what)
        : Error(ErrorClass::data, std::move(stage), what) {}
};

class NumericalError : public Error {
public:
    NumericalError(std::string stage, const std::string& what)
        : Error(ErrorClass::numerical, std::move(stage), what) {}
};

class UsageError : public Error {
public:
    UsageError(std::string stage, const std::string& what)
        : Error(ErrorClass::usage, std::move(stage), what) {}
};

// ingest

class ParseError : public DataError {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& text)
        : DataError("ingest", file + ":" + std::to_string(line) + ": cannot parse '" + text + "' as a number"),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class LengthError : public DataError {
public:
    LengthError(const std::string& file, std::size_t got, std::size_t want)
        : DataError("ingest", file + ": expected " + std::to_string(want) + " samples, found " + std::to_string(got)),
          got_(got) {}
    std::size_t length() const noexcept { return got_; }

private:
    std::size_t got_;
};

class MissingFiles : public DataError {
public:
    MissingFiles(const std::string& dir, std::vector<int> missing)
        : DataError("ingest", describe(dir, missing)), missing_(std::move(missing)) {}
    const std::vector<int>& missing() const noexcept { return missing_; }

private:
    static std::string describe(const std::string& dir, const std::vector<int>& missing) {
        std::string s = dir + ": " + std::to_string(missing.size()) + " segment file(s) missing, indices";
        std::size_t shown = 0;
        for (int i : missing) {
            if (shown++ == 12) {
                s += " ...";
                break;
            }
            s += " " + std::to_string(i);
        }
        return s;
    }
    std::vector<int> missing_;
};

class AliasError : public UsageError {
public:
    explicit AliasError(const std::string& what) : UsageError("ingest", what) {}
};

// preprocess / dwt

class DesignError : public UsageError {
public:
    explicit DesignError(const std::string& what) : UsageError("preprocess", what) {}
};

class SignalTooShort : public DataError {
public:
    SignalTooShort(std::string stage, std::size_t got, std::size_t need)
        : DataError(std::move(stage), "signal too short: " + std::to_string(got) + " samples, need at least " +
                                          std::to_string(need)) {}
};

class LevelError : public UsageError {
public:
    explicit LevelError(int levels)
        : UsageError("dwt", "decomposition levels must be in [1, 10], got " + std::to_string(levels)) {}
};

// features

class DegenerateBand : public NumericalError {
public:
    explicit DegenerateBand(const std::string& what) : NumericalError("features", what) {}
};

class ZeroEnergy : public NumericalError {
public:
    ZeroEnergy() : NumericalError("features", "decomposition has zero total energy") {}
};

// classifiers

class DimensionMismatch : public UsageError {
public:
    DimensionMismatch(std::size_t a, std::size_t b)
        : UsageError("classifiers", "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class InvalidSigma : public UsageError {
public:
    explicit InvalidSigma(double sigma) : UsageError("classifiers", "kernel width must be > 0, got " + std::to_string(sigma)) {}
};

class SingleClass : public DataError {
public:
    SingleClass() : DataError("classifiers", "training data must contain both classes") {}
};

class NonConvergence : public NumericalError {
public:
    explicit NonConvergence(const std::string& what) : NumericalError("classifiers", what) {}
};

// eval

class TooFewSamples : public DataError {
public:
    TooFewSamples(std::size_t count, int k)
        : DataError("eval", "class with " + std::to_string(count) + " samples cannot be stratified into " +
                                std::to_string(k) + " folds") {}
};

class EmptyMatrix : public DataError {
public:
    EmptyMatrix() : DataError("eval", "confusion matrix is empty") {}
};

class SchemaError : public DataError {
public:
    SchemaError(const std::string& file, const std::string& what) : DataError("io", file + ": " + what) {}
};

}  // namespace seizure
