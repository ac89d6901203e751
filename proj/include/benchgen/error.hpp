#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace benchgen {

// Base of every error the toolkit throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A value violates a documented invariant (sample, flag, config field).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what, std::vector<std::string> violations = {})
        : Error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Input too degenerate for the statistic (constant column, zero variance).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class CollinearityError : public Error {
public:
    CollinearityError(const std::string& what, std::vector<std::string> dependent)
        : Error(what), dependent_(std::move(dependent)) {}
    const std::vector<std::string>& dependent_columns() const noexcept { return dependent_; }

private:
    std::vector<std::string> dependent_;
};

// Malformed file content; message names line and field.
class FormatError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ProviderError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

// Model output could not be parsed after all retries. Keeps the last raw text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
    const std::string& raw_text() const noexcept { return raw_; }

private:
    std::string raw_;
};

// Parameter outside its mathematical domain (k >= 1, fraction <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Derived quantity left its admissible range (denoised accuracy outside [0,1]).
class InconsistencyError : public Error {
public:
    using Error::Error;
};

class PipelineError : public Error {
public:
    using Error::Error;
};

}  // namespace benchgen
