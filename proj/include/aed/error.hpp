#pragma once

#include <stdexcept>
#include <string>

namespace aed {

// Argument outside the mathematical domain of a function (p = 0 for a
// quantile, |rho| >= 1, negative counts, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A root that the contract promises does not exist for these inputs
// (over-spent alpha, unreachable significance level).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration value; carries the dotted path of the field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          field_(std::move(field)), message_(what) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

// A report table was requested that the bundle does not hold.
class MissingTableError : public std::runtime_error {
public:
    explicit MissingTableError(std::string key)
        : std::runtime_error("report bundle has no '" + key + "' table"), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace aed
