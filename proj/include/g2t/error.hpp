#pragma once

#include <stdexcept>
#include <string>

namespace g2t {

/// Input data could not be parsed or is inconsistent. CLI exit code 1.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parse failure with a position inside the offending input.
class ParseError : public DataError {
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t field)
        : DataError(what + " (line " + std::to_string(line) + ", field " + std::to_string(field) + ")"),
          line_(line), field_(field) {}
    std::size_t line() const { return line_; }
    std::size_t field() const { return field_; }

  private:
    std::size_t line_;
    std::size_t field_;
};

/// A caller broke a documented precondition. CLI exit code 2.
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Invalid model / training configuration. CLI exit code 2.
class ConfigError : public ContractViolation {
  public:
    using ContractViolation::ContractViolation;
};

}  // namespace g2t

namespace g2t {

/// NaN/Inf showed up where a finite value is required.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace g2t
