#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ued/dsl/program.hpp"

namespace ued::dsl {

/// Grammar violation at a specific source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + message),
        line_(line),
        col_(col),
        message_(message) {}

  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int col_;
  std::string message_;
};

struct SemanticError {
  SourcePos pos;
  std::string message;

  std::string to_string() const {
    return std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + message;
  }
};

/// Thrown by parse() when the text is well-formed but breaks a program invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<SemanticError> errors)
      : std::runtime_error(summarize(errors)), errors_(std::move(errors)) {}

  const std::vector<SemanticError>& errors() const { return errors_; }

 private:
  static std::string summarize(const std::vector<SemanticError>& errors) {
    std::string out = "invalid level program";
    for (const auto& e : errors) out += "\n  " + e.to_string();
    return out;
  }

  std::vector<SemanticError> errors_;
};

/// A valid program that cannot be realized on the drawn base map.
class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ued::dsl
