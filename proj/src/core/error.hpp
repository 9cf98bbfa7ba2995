#pragma once

#include <stdexcept>
#include <string>

namespace painfair {

// Error categories map onto the CLI exit codes and the C API status codes:
// Argument -> usage (2), Io/Schema/Invariant/State -> data (3), Numeric -> numeric (4).
enum class ErrorCategory {
  Argument,
  Io,
  Schema,
  Invariant,
  Numeric,
  State,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

private:
  ErrorCategory category_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& m) : Error(ErrorCategory::Argument, m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorCategory::Io, m) {}
};
struct SchemaError : Error {
  explicit SchemaError(const std::string& m) : Error(ErrorCategory::Schema, m) {}
};
struct InvariantError : Error {
  explicit InvariantError(const std::string& m) : Error(ErrorCategory::Invariant, m) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error(ErrorCategory::Numeric, m) {}
};
struct StateError : Error {
  explicit StateError(const std::string& m) : Error(ErrorCategory::State, m) {}
};

const char* error_category_name(ErrorCategory category);

}  // namespace painfair
