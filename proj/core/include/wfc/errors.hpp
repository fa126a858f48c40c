#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wfc {

// Process exit codes shared between the library and the CLI.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  parse_error = 2,
  non_exact = 3,
  validation_failed = 4,
};

class Error : public std::runtime_error {
public:
  explicit Error(std::string message, ExitCode code = ExitCode::usage)
      : std::runtime_error(std::move(message)), code_(code) {}

  ExitCode code() const { return code_; }

private:
  ExitCode code_;
};

class ParseError : public Error {
public:
  ParseError(std::string message, int line, int column)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                  std::move(message),
              ExitCode::parse_error),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

// Raised by queries that need a two-valued compiled model but got a
// three-valued one. Lists the atoms whose bounds differ.
class NonExactError : public Error {
public:
  NonExactError(std::string program_label, std::vector<std::string> three_valued_atoms)
      : Error(make_message(program_label, three_valued_atoms), ExitCode::non_exact),
        program_(std::move(program_label)),
        atoms_(std::move(three_valued_atoms)) {}

  const std::string& program() const { return program_; }
  const std::vector<std::string>& atoms() const { return atoms_; }

private:
  static std::string make_message(const std::string& label, const std::vector<std::string>& atoms) {
    std::string msg = "NonExactModel (" + label + "): three-valued atoms:";
    for (const auto& a : atoms) msg += " " + a;
    return msg;
  }

  std::string program_;
  std::vector<std::string> atoms_;
};

class AlphabetMismatchError : public Error {
public:
  explicit AlphabetMismatchError(std::string message)
      : Error("AlphabetMismatch: " + std::move(message), ExitCode::usage) {}
};

}  // namespace wfc
