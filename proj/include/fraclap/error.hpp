#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

// Exit codes used by the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitTolerance = 1,
  kExitBlowUp = 2,
  kExitCflDeadlock = 3,
  kExitUsage = 64,
};

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int code) : std::runtime_error(what), code_(code) {}
  int exit_code() const { return code_; }

 private:
  int code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what, kExitUsage) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, kExitTolerance) {}
};

class BlowUpError : public Error {
 public:
  explicit BlowUpError(const std::string& what) : Error(what, kExitBlowUp) {}
};

class CflDeadlockError : public Error {
 public:
  explicit CflDeadlockError(const std::string& what) : Error(what, kExitCflDeadlock) {}
};

}  // namespace fraclap
