#pragma once

#include <stdexcept>
#include <string>

namespace frc {

/// Base class for all library errors.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration (bad field value, unknown key, inconsistent settings). CLI exit code 2.
class config_error : public error {
  public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

/// Malformed runtime input (dimension mismatch, too-short sequence, empty test set).
class input_error : public error {
  public:
    explicit input_error(const std::string& msg) : error(msg) {}
};

/// Numerical failure (singular system, eigenvalue estimation did not converge).
class numeric_error : public error {
  public:
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

/// Federated protocol violation (mismatched stat dimensions between clients).
class protocol_error : public error {
  public:
    explicit protocol_error(const std::string& msg) : error(msg) {}
};

/// File I/O failure (unreadable path, short read, bad magic).
class io_error : public error {
  public:
    explicit io_error(const std::string& msg) : error(msg) {}
};

}  // namespace frc
