#pragma once

#include <stdexcept>
#include <string>

namespace rmcf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (grid too coarse, bad dimension, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The pole limits of the orbit curvature do not exist: the profile is not
/// smooth at x = 0 or x = 1.
class PoleSingularity : public Error {
 public:
  using Error::Error;
};

/// A profile-curve node whose tangent has (numerically) vanished.
class DegenerateNode : public Error {
 public:
  DegenerateNode(const std::string& what, int node) : Error(what), node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

/// A time step was refused. `subsystem` is "ambient" or "hypersurface".
class StepRejected : public Error {
 public:
  StepRejected(const std::string& subsystem, double time, const std::string& reason)
      : Error(subsystem + " step rejected at t=" + std::to_string(time) + ": " + reason),
        subsystem_(subsystem),
        time_(time),
        reason_(reason) {}

  const std::string& subsystem() const noexcept { return subsystem_; }
  double time() const noexcept { return time_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string subsystem_;
  double time_;
  std::string reason_;
};

/// Malformed profile, curve, checkpoint or CSV text.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Configuration text error; the message already carries the line number.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace rmcf
