#pragma once

#include <exception>
#include <stdexcept>
#include <string>

namespace gendiag {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Inputs disagree on variant, dimension or length.
class ShapeMismatch : public Error {
public:
  using Error::Error;
};

/// A state violates its own invariants (non-finite real, bad matrix entry, ...).
class InvalidState : public Error {
public:
  using Error::Error;
};

/// An operation received no data to work on.
class EmptyInput : public Error {
public:
  using Error::Error;
};

/// Both states have zero target density; their distance is undefined.
class UndefinedRatio : public Error {
public:
  using Error::Error;
};

/// A file or stream does not match the documented format.
class FormatError : public Error {
public:
  using Error::Error;
};

/// A precondition on user-supplied configuration was violated.
class UsageError : public Error {
public:
  using Error::Error;
};

/// No draws fell inside the histogram support.
class EmptyHistogram : public Error {
public:
  using Error::Error;
};

/// Rethrows the active exception with a context prefix, preserving its type.
[[noreturn]] inline void rethrow_with_context(std::exception_ptr ep, const std::string& ctx) {
  try {
    std::rethrow_exception(ep);
  } catch (const ShapeMismatch& e) {
    throw ShapeMismatch(ctx + ": " + e.what());
  } catch (const InvalidState& e) {
    throw InvalidState(ctx + ": " + e.what());
  } catch (const EmptyInput& e) {
    throw EmptyInput(ctx + ": " + e.what());
  } catch (const UndefinedRatio& e) {
    throw UndefinedRatio(ctx + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(ctx + ": " + e.what());
  } catch (const UsageError& e) {
    throw UsageError(ctx + ": " + e.what());
  } catch (const EmptyHistogram& e) {
    throw EmptyHistogram(ctx + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ctx + ": " + e.what());
  }
}

}  // namespace gendiag
