#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mvcodes {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SpecMismatch : public Error {
public:
  using Error::Error;
};

class DivisionByZero : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

// A requested enumeration or search exceeds the configured size limit.
class CapacityError : public Error {
public:
  using Error::Error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

class Infeasible : public Error {
public:
  using Error::Error;
};

class ShapeError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class InsufficientResponses : public Error {
public:
  InsufficientResponses(std::size_t have, std::size_t need)
      : Error("insufficient responses: have " + std::to_string(have) + ", need " +
              std::to_string(need) + " (deficit " + std::to_string(need - have) + ")"),
        have_(have), need_(need) {}

  std::size_t have() const noexcept { return have_; }
  std::size_t need() const noexcept { return need_; }
  std::size_t deficit() const noexcept { return need_ - have_; }

private:
  std::size_t have_;
  std::size_t need_;
};

// The responding evaluation points do not determine every coefficient.
class RankDeficient : public Error {
public:
  RankDeficient(std::size_t rank, std::size_t kappa)
      : Error("evaluation system has rank " + std::to_string(rank) + " < " +
              std::to_string(kappa)),
        rank_(rank), kappa_(kappa) {}

  std::size_t rank() const noexcept { return rank_; }
  std::size_t kappa() const noexcept { return kappa_; }

private:
  std::size_t rank_;
  std::size_t kappa_;
};

class IncompleteRecovery : public Error {
public:
  using Error::Error;
};

// Raised when a guarantee that should hold mathematically is observed to fail.
class InternalConsistency : public Error {
public:
  using Error::Error;
};

} // namespace mvcodes
