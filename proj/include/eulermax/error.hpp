#pragma once

#include <stdexcept>
#include <string>

namespace eulermax {

// Base of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller supplied an argument outside an operation's domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A combinatorial construction (good-set lattice, blocks) could not be built.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Floating-point failure, e.g. a covariance matrix that will not factorize.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  explicit NumericalError(const std::string& what) : Error(what) {}

  // Leading minor (1-based) at which a factorization broke down, 0 if n/a.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_ = 0;
};

// A probabilistic inequality was evaluated outside its stated hypotheses.
class HypothesisError : public Error {
 public:
  HypothesisError(const std::string& hypothesis, const std::string& detail)
      : Error("hypothesis violated [" + hypothesis + "]: " + detail),
        hypothesis_(hypothesis) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

}  // namespace eulermax
