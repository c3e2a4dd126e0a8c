#pragma once

#include <stdexcept>
#include <string>

namespace ptsym {

// Invalid parameters or a point outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numerical procedure failed to deliver (no bracket, no convergence, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ptsym
