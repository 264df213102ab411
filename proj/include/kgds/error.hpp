#ifndef KGDS_ERROR_HPP
#define KGDS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace kgds {

/// Argument outside the region where an operation is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A series or quadrature did not reach its error target within budget.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A computed quantity failed a sanity check (blow-up, spurious imaginary part).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kgds

#endif  // KGDS_ERROR_HPP
