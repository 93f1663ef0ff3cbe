#ifndef MDPDE_ERRORS_HPP
#define MDPDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mdpde {

// Argument outside the operation's domain (y not in support, bad dimensions, ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// An iterative scheme (series, quadrature, solver) failed to reach its tolerance.
class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear system is singular or too ill-conditioned to trust.
class SingularMatrix : public std::runtime_error {
public:
    explicit SingularMatrix(const std::string& msg) : std::runtime_error(msg) {}
};

class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& msg) : std::runtime_error(msg) {}
};

// Design matrix does not have full column rank (or too few rows).
class RankDeficient : public std::runtime_error {
public:
    explicit RankDeficient(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mdpde

#endif
