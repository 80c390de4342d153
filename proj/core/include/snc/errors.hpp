#pragma once

#include <stdexcept>
#include <string>

namespace snc {

/// Out-of-domain argument to a numeric routine. These are programming
/// errors at call sites, never the result of roundoff.
class domain_error : public std::domain_error {
  public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// Invalid configuration input (scenario files, coefficient tables,
/// command-line combinations).
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A requested experiment has an unstable queue (mean service at or below
/// the arrival rate) and was refused.
class unstable_error : public std::runtime_error {
  public:
    explicit unstable_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric procedure (quadrature, root finding, series) failed to reach
/// its target tolerance. Carries the tolerance actually achieved.
class numeric_error : public std::runtime_error {
  public:
    numeric_error(const std::string& what, double achieved_tol)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tol) + ")"),
          achieved_tol_(achieved_tol) {}

    double achieved_tol() const { return achieved_tol_; }

  private:
    double achieved_tol_;
};

}  // namespace snc
