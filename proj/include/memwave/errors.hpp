#pragma once

#include <stdexcept>
#include <string>

namespace memwave {

/// Invalid kernel parameters or malformed kernel spec strings.
class kernel_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical evaluation failed to reach its accuracy target.
class numeric_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Degenerate per-step solve or a failed mode integration.
class solver_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Scenario or configuration problems (bad file, missing resolvent data, ...).
class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Initial data violate the compatibility condition imposed by the kernel class.
class compatibility_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace memwave
