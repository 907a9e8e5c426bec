#pragma once

#include <stdexcept>
#include <string>

namespace dirlaw {

/// Bad argument or query outside the operation's domain (CLI exit code 2).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Density evaluated on a boundary face where it diverges.
class singular_evaluation : public domain_error {
 public:
  using domain_error::domain_error;
};

/// Requested configuration not supported by this path (e.g. dimension cap).
class unsupported_error : public domain_error {
 public:
  using domain_error::domain_error;
};

/// Memory / enumeration-cost guard tripped (CLI exit code 3).
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal consistency check failed (CLI exit code 4).
class integrity_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw domain_error(what);
}

}  // namespace detail
}  // namespace dirlaw
