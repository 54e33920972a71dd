#pragma once

#include <stdexcept>
#include <string>

namespace tqkd {

/// The requested control-mode sample size leaves no encoding rounds.
struct InfeasibleAllocation : std::domain_error {
  explicit InfeasibleAllocation(const std::string& what)
      : std::domain_error(what) {}
};

/// A threshold search was started on a protocol that is already dead at q = 0.
struct NoPositiveRate : std::domain_error {
  explicit NoPositiveRate(const std::string& what) : std::domain_error(what) {}
};

/// One efficiency curve dominates the other over the whole search bracket.
struct NoCrossover : std::domain_error {
  explicit NoCrossover(const std::string& what) : std::domain_error(what) {}
};

}  // namespace tqkd
