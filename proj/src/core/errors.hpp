#pragma once

#include <stdexcept>
#include <string>

namespace gwfit {

// Iterative/numeric routine failed to converge (eigen solves, power
// iteration, series summation past its cap).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, long iterations = -1)
      : std::runtime_error(what), iterations_(iterations) {}
  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

}  // namespace gwfit
