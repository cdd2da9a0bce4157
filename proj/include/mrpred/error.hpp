#pragma once

#include <stdexcept>
#include <string>

namespace mrpred {

// Base class for all errors raised by the library. The CLI maps these to
// exit code 2 (data/validation failures); usage errors never reach here.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mrpred
