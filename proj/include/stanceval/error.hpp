#pragma once

#include <stdexcept>
#include <string>

namespace stanceval {

// Library-level error. `code` carries a stable machine-readable tag
// ("UnknownStance", "DuplicateId", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace stanceval
