#pragma once

#include <stdexcept>

namespace ssilkc {

/// File missing, unreadable, unwritable or malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssilkc
