#ifndef SWARMLOC_ERROR_HPP
#define SWARMLOC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace swarmloc {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDegenerateGeometry = 2,
  kUnsupportedSize = 3,
  kParse = 4,
  kIo = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace swarmloc

#endif
