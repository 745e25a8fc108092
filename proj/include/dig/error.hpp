#ifndef DIG_ERROR_HPP
#define DIG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dig {

enum class ErrorKind {
  Domain,        // argument outside the mathematical domain of an operation
  Configuration, // inconsistent experiment or simulation setup
  Construction,  // randomized model construction gave up
  Resource,      // exact-enumeration size guard exceeded
  Parse,         // malformed input file or argument text
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string &what) {
  if (!condition) {
    fail(kind, what);
  }
}

} // namespace dig

#endif // DIG_ERROR_HPP
