#pragma once

#include <stdexcept>
#include <string>

namespace npbayes {

enum class Errc {
  domain_error = 1,       // argument outside the mathematical domain
  invalid_argument,       // structurally invalid input (sizes, ties, families)
  numerical_failure,      // quadrature / root-finding did not meet tolerance
  limit_exceeded,         // a hard safety cap was hit (runaway loops)
  unsupported,            // combination the library does not implement
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const char* what) {
  if (!ok) throw Error(code, what);
}

}  // namespace npbayes
