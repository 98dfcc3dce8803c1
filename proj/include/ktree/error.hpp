#pragma once

#include <stdexcept>
#include <string>

namespace ktree {

/// Failure categories surfaced by the library. The C API maps each one onto a
/// status code, and the CLI onto a process exit code.
enum class Errc {
  domain,          // argument outside the mathematical domain of an operation
  out_of_tree,     // vertex or ancestor request that leaves the tree / region
  overflow,        // exact integer arithmetic would overflow 64 bits
  oracle_guard,    // brute-force oracle refused an instance that is too large
  invalid_config,  // experiment configuration failed validation
  unsupported,     // operation not defined for the given inputs (e.g. non-radial weight)
  io,              // file could not be read or written
};

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace ktree
