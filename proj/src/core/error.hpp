#pragma once

#include <stdexcept>
#include <string>

namespace streamgnn {

enum class Errc {
  io = 1,
  format = 2,
  dimension = 3,
  duplicate_edge = 4,
  missing_edge = 5,
  unsupported_model = 6,
  invalid_argument = 7,
  stale_delta = 8,
  contract = 9,
  nan_input = 10,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string msg) { throw Error(code, std::move(msg)); }

}  // namespace streamgnn
