#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace setarw {

enum class errc {
  invalid_argument = 1,
  parse_error = 2,
  simulation_error = 3,
  estimation_error = 4,
  io_error = 5,
  internal_error = 6,
};

// All library failures surface as setarw::error; the C API maps code() to its
// integer status values.
class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

template <typename... Args>
std::string strfmt(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return std::string(buf);
}

// Decimal formatting with enough digits to round-trip a double exactly.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace setarw
