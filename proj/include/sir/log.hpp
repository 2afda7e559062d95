#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace sir {

// Verbosity from the SIRNET_LOG environment variable (0 = quiet, 1 = progress,
// 2 = per-iteration detail). Messages go to stderr.
inline int log_level() {
  static const int level = [] {
    const char* v = std::getenv("SIRNET_LOG");
    return v ? std::atoi(v) : 0;
  }();
  return level;
}

class LogLine {
public:
  explicit LogLine(bool active) : active_(active) {}
  ~LogLine() {
    if (active_) std::cerr << "[sirnet] " << ss_.str() << '\n';
  }
  template <class T> LogLine& operator<<(const T& v) {
    if (active_) ss_ << v;
    return *this;
  }

private:
  bool active_;
  std::ostringstream ss_;
};

} // namespace sir

#define SIR_LOG(lvl) ::sir::LogLine(::sir::log_level() >= (lvl))
