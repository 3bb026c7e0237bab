#pragma once

#include <functional>
#include <string>
#include <vector>

namespace imbaug::log {

enum class Level { info, warning };

using Sink = std::function<void(Level, const std::string&)>;

// Replaces the process-wide sink; returns the previous one. The default sink
// writes warnings to stderr and drops info messages unless verbose is set.
Sink set_sink(Sink sink);
void set_verbose(bool verbose);

void info(const std::string& msg);
void warn(const std::string& msg);

// Collects warnings for the lifetime of the object (test helper).
class Capture {
 public:
  Capture();
  ~Capture();
  Capture(const Capture&) = delete;
  Capture& operator=(const Capture&) = delete;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<std::string> warnings_;
  Sink previous_;
};

}  // namespace imbaug::log
