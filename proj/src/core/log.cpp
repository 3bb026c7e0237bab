#include "imbaug/log.hpp"

#include <iostream>
#include <mutex>

#include "imbaug/error.hpp"

namespace imbaug {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::shape: return "shape";
    case ErrorKind::input: return "input";
    case ErrorKind::state: return "state";
    case ErrorKind::config: return "config";
    case ErrorKind::schema: return "schema";
    case ErrorKind::data: return "data";
    case ErrorKind::mapping: return "mapping";
    case ErrorKind::policy: return "policy";
    case ErrorKind::diverged: return "training-diverged";
    case ErrorKind::yield: return "yield";
    case ErrorKind::format: return "format";
    case ErrorKind::label: return "label";
    case ErrorKind::report: return "report";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::neighbor: return "neighbor";
    case ErrorKind::comparison: return "comparison";
    case ErrorKind::pipeline: return "pipeline";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace log {
namespace {

bool g_verbose = false;
std::mutex g_mutex;

void default_sink(Level level, const std::string& msg) {
  if (level == Level::warning) {
    std::cerr << "warning: " << msg << '\n';
  } else if (g_verbose) {
    std::cerr << msg << '\n';
  }
}

Sink& sink() {
  static Sink s = default_sink;
  return s;
}

}  // namespace

Sink set_sink(Sink s) {
  std::lock_guard lock(g_mutex);
  Sink prev = std::move(sink());
  sink() = s ? std::move(s) : Sink(default_sink);
  return prev;
}

void set_verbose(bool verbose) { g_verbose = verbose; }

void info(const std::string& msg) {
  std::lock_guard lock(g_mutex);
  sink()(Level::info, msg);
}

void warn(const std::string& msg) {
  std::lock_guard lock(g_mutex);
  sink()(Level::warning, msg);
}

Capture::Capture() {
  previous_ = set_sink([this](Level level, const std::string& msg) {
    if (level == Level::warning) warnings_.push_back(msg);
  });
}

Capture::~Capture() { set_sink(std::move(previous_)); }

}  // namespace log
}  // namespace imbaug
