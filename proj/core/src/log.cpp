#include "bnprdd/log.hpp"

#include <iostream>
#include <map>
#include <mutex>

namespace bnprdd {

namespace {

struct WarningState {
  std::mutex mutex;
  WarningSink sink = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  std::map<std::string, long> counts;
};

WarningState& state() {
  static WarningState s;
  return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  std::swap(s.sink, sink);
  return sink;
}

void warn_once(const std::string& key, const std::string& message) {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  if (s.counts[key]++ == 0 && s.sink) s.sink(message);
}

long warning_count(const std::string& key) {
  auto& s = state();
  std::lock_guard lock(s.mutex);
  auto it = s.counts.find(key);
  return it == s.counts.end() ? 0 : it->second;
}

}  // namespace bnprdd
