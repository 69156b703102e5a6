#pragma once

#include <functional>
#include <string>

namespace bnprdd {

using WarningSink = std::function<void(const std::string&)>;

/// Replace the warning sink (default: one line to stderr). Returns the old one.
WarningSink set_warning_sink(WarningSink sink);

/// Emit a warning. Repeats of the same key are counted, not re-emitted.
void warn_once(const std::string& key, const std::string& message);

/// How many times warn_once was called with this key.
long warning_count(const std::string& key);

}  // namespace bnprdd
