#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "config.hpp"

namespace bnprdd::cli {

/// Artifacts of one run, keyed by file name. Written only after the whole
/// command succeeds.
using Artifacts = std::map<std::string, std::string>;

Artifacts cmd_fit(const RunConfig& c);
Artifacts cmd_predict(const RunConfig& c);
Artifacts cmd_effect(const RunConfig& c);
Artifacts cmd_diagnose(const RunConfig& c);
Artifacts cmd_simulate(const RunConfig& c);

/// Dispatches on c.command and adds manifest.json.
Artifacts run_command(const RunConfig& c);

/// Writes every artifact under out/ through a staging directory; on any
/// failure nothing is left behind.
void commit_artifacts(const std::filesystem::path& out, const Artifacts& files);

/// Validate, run, commit. Exit codes: 0 success, 1 numerical or I/O
/// failure, 2 bad input, 3 unidentified ratio estimator.
int execute(const RunConfig& c);

std::string dump_json(const json& j);

}  // namespace bnprdd::cli
