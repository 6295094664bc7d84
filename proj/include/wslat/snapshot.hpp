#pragma once

// Versioned JSON serialization of a full engine state: every processor, every
// in-flight message and the PRNG position. Restoring a snapshot and stepping
// it reproduces the original run exactly.

#include "wslat/engine.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace wslat
{
    inline constexpr const char *kSnapshotFormat = "wslat-engine-snapshot";
    inline constexpr int kSnapshotVersion = 1;

    nlohmann::json snapshot_to_json(const EngineState &state);

    /// Throws std::invalid_argument on a wrong format tag, unsupported
    /// version or inconsistent contents.
    EngineState snapshot_from_json(const nlohmann::json &doc);

    nlohmann::json to_json(const RunTrace &trace);
    RunTrace run_trace_from_json(const nlohmann::json &doc);
} // namespace wslat
