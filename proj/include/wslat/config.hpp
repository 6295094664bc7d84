#pragma once

#include "wslat/types.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace wslat
{
    enum class ConfigErrorCode
    {
        NonPositiveLatency,
        NonPositiveProcessors,
        NegativeWork,
        NonPositiveReplications,
        UnknownKey,
        BadValue
    };

    class ConfigError : public std::invalid_argument
    {
    public:
        ConfigError(ConfigErrorCode code, const std::string &field, const std::string &what)
            : std::invalid_argument(what), code_(code), field_(field) {}

        ConfigErrorCode code() const noexcept { return code_; }
        /// Name of the offending field or flag.
        const std::string &field() const noexcept { return field_; }

    private:
        ConfigErrorCode code_;
        std::string field_;
    };

    /// Returns the config unchanged when W >= 0, p >= 1, λ >= 1 and
    /// replications >= 1; throws ConfigError otherwise.
    SimConfig validate(const SimConfig &config);

    EngineKind parse_engine_kind(const std::string &text);
    OverheadLogArg parse_overhead_log_arg(const std::string &text);

    /// Flat JSON object with exactly the SimConfig field names. Missing keys
    /// keep their defaults; unknown keys are rejected. The result is validated.
    SimConfig config_from_json(const nlohmann::json &doc);
    nlohmann::json config_to_json(const SimConfig &config);
} // namespace wslat
