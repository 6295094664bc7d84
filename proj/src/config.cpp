#include "wslat/config.hpp"

#include <array>
#include <string_view>

namespace wslat
{
    std::string to_string(EngineKind kind) { return kind == EngineKind::reference ? "reference" : "event"; }

    std::string to_string(OverheadLogArg arg)
    {
        return arg == OverheadLogArg::W_over_lambda ? "W_over_lambda" : "W_over_2lambda";
    }

    std::string to_string(StealOutcome outcome) { return outcome == StealOutcome::success ? "success" : "fail"; }

    std::string to_string(ProcStatus status)
    {
        switch (status)
        {
        case ProcStatus::Working:
            return "Working";
        case ProcStatus::IdleAwaitingResponse:
            return "IdleAwaitingResponse";
        case ProcStatus::IdleFree:
            return "IdleFree";
        case ProcStatus::Transferring:
            return "Transferring";
        }
        return "?";
    }

    SimConfig validate(const SimConfig &config)
    {
        if (config.total_work < 0)
            throw ConfigError(ConfigErrorCode::NegativeWork, "total_work", "W must be ≥ 0");
        if (config.processors < 1)
            throw ConfigError(ConfigErrorCode::NonPositiveProcessors, "processors", "p must be ≥ 1");
        if (config.latency < 1)
            throw ConfigError(ConfigErrorCode::NonPositiveLatency, "latency", "lambda must be ≥ 1");
        if (config.replications < 1)
            throw ConfigError(ConfigErrorCode::NonPositiveReplications, "replications", "replications must be ≥ 1");
        return config;
    }

    EngineKind parse_engine_kind(const std::string &text)
    {
        if (text == "reference")
            return EngineKind::reference;
        if (text == "event")
            return EngineKind::event;
        throw ConfigError(ConfigErrorCode::BadValue, "engine", "engine must be 'reference' or 'event', got '" + text + "'");
    }

    OverheadLogArg parse_overhead_log_arg(const std::string &text)
    {
        if (text == "W_over_lambda")
            return OverheadLogArg::W_over_lambda;
        if (text == "W_over_2lambda")
            return OverheadLogArg::W_over_2lambda;
        throw ConfigError(ConfigErrorCode::BadValue, "overhead_log_arg",
                          "overhead_log_arg must be 'W_over_lambda' or 'W_over_2lambda', got '" + text + "'");
    }

    namespace
    {
        constexpr std::array<std::string_view, 7> kConfigKeys = {
            "total_work", "processors", "latency", "seed", "engine", "overhead_log_arg", "replications"};

        std::int64_t get_int(const nlohmann::json &doc, const char *key, std::int64_t fallback)
        {
            if (!doc.contains(key))
                return fallback;
            const auto &v = doc.at(key);
            if (!v.is_number_integer())
                throw ConfigError(ConfigErrorCode::BadValue, key, std::string(key) + " must be an integer");
            return v.get<std::int64_t>();
        }

        std::string get_string(const nlohmann::json &doc, const char *key, const std::string &fallback)
        {
            if (!doc.contains(key))
                return fallback;
            const auto &v = doc.at(key);
            if (!v.is_string())
                throw ConfigError(ConfigErrorCode::BadValue, key, std::string(key) + " must be a string");
            return v.get<std::string>();
        }
    } // namespace

    SimConfig config_from_json(const nlohmann::json &doc)
    {
        if (!doc.is_object())
            throw ConfigError(ConfigErrorCode::BadValue, "", "config must be a JSON object");
        for (const auto &item : doc.items())
        {
            bool known = false;
            for (const auto key : kConfigKeys)
                known = known || item.key() == key;
            if (!known)
                throw ConfigError(ConfigErrorCode::UnknownKey, item.key(), "unknown config key '" + item.key() + "'");
        }
        SimConfig c;
        c.total_work = get_int(doc, "total_work", c.total_work);
        c.processors = get_int(doc, "processors", c.processors);
        c.latency = get_int(doc, "latency", c.latency);
        if (doc.contains("seed"))
        {
            const auto &v = doc.at("seed");
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                throw ConfigError(ConfigErrorCode::BadValue, "seed", "seed must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        }
        c.engine = parse_engine_kind(get_string(doc, "engine", to_string(c.engine)));
        c.overhead_log_arg = parse_overhead_log_arg(get_string(doc, "overhead_log_arg", to_string(c.overhead_log_arg)));
        c.replications = get_int(doc, "replications", c.replications);
        return validate(c);
    }

    nlohmann::json config_to_json(const SimConfig &config)
    {
        return nlohmann::json{{"total_work", config.total_work},
                              {"processors", config.processors},
                              {"latency", config.latency},
                              {"seed", config.seed},
                              {"engine", to_string(config.engine)},
                              {"overhead_log_arg", to_string(config.overhead_log_arg)},
                              {"replications", config.replications}};
    }
} // namespace wslat
