#include "wslat/config.hpp"
#include "wslat/rng.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace wslat;

namespace
{
    SimConfig make(std::int64_t W, std::int64_t p, std::int64_t lambda, std::uint64_t seed = 1)
    {
        SimConfig c;
        c.total_work = W;
        c.processors = p;
        c.latency = lambda;
        c.seed = seed;
        return c;
    }

    ConfigErrorCode code_of(const SimConfig &c)
    {
        try
        {
            validate(c);
        }
        catch (const ConfigError &e)
        {
            return e.code();
        }
        FAIL("expected a ConfigError");
        return ConfigErrorCode::BadValue;
    }
} // namespace

TEST_SUITE("model")
{
    TEST_CASE("validate accepts legal configs unchanged")
    {
        const auto c = make(100, 4, 5);
        CHECK(validate(c) == c);
        CHECK(validate(make(0, 1, 1)) == make(0, 1, 1));
    }

    TEST_CASE("validate rejects zero latency and zero processors")
    {
        CHECK(code_of(make(100, 4, 0)) == ConfigErrorCode::NonPositiveLatency);
        CHECK(code_of(make(100, 0, 3)) == ConfigErrorCode::NonPositiveProcessors);
        CHECK(code_of(make(-1, 2, 3)) == ConfigErrorCode::NegativeWork);
        auto c = make(10, 2, 2);
        c.replications = 0;
        CHECK(code_of(c) == ConfigErrorCode::NonPositiveReplications);
    }

    TEST_CASE("latency error names the flag and the rule")
    {
        try
        {
            validate(make(100, 4, 0));
            FAIL("no throw");
        }
        catch (const ConfigError &e)
        {
            CHECK(e.field() == "latency");
            CHECK(std::string(e.what()) == "lambda must be ≥ 1");
        }
    }

    TEST_CASE("config JSON mirrors SimConfig and rejects unknown keys")
    {
        CounterRng rng(42);
        for (int i = 0; i < 50; ++i)
        {
            SimConfig c = make(static_cast<std::int64_t>(rng.uniform(1'000'000)), 1 + static_cast<std::int64_t>(rng.uniform(300)),
                               1 + static_cast<std::int64_t>(rng.uniform(600)), rng.next());
            c.engine = rng.uniform(2) ? EngineKind::event : EngineKind::reference;
            c.overhead_log_arg = rng.uniform(2) ? OverheadLogArg::W_over_lambda : OverheadLogArg::W_over_2lambda;
            c.replications = 1 + static_cast<std::int64_t>(rng.uniform(9));
            CHECK(config_from_json(config_to_json(c)) == c);
        }

        auto doc = config_to_json(make(10, 2, 2));
        doc["lambda"] = 3; // the field is called latency
        CHECK_THROWS_AS(config_from_json(doc), ConfigError);
        try
        {
            config_from_json(doc);
        }
        catch (const ConfigError &e)
        {
            CHECK(e.code() == ConfigErrorCode::UnknownKey);
            CHECK(e.field() == "lambda");
        }

        CHECK_THROWS_AS(config_from_json(nlohmann::json{{"latency", 0}}), ConfigError);
        CHECK_THROWS_AS(config_from_json(nlohmann::json{{"engine", "fast"}}), ConfigError);
        CHECK_THROWS_AS(config_from_json(nlohmann::json{{"processors", "4"}}), ConfigError);
        CHECK_THROWS_AS(config_from_json(nlohmann::json{{"seed", -3}}), ConfigError);
    }

    TEST_CASE("counter stream is a pure function of key and position")
    {
        CounterRng a(7);
        for (int i = 0; i < 100; ++i)
            a.next();
        CounterRng b(a.key(), a.counter());
        for (int i = 0; i < 100; ++i)
            CHECK(a.next() == b.next());
        CHECK(CounterRng(1).next() != CounterRng(2).next());
    }

    TEST_CASE("bounded draws stay in range and are close to uniform")
    {
        CounterRng rng(2024);
        constexpr std::uint64_t bound = 7;
        constexpr int draws = 70'000;
        std::array<int, bound> counts{};
        for (int i = 0; i < draws; ++i)
        {
            const auto x = rng.uniform(bound);
            REQUIRE(x < bound);
            ++counts[x];
        }
        double chi2 = 0.0;
        const double expected = static_cast<double>(draws) / bound;
        for (const int c : counts)
            chi2 += (c - expected) * (c - expected) / expected;
        // 6 degrees of freedom, p = 0.001 critical value
        CHECK(chi2 < 22.46);
        CHECK(rng.uniform(1) == 0);
    }
}
