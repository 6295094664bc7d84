#include "wslat/analysis.hpp"
#include "wslat/probe.hpp"
#include "wslat/snapshot.hpp"

#include <doctest.h>

using namespace wslat;

namespace
{
    EngineState state_at(std::int64_t W, std::int64_t p, Tick lambda, std::uint64_t seed, std::int64_t k)
    {
        SimConfig c;
        c.total_work = W;
        c.processors = p;
        c.latency = lambda;
        c.seed = seed;
        ReferenceEngine eng(c);
        while (!eng.finished() && eng.now() < k * lambda)
            eng.step();
        return eng.state();
    }
} // namespace

TEST_SUITE("probe")
{
    TEST_CASE("first interval of a two-processor run contracts by a quarter at least")
    {
        const auto state = state_at(10'000, 2, 5, 3, 0);
        REQUIRE(requests_in_flight(state) == 1);
        const auto res = lemma1_probe(state, 400, 17);
        CHECK(res.k == 0);
        CHECK(res.r == 1);
        CHECK(res.bound == doctest::Approx(0.75));
        CHECK(res.mean_ratio <= 0.75);
        CHECK(res.within_bound);
        CHECK(res.min_ratio <= res.mean_ratio + 1e-12);
        CHECK(res.mean_ratio <= res.max_ratio + 1e-12);
        CHECK(res.max_ratio <= 1.0);
        CHECK(res.min_ratio >= 0.0);
    }

    TEST_CASE("no requests in flight means bound 1")
    {
        // Both processors of a p=2 run are busy once the first steal lands.
        auto state = state_at(10'000, 2, 5, 3, 4);
        REQUIRE(requests_in_flight(state) == 0);
        const auto res = lemma1_probe(state, 50, 1);
        CHECK(res.r == 0);
        CHECK(res.bound == doctest::Approx(1.0));
        CHECK(res.within_bound);
    }

    TEST_CASE("mid-run snapshots from JSON satisfy the contraction bound")
    {
        for (std::uint64_t seed = 0; seed < 6; ++seed)
        {
            const auto live = state_at(20'000, 8, 4, seed, 3 + static_cast<std::int64_t>(seed));
            const auto state = snapshot_from_json(nlohmann::json::parse(snapshot_to_json(live).dump()));
            const auto res = lemma1_probe(state, 300, seed + 100);
            CAPTURE(seed);
            CAPTURE(res.r);
            CHECK(res.bound == doctest::Approx(h_of_r(res.r, 8)));
            CHECK(res.within_bound);
        }
    }

    TEST_CASE("probe is deterministic in its seed")
    {
        const auto state = state_at(5'000, 4, 3, 9, 2);
        const auto a = lemma1_probe(state, 100, 5);
        const auto b = lemma1_probe(state, 100, 5);
        CHECK(a.mean_ratio == b.mean_ratio);
        CHECK(a.std_error == b.std_error);
        const auto lit = lemma1_probe(state, 100, 5, ProbeMode::reelect_only);
        CHECK(lit.r == a.r);
        CHECK(to_json(a)["ensemble"] == 100);
    }

    TEST_CASE("probe rejects unusable states")
    {
        const auto state = state_at(5'000, 4, 3, 9, 2);
        CHECK_THROWS_AS(lemma1_probe(state, 1, 0), std::invalid_argument);

        auto off = state;
        off.now += 1;
        CHECK_THROWS_AS(lemma1_probe(off, 10, 0), std::invalid_argument);

        SimConfig c;
        c.total_work = 20;
        c.processors = 2;
        c.latency = 2;
        ReferenceEngine eng(c);
        eng.run();
        CHECK_THROWS_AS(lemma1_probe(eng.state(), 10, 0), std::invalid_argument);

        c.processors = 1;
        CHECK_THROWS_AS(lemma1_probe(ReferenceEngine(c).state(), 10, 0), std::domain_error);
    }
}
