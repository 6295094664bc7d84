#include "oracles.hpp"

#include "wslat/engine.hpp"
#include "wslat/snapshot.hpp"

#include <doctest.h>

#include <map>
#include <numeric>

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

    // Every per-tick invariant of the model, checked on a live reference engine.
    void check_tick_invariants(const ReferenceEngine &eng, std::int64_t requests_this_tick)
    {
        const auto &cfg = eng.config();
        const auto w = eng.work();
        const auto s = eng.in_transit();
        const Work held = std::accumulate(w.begin(), w.end(), Work{0}) + std::accumulate(s.begin(), s.end(), Work{0});
        REQUIRE(held + eng.executed() == cfg.total_work);
        REQUIRE(requests_this_tick <= cfg.processors - 1);

        std::map<ProcId, int> transfers_from;
        std::map<ProcId, int> requests_from;
        for (const auto &m : eng.in_flight())
        {
            REQUIRE(m.arrives_at == m.sent_at + cfg.latency);
            if (m.kind == MessageKind::WorkTransfer)
            {
                REQUIRE(m.amount >= 1);
                ++transfers_from[m.src];
            }
            if (m.kind == MessageKind::StealRequest)
                ++requests_from[m.src];
        }
        for (ProcId i = 0; i < cfg.processors; ++i)
        {
            const auto st = eng.processor(i);
            REQUIRE(st.w >= 0);
            REQUIRE(transfers_from[i] <= 1);
            if (st.s > 0)
            {
                REQUIRE(st.status == ProcStatus::Transferring);
                REQUIRE(transfers_from[i] == 1);
                REQUIRE(st.transfer_until.has_value());
                REQUIRE(*st.transfer_until > eng.now());
                REQUIRE(*st.transfer_until <= eng.now() + cfg.latency);
            }
            if (st.status == ProcStatus::IdleAwaitingResponse)
            {
                REQUIRE(st.w == 0);
                REQUIRE(st.outstanding_request_target.has_value());
            }
            REQUIRE(requests_from[i] <= 1);
        }
    }

    RunTrace run_checked(const SimConfig &c, std::vector<StealEvent> *log = nullptr)
    {
        ReferenceEngine eng(c, log);
        check_tick_invariants(eng, 0);
        std::int64_t last_r_total = 0;
        while (!eng.finished())
        {
            eng.step();
            const auto &r = eng.trace().r_series;
            const std::int64_t r_total = std::accumulate(r.begin(), r.end(), std::int64_t{0});
            check_tick_invariants(eng, r_total - last_r_total);
            last_r_total = r_total;
        }
        return eng.trace();
    }
} // namespace

TEST_SUITE("engine")
{
    TEST_CASE("divide_work examples")
    {
        CHECK(divide_work(101, 10) == WorkSplit{55, 45});
        CHECK(divide_work(4, 1) == WorkSplit{2, 1});
        CHECK(divide_work(10, 2) == WorkSplit{6, 3});
        CHECK(divide_work(2, 1).transfer <= 0);
        CHECK_THROWS_AS(divide_work(0, 3), std::invalid_argument);
        CHECK_THROWS_AS(divide_work(5, 0), std::invalid_argument);
    }

    TEST_CASE("divide_work agrees with the brute-force split on a grid")
    {
        for (Tick lambda = 1; lambda <= 25; ++lambda)
            for (Work w = 1; w <= 400; ++w)
            {
                const auto split = divide_work(w, lambda);
                const auto [keep, transfer] = oracle::divide(w, lambda);
                REQUIRE(split.victim_keep == keep);
                REQUIRE(split.transfer == transfer);
                REQUIRE(split.victim_keep + split.transfer == w - 1);
                REQUIRE(split.transfer <= split.victim_keep - lambda + 1);
                REQUIRE((split.transfer >= 1) == (w >= min_stealable_work(lambda)));
            }
    }

    TEST_CASE("hand trace W=4 p=2 lambda=1 finishes at 3")
    {
        std::vector<StealEvent> log;
        const auto t = run_checked(make(4, 2, 1), &log);
        CHECK(t.makespan == 3);
        CHECK(t.steals_sent == 1);
        CHECK(t.steals_success == 1);
        CHECK(t.executed_total == 4);
        REQUIRE(log.size() == 1);
        CHECK(log[0] == StealEvent{1, 0, 1, StealOutcome::success, 1});
        CHECK(run_event(make(4, 2, 1)) == t);
    }

    TEST_CASE("hand trace W=2 p=2 lambda=1: the only steal fails")
    {
        const auto t = run_checked(make(2, 2, 1));
        CHECK(t.makespan == 2);
        CHECK(t.steals_success == 0);
        CHECK(t.steals_failed == 1);
        CHECK(run_event(make(2, 2, 1)) == t);
    }

    TEST_CASE("single processor never steals")
    {
        for (const auto kind : {EngineKind::reference, EngineKind::event})
        {
            auto c = make(1000, 1, 7);
            c.engine = kind;
            const auto t = run(c);
            CHECK(t.makespan == 1000);
            CHECK(t.steals_sent == 0);
            CHECK(t.executed_total == 1000);
        }
    }

    TEST_CASE("empty workload ends at time 0")
    {
        std::vector<StealEvent> log;
        const auto t = run_event(make(0, 8, 5), &log);
        CHECK(t.makespan == 0);
        CHECK(t.steals_success == 0);
        CHECK(log.empty());
        CHECK(t == run_reference(make(0, 8, 5)));
        CHECK(t.phi_series == std::vector<std::int64_t>{0});
    }

    TEST_CASE("invariants hold tick by tick on varied configs")
    {
        for (const std::int64_t p : {2, 3, 5, 16})
            for (const Tick lambda : {1, 2, 7, 30})
                for (const Work W : {1, 9, 250, 3000})
                    for (std::uint64_t seed = 0; seed < 3; ++seed)
                    {
                        CAPTURE(p);
                        CAPTURE(lambda);
                        CAPTURE(W);
                        const auto t = run_checked(make(W, p, lambda, seed));
                        CHECK(t.executed_total == W);
                        CHECK(t.makespan <= W + 2 * lambda * t.steals_sent);
                        CHECK(p * t.makespan <= W + 2 * lambda * t.steals_sent);
                    }
    }

    TEST_CASE("a victim serves at most one transfer per latency window")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed)
        {
            std::vector<StealEvent> log;
            const Tick lambda = 6;
            run_reference(make(5000, 12, lambda, seed), &log);
            std::map<ProcId, Tick> last_success;
            for (const auto &e : log)
            {
                if (e.outcome != StealOutcome::success)
                    continue;
                CHECK(e.amount >= 1);
                if (auto it = last_success.find(e.victim); it != last_success.end())
                    CHECK(e.t - it->second >= lambda);
                last_success[e.victim] = e.t;
            }
        }
    }

    TEST_CASE("thief and victim hold equal work when the split is even")
    {
        // W=102, λ=10: the request sent at 0 reaches P0 at t=10 with 93 units
        // left before the tick; 93-1-10 = 82 is even, so keep 51, send 41 and
        // at t=20 both hold 41.
        ReferenceEngine eng(make(102, 2, 10));
        while (eng.now() < 10)
            eng.step();
        CHECK(eng.work()[0] == 51);
        CHECK(eng.in_transit()[0] == 41);
        while (eng.now() < 20)
            eng.step();
        CHECK(eng.work()[0] == 41);
        CHECK(eng.work()[1] == 41);
        CHECK(eng.in_transit()[0] == 0);
    }

    TEST_CASE("identical configs give identical traces")
    {
        const auto c = make(50'000, 16, 9, 1234);
        CHECK(run_reference(c) == run_reference(c));
        CHECK(run_event(c) == run_event(c));
        CHECK(run_event(c) != run_event(make(50'000, 16, 9, 1235)));
    }

    TEST_CASE("event engine matches the reference on a large paper-scale cell")
    {
        const auto c = make(100'000, 32, 262, 99);
        std::vector<StealEvent> a;
        std::vector<StealEvent> b;
        const auto ref = run_reference(c, &a);
        const auto evt = run_event(c, &b);
        CHECK(evt == ref);
        CHECK(a == b);
        CHECK(evt.makespan > 100'000 / 32);
    }

    TEST_CASE("event engine matches the reference on a randomized small grid")
    {
        CounterRng rng(77);
        for (int i = 0; i < 300; ++i)
        {
            const auto c = make(static_cast<Work>(rng.uniform(20'000)), 1 + static_cast<std::int64_t>(rng.uniform(24)),
                                1 + static_cast<Tick>(rng.uniform(40)), rng.next());
            CAPTURE(c.total_work);
            CAPTURE(c.processors);
            CAPTURE(c.latency);
            std::vector<StealEvent> a;
            std::vector<StealEvent> b;
            REQUIRE(run_event(c, &b) == run_reference(c, &a));
            REQUIRE(a == b);
        }
    }

    TEST_CASE("trace series shapes")
    {
        const auto t = run_event(make(10'000, 8, 5, 3));
        const auto K = static_cast<std::size_t>((t.makespan + 4) / 5);
        CHECK(t.phi_series.size() == K + 1);
        CHECK(t.r_series.size() == K + 1);
        CHECK(t.r_series.front() == 0);
        CHECK(t.phi_series.front() == 10'000LL * 10'000LL);
        CHECK(t.phi_series.back() == 0);
        CHECK(t.R_until_tau == std::accumulate(t.r_series.begin(), t.r_series.begin() + t.tau, std::int64_t{0}));
    }

    TEST_CASE("snapshot round trip resumes the identical run")
    {
        const auto c = make(8'000, 6, 4, 21);
        const auto full = run_reference(c);
        ReferenceEngine eng(c);
        while (eng.now() < 40)
            eng.step();
        const auto doc = snapshot_to_json(eng.state());
        const auto restored = snapshot_from_json(nlohmann::json::parse(doc.dump()));
        CHECK(restored == eng.state());
        CHECK(ReferenceEngine(restored).run() == full);

        auto broken = doc;
        broken["version"] = 99;
        CHECK_THROWS_AS(snapshot_from_json(broken), std::invalid_argument);
        broken = doc;
        broken["w"][0] = broken["w"][0].get<Work>() + 1;
        CHECK_THROWS_AS(snapshot_from_json(broken), std::invalid_argument);
        broken = doc;
        broken["format"] = "other";
        CHECK_THROWS_AS(snapshot_from_json(broken), std::invalid_argument);
    }
}
