#include "oracles.hpp"

#include "wslat/analysis.hpp"
#include "wslat/engine.hpp"

#include <doctest.h>

#include <cmath>

using namespace wslat;

TEST_SUITE("analysis")
{
    TEST_CASE("q and h on small cases")
    {
        CHECK(q_of_r(0, 5) == doctest::Approx(0.0));
        CHECK(q_of_r(1, 2) == doctest::Approx(1.0));
        CHECK(q_of_r(5, 2) == doctest::Approx(1.0));
        CHECK(q_of_r(1, 5) == doctest::Approx(0.25));
        CHECK(q_of_r(2, 5) == doctest::Approx(1.0 - 9.0 / 16.0));
        CHECK(h_of_r(1, 2) == doctest::Approx(0.75));
        CHECK(h_of_r(0, 9) == doctest::Approx(1.0));
        CHECK(f_of_r(1, 2) == doctest::Approx(-std::log2(0.75)));
        CHECK_THROWS_AS(q_of_r(1, 1), std::domain_error);
        CHECK_THROWS_AS(q_of_r(-1, 4), std::domain_error);
        CHECK_THROWS_AS(wslat::gamma(1), std::domain_error);
    }

    TEST_CASE("gamma matches the long-double definition")
    {
        CHECK(wslat::gamma(2) == doctest::Approx(oracle::kGamma2).epsilon(1e-12));
        CHECK(wslat::gamma(3) == doctest::Approx(oracle::kGamma3).epsilon(1e-12));
        CHECK(wslat::gamma(32) == doctest::Approx(oracle::kGamma32).epsilon(1e-12));
        CHECK(wslat::gamma(256) == doctest::Approx(oracle::kGamma256).epsilon(1e-12));
        CHECK(wslat::gamma(512) == doctest::Approx(oracle::kGamma512).epsilon(1e-12));
        CHECK(gamma_cap() == doctest::Approx(oracle::kGammaCap).epsilon(1e-12));
        for (std::int64_t p = 2; p <= 200; p += 7)
            CHECK(wslat::gamma(p) == doctest::Approx(static_cast<double>(oracle::gamma(p))).epsilon(1e-10));
    }

    TEST_CASE("gamma is increasing, below the cap and maximised at r = p-1")
    {
        double prev = 0.0;
        for (std::int64_t p = 2; p <= 512; ++p)
        {
            const double g = wslat::gamma(p);
            REQUIRE(g > prev);
            REQUIRE(g < kGammaUniversal);
            REQUIRE(g < gamma_cap());
            REQUIRE(gamma_term_increasing(p));
            REQUIRE(g == doctest::Approx(gamma_term(p - 1, p)));
            prev = g;
        }
    }

    TEST_CASE("expectation bound")
    {
        const auto exact = bound_expectation(100'000, 32, 2);
        CHECK_FALSE(exact.degenerate);
        CHECK(exact.value == doctest::Approx(oracle::kBoundExact).epsilon(1e-12));
        const auto universal = bound_expectation(100'000, 32, 2, kGammaUniversal);
        CHECK(universal.value == doctest::Approx(oracle::kBoundUniversal).epsilon(1e-12));

        const auto degenerate = bound_expectation(4, 2, 2);
        CHECK(degenerate.degenerate);
        CHECK(degenerate.value == doctest::Approx(4.0 / 2 + 3 * 2));
    }

    TEST_CASE("tail bound keeps both exponents")
    {
        const auto t = bound_tail(1000, 2, 1, 10.0);
        CHECK(t.threshold == doctest::Approx(bound_expectation(1000, 2, 1).value + 10.0));
        CHECK(t.prob_paper == doctest::Approx(std::exp2(-10.0)));
        CHECK(t.prob_proof == doctest::Approx(0.056313514709472615).epsilon(1e-12));
        CHECK(bound_tail(1000, 2, 1, 0.0).prob_paper == doctest::Approx(1.0));
        CHECK_THROWS_AS(bound_tail(1000, 2, 1, -1.0), std::domain_error);
    }

    TEST_CASE("request-count bound")
    {
        const auto b = lemma2_bound_R(20, 2, 10);
        CHECK_FALSE(b.degenerate);
        CHECK(b.value == doctest::Approx(4.818841679306416).epsilon(1e-12));
        CHECK(lemma2_bound_R(10, 2, 10).degenerate);
    }

    TEST_CASE("bound report JSON carries every field")
    {
        const auto j = to_json(bound_report(100'000, 32, 2, 5.0));
        for (const char *key : {"W", "p", "lambda", "gamma", "bound_expectation", "bound_expectation_universal_gamma",
                                "bound_degenerate_log", "lemma2_bound_R", "lemma2_degenerate_log", "tail"})
            CHECK(j.contains(key));
        CHECK(j["tail"].contains("prob_proof"));
        CHECK_FALSE(to_json(bound_report(100'000, 32, 2)).contains("tail"));
    }

    TEST_CASE("single processor potential is (W - kλ)^2")
    {
        SimConfig c;
        c.total_work = 95;
        c.processors = 1;
        c.latency = 10;
        const auto series = extract_potential_series(run_reference(c));
        REQUIRE(series.samples.size() == 11);
        for (const auto &s : series.samples)
        {
            const std::int64_t left = std::max<std::int64_t>(0, 95 - s.k * 10);
            CHECK(s.phi == left * left);
            CHECK(s.r_k == 0);
        }
    }

    TEST_CASE("potential series of a stealing run")
    {
        SimConfig c;
        c.total_work = 30'000;
        c.processors = 16;
        c.latency = 7;
        c.seed = 5;
        const auto trace = run_event(c);
        const auto series = extract_potential_series(trace);
        REQUIRE(!series.samples.empty());
        CHECK(series.samples.front().phi == 30'000LL * 30'000LL);
        CHECK(series.samples.back().phi == 0);
        CHECK(series.tau == trace.tau);
        CHECK(series.R_until_tau == trace.R_until_tau);
        CHECK_FALSE(first_potential_increase(trace).has_value());

        RunTrace bumped = trace;
        bumped.phi_series[2] = bumped.phi_series[1] + 1;
        CHECK(first_potential_increase(bumped) == 2);
    }
}
