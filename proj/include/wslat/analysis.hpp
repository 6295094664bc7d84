#pragma once

// Closed-form quantities of the potential-function makespan analysis, and
// extraction of the potential series from a run.

#include "wslat/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace wslat
{
    /// Probability that a given busy processor receives at least one of r
    /// steal requests, each aimed uniformly at one of the p-1 other processors:
    /// 1 - ((p-2)/(p-1))^r. Throws std::domain_error if p < 2 or r < 0.
    double q_of_r(std::int64_t r, std::int64_t p);

    /// Expected one-interval potential contraction factor 1 - q(r)/4.
    double h_of_r(std::int64_t r, std::int64_t p);

    /// f(r) = -log2(h(r)) = 2 - log2(3 + (1 - 1/(p-1))^r).
    double f_of_r(std::int64_t r, std::int64_t p);

    /// r / (p f(r)); gamma(p) is its maximum over r in 1..p-1.
    double gamma_term(std::int64_t r, std::int64_t p);

    /// Exhaustive maximum of gamma_term over r in {1, ..., p-1}.
    /// Throws std::domain_error if p < 2.
    double gamma(std::int64_t p);

    /// Limit of gamma(p) as p grows: 1 / (2 - log2(3 + 1/e)) ~ 4.0297.
    double gamma_cap();

    /// Universal constant used when a bound should not depend on p.
    inline constexpr double kGammaUniversal = 4.03;

    /// True when gamma_term(r, p) strictly increases over r = 1..p-1.
    bool gamma_term_increasing(std::int64_t p);

    struct BoundValue
    {
        double value = 0.0;
        /// The log argument was <= 1 and the log term was dropped.
        bool degenerate = false;
    };

    /// W/p + 4 λ γ log2(W/(2λ)) + 3λ with γ = gamma(p).
    BoundValue bound_expectation(std::int64_t W, std::int64_t p, std::int64_t lambda);
    BoundValue bound_expectation(std::int64_t W, std::int64_t p, std::int64_t lambda, double gamma_value);

    struct TailBound
    {
        double threshold = 0.0;  // bound_expectation + x
        double prob_paper = 1.0; // 2^-x, the form stated for the makespan
        double prob_proof = 1.0; // 2^-(x / (p γ)), the form the argument yields
    };

    /// Probability bounds for exceeding bound_expectation by x. Both forms are
    /// returned; they disagree by the factor p γ in the exponent.
    TailBound bound_tail(std::int64_t W, std::int64_t p, std::int64_t lambda, double x);

    /// Bound on the expected number of requests received before τ:
    /// 2 p γ log2(W/λ). Degenerate when W <= λ.
    BoundValue lemma2_bound_R(std::int64_t W, std::int64_t p, std::int64_t lambda);

    struct BoundReport
    {
        std::int64_t W = 0;
        std::int64_t p = 0;
        std::int64_t lambda = 0;
        double gamma = 0.0;
        BoundValue bound_expectation;
        BoundValue bound_expectation_universal; // with γ = 4.03
        BoundValue lemma2_bound_R;
        std::optional<TailBound> tail;
    };

    BoundReport bound_report(std::int64_t W, std::int64_t p, std::int64_t lambda, std::optional<double> x = {});
    nlohmann::json to_json(const BoundReport &report);

    struct PotentialSample
    {
        std::int64_t k = 0;
        std::int64_t phi = 0;
        std::int64_t r_k = 0;

        friend bool operator==(const PotentialSample &, const PotentialSample &) = default;
    };

    struct PotentialSeries
    {
        std::vector<PotentialSample> samples;
        std::int64_t tau = 0;
        std::int64_t R_until_tau = 0;
    };

    /// Pairs φ(k) with r_k and recomputes R_until_tau from the r series and
    /// the trace's τ.
    PotentialSeries extract_potential_series(const RunTrace &trace);

    /// First k whose potential increased over k-1, if any.
    std::optional<std::int64_t> first_potential_increase(const RunTrace &trace);
} // namespace wslat
