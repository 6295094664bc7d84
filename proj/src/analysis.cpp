#include "wslat/analysis.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wslat
{
    namespace
    {
        void require_p(std::int64_t p)
        {
            if (p < 2)
                throw std::domain_error("p must be >= 2, got " + std::to_string(p));
        }

        void require_r(std::int64_t r)
        {
            if (r < 0)
                throw std::domain_error("r must be >= 0, got " + std::to_string(r));
        }

        double log_term(double ratio, bool &degenerate)
        {
            degenerate = !(ratio > 1.0);
            return degenerate ? 0.0 : std::log2(ratio);
        }
    } // namespace

    double q_of_r(std::int64_t r, std::int64_t p)
    {
        require_p(p);
        require_r(r);
        if (p == 2)
            return r == 0 ? 0.0 : 1.0;
        const double miss = static_cast<double>(p - 2) / static_cast<double>(p - 1);
        return 1.0 - std::pow(miss, static_cast<double>(r));
    }

    double h_of_r(std::int64_t r, std::int64_t p) { return 1.0 - q_of_r(r, p) / 4.0; }

    double f_of_r(std::int64_t r, std::int64_t p)
    {
        require_p(p);
        require_r(r);
        const double v = 1.0 - 1.0 / static_cast<double>(p - 1);
        return 2.0 - std::log2(3.0 + std::pow(v, static_cast<double>(r)));
    }

    double gamma_term(std::int64_t r, std::int64_t p)
    {
        return static_cast<double>(r) / (static_cast<double>(p) * f_of_r(r, p));
    }

    double gamma(std::int64_t p)
    {
        require_p(p);
        double best = 0.0;
        for (std::int64_t r = 1; r <= p - 1; ++r)
            best = std::max(best, gamma_term(r, p));
        return best;
    }

    double gamma_cap() { return 1.0 / (2.0 - std::log2(3.0 + std::exp(-1.0))); }

    bool gamma_term_increasing(std::int64_t p)
    {
        require_p(p);
        for (std::int64_t r = 1; r + 1 <= p - 1; ++r)
            if (!(gamma_term(r + 1, p) > gamma_term(r, p)))
                return false;
        return true;
    }

    BoundValue bound_expectation(std::int64_t W, std::int64_t p, std::int64_t lambda, double gamma_value)
    {
        BoundValue out;
        const double l = static_cast<double>(lambda);
        const double lg = log_term(static_cast<double>(W) / (2.0 * l), out.degenerate);
        out.value = static_cast<double>(W) / static_cast<double>(p) + 4.0 * l * gamma_value * lg + 3.0 * l;
        return out;
    }

    BoundValue bound_expectation(std::int64_t W, std::int64_t p, std::int64_t lambda)
    {
        return bound_expectation(W, p, lambda, gamma(p));
    }

    TailBound bound_tail(std::int64_t W, std::int64_t p, std::int64_t lambda, double x)
    {
        if (!(x >= 0.0))
            throw std::domain_error("x must be >= 0");
        const double g = gamma(p);
        TailBound out;
        out.threshold = bound_expectation(W, p, lambda, g).value + x;
        out.prob_paper = std::exp2(-x);
        out.prob_proof = std::exp2(-x / (static_cast<double>(p) * g));
        return out;
    }

    BoundValue lemma2_bound_R(std::int64_t W, std::int64_t p, std::int64_t lambda)
    {
        BoundValue out;
        const double lg = log_term(static_cast<double>(W) / static_cast<double>(lambda), out.degenerate);
        out.value = 2.0 * static_cast<double>(p) * gamma(p) * lg;
        return out;
    }

    BoundReport bound_report(std::int64_t W, std::int64_t p, std::int64_t lambda, std::optional<double> x)
    {
        BoundReport rep;
        rep.W = W;
        rep.p = p;
        rep.lambda = lambda;
        rep.gamma = gamma(p);
        rep.bound_expectation = bound_expectation(W, p, lambda, rep.gamma);
        rep.bound_expectation_universal = bound_expectation(W, p, lambda, kGammaUniversal);
        rep.lemma2_bound_R = lemma2_bound_R(W, p, lambda);
        if (x)
            rep.tail = bound_tail(W, p, lambda, *x);
        return rep;
    }

    nlohmann::json to_json(const BoundReport &report)
    {
        nlohmann::json j{{"W", report.W},
                         {"p", report.p},
                         {"lambda", report.lambda},
                         {"gamma", report.gamma},
                         {"bound_expectation", report.bound_expectation.value},
                         {"bound_expectation_universal_gamma", report.bound_expectation_universal.value},
                         {"bound_degenerate_log", report.bound_expectation.degenerate},
                         {"lemma2_bound_R", report.lemma2_bound_R.value},
                         {"lemma2_degenerate_log", report.lemma2_bound_R.degenerate}};
        if (report.tail)
            j["tail"] = nlohmann::json{{"threshold", report.tail->threshold},
                                       {"prob_paper", report.tail->prob_paper},
                                       {"prob_proof", report.tail->prob_proof}};
        return j;
    }

    PotentialSeries extract_potential_series(const RunTrace &trace)
    {
        PotentialSeries out;
        out.samples.reserve(trace.phi_series.size());
        for (std::size_t k = 0; k < trace.phi_series.size(); ++k)
        {
            const std::int64_t r = k < trace.r_series.size() ? trace.r_series[k] : 0;
            out.samples.push_back({static_cast<std::int64_t>(k), trace.phi_series[k], r});
        }
        out.tau = trace.tau;
        const auto end = std::min<std::size_t>(static_cast<std::size_t>(trace.tau), trace.r_series.size());
        out.R_until_tau = std::accumulate(trace.r_series.begin(), trace.r_series.begin() + static_cast<std::ptrdiff_t>(end),
                                          std::int64_t{0});
        return out;
    }

    std::optional<std::int64_t> first_potential_increase(const RunTrace &trace)
    {
        for (std::size_t k = 1; k < trace.phi_series.size(); ++k)
            if (trace.phi_series[k] > trace.phi_series[k - 1])
                return static_cast<std::int64_t>(k);
        return std::nullopt;
    }
} // namespace wslat
