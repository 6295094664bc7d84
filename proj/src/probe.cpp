#include "wslat/probe.hpp"

#include "wslat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wslat
{
    std::int64_t requests_in_flight(const EngineState &state)
    {
        return std::count_if(state.in_flight.begin(), state.in_flight.end(),
                             [](const Message &m)
                             { return m.kind == MessageKind::StealRequest; });
    }

    ProbeResult lemma1_probe(const EngineState &state, std::int64_t ensemble, std::uint64_t seed, ProbeMode mode)
    {
        const auto &cfg = state.config;
        const Tick lambda = cfg.latency;
        if (cfg.processors < 2)
            throw std::domain_error("probe needs p >= 2");
        if (state.finished)
            throw std::invalid_argument("probe: state has already finished");
        if (state.now % lambda != 0)
            throw std::invalid_argument("probe: state is not at an interval boundary");
        if (ensemble < 2)
            throw std::invalid_argument("probe: ensemble must be >= 2");

        ProbeResult res;
        res.k = state.now / lambda;
        res.r = requests_in_flight(state);
        res.phi_before = state_potential(state);
        res.ensemble = ensemble;
        if (res.phi_before == 0)
            throw std::invalid_argument("probe: potential is zero");
        res.bound = h_of_r(res.r, cfg.processors);

        const auto others = static_cast<std::uint64_t>(cfg.processors - 1);
        double sum = 0.0;
        double sum_sq = 0.0;
        res.min_ratio = 1e300;
        res.max_ratio = -1e300;
        for (std::int64_t i = 0; i < ensemble; ++i)
        {
            const std::uint64_t key = hash_combine(hash_combine(seed, static_cast<std::uint64_t>(i)), 0x70726f6265ULL);
            EngineState copy = state;
            copy.rng = CounterRng(hash_combine(key, 1));
            if (mode == ProbeMode::redraw_targets)
            {
                CounterRng targets(hash_combine(key, 2));
                for (auto &m : copy.in_flight)
                {
                    if (m.kind != MessageKind::StealRequest)
                        continue;
                    auto dst = static_cast<ProcId>(targets.uniform(others));
                    if (dst >= m.src)
                        ++dst;
                    m.dst = dst;
                    copy.outstanding[static_cast<std::size_t>(m.src)] = dst;
                }
            }
            ReferenceEngine eng(std::move(copy));
            for (Tick j = 0; j < lambda && !eng.finished(); ++j)
                eng.step();
            const double ratio = static_cast<double>(eng.potential()) / static_cast<double>(res.phi_before);
            sum += ratio;
            sum_sq += ratio * ratio;
            res.min_ratio = std::min(res.min_ratio, ratio);
            res.max_ratio = std::max(res.max_ratio, ratio);
        }
        const auto n = static_cast<double>(ensemble);
        res.mean_ratio = sum / n;
        const double var = std::max(0.0, (sum_sq - n * res.mean_ratio * res.mean_ratio) / (n - 1.0));
        res.std_error = std::sqrt(var / n);
        res.within_bound = res.mean_ratio <= res.bound + 2.0 * res.std_error;
        return res;
    }

    nlohmann::json to_json(const ProbeResult &r)
    {
        return nlohmann::json{{"k", r.k},
                              {"r", r.r},
                              {"phi_before", r.phi_before},
                              {"ensemble", r.ensemble},
                              {"mean_ratio", r.mean_ratio},
                              {"std_error", r.std_error},
                              {"min_ratio", r.min_ratio},
                              {"max_ratio", r.max_ratio},
                              {"bound", r.bound},
                              {"within_bound", r.within_bound}};
    }
} // namespace wslat
