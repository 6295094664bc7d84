#pragma once

// Empirical check of the one-interval potential contraction
//   E[φ(k+1) | state at kλ] <= (1 - q(r)/4) φ(k)
// where r is the number of steal requests that arrive during (kλ, (k+1)λ].
// Those are exactly the requests in flight at the end of tick kλ.

#include "wslat/engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>

namespace wslat
{
    enum class ProbeMode
    {
        /// Re-draw the victim of every in-flight steal request (uniform over
        /// the other processors) as well as all elections. The conditioning
        /// treats request destinations as not yet known.
        redraw_targets,
        /// Keep in-flight destinations; only elections among simultaneous
        /// arrivals use fresh randomness.
        reelect_only
    };

    struct ProbeResult
    {
        std::int64_t k = 0;
        std::int64_t r = 0;
        std::int64_t phi_before = 0;
        std::int64_t ensemble = 0;
        double mean_ratio = 0.0;
        double std_error = 0.0;
        double min_ratio = 0.0;
        double max_ratio = 0.0;
        double bound = 1.0;
        /// mean_ratio <= bound + 2 std_error
        bool within_bound = false;
    };

    /// Runs `ensemble` independent one-interval continuations of a state
    /// frozen at a boundary kλ; continuation i draws from a stream keyed on
    /// (seed, i). Throws std::invalid_argument if the state is finished, not
    /// at a boundary, has φ = 0, or ensemble < 2; std::domain_error if p < 2.
    ProbeResult lemma1_probe(const EngineState &state, std::int64_t ensemble, std::uint64_t seed,
                             ProbeMode mode = ProbeMode::redraw_targets);

    /// Number of steal requests in flight, i.e. the r governing the next interval.
    std::int64_t requests_in_flight(const EngineState &state);

    nlohmann::json to_json(const ProbeResult &result);
} // namespace wslat
