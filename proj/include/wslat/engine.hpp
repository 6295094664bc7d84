#pragma once

// Work stealing with a fixed communication latency λ on p identical
// processors holding W unit tasks, all initially on processor 0.
//
// Every tick t runs these phases in order:
//   A  deliver every message with arrives_at == t
//   B  each processor that received steal requests and is not transferring
//      elects one of them uniformly at random (in thief-id order, drawing only
//      when there are two or more) and answers the rest with a fail response;
//      the elected request is served iff divide_work leaves the thief >= 1
//      unit. Transferring victims fail every request without an election.
//   C  every processor with work executes one unit (a victim served in B has
//      already folded this tick's unit into its share)
//   D  work transfers delivered in A are credited to their thieves
//   -  the run ends at the first t with no work left anywhere
//   E  every processor with no work, nothing in transit and no outstanding
//      request sends a steal request to a uniformly chosen other processor
//
// Victims are handled in increasing id order in B and emitters in
// increasing id order in E; this fixes the order of random draws so that both
// engines consume the stream identically.

#include "wslat/rng.hpp"
#include "wslat/types.hpp"

#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

namespace wslat
{
    struct WorkSplit
    {
        Work victim_keep = 0;
        Work transfer = 0;

        friend bool operator==(const WorkSplit &, const WorkSplit &) = default;
    };

    /// Splits the victim's work when a steal request is served at a tick in
    /// which the victim also executes one unit:
    /// keep = ceil((w_before - 1 + λ) / 2), transfer = w_before - 1 - keep.
    /// A transfer below 1 means the steal must be refused. Throws
    /// std::invalid_argument if w_before < 1 or latency < 1.
    WorkSplit divide_work(Work w_before, Tick latency);

    /// Smallest victim work (before the tick's execution) for which a steal
    /// request is served: λ + 3.
    constexpr Work min_stealable_work(Tick latency) noexcept { return latency + 3; }

    /// Complete mutable state of a tick-stepped run; this is also what a
    /// snapshot stores.
    struct EngineState
    {
        SimConfig config;
        Tick now = 0;
        bool finished = false;
        std::vector<Work> w;
        std::vector<Work> s;
        std::vector<ProcId> outstanding; // kNoProc when no request is pending
        std::deque<Message> in_flight;   // ordered by arrives_at
        CounterRng rng;
        Work executed = 0;
        Work in_transit = 0;
        std::int64_t transfers_in_flight = 0;
        RunTrace trace; // observables accumulated so far
        bool tau_found = false;

        friend bool operator==(const EngineState &, const EngineState &) = default;
    };

    /// PRNG key of the victim-choice stream for a run.
    std::uint64_t stream_key(std::uint64_t seed) noexcept;

    /// Literal unit-time-step engine. Each call to step() runs phases A-E of
    /// the next tick.
    class ReferenceEngine
    {
    public:
        explicit ReferenceEngine(const SimConfig &config, std::vector<StealEvent> *steal_log = nullptr);
        explicit ReferenceEngine(EngineState state, std::vector<StealEvent> *steal_log = nullptr);

        bool finished() const noexcept { return state_.finished; }
        Tick now() const noexcept { return state_.now; }

        void step();
        /// Runs until termination and returns the trace.
        RunTrace run();

        const SimConfig &config() const noexcept { return state_.config; }
        std::span<const Work> work() const noexcept { return state_.w; }
        std::span<const Work> in_transit() const noexcept { return state_.s; }
        Work executed() const noexcept { return state_.executed; }
        const std::deque<Message> &in_flight() const noexcept { return state_.in_flight; }
        ProcessorState processor(ProcId id) const;
        std::int64_t potential() const;
        const RunTrace &trace() const noexcept { return state_.trace; }

        const EngineState &state() const noexcept { return state_; }
        EngineState &mutable_state() noexcept { return state_; }

    private:
        void sample_boundary();
        void emit_requests();
        void send(MessageKind kind, ProcId src, ProcId dst, Work amount);

        EngineState state_;
        std::vector<StealEvent> *log_;
        // scratch reused across ticks
        std::vector<std::vector<ProcId>> requests_;
        std::vector<ProcId> victims_;
        std::vector<std::pair<ProcId, Work>> credits_;
    };

    RunTrace run_reference(const SimConfig &config, std::vector<StealEvent> *steal_log = nullptr);

    /// Event-driven engine: jumps straight between message arrivals and
    /// work-exhaustion instants. Produces the same RunTrace and steal log as
    /// run_reference for the same config.
    RunTrace run_event(const SimConfig &config, std::vector<StealEvent> *steal_log = nullptr);

    /// Dispatches on config.engine.
    RunTrace run(const SimConfig &config, std::vector<StealEvent> *steal_log = nullptr);

    /// Potential of the current state of a raw EngineState.
    std::int64_t state_potential(const EngineState &state);
} // namespace wslat
