#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wslat
{
    using Tick = std::int64_t;
    using Work = std::int64_t;
    using ProcId = std::int32_t;

    inline constexpr ProcId kNoProc = -1;

    enum class EngineKind
    {
        reference,
        event
    };

    /// Which log argument the overhead ratio uses: log2(W/λ) as in the
    /// measured-ratio definition, or log2(W/(2λ)) as in the makespan bound.
    enum class OverheadLogArg
    {
        W_over_lambda,
        W_over_2lambda
    };

    struct SimConfig
    {
        Work total_work = 0;
        std::int64_t processors = 1;
        Tick latency = 1;
        std::uint64_t seed = 0;
        EngineKind engine = EngineKind::event;
        OverheadLogArg overhead_log_arg = OverheadLogArg::W_over_lambda;
        std::int64_t replications = 1;

        friend bool operator==(const SimConfig &, const SimConfig &) = default;
    };

    enum class ProcStatus
    {
        Working,
        IdleAwaitingResponse,
        IdleFree,
        Transferring
    };

    /// Per-processor view. `w` is the local work, `s` the work in transit
    /// from this processor (non-zero only while its single channel is busy).
    struct ProcessorState
    {
        Work w = 0;
        Work s = 0;
        ProcStatus status = ProcStatus::IdleFree;
        std::optional<Tick> transfer_until;
        std::optional<ProcId> outstanding_request_target;

        friend bool operator==(const ProcessorState &, const ProcessorState &) = default;
    };

    enum class MessageKind : std::uint8_t
    {
        StealRequest,
        WorkTransfer,
        FailResponse
    };

    struct Message
    {
        MessageKind kind = MessageKind::StealRequest;
        ProcId src = 0;
        ProcId dst = 0;
        Tick sent_at = 0;
        Tick arrives_at = 0;
        Work amount = 0; // WorkTransfer only

        friend bool operator==(const Message &, const Message &) = default;
    };

    enum class StealOutcome : std::uint8_t
    {
        success,
        fail
    };

    /// One answered steal request, recorded at the tick the victim handles it.
    struct StealEvent
    {
        Tick t = 0;
        ProcId victim = 0;
        ProcId thief = 0;
        StealOutcome outcome = StealOutcome::fail;
        Work amount = 0;

        friend bool operator==(const StealEvent &, const StealEvent &) = default;
    };

    /// Observables of one run.
    ///
    /// `phi_series[k]` is the potential sum_i w_i^2 + 2 s_i^2 at the end of
    /// tick kλ, for k = 0 .. ceil(makespan/λ). `r_series[k]` counts steal
    /// requests arriving in ((k-1)λ, kλ]; r_series[0] is always 0.
    /// `tau` is the first k with every w_i(kλ) <= 3λ and
    /// `R_until_tau` = sum of r_series[0 .. tau-1].
    struct RunTrace
    {
        Tick makespan = 0;
        std::int64_t steals_sent = 0;
        std::int64_t steals_success = 0;
        std::int64_t steals_failed = 0;
        std::vector<std::int64_t> r_series;
        std::vector<std::int64_t> phi_series;
        std::int64_t tau = 0;
        std::int64_t R_until_tau = 0;
        Work executed_total = 0;

        friend bool operator==(const RunTrace &, const RunTrace &) = default;
    };

    std::string to_string(EngineKind kind);
    std::string to_string(OverheadLogArg arg);
    std::string to_string(StealOutcome outcome);
    std::string to_string(ProcStatus status);
} // namespace wslat
