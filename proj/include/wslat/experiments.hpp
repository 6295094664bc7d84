#pragma once

#include "wslat/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wslat
{
    class BudgetExceeded : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class InsufficientData : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct SweepSpec
    {
        std::vector<std::int64_t> W_values;
        std::vector<std::int64_t> p_values;
        std::vector<std::int64_t> lambda_values;
        std::int64_t replications = 100;
        std::uint64_t base_seed = 0;
        EngineKind engine = EngineKind::event;
        OverheadLogArg overhead_log_arg = OverheadLogArg::W_over_lambda;
        /// Upper bound on cells x replications.
        std::int64_t budget = 1'000'000;
        /// 0 means WS_SIM_THREADS or the hardware concurrency.
        unsigned threads = 0;
    };

    /// Desk-scale grid: W in {1e5, 1e6, 1e7}, p in {32, 64, 128, 256},
    /// λ in {2, 32, 262}, 100 replications.
    SweepSpec default_sweep_spec();

    /// Throws ConfigError on empty lists or invalid values.
    void validate(const SweepSpec &spec);

    /// Keys: W_values, p_values, lambda_values, replications, base_seed,
    /// engine, overhead_log_arg, budget, threads. Unknown keys are rejected.
    SweepSpec sweep_spec_from_json(const nlohmann::json &doc);

    /// Seed of replication i of cell (W, p, λ).
    std::uint64_t cell_seed(std::uint64_t base_seed, std::int64_t W, std::int64_t p, std::int64_t lambda,
                            std::int64_t replication) noexcept;

    /// One line of the sweep CSV.
    struct RunRecord
    {
        std::int64_t W = 0;
        std::int64_t p = 0;
        std::int64_t lambda = 0;
        std::uint64_t seed = 0;
        Tick makespan = 0;
        std::int64_t steals_sent = 0;
        std::int64_t steals_success = 0;
        std::int64_t steals_failed = 0;
        std::int64_t tau = 0;
        std::int64_t R_until_tau = 0;
        std::int64_t requests_received = 0;
        bool potential_monotone = true;
        std::optional<double> bound_theorem;  // absent for p = 1
        std::optional<double> overhead_ratio; // absent when undefined
    };

    RunRecord make_record(const SimConfig &config, const RunTrace &trace);

    /// min, quartiles (linear interpolation between order statistics) and max.
    struct Summary
    {
        double mean = 0.0;
        double min = 0.0;
        double q1 = 0.0;
        double median = 0.0;
        double q3 = 0.0;
        double max = 0.0;
        std::int64_t count = 0;
    };

    /// Throws std::invalid_argument on an empty sample.
    Summary summarize(std::vector<double> values);

    struct OverheadSummary
    {
        std::optional<Summary> ratio; // absent when every run was excluded
        std::int64_t excluded = 0;
    };

    /// (4 γ(p) λ log2(arg) + 3λ) / (makespan - W/p) with arg = W/λ or W/(2λ).
    /// Empty when p < 2 or makespan <= W/p.
    std::optional<double> overhead_ratio(std::int64_t W, std::int64_t p, std::int64_t lambda, Tick makespan,
                                         OverheadLogArg form);

    struct CellStats
    {
        std::int64_t W = 0;
        std::int64_t p = 0;
        std::int64_t lambda = 0;
        std::vector<Tick> makespans; // replication order
        Summary makespan;
        OverheadSummary overhead;
        double mean_steals_sent = 0.0;
        double mean_steals_success = 0.0;
        double mean_steals_failed = 0.0;
        double mean_R_until_tau = 0.0;
        std::int64_t bound_violations = 0;
    };

    OverheadSummary overhead_ratio(const CellStats &cell, OverheadLogArg form);

    /// Aggregates the records of one cell (all with the same W, p, λ).
    CellStats make_cell(std::span<const RunRecord> records, OverheadLogArg form);

    struct SweepResult
    {
        std::vector<RunRecord> records; // cell-major, then replication
        std::vector<CellStats> cells;   // grid order W, p, λ
    };

    /// Runs every cell of the grid. Deterministic given the spec regardless
    /// of thread count. Throws BudgetExceeded before running anything when
    /// cells x replications exceeds the budget.
    SweepResult run_sweep(const SweepSpec &spec);

    /// Least-squares c minimizing sum over cells of
    /// (mean makespan - W/p - c λ log2(W/λ))^2. Cells with p < 2 or no
    /// overhead are skipped; throws InsufficientData with fewer than 3
    /// distinct usable (W, p, λ).
    double fit_constant(std::span<const CellStats> cells);

    /// Parallelism cap: WS_SIM_THREADS if set and positive, else hardware.
    unsigned default_thread_count();

    inline constexpr const char *kSweepCsvHeader =
        "W,p,lambda,seed,makespan,steals_sent,steals_success,steals_failed,tau,R_until_tau,bound_theorem,overhead_ratio";

    /// Fixed 6-significant-digit formatting used by every text output.
    std::string format_real(double value);
    std::string format_real(const std::optional<double> &value);

    void write_csv_row(std::ostream &out, const RunRecord &record);
    void write_sweep_csv(std::ostream &out, std::span<const RunRecord> records);

    nlohmann::json to_json(const Summary &summary);
    nlohmann::json to_json(const CellStats &cell);
    /// Summary document: spec echo, per-cell stats and the fitted constant
    /// (null when the grid cannot support a fit).
    nlohmann::json sweep_summary_json(const SweepSpec &spec, const SweepResult &result);
} // namespace wslat
