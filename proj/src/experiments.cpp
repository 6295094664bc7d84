#include "wslat/experiments.hpp"

#include "wslat/analysis.hpp"
#include "wslat/config.hpp"
#include "wslat/engine.hpp"
#include "wslat/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <thread>
#include <tuple>

namespace wslat
{
    namespace
    {
        double round6(double v) { return std::strtod(format_real(v).c_str(), nullptr); }

        nlohmann::json real_or_null(const std::optional<double> &v)
        {
            return v ? nlohmann::json(round6(*v)) : nlohmann::json(nullptr);
        }

        template <class T>
        std::vector<T> get_list(const nlohmann::json &doc, const char *key)
        {
            const auto &v = doc.at(key);
            if (!v.is_array())
                throw ConfigError(ConfigErrorCode::BadValue, key, std::string(key) + " must be a list");
            std::vector<T> out;
            for (const auto &x : v)
            {
                if (!x.is_number_integer())
                    throw ConfigError(ConfigErrorCode::BadValue, key, std::string(key) + " must hold integers");
                out.push_back(x.get<T>());
            }
            return out;
        }
    } // namespace

    SweepSpec default_sweep_spec()
    {
        SweepSpec s;
        s.W_values = {100'000, 1'000'000, 10'000'000};
        s.p_values = {32, 64, 128, 256};
        s.lambda_values = {2, 32, 262};
        s.replications = 100;
        return s;
    }

    void validate(const SweepSpec &spec)
    {
        if (spec.W_values.empty())
            throw ConfigError(ConfigErrorCode::BadValue, "W_values", "W_values must not be empty");
        if (spec.p_values.empty())
            throw ConfigError(ConfigErrorCode::BadValue, "p_values", "p_values must not be empty");
        if (spec.lambda_values.empty())
            throw ConfigError(ConfigErrorCode::BadValue, "lambda_values", "lambda_values must not be empty");
        SimConfig probe;
        probe.replications = spec.replications;
        for (const auto W : spec.W_values)
            for (const auto p : spec.p_values)
                for (const auto l : spec.lambda_values)
                {
                    probe.total_work = W;
                    probe.processors = p;
                    probe.latency = l;
                    validate(probe);
                }
        if (spec.budget < 1)
            throw ConfigError(ConfigErrorCode::BadValue, "budget", "budget must be >= 1");
    }

    SweepSpec sweep_spec_from_json(const nlohmann::json &doc)
    {
        static const std::set<std::string> known = {"W_values", "p_values", "lambda_values", "replications", "base_seed",
                                                    "engine", "overhead_log_arg", "budget", "threads"};
        if (!doc.is_object())
            throw ConfigError(ConfigErrorCode::BadValue, "", "sweep config must be a JSON object");
        for (const auto &item : doc.items())
            if (!known.contains(item.key()))
                throw ConfigError(ConfigErrorCode::UnknownKey, item.key(), "unknown sweep key '" + item.key() + "'");

        SweepSpec s = default_sweep_spec();
        if (doc.contains("W_values"))
            s.W_values = get_list<std::int64_t>(doc, "W_values");
        if (doc.contains("p_values"))
            s.p_values = get_list<std::int64_t>(doc, "p_values");
        if (doc.contains("lambda_values"))
            s.lambda_values = get_list<std::int64_t>(doc, "lambda_values");
        if (doc.contains("replications"))
            s.replications = doc.at("replications").get<std::int64_t>();
        if (doc.contains("base_seed"))
            s.base_seed = doc.at("base_seed").get<std::uint64_t>();
        if (doc.contains("engine"))
            s.engine = parse_engine_kind(doc.at("engine").get<std::string>());
        if (doc.contains("overhead_log_arg"))
            s.overhead_log_arg = parse_overhead_log_arg(doc.at("overhead_log_arg").get<std::string>());
        if (doc.contains("budget"))
            s.budget = doc.at("budget").get<std::int64_t>();
        if (doc.contains("threads"))
            s.threads = doc.at("threads").get<unsigned>();
        validate(s);
        return s;
    }

    std::uint64_t cell_seed(std::uint64_t base_seed, std::int64_t W, std::int64_t p, std::int64_t lambda,
                            std::int64_t replication) noexcept
    {
        std::uint64_t h = hash_combine(0, static_cast<std::uint64_t>(W));
        h = hash_combine(h, static_cast<std::uint64_t>(p));
        h = hash_combine(h, static_cast<std::uint64_t>(lambda));
        h = hash_combine(h, static_cast<std::uint64_t>(replication));
        return base_seed ^ h;
    }

    std::optional<double> overhead_ratio(std::int64_t W, std::int64_t p, std::int64_t lambda, Tick makespan,
                                         OverheadLogArg form)
    {
        if (p < 2)
            return std::nullopt;
        const double ideal = static_cast<double>(W) / static_cast<double>(p);
        const double overhead = static_cast<double>(makespan) - ideal;
        if (!(overhead > 0.0))
            return std::nullopt;
        const double l = static_cast<double>(lambda);
        const double arg = form == OverheadLogArg::W_over_lambda ? static_cast<double>(W) / l
                                                                 : static_cast<double>(W) / (2.0 * l);
        const double lg = arg > 1.0 ? std::log2(arg) : 0.0;
        return (4.0 * gamma(p) * l * lg + 3.0 * l) / overhead;
    }

    RunRecord make_record(const SimConfig &config, const RunTrace &trace)
    {
        RunRecord r;
        r.W = config.total_work;
        r.p = config.processors;
        r.lambda = config.latency;
        r.seed = config.seed;
        r.makespan = trace.makespan;
        r.steals_sent = trace.steals_sent;
        r.steals_success = trace.steals_success;
        r.steals_failed = trace.steals_failed;
        r.tau = trace.tau;
        r.R_until_tau = trace.R_until_tau;
        for (const auto x : trace.r_series)
            r.requests_received += x;
        r.potential_monotone = !first_potential_increase(trace).has_value();
        if (r.p >= 2)
            r.bound_theorem = bound_expectation(r.W, r.p, r.lambda).value;
        r.overhead_ratio = overhead_ratio(r.W, r.p, r.lambda, r.makespan, config.overhead_log_arg);
        return r;
    }

    Summary summarize(std::vector<double> values)
    {
        if (values.empty())
            throw std::invalid_argument("summarize: empty sample");
        std::sort(values.begin(), values.end());
        const auto n = values.size();
        auto quantile = [&](double q)
        {
            const double pos = q * static_cast<double>(n - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto hi = std::min(lo + 1, n - 1);
            const double frac = pos - static_cast<double>(lo);
            return values[lo] + frac * (values[hi] - values[lo]);
        };
        Summary s;
        double total = 0.0;
        for (const double v : values)
            total += v;
        s.mean = total / static_cast<double>(n);
        s.min = values.front();
        s.max = values.back();
        s.q1 = quantile(0.25);
        s.median = quantile(0.5);
        s.q3 = quantile(0.75);
        s.count = static_cast<std::int64_t>(n);
        return s;
    }

    OverheadSummary overhead_ratio(const CellStats &cell, OverheadLogArg form)
    {
        OverheadSummary out;
        std::vector<double> ratios;
        for (const auto m : cell.makespans)
        {
            if (const auto r = overhead_ratio(cell.W, cell.p, cell.lambda, m, form))
                ratios.push_back(*r);
            else
                ++out.excluded;
        }
        if (!ratios.empty())
            out.ratio = summarize(std::move(ratios));
        return out;
    }

    CellStats make_cell(std::span<const RunRecord> records, OverheadLogArg form)
    {
        if (records.empty())
            throw std::invalid_argument("make_cell: no records");
        CellStats c;
        c.W = records.front().W;
        c.p = records.front().p;
        c.lambda = records.front().lambda;
        std::vector<double> spans;
        for (const auto &r : records)
        {
            c.makespans.push_back(r.makespan);
            spans.push_back(static_cast<double>(r.makespan));
            c.mean_steals_sent += static_cast<double>(r.steals_sent);
            c.mean_steals_success += static_cast<double>(r.steals_success);
            c.mean_steals_failed += static_cast<double>(r.steals_failed);
            c.mean_R_until_tau += static_cast<double>(r.R_until_tau);
            if (r.bound_theorem && static_cast<double>(r.makespan) > *r.bound_theorem)
                ++c.bound_violations;
        }
        const auto n = static_cast<double>(records.size());
        c.mean_steals_sent /= n;
        c.mean_steals_success /= n;
        c.mean_steals_failed /= n;
        c.mean_R_until_tau /= n;
        c.makespan = summarize(std::move(spans));
        c.overhead = overhead_ratio(c, form);
        return c;
    }

    unsigned default_thread_count()
    {
        if (const char *env = std::getenv("WS_SIM_THREADS"))
        {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0)
                return static_cast<unsigned>(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    SweepResult run_sweep(const SweepSpec &spec)
    {
        validate(spec);
        struct Job
        {
            std::int64_t W, p, lambda;
        };
        std::vector<Job> cells;
        for (const auto W : spec.W_values)
            for (const auto p : spec.p_values)
                for (const auto l : spec.lambda_values)
                    cells.push_back({W, p, l});

        const auto reps = spec.replications;
        const auto total = static_cast<std::int64_t>(cells.size()) * reps;
        if (total > spec.budget)
            throw BudgetExceeded("sweep needs " + std::to_string(total) + " runs, budget is " +
                                 std::to_string(spec.budget));

        SweepResult out;
        out.records.resize(static_cast<std::size_t>(total));
        std::atomic<std::int64_t> next{0};
        auto worker = [&]
        {
            for (std::int64_t idx = next++; idx < total; idx = next++)
            {
                const auto &cell = cells[static_cast<std::size_t>(idx / reps)];
                SimConfig cfg;
                cfg.total_work = cell.W;
                cfg.processors = cell.p;
                cfg.latency = cell.lambda;
                cfg.seed = cell_seed(spec.base_seed, cell.W, cell.p, cell.lambda, idx % reps);
                cfg.engine = spec.engine;
                cfg.overhead_log_arg = spec.overhead_log_arg;
                out.records[static_cast<std::size_t>(idx)] = make_record(cfg, run(cfg));
            }
        };
        const unsigned threads = std::min<std::int64_t>(spec.threads ? spec.threads : default_thread_count(), total);
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 1; t < threads; ++t)
                pool.emplace_back(worker);
            worker();
        }

        for (std::size_t c = 0; c < cells.size(); ++c)
        {
            const auto first = out.records.begin() + static_cast<std::ptrdiff_t>(c) * reps;
            out.cells.push_back(make_cell(std::span<const RunRecord>(&*first, static_cast<std::size_t>(reps)),
                                          spec.overhead_log_arg));
        }
        return out;
    }

    double fit_constant(std::span<const CellStats> cells)
    {
        double sxy = 0.0;
        double sxx = 0.0;
        std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> distinct;
        for (const auto &c : cells)
        {
            if (c.p < 2 || c.makespans.empty())
                continue;
            const double l = static_cast<double>(c.lambda);
            const double ratio = static_cast<double>(c.W) / l;
            const double overhead = c.makespan.mean - static_cast<double>(c.W) / static_cast<double>(c.p);
            if (!(overhead > 0.0) || !(ratio > 1.0))
                continue;
            const double x = l * std::log2(ratio);
            sxy += x * overhead;
            sxx += x * x;
            distinct.emplace(c.W, c.p, c.lambda);
        }
        if (distinct.size() < 3)
            throw InsufficientData("fit_constant needs at least 3 distinct cells with p >= 2 and positive overhead, got " +
                                   std::to_string(distinct.size()));
        return sxy / sxx;
    }

    std::string format_real(double value)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", value);
        return buf;
    }

    std::string format_real(const std::optional<double> &value) { return value ? format_real(*value) : "nan"; }

    void write_csv_row(std::ostream &out, const RunRecord &r)
    {
        out << r.W << ',' << r.p << ',' << r.lambda << ',' << r.seed << ',' << r.makespan << ',' << r.steals_sent << ','
            << r.steals_success << ',' << r.steals_failed << ',' << r.tau << ',' << r.R_until_tau << ','
            << format_real(r.bound_theorem) << ',' << format_real(r.overhead_ratio) << '\n';
    }

    void write_sweep_csv(std::ostream &out, std::span<const RunRecord> records)
    {
        out << kSweepCsvHeader << '\n';
        for (const auto &r : records)
            write_csv_row(out, r);
    }

    nlohmann::json to_json(const Summary &s)
    {
        return nlohmann::json{{"count", s.count},         {"mean", round6(s.mean)}, {"min", round6(s.min)},
                              {"q1", round6(s.q1)},       {"median", round6(s.median)},
                              {"q3", round6(s.q3)},       {"max", round6(s.max)}};
    }

    nlohmann::json to_json(const CellStats &c)
    {
        nlohmann::json j{{"W", c.W},
                         {"p", c.p},
                         {"lambda", c.lambda},
                         {"makespan", to_json(c.makespan)},
                         {"overhead_ratio", c.overhead.ratio ? to_json(*c.overhead.ratio) : nlohmann::json(nullptr)},
                         {"overhead_ratio_excluded", c.overhead.excluded},
                         {"mean_steals_sent", round6(c.mean_steals_sent)},
                         {"mean_steals_success", round6(c.mean_steals_success)},
                         {"mean_steals_failed", round6(c.mean_steals_failed)},
                         {"mean_R_until_tau", round6(c.mean_R_until_tau)},
                         {"bound_violations", c.bound_violations}};
        if (c.p >= 2)
        {
            j["gamma"] = round6(gamma(c.p));
            j["bound_theorem"] = round6(bound_expectation(c.W, c.p, c.lambda).value);
            j["lemma2_bound_R"] = real_or_null(lemma2_bound_R(c.W, c.p, c.lambda).value);
        }
        return j;
    }

    nlohmann::json sweep_summary_json(const SweepSpec &spec, const SweepResult &result)
    {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto &c : result.cells)
            cells.push_back(to_json(c));
        std::optional<double> c;
        try
        {
            c = fit_constant(result.cells);
        }
        catch (const InsufficientData &)
        {
        }
        return nlohmann::json{{"spec",
                               {{"W_values", spec.W_values},
                                {"p_values", spec.p_values},
                                {"lambda_values", spec.lambda_values},
                                {"replications", spec.replications},
                                {"base_seed", spec.base_seed},
                                {"engine", to_string(spec.engine)},
                                {"overhead_log_arg", to_string(spec.overhead_log_arg)}}},
                              {"cells", std::move(cells)},
                              {"fitted_constant", real_or_null(c)}};
    }
} // namespace wslat
