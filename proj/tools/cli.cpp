#include "cli.hpp"

#include "wslat/analysis.hpp"
#include "wslat/config.hpp"
#include "wslat/engine.hpp"
#include "wslat/experiments.hpp"
#include "wslat/probe.hpp"
#include "wslat/snapshot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>

namespace wslat::cli
{
    namespace
    {
        /// Exit-code carrying error for problems found while handling flags.
        struct UsageError : std::runtime_error
        {
            using std::runtime_error::runtime_error;
        };

        std::string flag_for_field(const std::string &field)
        {
            if (field == "total_work")
                return "--W";
            if (field == "processors")
                return "--p";
            if (field == "latency")
                return "--lambda";
            if (field == "seed")
                return "--seed";
            if (field == "engine")
                return "--engine";
            if (field == "replications")
                return "--replications";
            if (field == "overhead_log_arg")
                return "--overhead-log-arg";
            return field;
        }

        void round_reals(nlohmann::json &j)
        {
            if (j.is_number_float())
                j = std::strtod(format_real(j.get<double>()).c_str(), nullptr);
            else if (j.is_structured())
                for (auto &child : j)
                    round_reals(child);
        }

        nlohmann::json read_json_file(const std::string &path)
        {
            std::ifstream in(path);
            if (!in)
                throw UsageError("cannot open '" + path + "'");
            try
            {
                return nlohmann::json::parse(in);
            }
            catch (const nlohmann::json::parse_error &e)
            {
                throw UsageError("'" + path + "' is not valid JSON: " + e.what());
            }
        }

        std::ofstream open_out(const std::string &path)
        {
            std::ofstream f(path);
            if (!f)
                throw UsageError("cannot write '" + path + "'");
            return f;
        }

        void write_steal_log(const std::string &path, const std::vector<StealEvent> &log)
        {
            auto f = open_out(path);
            f << "t,victim,thief,outcome,amount\n";
            for (const auto &e : log)
                f << e.t << ',' << e.victim << ',' << e.thief << ',' << to_string(e.outcome) << ',' << e.amount << '\n';
        }

        void write_potential(const std::string &path, const RunTrace &trace)
        {
            auto f = open_out(path);
            f << "k,phi,r_k\n";
            for (const auto &s : extract_potential_series(trace).samples)
                f << s.k << ',' << s.phi << ',' << s.r_k << '\n';
        }

        struct RunFlags
        {
            std::optional<std::int64_t> W, p, lambda, replications;
            std::optional<std::uint64_t> seed;
            std::optional<std::string> engine, overhead_log_arg, config;
            std::string trace_out, potential_out, snapshot_out;
            std::optional<std::int64_t> snapshot_at;
            bool no_header = false;
        };

        int cmd_run(const RunFlags &f, std::ostream &out)
        {
            SimConfig cfg;
            if (f.config)
                cfg = config_from_json(read_json_file(*f.config));
            else if (!f.W || !f.p || !f.lambda)
                throw UsageError("run needs --W, --p and --lambda (or --config)");
            if (f.W)
                cfg.total_work = *f.W;
            if (f.p)
                cfg.processors = *f.p;
            if (f.lambda)
                cfg.latency = *f.lambda;
            if (f.seed)
                cfg.seed = *f.seed;
            if (f.replications)
                cfg.replications = *f.replications;
            if (f.engine)
                cfg.engine = parse_engine_kind(*f.engine);
            if (f.overhead_log_arg)
                cfg.overhead_log_arg = parse_overhead_log_arg(*f.overhead_log_arg);
            cfg = validate(cfg);
            if (f.snapshot_at && f.snapshot_out.empty())
                throw UsageError("--snapshot-at needs --snapshot-out");
            if (f.snapshot_at && *f.snapshot_at < 0)
                throw UsageError("--snapshot-at must be >= 0");

            if (!f.no_header)
                out << kSweepCsvHeader << '\n';
            for (std::int64_t i = 0; i < cfg.replications; ++i)
            {
                SimConfig one = cfg;
                one.seed = cfg.seed ^ static_cast<std::uint64_t>(i);
                std::vector<StealEvent> log;
                const bool first = i == 0;
                auto *log_ptr = first && !f.trace_out.empty() ? &log : nullptr;
                RunTrace trace;
                if (first && f.snapshot_at)
                {
                    ReferenceEngine eng(one, log_ptr);
                    const Tick at = *f.snapshot_at * one.latency;
                    while (!eng.finished() && eng.now() < at)
                        eng.step();
                    if (eng.finished() && eng.now() < at)
                        throw UsageError("run finished at t=" + std::to_string(eng.now()) + " before snapshot tick " +
                                         std::to_string(at));
                    auto snap = open_out(f.snapshot_out);
                    snap << snapshot_to_json(eng.state()).dump() << '\n';
                    trace = eng.run();
                }
                else
                {
                    trace = run(one, log_ptr);
                }
                if (log_ptr)
                    write_steal_log(f.trace_out, log);
                if (first && !f.potential_out.empty())
                    write_potential(f.potential_out, trace);
                write_csv_row(out, make_record(one, trace));
            }
            return kExitOk;
        }

        int cmd_gamma(std::optional<std::int64_t> p, std::optional<std::int64_t> p_min, std::optional<std::int64_t> p_max,
                      std::ostream &out)
        {
            std::int64_t lo = 0;
            std::int64_t hi = 0;
            if (p)
                lo = hi = *p;
            else if (p_min && p_max)
            {
                lo = *p_min;
                hi = *p_max;
            }
            else
                throw UsageError("gamma needs --p or both --p-min and --p-max");
            if (lo < 2)
                throw std::domain_error("p must be >= 2, got " + std::to_string(lo));
            if (hi < lo)
                throw UsageError("--p-max must be >= --p-min");
            out << "p,gamma\n";
            for (std::int64_t q = lo; q <= hi; ++q)
                out << q << ',' << format_real(gamma(q)) << '\n';
            out << "cap," << format_real(gamma_cap()) << '\n';
            return kExitOk;
        }

        int cmd_bound(std::int64_t W, std::int64_t p, std::int64_t lambda, std::optional<double> x, std::ostream &out,
                      std::ostream &err)
        {
            SimConfig cfg;
            cfg.total_work = W;
            cfg.processors = p;
            cfg.latency = lambda;
            validate(cfg);
            if (x && !(*x >= 0.0))
                throw UsageError("--x must be >= 0");
            const auto rep = bound_report(W, p, lambda, x);
            if (rep.bound_expectation.degenerate)
                err << "warning: W <= 2*lambda, log2(W/(2 lambda)) term dropped\n";
            if (rep.lemma2_bound_R.degenerate)
                err << "warning: W <= lambda, lemma2_bound_R is degenerate\n";
            auto j = to_json(rep);
            round_reals(j);
            out << j.dump(2) << '\n';
            return kExitOk;
        }

        struct SweepFlags
        {
            std::optional<std::string> config;
            std::string out_path, summary_path;
            std::optional<std::int64_t> replications;
            std::optional<std::uint64_t> base_seed;
            std::optional<unsigned> threads;
        };

        int cmd_sweep(const SweepFlags &f, std::ostream &out)
        {
            SweepSpec spec = f.config ? sweep_spec_from_json(read_json_file(*f.config)) : default_sweep_spec();
            if (f.replications)
                spec.replications = *f.replications;
            if (f.base_seed)
                spec.base_seed = *f.base_seed;
            if (f.threads)
                spec.threads = *f.threads;
            const auto result = run_sweep(spec);
            if (f.out_path.empty())
                write_sweep_csv(out, result.records);
            else
            {
                auto csv = open_out(f.out_path);
                write_sweep_csv(csv, result.records);
            }
            if (!f.summary_path.empty())
            {
                auto js = open_out(f.summary_path);
                js << sweep_summary_json(spec, result).dump(2) << '\n';
            }
            return kExitOk;
        }

        int cmd_probe(const std::string &snapshot, std::int64_t ensemble, std::uint64_t seed, const std::string &mode,
                      std::ostream &out)
        {
            ProbeMode m = ProbeMode::redraw_targets;
            if (mode == "reelect")
                m = ProbeMode::reelect_only;
            else if (mode != "redraw")
                throw UsageError("--mode must be 'redraw' or 'reelect'");
            const auto state = snapshot_from_json(read_json_file(snapshot));
            auto j = to_json(lemma1_probe(state, ensemble, seed, m));
            round_reals(j);
            out << j.dump(2) << '\n';
            return kExitOk;
        }
    } // namespace

    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Work stealing with communication latency: simulator, bounds and experiments", "ws_sim"};
        app.require_subcommand(1);

        RunFlags rf;
        auto *run_cmd = app.add_subcommand("run", "simulate one configuration and print a CSV row per replication");
        run_cmd->add_option("--W", rf.W, "total work (unit tasks)");
        run_cmd->add_option("--p", rf.p, "number of processors");
        run_cmd->add_option("--lambda", rf.lambda, "communication latency");
        run_cmd->add_option("--seed", rf.seed, "seed (replication i uses seed xor i)");
        run_cmd->add_option("--engine", rf.engine, "reference | event");
        run_cmd->add_option("--replications", rf.replications, "number of replications");
        run_cmd->add_option("--overhead-log-arg", rf.overhead_log_arg, "W_over_lambda | W_over_2lambda");
        run_cmd->add_option("--config", rf.config, "JSON config file; flags override its values");
        run_cmd->add_option("--trace-out", rf.trace_out, "per-steal CSV of the first replication");
        run_cmd->add_option("--potential-out", rf.potential_out, "potential series CSV of the first replication");
        run_cmd->add_option("--snapshot-at", rf.snapshot_at, "interval k whose state (t = k*lambda) is saved");
        run_cmd->add_option("--snapshot-out", rf.snapshot_out, "snapshot file for --snapshot-at");
        run_cmd->add_flag("--no-header", rf.no_header, "omit the CSV header");

        std::optional<std::int64_t> gp, gp_min, gp_max;
        auto *gamma_cmd = app.add_subcommand("gamma", "print gamma(p)");
        gamma_cmd->add_option("--p", gp, "number of processors");
        gamma_cmd->add_option("--p-min", gp_min, "first p of a range");
        gamma_cmd->add_option("--p-max", gp_max, "last p of a range");

        std::int64_t bW = 0, bp = 0, bl = 0;
        std::optional<double> bx;
        auto *bound_cmd = app.add_subcommand("bound", "print the makespan bound report as JSON");
        bound_cmd->add_option("--W", bW, "total work")->required();
        bound_cmd->add_option("--p", bp, "number of processors")->required();
        bound_cmd->add_option("--lambda", bl, "communication latency")->required();
        bound_cmd->add_option("--x", bx, "excess for the tail probabilities");

        SweepFlags sf;
        auto *sweep_cmd = app.add_subcommand("sweep", "run a parameter grid; CSV to stdout or --out");
        sweep_cmd->add_option("--config", sf.config, "sweep JSON (default: desk-scale grid)");
        sweep_cmd->add_option("--out", sf.out_path, "CSV output path");
        sweep_cmd->add_option("--summary", sf.summary_path, "summary JSON output path");
        sweep_cmd->add_option("--replications", sf.replications, "override replications");
        sweep_cmd->add_option("--base-seed", sf.base_seed, "override base seed");
        sweep_cmd->add_option("--threads", sf.threads, "worker threads (default WS_SIM_THREADS or all cores)");

        std::string snapshot_path, mode = "redraw";
        std::int64_t ensemble = 1000;
        std::uint64_t probe_seed = 0;
        auto *probe_cmd = app.add_subcommand("probe", "one-interval potential contraction ensemble on a snapshot");
        probe_cmd->add_option("--snapshot", snapshot_path, "snapshot written by run --snapshot-at")->required();
        probe_cmd->add_option("--ensemble", ensemble, "number of continuations");
        probe_cmd->add_option("--seed", probe_seed, "seed of the continuation streams");
        probe_cmd->add_option("--mode", mode, "redraw | reelect");

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::CallForHelp &e)
        {
            return app.exit(e, out, err);
        }
        catch (const CLI::ParseError &e)
        {
            app.exit(e, out, err);
            return kExitValidation;
        }

        try
        {
            if (run_cmd->parsed())
                return cmd_run(rf, out);
            if (gamma_cmd->parsed())
                return cmd_gamma(gp, gp_min, gp_max, out);
            if (bound_cmd->parsed())
                return cmd_bound(bW, bp, bl, bx, out, err);
            if (sweep_cmd->parsed())
                return cmd_sweep(sf, out);
            if (probe_cmd->parsed())
                return cmd_probe(snapshot_path, ensemble, probe_seed, mode, out);
        }
        catch (const ConfigError &e)
        {
            err << "error: invalid " << flag_for_field(e.field()) << ": " << e.what() << '\n';
            return kExitValidation;
        }
        catch (const BudgetExceeded &e)
        {
            err << "error: budget exceeded: " << e.what() << '\n';
            return kExitBudget;
        }
        catch (const UsageError &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitValidation;
        }
        catch (const std::domain_error &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitValidation;
        }
        catch (const std::invalid_argument &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitValidation;
        }
        catch (const nlohmann::json::exception &e)
        {
            err << "error: malformed input: " << e.what() << '\n';
            return kExitValidation;
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitInternal;
        }
        return kExitInternal;
    }
} // namespace wslat::cli
