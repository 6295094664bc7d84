#include "wslat/engine.hpp"

#include "wslat/config.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace wslat
{
    namespace
    {
        using Wide = __int128;

        // A processor's work is implicit: w_i(t) = max(0, finish_i - t).
        // Between two events nothing changes except that every busy processor
        // loses one unit per tick, so the potential and the largest load at an
        // intermediate boundary follow from running sums over finish times.
        class EventSim
        {
        public:
            EventSim(const SimConfig &config, std::vector<StealEvent> *log)
                : cfg_(validate(config)),
                  p_(static_cast<std::size_t>(cfg_.processors)),
                  lambda_(cfg_.latency),
                  log_(log),
                  rng_(stream_key(cfg_.seed)),
                  finish_(p_, 0),
                  assigned_(p_, 0),
                  s_(p_, 0),
                  outstanding_(p_, kNoProc),
                  requests_(p_)
            {
            }

            RunTrace run()
            {
                trace_.r_series.push_back(0);
                if (cfg_.total_work == 0)
                {
                    sample(0);
                    trace_.makespan = 0;
                    return std::move(trace_);
                }
                assign(0, 0, cfg_.total_work);
                sample(0);
                for (ProcId i = 1; i < static_cast<ProcId>(p_); ++i)
                    candidates_.push_back(i);
                emit(0);

                Tick last = 0;
                for (;;)
                {
                    Tick next = busy_.empty() ? -1 : busy_.begin()->first;
                    if (!in_flight_.empty() && (next < 0 || in_flight_.front().arrives_at < next))
                        next = in_flight_.front().arrives_at;
                    // a run always has either a busy processor or a transfer in flight
                    for (Tick b = (last / lambda_ + 1) * lambda_; b < next; b += lambda_)
                        sample(b);
                    if (process(next))
                        break;
                    last = next;
                }
                return std::move(trace_);
            }

        private:
            void assign(ProcId id, Tick now, Work amount)
            {
                const auto i = static_cast<std::size_t>(id);
                finish_[i] = now + amount;
                assigned_[i] = amount;
                busy_.emplace(finish_[i], id);
                f1_ += finish_[i];
                f2_ += static_cast<Wide>(finish_[i]) * finish_[i];
            }

            void unassign(ProcId id)
            {
                const auto i = static_cast<std::size_t>(id);
                busy_.erase({finish_[i], id});
                f1_ -= finish_[i];
                f2_ -= static_cast<Wide>(finish_[i]) * finish_[i];
            }

            Work work_at(std::size_t i, Tick t) const { return std::max<Work>(0, finish_[i] - t); }

            void send(MessageKind kind, ProcId src, ProcId dst, Tick now, Work amount)
            {
                in_flight_.push_back(Message{kind, src, dst, now, now + lambda_, amount});
            }

            // Potential at the end of tick b; every busy processor finishes after b.
            void sample(Tick b)
            {
                const auto k = static_cast<std::size_t>(b / lambda_);
                if (trace_.r_series.size() <= k)
                    trace_.r_series.resize(k + 1, 0);
                const auto n = static_cast<Wide>(busy_.size());
                const Wide phi = f2_ - Wide{2} * b * f1_ + n * b * b + Wide{2} * s2_;
                trace_.phi_series.push_back(static_cast<std::int64_t>(phi));
                if (!tau_found_)
                {
                    const Work max_w = busy_.empty() ? 0 : busy_.rbegin()->first - b;
                    if (max_w <= 3 * lambda_)
                    {
                        tau_found_ = true;
                        trace_.tau = static_cast<std::int64_t>(k);
                        trace_.R_until_tau = std::accumulate(trace_.r_series.begin(),
                                                             trace_.r_series.begin() + trace_.tau, std::int64_t{0});
                    }
                }
            }

            void emit(Tick now)
            {
                std::sort(candidates_.begin(), candidates_.end());
                candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
                if (p_ < 2)
                {
                    candidates_.clear();
                    return;
                }
                for (const ProcId id : candidates_)
                {
                    const auto i = static_cast<std::size_t>(id);
                    if (work_at(i, now) != 0 || s_[i] != 0 || outstanding_[i] != kNoProc)
                        continue;
                    auto target = static_cast<ProcId>(rng_.uniform(p_ - 1));
                    if (target >= id)
                        ++target;
                    outstanding_[i] = target;
                    send(MessageKind::StealRequest, id, target, now, 0);
                    ++trace_.steals_sent;
                }
                candidates_.clear();
            }

            // Runs phases A-E of tick t. Returns true once the run has ended.
            bool process(Tick t)
            {
                const auto bucket = static_cast<std::size_t>((t + lambda_ - 1) / lambda_);
                if (trace_.r_series.size() <= bucket)
                    trace_.r_series.resize(bucket + 1, 0);

                victims_.clear();
                credits_.clear();
                while (!in_flight_.empty() && in_flight_.front().arrives_at == t)
                {
                    const Message m = in_flight_.front();
                    in_flight_.pop_front();
                    const auto dst = static_cast<std::size_t>(m.dst);
                    switch (m.kind)
                    {
                    case MessageKind::StealRequest:
                        if (requests_[dst].empty())
                            victims_.push_back(m.dst);
                        requests_[dst].push_back(m.src);
                        ++trace_.r_series[bucket];
                        break;
                    case MessageKind::FailResponse:
                        outstanding_[dst] = kNoProc;
                        candidates_.push_back(m.dst);
                        break;
                    case MessageKind::WorkTransfer:
                    {
                        const auto src = static_cast<std::size_t>(m.src);
                        s2_ -= static_cast<Wide>(s_[src]) * s_[src];
                        s_[src] = 0;
                        --transfers_in_flight_;
                        outstanding_[dst] = kNoProc;
                        credits_.emplace_back(m.dst, m.amount);
                        candidates_.push_back(m.src);
                        break;
                    }
                    }
                }

                std::sort(victims_.begin(), victims_.end());
                for (const ProcId victim : victims_)
                {
                    const auto v = static_cast<std::size_t>(victim);
                    auto &thieves = requests_[v];
                    std::sort(thieves.begin(), thieves.end());
                    std::size_t elected = thieves.size();
                    WorkSplit split{};
                    if (s_[v] == 0)
                    {
                        elected = thieves.size() >= 2 ? static_cast<std::size_t>(rng_.uniform(thieves.size())) : 0;
                        const Work before = work_at(v, t - 1);
                        if (before >= 1)
                            split = divide_work(before, lambda_);
                        if (split.transfer < 1)
                            elected = thieves.size();
                        else
                        {
                            executed_ += assigned_[v] - before + 1;
                            unassign(victim);
                            assign(victim, t, split.victim_keep);
                        }
                    }
                    for (std::size_t j = 0; j < thieves.size(); ++j)
                    {
                        const ProcId thief = thieves[j];
                        if (j == elected)
                        {
                            s_[v] = split.transfer;
                            s2_ += static_cast<Wide>(split.transfer) * split.transfer;
                            ++transfers_in_flight_;
                            send(MessageKind::WorkTransfer, victim, thief, t, split.transfer);
                            ++trace_.steals_success;
                            if (log_)
                                log_->push_back({t, victim, thief, StealOutcome::success, split.transfer});
                        }
                        else
                        {
                            send(MessageKind::FailResponse, victim, thief, t, 0);
                            ++trace_.steals_failed;
                            if (log_)
                                log_->push_back({t, victim, thief, StealOutcome::fail, 0});
                        }
                    }
                    thieves.clear();
                }

                // processors running their last unit this tick
                while (!busy_.empty() && busy_.begin()->first == t)
                {
                    const ProcId id = busy_.begin()->second;
                    executed_ += assigned_[static_cast<std::size_t>(id)];
                    unassign(id);
                    candidates_.push_back(id);
                }

                for (const auto &[thief, amount] : credits_)
                    assign(thief, t, amount);

                if (busy_.empty() && transfers_in_flight_ == 0)
                {
                    trace_.makespan = t;
                    trace_.executed_total = executed_;
                    const auto last = static_cast<std::size_t>((t + lambda_ - 1) / lambda_);
                    while (trace_.phi_series.size() <= last)
                        sample(static_cast<Tick>(trace_.phi_series.size()) * lambda_);
                    trace_.r_series.resize(trace_.phi_series.size(), 0);
                    return true;
                }

                if (t % lambda_ == 0)
                    sample(t);

                emit(t);
                return false;
            }

            SimConfig cfg_;
            std::size_t p_;
            Tick lambda_;
            std::vector<StealEvent> *log_;
            CounterRng rng_;

            std::vector<Tick> finish_;
            std::vector<Work> assigned_; // work held at the last (re)assignment
            std::vector<Work> s_;
            std::vector<ProcId> outstanding_;
            std::set<std::pair<Tick, ProcId>> busy_;
            Wide f1_ = 0;
            Wide f2_ = 0;
            Wide s2_ = 0;
            std::deque<Message> in_flight_;
            std::int64_t transfers_in_flight_ = 0;
            Work executed_ = 0;
            bool tau_found_ = false;
            RunTrace trace_;

            std::vector<std::vector<ProcId>> requests_;
            std::vector<ProcId> victims_;
            std::vector<ProcId> candidates_;
            std::vector<std::pair<ProcId, Work>> credits_;
        };
    } // namespace

    RunTrace run_event(const SimConfig &config, std::vector<StealEvent> *steal_log)
    {
        return EventSim(config, steal_log).run();
    }
} // namespace wslat
