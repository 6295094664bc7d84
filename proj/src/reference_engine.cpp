#include "wslat/engine.hpp"

#include "wslat/config.hpp"
#include "wslat/kernels.hpp"

#include <algorithm>
#include <numeric>

namespace wslat
{
    WorkSplit divide_work(Work w_before, Tick latency)
    {
        if (w_before < 1)
            throw std::invalid_argument("divide_work: victim must hold at least one unit");
        if (latency < 1)
            throw std::invalid_argument("divide_work: latency must be >= 1");
        const Work remaining = w_before - 1;
        const Work numerator = remaining + latency;
        const Work keep = numerator / 2 + numerator % 2;
        return {keep, remaining - keep};
    }

    std::uint64_t stream_key(std::uint64_t seed) noexcept { return hash_combine(0x5753'4c41'5400'0001ULL, seed); }

    std::int64_t state_potential(const EngineState &state)
    {
        return kernels::potential(state.w, state.s, state.config.total_work);
    }

    ReferenceEngine::ReferenceEngine(const SimConfig &config, std::vector<StealEvent> *steal_log)
        : log_(steal_log)
    {
        state_.config = validate(config);
        const auto p = static_cast<std::size_t>(state_.config.processors);
        state_.w.assign(p, 0);
        state_.s.assign(p, 0);
        state_.outstanding.assign(p, kNoProc);
        state_.rng = CounterRng(stream_key(state_.config.seed));
        state_.w[0] = state_.config.total_work;
        state_.trace.r_series.push_back(0);
        sample_boundary();
        if (state_.config.total_work == 0)
        {
            state_.finished = true;
            return;
        }
        emit_requests();
    }

    ReferenceEngine::ReferenceEngine(EngineState state, std::vector<StealEvent> *steal_log)
        : state_(std::move(state)), log_(steal_log)
    {
        validate(state_.config);
        const auto p = static_cast<std::size_t>(state_.config.processors);
        if (state_.w.size() != p || state_.s.size() != p || state_.outstanding.size() != p)
            throw std::invalid_argument("engine state: per-processor arrays do not match processor count");
    }

    ProcessorState ReferenceEngine::processor(ProcId id) const
    {
        const auto i = static_cast<std::size_t>(id);
        ProcessorState out;
        out.w = state_.w.at(i);
        out.s = state_.s.at(i);
        if (state_.outstanding[i] != kNoProc)
            out.outstanding_request_target = state_.outstanding[i];
        if (out.s > 0)
        {
            out.status = ProcStatus::Transferring;
            for (const auto &m : state_.in_flight)
                if (m.kind == MessageKind::WorkTransfer && m.src == id)
                    out.transfer_until = m.arrives_at;
        }
        else if (out.w > 0)
            out.status = ProcStatus::Working;
        else if (out.outstanding_request_target)
            out.status = ProcStatus::IdleAwaitingResponse;
        else
            out.status = ProcStatus::IdleFree;
        return out;
    }

    std::int64_t ReferenceEngine::potential() const { return state_potential(state_); }

    void ReferenceEngine::send(MessageKind kind, ProcId src, ProcId dst, Work amount)
    {
        const Tick t = state_.now;
        state_.in_flight.push_back(Message{kind, src, dst, t, t + state_.config.latency, amount});
    }

    void ReferenceEngine::sample_boundary()
    {
        auto &tr = state_.trace;
        const Tick lambda = state_.config.latency;
        tr.phi_series.push_back(potential());
        if (!state_.tau_found && kernels::max_value(state_.w) <= 3 * lambda)
        {
            state_.tau_found = true;
            tr.tau = static_cast<std::int64_t>(tr.phi_series.size()) - 1;
            tr.R_until_tau = std::accumulate(tr.r_series.begin(), tr.r_series.begin() + tr.tau, std::int64_t{0});
        }
    }

    void ReferenceEngine::emit_requests()
    {
        const auto p = state_.config.processors;
        if (p < 2)
            return;
        for (ProcId i = 0; i < p; ++i)
        {
            const auto u = static_cast<std::size_t>(i);
            if (state_.w[u] != 0 || state_.s[u] != 0 || state_.outstanding[u] != kNoProc)
                continue;
            auto target = static_cast<ProcId>(state_.rng.uniform(static_cast<std::uint64_t>(p - 1)));
            if (target >= i)
                ++target;
            state_.outstanding[u] = target;
            send(MessageKind::StealRequest, i, target, 0);
            ++state_.trace.steals_sent;
        }
    }

    void ReferenceEngine::step()
    {
        if (state_.finished)
            return;
        auto &st = state_;
        auto &tr = st.trace;
        const Tick lambda = st.config.latency;
        const auto p = static_cast<std::size_t>(st.config.processors);
        const Tick t = ++st.now;

        const auto bucket = static_cast<std::size_t>((t + lambda - 1) / lambda);
        if (tr.r_series.size() <= bucket)
            tr.r_series.resize(bucket + 1, 0);

        // A: deliveries
        requests_.resize(p);
        victims_.clear();
        credits_.clear();
        while (!st.in_flight.empty() && st.in_flight.front().arrives_at == t)
        {
            const Message m = st.in_flight.front();
            st.in_flight.pop_front();
            switch (m.kind)
            {
            case MessageKind::StealRequest:
            {
                auto &bucket_list = requests_[static_cast<std::size_t>(m.dst)];
                if (bucket_list.empty())
                    victims_.push_back(m.dst);
                bucket_list.push_back(m.src);
                ++tr.r_series[bucket];
                break;
            }
            case MessageKind::FailResponse:
                st.outstanding[static_cast<std::size_t>(m.dst)] = kNoProc;
                break;
            case MessageKind::WorkTransfer:
                st.s[static_cast<std::size_t>(m.src)] = 0;
                st.in_transit -= m.amount;
                --st.transfers_in_flight;
                st.outstanding[static_cast<std::size_t>(m.dst)] = kNoProc;
                credits_.emplace_back(m.dst, m.amount);
                break;
            }
        }

        // B: steal processing
        std::sort(victims_.begin(), victims_.end());
        for (const ProcId victim : victims_)
        {
            const auto v = static_cast<std::size_t>(victim);
            auto &thieves = requests_[v];
            std::sort(thieves.begin(), thieves.end());
            std::size_t elected = thieves.size();
            WorkSplit split{};
            if (st.s[v] == 0)
            {
                elected = thieves.size() >= 2 ? static_cast<std::size_t>(st.rng.uniform(thieves.size())) : 0;
                if (st.w[v] >= 1)
                    split = divide_work(st.w[v], lambda);
                if (split.transfer < 1)
                    elected = thieves.size();
            }
            for (std::size_t j = 0; j < thieves.size(); ++j)
            {
                const ProcId thief = thieves[j];
                if (j == elected)
                {
                    // phase C takes this tick's unit off, landing on victim_keep
                    st.w[v] = split.victim_keep + 1;
                    st.s[v] = split.transfer;
                    st.in_transit += split.transfer;
                    ++st.transfers_in_flight;
                    send(MessageKind::WorkTransfer, victim, thief, split.transfer);
                    ++tr.steals_success;
                    if (log_)
                        log_->push_back({t, victim, thief, StealOutcome::success, split.transfer});
                }
                else
                {
                    send(MessageKind::FailResponse, victim, thief, 0);
                    ++tr.steals_failed;
                    if (log_)
                        log_->push_back({t, victim, thief, StealOutcome::fail, 0});
                }
            }
            thieves.clear();
        }

        // C: execution
        st.executed += kernels::execute_tick(st.w);

        // D: credit arrived transfers
        for (const auto &[thief, amount] : credits_)
            st.w[static_cast<std::size_t>(thief)] = amount;

        const Work local = st.config.total_work - st.executed - st.in_transit;
        if (local == 0 && st.transfers_in_flight == 0)
        {
            st.finished = true;
            tr.makespan = t;
            tr.executed_total = st.executed;
            // state is empty from here on: pad up to the boundary covering t
            const auto last = static_cast<std::size_t>((t + lambda - 1) / lambda);
            while (tr.phi_series.size() <= last)
                sample_boundary();
            tr.r_series.resize(tr.phi_series.size(), 0);
            return;
        }

        if (t % lambda == 0)
            sample_boundary();

        // E: request emission
        emit_requests();
    }

    RunTrace ReferenceEngine::run()
    {
        while (!state_.finished)
            step();
        return state_.trace;
    }

    RunTrace run_reference(const SimConfig &config, std::vector<StealEvent> *steal_log)
    {
        return ReferenceEngine(config, steal_log).run();
    }

    RunTrace run(const SimConfig &config, std::vector<StealEvent> *steal_log)
    {
        return config.engine == EngineKind::reference ? run_reference(config, steal_log)
                                                      : run_event(config, steal_log);
    }
} // namespace wslat
