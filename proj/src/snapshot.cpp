#include "wslat/snapshot.hpp"

#include "wslat/config.hpp"

#include <stdexcept>

namespace wslat
{
    namespace
    {
        std::string kind_name(MessageKind kind)
        {
            switch (kind)
            {
            case MessageKind::StealRequest:
                return "StealRequest";
            case MessageKind::WorkTransfer:
                return "WorkTransfer";
            case MessageKind::FailResponse:
                return "FailResponse";
            }
            return "?";
        }

        MessageKind kind_from_name(const std::string &name)
        {
            if (name == "StealRequest")
                return MessageKind::StealRequest;
            if (name == "WorkTransfer")
                return MessageKind::WorkTransfer;
            if (name == "FailResponse")
                return MessageKind::FailResponse;
            throw std::invalid_argument("snapshot: unknown message kind '" + name + "'");
        }
    } // namespace

    nlohmann::json to_json(const RunTrace &trace)
    {
        return nlohmann::json{{"makespan", trace.makespan},
                              {"steals_sent", trace.steals_sent},
                              {"steals_success", trace.steals_success},
                              {"steals_failed", trace.steals_failed},
                              {"r_series", trace.r_series},
                              {"phi_series", trace.phi_series},
                              {"tau", trace.tau},
                              {"R_until_tau", trace.R_until_tau},
                              {"executed_total", trace.executed_total}};
    }

    RunTrace run_trace_from_json(const nlohmann::json &doc)
    {
        RunTrace t;
        doc.at("makespan").get_to(t.makespan);
        doc.at("steals_sent").get_to(t.steals_sent);
        doc.at("steals_success").get_to(t.steals_success);
        doc.at("steals_failed").get_to(t.steals_failed);
        doc.at("r_series").get_to(t.r_series);
        doc.at("phi_series").get_to(t.phi_series);
        doc.at("tau").get_to(t.tau);
        doc.at("R_until_tau").get_to(t.R_until_tau);
        doc.at("executed_total").get_to(t.executed_total);
        return t;
    }

    nlohmann::json snapshot_to_json(const EngineState &state)
    {
        nlohmann::json messages = nlohmann::json::array();
        for (const auto &m : state.in_flight)
            messages.push_back({{"kind", kind_name(m.kind)},
                                {"src", m.src},
                                {"dst", m.dst},
                                {"sent_at", m.sent_at},
                                {"arrives_at", m.arrives_at},
                                {"amount", m.amount}});
        return nlohmann::json{{"format", kSnapshotFormat},
                              {"version", kSnapshotVersion},
                              {"config", config_to_json(state.config)},
                              {"now", state.now},
                              {"finished", state.finished},
                              {"w", state.w},
                              {"s", state.s},
                              {"outstanding", state.outstanding},
                              {"in_flight", std::move(messages)},
                              {"rng", {{"key", state.rng.key()}, {"counter", state.rng.counter()}}},
                              {"executed", state.executed},
                              {"in_transit", state.in_transit},
                              {"transfers_in_flight", state.transfers_in_flight},
                              {"tau_found", state.tau_found},
                              {"trace", to_json(state.trace)}};
    }

    EngineState snapshot_from_json(const nlohmann::json &doc)
    {
        if (!doc.is_object() || doc.value("format", std::string{}) != kSnapshotFormat)
            throw std::invalid_argument("snapshot: not a wslat engine snapshot");
        if (doc.at("version").get<int>() != kSnapshotVersion)
            throw std::invalid_argument("snapshot: unsupported version " + doc.at("version").dump());

        EngineState st;
        st.config = config_from_json(doc.at("config"));
        doc.at("now").get_to(st.now);
        doc.at("finished").get_to(st.finished);
        doc.at("w").get_to(st.w);
        doc.at("s").get_to(st.s);
        doc.at("outstanding").get_to(st.outstanding);
        for (const auto &m : doc.at("in_flight"))
            st.in_flight.push_back(Message{kind_from_name(m.at("kind").get<std::string>()),
                                           m.at("src").get<ProcId>(),
                                           m.at("dst").get<ProcId>(),
                                           m.at("sent_at").get<Tick>(),
                                           m.at("arrives_at").get<Tick>(),
                                           m.at("amount").get<Work>()});
        st.rng = CounterRng(doc.at("rng").at("key").get<std::uint64_t>(), doc.at("rng").at("counter").get<std::uint64_t>());
        doc.at("executed").get_to(st.executed);
        doc.at("in_transit").get_to(st.in_transit);
        doc.at("transfers_in_flight").get_to(st.transfers_in_flight);
        doc.at("tau_found").get_to(st.tau_found);
        st.trace = run_trace_from_json(doc.at("trace"));

        const auto p = static_cast<std::size_t>(st.config.processors);
        if (st.w.size() != p || st.s.size() != p || st.outstanding.size() != p)
            throw std::invalid_argument("snapshot: per-processor arrays do not match processor count");
        Work held = 0;
        for (std::size_t i = 0; i < p; ++i)
        {
            if (st.w[i] < 0 || st.s[i] < 0)
                throw std::invalid_argument("snapshot: negative work");
            held += st.w[i] + st.s[i];
        }
        if (held + st.executed != st.config.total_work)
            throw std::invalid_argument("snapshot: work is not conserved");
        for (const auto &m : st.in_flight)
        {
            if (m.src < 0 || m.dst < 0 || static_cast<std::size_t>(m.src) >= p || static_cast<std::size_t>(m.dst) >= p)
                throw std::invalid_argument("snapshot: message endpoint out of range");
            if (m.arrives_at != m.sent_at + st.config.latency)
                throw std::invalid_argument("snapshot: message latency does not match config");
        }
        return st;
    }
} // namespace wslat
