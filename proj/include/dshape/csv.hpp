#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dshape/errors.hpp"
#include "dshape/offline.hpp"
#include "dshape/online.hpp"
#include "dshape/scenario.hpp"
#include "dshape/traffic.hpp"

namespace dshape {

/// 12 significant digits, shortest form.
inline std::string fmt(double v)
{
    if (v == 0.0) return "0"; // also folds -0
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("undefined"); }

inline void write_run_trace(std::ostream& os, const RunTrace& trace)
{
    os << "iteration,V,max_change\n";
    for (std::size_t k = 0; k < trace.objective.size(); ++k) {
        os << k << ',' << fmt(trace.objective[k]) << ',' << fmt(trace.max_change[k]) << '\n';
    }
}

inline void write_schedule(std::ostream& os, const Scenario& s, const ScheduleState& state)
{
    os << "slot";
    for (const auto& da : s.continuous_das) os << ',' << da.id;
    for (const auto& da : s.discrete_das) os << ',' << da.id;
    os << ",base,d\n";
    for (Eigen::Index t = 0; t < state.base.size(); ++t) {
        os << t + 1;
        for (const auto& p : state.continuous) os << ',' << fmt(p[t]);
        for (const auto& p : state.discrete) os << ',' << fmt(p[t]);
        os << ',' << fmt(state.base[t]) << ',' << fmt(state.d[t]) << '\n';
    }
}

inline void write_online_trace(std::ostream& os, const OnlineResult& run)
{
    os << "t,V_horizon,committed_d,q_total,locked_count,arrivals\n";
    for (const auto& r : run.steps) {
        os << r.t << ',' << fmt(r.horizon_objective) << ',' << fmt(run.d[r.t - 1]) << ',' << fmt(r.q_total) << ','
           << r.locked_count << ',' << r.arrivals << '\n';
    }
}

struct SummaryRow {
    std::uint64_t seed = 0;
    double v_online = 0.0;
    double v_offline = 0.0;
    std::optional<double> relative_gap;
};

inline void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << "seed,V_online,V_offline,relative_gap\n";
    for (const auto& r : rows) {
        os << r.seed << ',' << fmt(r.v_online) << ',' << fmt(r.v_offline) << ',' << fmt(r.relative_gap) << '\n';
    }
}

/*
 * Arrival record, one row per application in serial order. Continuous rows
 * carry their rate cap as r_n and ceil(P_n / cap) as l_n.
 */
inline void write_arrivals(std::ostream& os, const DeferrableSet& das)
{
    struct Row {
        std::string id;
        int arrival;
        bool continuous;
        double budget, rate;
        int length, deadline;
    };
    auto serial = [](const std::string& id) {
        if (id.size() > 2 && id.rfind("da", 0) == 0 && id.find_first_not_of("0123456789", 2) == std::string::npos) {
            return std::stol(id.substr(2));
        }
        return std::numeric_limits<long>::max();
    };
    auto continuous_row = [](const ContinuousDA& da) {
        const double cap = da.upper.size() ? da.upper.maxCoeff() : 0.0;
        const int length = cap > 0.0 ? static_cast<int>(std::ceil(da.budget / cap - 1e-9)) : 0;
        return Row{da.id, da.arrival, true, da.budget, cap, length, da.deadline};
    };
    auto discrete_row = [](const DiscreteDA& da) {
        return Row{da.id, da.arrival, false, da.budget(), da.rate, da.length, da.deadline};
    };
    // merge by (arrival, serial) without reordering either class
    std::vector<Row> rows;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < das.continuous.size() || j < das.discrete.size()) {
        bool take_continuous = j >= das.discrete.size();
        if (i < das.continuous.size() && j < das.discrete.size()) {
            const auto& c = das.continuous[i];
            const auto& d = das.discrete[j];
            take_continuous = c.arrival != d.arrival ? c.arrival < d.arrival : serial(c.id) <= serial(d.id);
        }
        if (take_continuous) {
            rows.push_back(continuous_row(das.continuous[i++]));
        } else {
            rows.push_back(discrete_row(das.discrete[j++]));
        }
    }
    os << "t_a,type,P_n,r_n,l_n,t_d\n";
    for (const auto& r : rows) {
        os << r.arrival << ',' << (r.continuous ? "continuous" : "discrete") << ',' << fmt(r.budget) << ','
           << fmt(r.rate) << ',' << r.length << ',' << r.deadline << '\n';
    }
}

/// Inverse of write_arrivals; ids are regenerated as "da<row>".
inline DeferrableSet read_arrivals(std::istream& in, const TimeGrid& grid)
{
    DeferrableSet out;
    std::string line;
    int line_no = 0;
    int serial = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("t_a,", 0) == 0) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 6) throw ParseError("expected 6 fields", line_no);
        try {
            const int ta = std::stoi(f[0]);
            const double P = std::stod(f[2]);
            const double r = std::stod(f[3]);
            const int l = std::stoi(f[4]);
            const int td = std::stoi(f[5]);
            const std::string id = "da" + std::to_string(++serial);
            if (f[1] == "continuous") {
                out.continuous.push_back(ContinuousDA::with_cap(id, ta, td, P, r, grid));
            } else if (f[1] == "discrete") {
                out.discrete.push_back(DiscreteDA{id, ta, td, r, l});
            } else {
                throw ParseError("unknown type '" + f[1] + "'", line_no);
            }
        } catch (const std::logic_error&) {
            throw ParseError("malformed number", line_no);
        }
    }
    return out;
}

inline DeferrableSet load_arrivals(const std::string& path, const TimeGrid& grid)
{
    std::ifstream in(path);
    if (!in) throw MissingArrivalRecord("cannot open arrival record " + path);
    return read_arrivals(in, grid);
}

} // namespace dshape
