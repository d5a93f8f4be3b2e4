#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dshape/csv.hpp"
#include "dshape/metrics.hpp"
#include "dshape/offline.hpp"
#include "dshape/online.hpp"
#include "dshape/rng.hpp"
#include "dshape/scenario.hpp"
#include "dshape/scenario_json.hpp"
#include "dshape/traffic.hpp"

namespace dshape {

/*
 * Benchmark cases:
 *   0  offline on the realized base with the recorded arrivals (reference)
 *   1  online, updating base forecast, virtual traffic for future arrivals
 *   2  online, exact base, virtual traffic
 *   3  online, updating base forecast, every recorded arrival known up front
 *   4  as 3 with the base forecast frozen at t = 1
 */
inline constexpr int case_count = 5;

/// Seed of repetition `rep`; sweeps reuse it at every point (common random numbers).
inline std::uint64_t rep_seed(std::uint64_t seed, int rep)
{
    return detail::splitmix64(detail::splitmix64(seed) ^ (0x5EEDULL + static_cast<std::uint64_t>(rep)));
}

struct RepInputs {
    std::uint64_t seed = 0;
    DeferrableSet arrivals;
    NoiseTable noise;
};

/// Arrivals from the scenario's arrival model, or its fixed population when it has none.
inline RepInputs draw_rep(const Scenario& s, std::uint64_t seed)
{
    RepInputs r;
    r.seed = seed;
    if (s.arrival_model) {
        r.arrivals = generate_arrivals(*s.arrival_model, s.grid, seed);
    } else if (s.population() > 0) {
        r.arrivals = s.applications();
    } else {
        throw MissingArrivalRecord("scenario has neither applications nor an arrival model");
    }
    r.noise = NoiseTable::draw(s.grid.slots, seed);
    return r;
}

inline Scenario with_sigma2(Scenario s, double sigma2)
{
    s.base.deviation = CumulativeDeviation{sigma2};
    return s;
}

inline OnlineConfig case_config(int case_id, VirtualSupport support = VirtualSupport::reachable)
{
    OnlineConfig cfg;
    cfg.support = support;
    switch (case_id) {
    case 1: break;
    case 2: cfg.forecast = ForecastMode::realized; break;
    case 3:
        cfg.virtual_traffic = false;
        cfg.known_in_advance = true;
        break;
    case 4:
        cfg.forecast = ForecastMode::frozen;
        cfg.virtual_traffic = false;
        cfg.known_in_advance = true;
        break;
    default: throw std::invalid_argument("no online configuration for case " + std::to_string(case_id));
    }
    return cfg;
}

inline double case_objective(int case_id, const Scenario& s, const RepInputs& rep, int iterations,
                             VirtualSupport support = VirtualSupport::reachable)
{
    if (case_id == 0) {
        const Profile base = realized_base(s.base, rep.noise);
        return offds_run(s.with_applications(rep.arrivals), base, iterations, rep.seed).objective.back();
    }
    return onds_run(s, rep.arrivals, BaseForecast{s.base, rep.noise}, case_config(case_id, support), iterations,
                    rep.seed)
        .objective;
}

struct Aggregate {
    double mean = 0.0;
    double std_dev = 0.0;
    double std_error = 0.0;
    int count = 0;
};

inline Aggregate summarize(const std::vector<double>& xs)
{
    Aggregate a;
    a.count = static_cast<int>(xs.size());
    if (xs.empty()) return a;
    for (double x : xs) a.mean += x;
    a.mean /= a.count;
    if (a.count > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - a.mean) * (x - a.mean);
        a.std_dev = std::sqrt(ss / (a.count - 1));
        a.std_error = a.std_dev / std::sqrt(static_cast<double>(a.count));
    }
    return a;
}

struct CaseOutcome {
    std::uint64_t seed = 0;
    double v_case = 0.0;
    double v_reference = 0.0;
    std::optional<double> relative_gap;
};

struct CaseSummary {
    int case_id = 0;
    std::vector<CaseOutcome> reps;
    std::vector<DeferrableSet> arrivals; // recorded per repetition
    Aggregate relative_gap;              // over repetitions with a defined gap
};

namespace detail {

template <class DrawRep>
CaseSummary run_case_with(const Scenario& s, int case_id, int reps, std::uint64_t seed, int iterations,
                          VirtualSupport support, DrawRep draw)
{
    if (case_id < 0 || case_id >= case_count) throw std::invalid_argument("case id must be 0..4");
    if (reps < 1) throw std::invalid_argument("repetitions must be positive");
    CaseSummary out;
    out.case_id = case_id;
    std::vector<double> gaps;
    for (int r = 0; r < reps; ++r) {
        const RepInputs rep = draw(r, rep_seed(seed, r));
        CaseOutcome o;
        o.seed = rep.seed;
        o.v_reference = case_objective(0, s, rep, iterations);
        o.v_case = case_id == 0 ? o.v_reference : case_objective(case_id, s, rep, iterations, support);
        o.relative_gap = gap_report(o.v_case, o.v_reference).relative_gap;
        if (o.relative_gap) gaps.push_back(*o.relative_gap);
        out.reps.push_back(o);
        out.arrivals.push_back(rep.arrivals);
    }
    out.relative_gap = summarize(gaps);
    return out;
}

} // namespace detail

/// Arrivals drawn per repetition from the scenario (the case-1 stream).
inline CaseSummary run_case(const Scenario& s, int case_id, int reps, std::uint64_t seed, int iterations,
                            VirtualSupport support = VirtualSupport::reachable)
{
    return detail::run_case_with(s, case_id, reps, seed, iterations, support,
                                 [&](int, std::uint64_t rs) { return draw_rep(s, rs); });
}

/// Replays recorded arrivals, one record per repetition.
inline CaseSummary run_case(const Scenario& s, int case_id, const std::vector<DeferrableSet>& recorded,
                            std::uint64_t seed, int iterations, VirtualSupport support = VirtualSupport::reachable)
{
    if (recorded.empty()) throw MissingArrivalRecord("no recorded arrivals to replay");
    return detail::run_case_with(s, case_id, static_cast<int>(recorded.size()), seed, iterations, support,
                                 [&](int r, std::uint64_t rs) {
                                     return RepInputs{rs, recorded[static_cast<std::size_t>(r)],
                                                      NoiseTable::draw(s.grid.slots, rs)};
                                 });
}

struct SweepPoint {
    double value = 0.0; // sigma2 or discrete penetration
    int case_id = 1;
    Aggregate relative_gap;
    double mean_v_case = 0.0;
    double mean_v_reference = 0.0;
    std::vector<std::optional<double>> gaps; // per repetition, for paired comparisons
};

namespace detail {

inline std::vector<SweepPoint> sweep_point(const Scenario& s, double value, const std::vector<int>& cases, int reps,
                                           std::uint64_t seed, int iterations, VirtualSupport support)
{
    std::vector<SweepPoint> points;
    for (int c : cases) points.push_back(SweepPoint{value, c, {}, 0.0, 0.0, {}});
    std::vector<std::vector<double>> defined(cases.size());
    for (int r = 0; r < reps; ++r) {
        const RepInputs rep = draw_rep(s, rep_seed(seed, r));
        const double ref = case_objective(0, s, rep, iterations);
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const double v = cases[i] == 0 ? ref : case_objective(cases[i], s, rep, iterations, support);
            const auto gap = gap_report(v, ref).relative_gap;
            points[i].mean_v_case += v / reps;
            points[i].mean_v_reference += ref / reps;
            points[i].gaps.push_back(gap);
            if (gap) defined[i].push_back(*gap);
        }
    }
    for (std::size_t i = 0; i < cases.size(); ++i) points[i].relative_gap = summarize(defined[i]);
    return points;
}

} // namespace detail

/// Relative gap of each case against case 0 for every base noise level.
inline std::vector<SweepPoint> sweep_sigma(const Scenario& s, const std::vector<double>& sigma2s,
                                           const std::vector<int>& cases, int reps, std::uint64_t seed,
                                           int iterations, VirtualSupport support = VirtualSupport::reachable)
{
    std::vector<SweepPoint> out;
    for (double v : sigma2s) {
        auto pts = detail::sweep_point(with_sigma2(s, v), v, cases, reps, seed, iterations, support);
        out.insert(out.end(), pts.begin(), pts.end());
    }
    return out;
}

/// Case 1 gap for each share of discrete applications among the arrivals.
inline std::vector<SweepPoint> sweep_penetration(const Scenario& s, const std::vector<double>& fractions, int reps,
                                                 std::uint64_t seed, int iterations,
                                                 VirtualSupport support = VirtualSupport::reachable)
{
    if (!s.arrival_model) throw MissingArrivalRecord("penetration sweep needs an arrival model");
    std::vector<SweepPoint> out;
    for (double f : fractions) {
        Scenario sf = s;
        sf.arrival_model->continuous_fraction = 1.0 - f;
        auto pts = detail::sweep_point(sf, f, {1}, reps, seed, iterations, support);
        out.insert(out.end(), pts.begin(), pts.end());
    }
    return out;
}

struct IterationPoint {
    int iterations = 0;
    Aggregate objective;
    double min = 0.0;
    double max = 0.0;
};

/// Offline V(d^K) on the realized base; one run per seed, read at each K.
inline std::vector<IterationPoint> sweep_iterations(const Scenario& s, const std::vector<int>& ks, int reps,
                                                    std::uint64_t seed)
{
    int k_max = 0;
    for (int k : ks) k_max = std::max(k_max, k);
    std::vector<std::vector<double>> values(ks.size());
    for (int r = 0; r < reps; ++r) {
        const RepInputs rep = draw_rep(s, rep_seed(seed, r));
        const RunTrace trace =
            offds_run(s.with_applications(rep.arrivals), realized_base(s.base, rep.noise), k_max, rep.seed);
        for (std::size_t i = 0; i < ks.size(); ++i) values[i].push_back(trace.objective.at(static_cast<std::size_t>(ks[i])));
    }
    std::vector<IterationPoint> out;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        IterationPoint p;
        p.iterations = ks[i];
        p.objective = summarize(values[i]);
        p.min = *std::min_element(values[i].begin(), values[i].end());
        p.max = *std::max_element(values[i].begin(), values[i].end());
        out.push_back(p);
    }
    return out;
}

inline void write_case_summary(std::ostream& os, const CaseSummary& c)
{
    std::vector<SummaryRow> rows;
    for (const auto& r : c.reps) rows.push_back({r.seed, r.v_case, r.v_reference, r.relative_gap});
    write_summary(os, rows);
}

inline void write_sweep(std::ostream& os, const std::string& parameter, const std::vector<SweepPoint>& pts)
{
    os << parameter << ",case,mean_relative_gap,std_error,mean_V_case,mean_V_offline,reps\n";
    for (const auto& p : pts) {
        os << fmt(p.value) << ',' << p.case_id << ',' << fmt(p.relative_gap.mean) << ',' << fmt(p.relative_gap.std_error)
           << ',' << fmt(p.mean_v_case) << ',' << fmt(p.mean_v_reference) << ',' << p.relative_gap.count << '\n';
    }
}

inline void write_iteration_study(std::ostream& os, const std::vector<IterationPoint>& pts)
{
    os << "iterations,mean_V,std_V,min_V,max_V,seeds\n";
    for (const auto& p : pts) {
        os << p.iterations << ',' << fmt(p.objective.mean) << ',' << fmt(p.objective.std_dev) << ',' << fmt(p.min)
           << ',' << fmt(p.max) << ',' << p.objective.count << '\n';
    }
}

inline json manifest(const std::string& command, const Scenario& s, std::uint64_t seed, const json& config)
{
    return json{{"command", command},
                {"version", version_string},
                {"seed", seed},
                {"config", config},
                {"scenario", scenario_to_json(s)}};
}

} // namespace dshape
