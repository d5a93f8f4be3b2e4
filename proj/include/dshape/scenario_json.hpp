#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "dshape/errors.hpp"
#include "dshape/scenario.hpp"
#include "dshape/traffic.hpp"

namespace dshape {

using json = nlohmann::json;

inline constexpr const char* version_string = "0.1.0";

namespace detail {

inline void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ScenarioError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ScenarioError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T field(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) throw ScenarioError(where + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ScenarioError(where + "." + key + ": " + e.what());
    }
}

template <class T>
T field_or(const json& j, const char* key, T fallback, const std::string& where)
{
    return j.contains(key) ? field<T>(j, key, where) : fallback;
}

inline Profile profile_from(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ScenarioError(where + ": expected an array of numbers");
    Profile p(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ScenarioError(where + ": expected an array of numbers");
        p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return p;
}

inline json profile_to(const Profile& p) { return json(std::vector<double>(p.data(), p.data() + p.size())); }

} // namespace detail

/*
 * Parses a scenario document. See docs/scenario-schema.md. `base_dir`
 * resolves relative trace paths.
 */
inline Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir = {})
{
    using namespace detail;
    require_keys(j, "scenario", {"grid", "base", "continuous_das", "discrete_das", "arrival_model", "algo", "seed"});
    Scenario s;

    const json& g = j.at("grid");
    require_keys(g, "grid", {"slots", "slot_minutes"});
    s.grid.slots = field<int>(g, "slots", "grid");
    s.grid.slot_minutes = field_or<int>(g, "slot_minutes", 30, "grid");

    const json& b = j.at("base");
    require_keys(b, "base", {"mean", "trace_csv", "diurnal", "deviation", "clamp_at_zero"});
    const int sources = static_cast<int>(b.contains("mean")) + static_cast<int>(b.contains("trace_csv"))
                        + static_cast<int>(b.contains("diurnal"));
    if (sources != 1) throw ScenarioError("base: give exactly one of 'mean', 'trace_csv', 'diurnal'");
    if (b.contains("mean")) {
        s.base.mean = profile_from(b.at("mean"), "base.mean");
    } else if (b.contains("trace_csv")) {
        std::filesystem::path path = field<std::string>(b, "trace_csv", "base");
        if (path.is_relative()) path = base_dir / path;
        s.base.mean = load_trace_csv(path.string(), s.grid.slots);
    } else {
        const json& dj = b.at("diurnal");
        require_keys(dj, "base.diurnal", {"start_hour", "scale"});
        s.base.mean = field_or<double>(dj, "scale", 1.0, "base.diurnal")
                      * diurnal_mean(s.grid.slots, s.grid.slot_minutes,
                                     field_or<double>(dj, "start_hour", 16.0, "base.diurnal"));
    }
    s.base.clamp_at_zero = field_or<bool>(b, "clamp_at_zero", true, "base");
    if (b.contains("deviation")) {
        const json& d = b.at("deviation");
        const auto kind = field<std::string>(d, "kind", "base.deviation");
        if (kind == "none") {
            require_keys(d, "base.deviation", {"kind"});
            s.base.deviation = NoDeviation{};
        } else if (kind == "cumulative") {
            require_keys(d, "base.deviation", {"kind", "sigma2"});
            s.base.deviation = CumulativeDeviation{field<double>(d, "sigma2", "base.deviation")};
        } else if (kind == "causal_filter") {
            require_keys(d, "base.deviation", {"kind", "delta2", "impulse"});
            CausalFilterDeviation cf;
            cf.delta2 = field<double>(d, "delta2", "base.deviation");
            cf.impulse = field_or<std::vector<double>>(d, "impulse", {1.0}, "base.deviation");
            s.base.deviation = cf;
        } else {
            throw ScenarioError("base.deviation: unknown kind '" + kind + "'");
        }
    }

    if (j.contains("continuous_das")) {
        for (const json& c : j.at("continuous_das")) {
            require_keys(c, "continuous_das", {"id", "arrival", "deadline", "budget", "lower", "upper", "cap"});
            const auto id = field<std::string>(c, "id", "continuous_das");
            const std::string where = "continuous_das[" + id + "]";
            const int arrival = field<int>(c, "arrival", where);
            const int deadline = field<int>(c, "deadline", where);
            const double budget = field<double>(c, "budget", where);
            if (c.contains("cap")) {
                if (c.contains("lower") || c.contains("upper")) {
                    throw ScenarioError(where + ": 'cap' excludes 'lower'/'upper'");
                }
                s.continuous_das.push_back(
                    ContinuousDA::with_cap(id, arrival, deadline, budget, field<double>(c, "cap", where), s.grid));
            } else {
                ContinuousDA da;
                da.id = id;
                da.arrival = arrival;
                da.deadline = deadline;
                da.budget = budget;
                da.upper = profile_from(c.at("upper"), where + ".upper");
                da.lower = c.contains("lower") ? profile_from(c.at("lower"), where + ".lower")
                                               : Profile::Zero(da.upper.size());
                s.continuous_das.push_back(std::move(da));
            }
        }
    }
    if (j.contains("discrete_das")) {
        for (const json& d : j.at("discrete_das")) {
            require_keys(d, "discrete_das", {"id", "arrival", "deadline", "rate", "length", "budget"});
            const auto id = field<std::string>(d, "id", "discrete_das");
            const std::string where = "discrete_das[" + id + "]";
            const int arrival = field<int>(d, "arrival", where);
            const int deadline = field<int>(d, "deadline", where);
            const double rate = field<double>(d, "rate", where);
            if (d.contains("length") == d.contains("budget")) {
                throw ScenarioError(where + ": give exactly one of 'length', 'budget'");
            }
            if (d.contains("length")) {
                s.discrete_das.push_back(DiscreteDA{id, arrival, deadline, rate, field<int>(d, "length", where)});
            } else {
                s.discrete_das.push_back(
                    DiscreteDA::from_budget(id, arrival, deadline, field<double>(d, "budget", where), rate));
            }
        }
    }
    if (j.contains("arrival_model")) {
        const json& a = j.at("arrival_model");
        require_keys(a, "arrival_model", {"shift", "rate", "continuous_fraction", "budget_min", "budget_max",
                                          "slack_min", "slack_max", "rate_cap", "cutoff"});
        ArrivalModel m;
        m.shift = field_or(a, "shift", m.shift, "arrival_model");
        m.rate = field_or(a, "rate", m.rate, "arrival_model");
        m.continuous_fraction = field_or(a, "continuous_fraction", m.continuous_fraction, "arrival_model");
        m.budget_min = field_or(a, "budget_min", m.budget_min, "arrival_model");
        m.budget_max = field_or(a, "budget_max", m.budget_max, "arrival_model");
        m.slack_min = field_or(a, "slack_min", m.slack_min, "arrival_model");
        m.slack_max = field_or(a, "slack_max", m.slack_max, "arrival_model");
        m.rate_cap = field_or(a, "rate_cap", m.rate_cap, "arrival_model");
        m.cutoff = field_or(a, "cutoff", m.cutoff, "arrival_model");
        s.arrival_model = m;
    }
    if (j.contains("algo")) {
        const json& a = j.at("algo");
        require_keys(a, "algo", {"iterations", "bisection_tol", "simplex_tol", "simplex_max_iters"});
        s.algo.iterations = field_or(a, "iterations", s.algo.iterations, "algo");
        s.algo.bisection_tol = field_or(a, "bisection_tol", s.algo.bisection_tol, "algo");
        s.algo.simplex_tol = field_or(a, "simplex_tol", s.algo.simplex_tol, "algo");
        s.algo.simplex_max_iters = field_or(a, "simplex_max_iters", s.algo.simplex_max_iters, "algo");
    }
    s.seed = field_or<std::uint64_t>(j, "seed", 0, "scenario");
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
    return scenario_from_json(j, path.parent_path());
}

/// Fully expanded document: the base mean and every bound vector written out.
inline json scenario_to_json(const Scenario& s)
{
    using detail::profile_to;
    json j;
    j["grid"] = {{"slots", s.grid.slots}, {"slot_minutes", s.grid.slot_minutes}};
    json base;
    base["mean"] = profile_to(s.base.mean);
    base["clamp_at_zero"] = s.base.clamp_at_zero;
    if (const auto* cum = std::get_if<CumulativeDeviation>(&s.base.deviation)) {
        base["deviation"] = {{"kind", "cumulative"}, {"sigma2", cum->sigma2}};
    } else if (const auto* cf = std::get_if<CausalFilterDeviation>(&s.base.deviation)) {
        base["deviation"] = {{"kind", "causal_filter"}, {"delta2", cf->delta2}, {"impulse", cf->impulse}};
    } else {
        base["deviation"] = {{"kind", "none"}};
    }
    j["base"] = base;
    j["continuous_das"] = json::array();
    for (const auto& da : s.continuous_das) {
        j["continuous_das"].push_back({{"id", da.id},
                                       {"arrival", da.arrival},
                                       {"deadline", da.deadline},
                                       {"budget", da.budget},
                                       {"lower", profile_to(da.lower)},
                                       {"upper", profile_to(da.upper)}});
    }
    j["discrete_das"] = json::array();
    for (const auto& da : s.discrete_das) {
        j["discrete_das"].push_back({{"id", da.id},
                                     {"arrival", da.arrival},
                                     {"deadline", da.deadline},
                                     {"rate", da.rate},
                                     {"length", da.length}});
    }
    if (s.arrival_model) {
        const ArrivalModel& m = *s.arrival_model;
        j["arrival_model"] = {{"shift", m.shift},           {"rate", m.rate},
                              {"continuous_fraction", m.continuous_fraction},
                              {"budget_min", m.budget_min}, {"budget_max", m.budget_max},
                              {"slack_min", m.slack_min},   {"slack_max", m.slack_max},
                              {"rate_cap", m.rate_cap},     {"cutoff", m.cutoff}};
    }
    j["algo"] = {{"iterations", s.algo.iterations},
                 {"bisection_tol", s.algo.bisection_tol},
                 {"simplex_tol", s.algo.simplex_tol},
                 {"simplex_max_iters", s.algo.simplex_max_iters}};
    j["seed"] = s.seed;
    return j;
}

} // namespace dshape
