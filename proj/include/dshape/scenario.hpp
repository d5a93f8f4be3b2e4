#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dshape/model.hpp"
#include "dshape/traffic.hpp"

namespace dshape {

struct Scenario {
    TimeGrid grid;
    BaseTrafficModel base;
    std::vector<ContinuousDA> continuous_das;
    std::vector<DiscreteDA> discrete_das;
    std::optional<ArrivalModel> arrival_model;
    AlgoParams algo;
    std::uint64_t seed = 0;

    std::size_t population() const noexcept { return continuous_das.size() + discrete_das.size(); }

    DeferrableSet applications() const { return DeferrableSet{continuous_das, discrete_das}; }

    Scenario with_applications(DeferrableSet das) const
    {
        Scenario s = *this;
        s.continuous_das = std::move(das.continuous);
        s.discrete_das = std::move(das.discrete);
        return s;
    }
};

struct Violation {
    std::string id; // application id, or the section name for scenario-level problems
    std::string reason;

    bool operator==(const Violation&) const = default;
};

namespace detail {

inline bool all_finite(const Profile& p) { return p.allFinite(); }

inline void check_continuous(const ContinuousDA& da, const TimeGrid& grid,
                             std::vector<Violation>& out)
{
    const auto T = static_cast<Eigen::Index>(grid.slots);
    if (da.arrival < 1 || da.deadline > grid.slots || da.arrival > da.deadline) {
        out.push_back({da.id, "window outside grid"});
    }
    if (da.lower.size() != T || da.upper.size() != T) {
        out.push_back({da.id, "bound length mismatch"});
        return;
    }
    if (!all_finite(da.lower) || !all_finite(da.upper) || !std::isfinite(da.budget)) {
        out.push_back({da.id, "non-finite value"});
        return;
    }
    if (!(da.budget > 0.0)) out.push_back({da.id, "budget must be positive"});
    if ((da.lower.array() < 0.0).any()) out.push_back({da.id, "negative lower bound"});
    if ((da.lower.array() > da.upper.array()).any()) out.push_back({da.id, "lower bound exceeds upper bound"});
    for (int t = 1; t <= grid.slots; ++t) {
        if ((t < da.arrival || t > da.deadline) && da.upper[t - 1] != 0.0) {
            out.push_back({da.id, "rate allowed outside window"});
            break;
        }
    }
    const double slack = 1e-9 * std::max(1.0, da.budget);
    if (da.budget > da.upper.sum() + slack) out.push_back({da.id, "budget exceeds capacity"});
    if (da.budget < da.lower.sum() - slack) out.push_back({da.id, "budget below minimum rate"});
}

inline void check_discrete(const DiscreteDA& da, const TimeGrid& grid, std::vector<Violation>& out)
{
    if (!(da.rate > 0.0) || !std::isfinite(da.rate)) out.push_back({da.id, "rate must be positive"});
    if (da.length < 1) out.push_back({da.id, "length must be positive"});
    if (da.arrival < 1 || da.deadline > grid.slots) out.push_back({da.id, "window outside grid"});
    if (da.deadline - da.arrival < da.length) out.push_back({da.id, "empty feasible set"});
}

} // namespace detail

/// Every invariant violation, in a deterministic order. Empty means valid.
inline std::vector<Violation> validate_scenario(const Scenario& s)
{
    std::vector<Violation> out;
    const TimeGrid& grid = s.grid;
    if (grid.slots < 1) {
        out.push_back({"grid", "slots must be positive"});
        return out;
    }
    if (grid.slot_minutes < 1) out.push_back({"grid", "slot_minutes must be positive"});

    if (s.base.mean.size() != grid.slots) {
        out.push_back({"base", "mean length mismatch"});
    } else if (!s.base.mean.allFinite() || (s.base.mean.array() < 0.0).any()) {
        out.push_back({"base", "mean must be finite and nonnegative"});
    }
    if (const auto* cum = std::get_if<CumulativeDeviation>(&s.base.deviation)) {
        if (!(cum->sigma2 >= 0.0)) out.push_back({"base", "negative sigma2"});
    } else if (const auto* cf = std::get_if<CausalFilterDeviation>(&s.base.deviation)) {
        if (!(cf->delta2 >= 0.0)) out.push_back({"base", "negative delta2"});
        if (cf->impulse.empty() || cf->impulse.front() != 1.0) {
            out.push_back({"base", "impulse response must start with 1"});
        }
    }

    if (s.population() == 0 && !s.arrival_model) {
        out.push_back({"scenario", "no deferrable applications"});
    }

    std::set<std::string> seen;
    auto check_id = [&](const std::string& id) {
        if (!seen.insert(id).second) out.push_back({id, "duplicate id"});
    };
    for (const auto& da : s.continuous_das) {
        check_id(da.id);
        detail::check_continuous(da, grid, out);
    }
    for (const auto& da : s.discrete_das) {
        check_id(da.id);
        detail::check_discrete(da, grid, out);
    }

    if (s.arrival_model) {
        const ArrivalModel& m = *s.arrival_model;
        if (m.shift < 0.0 || m.rate < 0.0 || m.budget_min < 0.0 || m.slack_min < 0 || m.cutoff < 0) {
            out.push_back({"arrival_model", "parameters must be nonnegative"});
        }
        if (m.continuous_fraction < 0.0 || m.continuous_fraction > 1.0) {
            out.push_back({"arrival_model", "continuous_fraction outside [0, 1]"});
        }
        if (m.budget_min > m.budget_max) out.push_back({"arrival_model", "budget_min exceeds budget_max"});
        if (m.slack_min > m.slack_max) out.push_back({"arrival_model", "slack_min exceeds slack_max"});
        if (!(m.rate_cap > 0.0)) out.push_back({"arrival_model", "rate_cap must be positive"});
        if (m.rate_cap > 0.0
            && m.cutoff + static_cast<int>(std::ceil(m.budget_max / m.rate_cap)) >= grid.slots) {
            out.push_back({"arrival_model", "arrival cutoff too late for the grid"});
        }
    }

    const AlgoParams& a = s.algo;
    if (a.iterations < 1 || !(a.bisection_tol > 0.0) || !(a.simplex_tol > 0.0)
        || a.simplex_max_iters < 1) {
        out.push_back({"algo", "parameters must be positive"});
    }
    return out;
}

} // namespace dshape
