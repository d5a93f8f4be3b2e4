#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dshape/errors.hpp"

namespace dshape {

/// Traffic rate per slot. Index 0 holds slot 1.
using Profile = Eigen::VectorXd;

struct TimeGrid {
    int slots = 0;
    int slot_minutes = 30;
};

/*
 * Continuous-rate interruptible application.
 *
 * Slots are 1-based; the active window [arrival, deadline] is inclusive and
 * the rate bounds must vanish outside of it.
 */
struct ContinuousDA {
    std::string id;
    int arrival = 1;
    int deadline = 1;
    double budget = 0.0;
    Profile lower;
    Profile upper;

    /// Box [0, cap] on [arrival, deadline], zero elsewhere.
    static ContinuousDA with_cap(std::string id, int arrival, int deadline, double budget,
                                 double cap, const TimeGrid& grid)
    {
        ContinuousDA da;
        da.id = std::move(id);
        da.arrival = arrival;
        da.deadline = deadline;
        da.budget = budget;
        da.lower = Profile::Zero(grid.slots);
        da.upper = Profile::Zero(grid.slots);
        for (int t = arrival; t <= deadline && t <= grid.slots; ++t) {
            if (t >= 1) da.upper[t - 1] = cap;
        }
        return da;
    }
};

/*
 * Discrete-rate non-interruptible application: `length` consecutive slots at
 * `rate`, placed so that the last occupied slot is strictly before `deadline`.
 */
struct DiscreteDA {
    std::string id;
    int arrival = 1;
    int deadline = 1;
    double rate = 0.0;
    int length = 1;

    double budget() const noexcept { return rate * length; }

    /// Number of placements on an unconstrained grid.
    int placements() const noexcept { return deadline - arrival - length + 1; }

    /// length = ceil(budget / rate); the budget is snapped to length * rate.
    static DiscreteDA from_budget(std::string id, int arrival, int deadline, double budget,
                                  double rate)
    {
        DiscreteDA da;
        da.id = std::move(id);
        da.arrival = arrival;
        da.deadline = deadline;
        da.rate = rate;
        const double ratio = budget / rate;
        const double nearest = std::round(ratio);
        // absorb representation error, e.g. 12.000000000000002 / 3
        da.length = static_cast<int>(std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)
                                         ? nearest
                                         : std::ceil(ratio));
        if (da.length < 1) da.length = 1;
        return da;
    }
};

/*
 * The placements F_n of a discrete application, as start offsets on a grid of
 * `slots` entries. `first[a]` is the 0-based index of placement a's first
 * occupied entry; offsets are strictly increasing.
 */
struct FeasibleSet {
    int slots = 0;
    int length = 0;
    double rate = 0.0;
    std::vector<int> first;

    int size() const noexcept { return static_cast<int>(first.size()); }

    /// 1-based slot at which placement a starts (on the grid the set was built on).
    int start_slot(int a) const { return first.at(static_cast<std::size_t>(a)) + 1; }

    Profile vertex(int a) const
    {
        Profile f = Profile::Zero(slots);
        f.segment(first.at(static_cast<std::size_t>(a)), length).setConstant(rate);
        return f;
    }

    /// Point sum_a u_a f_a.
    Profile combination(const Eigen::VectorXd& u) const
    {
        Profile p = Profile::Zero(slots);
        for (int a = 0; a < size(); ++a) {
            if (u[a] != 0.0) p.segment(first[static_cast<std::size_t>(a)], length).array() += u[a] * rate;
        }
        return p;
    }

    /// Re-index onto the sub-grid [offset, offset + new_slots). Placements that
    /// start before `offset` are dropped.
    FeasibleSet shifted(int offset, int new_slots) const
    {
        FeasibleSet out;
        out.slots = new_slots;
        out.length = length;
        out.rate = rate;
        for (int f : first) {
            if (f >= offset && f - offset + length <= new_slots) out.first.push_back(f - offset);
        }
        return out;
    }
};

struct SimplexWeights {
    Eigen::VectorXd u;

    bool valid(double tol = 1e-12) const
    {
        if (u.size() == 0) return false;
        return u.minCoeff() >= 0.0 && std::abs(u.sum() - 1.0) <= tol;
    }

    static SimplexWeights uniform(int n)
    {
        return SimplexWeights{Eigen::VectorXd::Constant(n, 1.0 / n)};
    }

    static SimplexWeights indicator(int n, int a)
    {
        SimplexWeights w{Eigen::VectorXd::Zero(n)};
        w.u[a] = 1.0;
        return w;
    }
};

struct AlgoParams {
    int iterations = 30;
    double bisection_tol = 1e-10;
    double simplex_tol = 1e-9;
    int simplex_max_iters = 500;
};

/*
 * All placements of `da` that start at or after `from_slot` and end strictly
 * before the deadline. Throws EmptyFeasibleSet when none fits.
 */
inline FeasibleSet feasible_windows(const DiscreteDA& da, int from_slot, const TimeGrid& grid)
{
    FeasibleSet set;
    set.slots = grid.slots;
    set.length = da.length;
    set.rate = da.rate;
    const int first_start = std::max({da.arrival, from_slot, 1});
    const int last_start = std::min(da.deadline - da.length, grid.slots - da.length + 1);
    for (int s = first_start; s <= last_start; ++s) set.first.push_back(s - 1);
    if (set.first.empty()) throw EmptyFeasibleSet(da.id);
    return set;
}

} // namespace dshape
