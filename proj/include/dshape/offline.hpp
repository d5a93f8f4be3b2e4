#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "dshape/blocks.hpp"
#include "dshape/errors.hpp"
#include "dshape/metrics.hpp"
#include "dshape/model.hpp"
#include "dshape/scenario.hpp"
#include "dshape/subproblems.hpp"

namespace dshape {

/*
 * Full-day schedule. `discrete` holds the sampled placements; for relaxed
 * solutions it holds the points of the convex hulls instead and
 * `discrete_start` is empty.
 */
struct ScheduleState {
    Profile base;
    double normalizer = 1.0;
    std::vector<Profile> continuous;
    std::vector<Profile> discrete;
    std::vector<int> discrete_start; // 1-based start slot of each sampled placement
    std::vector<Profile> relaxed_points;
    std::vector<SimplexWeights> weights;
    Profile d;
    int iteration = 0;

    Profile aggregate() const
    {
        Profile s = base;
        for (const auto& p : continuous) s += p;
        for (const auto& p : discrete) s += p;
        return s;
    }
};

struct RunTrace {
    std::vector<double> objective;              // V(d^k), k = 0..K
    std::vector<double> max_change;             // ||x^k||_inf, 0 for k = 0
    std::vector<std::vector<int>> placements;   // 1-based start slots per iteration
    ScheduleState final_state;
    std::uint64_t seed = 0;
};

struct OffdsOptions {
    // stop before K once the run sits at a fixed point (see run_blocks)
    std::optional<double> stop_tol;
};

/// Keys of the random streams: continuous DAs by list index, discrete DAs after them.
inline std::uint64_t continuous_key(std::size_t index) { return index; }
inline std::uint64_t discrete_key(std::size_t continuous_count, std::size_t index)
{
    return continuous_count + index;
}

inline double population_normalizer(std::size_t count) { return std::max<double>(1.0, static_cast<double>(count)); }

inline BlockProblem offline_problem(const Scenario& s, const Profile& base, std::uint64_t seed)
{
    if (base.size() != s.grid.slots) throw LengthMismatch(static_cast<std::size_t>(s.grid.slots), static_cast<std::size_t>(base.size()));
    BlockProblem prob;
    prob.fixed = base;
    prob.normalizer = population_normalizer(s.population());
    prob.algo = s.algo;
    prob.seed = seed;
    prob.step = 1;
    for (std::size_t i = 0; i < s.continuous_das.size(); ++i) {
        const auto& da = s.continuous_das[i];
        const int begin = std::max(da.arrival, 1) - 1;
        const int len = std::min(da.deadline, s.grid.slots) - begin;
        prob.continuous.push_back(make_continuous_block(continuous_key(i), begin, da.lower.segment(begin, len),
                                                        da.upper.segment(begin, len), da.budget));
    }
    for (std::size_t j = 0; j < s.discrete_das.size(); ++j) {
        prob.discrete.push_back(make_discrete_block(discrete_key(s.continuous_das.size(), j),
                                                    feasible_windows(s.discrete_das[j], 1, s.grid)));
    }
    return prob;
}

inline ScheduleState to_schedule(const BlockProblem& prob, const BlockState& state, const Signal& sig,
                                 int iteration)
{
    const int T = prob.slots();
    ScheduleState out;
    out.base = prob.fixed;
    out.normalizer = prob.normalizer;
    for (std::size_t i = 0; i < prob.continuous.size(); ++i) {
        Profile p = Profile::Zero(T);
        p.segment(prob.continuous[i].begin, state.continuous[i].size()) = state.continuous[i];
        out.continuous.push_back(std::move(p));
    }
    for (std::size_t j = 0; j < prob.discrete.size(); ++j) {
        const auto& set = prob.discrete[j].set;
        out.discrete.push_back(set.vertex(state.choice[j]));
        out.discrete_start.push_back(set.start_slot(state.choice[j]));
        out.relaxed_points.push_back(set.combination(state.weights[j].u));
        out.weights.push_back(state.weights[j]);
    }
    out.d = sig.d;
    out.iteration = iteration;
    return out;
}

inline BlockState to_block_state(const BlockProblem& prob, const ScheduleState& s)
{
    BlockState state;
    for (std::size_t i = 0; i < prob.continuous.size(); ++i) {
        const auto& b = prob.continuous[i];
        state.continuous.push_back(s.continuous.at(i).segment(b.begin, b.upper.size()));
    }
    for (std::size_t j = 0; j < prob.discrete.size(); ++j) {
        const auto& first = prob.discrete[j].set.first;
        const auto it = std::find(first.begin(), first.end(), s.discrete_start.at(j) - 1);
        if (it == first.end()) throw std::invalid_argument("schedule placement is not feasible");
        state.choice.push_back(static_cast<int>(it - first.begin()));
        state.weights.push_back(j < s.weights.size() ? s.weights[j]
                                                     : SimplexWeights::indicator(prob.discrete[j].set.size(), state.choice.back()));
    }
    recompute_aggregate(prob, state);
    return state;
}

/// p^0: continuous budgets spread over their windows, one uniformly drawn placement per discrete DA.
inline ScheduleState initial_profiles(const Scenario& s, const Profile& base, std::uint64_t seed)
{
    const BlockProblem prob = offline_problem(s, base, seed);
    const BlockState state = initial_block_state(prob);
    return to_schedule(prob, state, coordinator_signal(prob, state), 0);
}

inline RunTrace offds_run(const Scenario& s, const Profile& base, int iterations, std::uint64_t seed,
                          const OffdsOptions& options = {})
{
    const BlockProblem prob = offline_problem(s, base, seed);
    BlockRun run = run_blocks(prob, initial_block_state(prob), iterations, options.stop_tol);
    RunTrace trace;
    trace.objective = std::move(run.objective);
    trace.max_change = std::move(run.max_change);
    for (const auto& choice : run.choices) {
        std::vector<int> starts;
        for (std::size_t j = 0; j < choice.size(); ++j) starts.push_back(prob.discrete[j].set.start_slot(choice[j]));
        trace.placements.push_back(std::move(starts));
    }
    trace.final_state = to_schedule(prob, run.state, run.signal, run.iterations);
    trace.seed = seed;
    return trace;
}

/// One update from an arbitrary state, drawing with `seed`.
inline ScheduleState offds_step(const Scenario& s, const ScheduleState& from, std::uint64_t seed)
{
    const BlockProblem prob = offline_problem(s, from.base, seed);
    BlockState state = to_block_state(prob, from);
    const Signal sig = coordinator_signal(prob, state);
    descent_step(prob, state, sig, from.iteration);
    return to_schedule(prob, state, coordinator_signal(prob, state), from.iteration + 1);
}

// ---------------------------------------------------------------------------
// Relaxed problem
// ---------------------------------------------------------------------------

struct RelaxedOptimum {
    ScheduleState state; // discrete entries are points of the convex hulls
    double objective = 0.0;
    int sweeps = 0;
};

/*
 * Optimum of the relaxed problem (discrete sets replaced by their convex
 * hulls) by cyclic exact block minimization of ||b + sum p||^2, stopping once
 * a full sweep moves no profile by more than tol.
 */
inline RelaxedOptimum rods_solve(const Scenario& s, const Profile& base, double tol, int max_sweeps = 100000)
{
    const BlockProblem prob = offline_problem(s, base, 0);
    std::vector<Profile> cont;
    for (const auto& b : prob.continuous) cont.push_back(initial_continuous(b, prob.algo.bisection_tol));
    std::vector<Vec> u;
    std::vector<Profile> points;
    for (const auto& b : prob.discrete) {
        u.push_back(Vec::Constant(b.set.size(), 1.0 / b.set.size()));
        points.push_back(b.set.combination(u.back()));
    }
    auto aggregate = [&] {
        Profile S = prob.fixed;
        for (std::size_t i = 0; i < cont.size(); ++i) S.segment(prob.continuous[i].begin, cont[i].size()) += cont[i];
        for (const auto& p : points) S += p;
        return S;
    };

    Profile S = aggregate();
    int sweep = 0;
    double change = 0.0;
    for (; sweep < max_sweeps; ++sweep) {
        change = 0.0;
        for (std::size_t i = 0; i < cont.size(); ++i) {
            const auto& b = prob.continuous[i];
            const auto len = cont[i].size();
            if (len == 0) continue;
            const Profile target = cont[i] - S.segment(b.begin, len);
            Profile next = project_box_budget(target, b.lower, b.upper, b.budget, prob.algo.bisection_tol).profile;
            change = std::max(change, (next - cont[i]).cwiseAbs().maxCoeff());
            S.segment(b.begin, len) += next - cont[i];
            cont[i] = std::move(next);
        }
        for (std::size_t j = 0; j < points.size(); ++j) {
            const auto& b = prob.discrete[j];
            const Profile target = points[j] - S;
            const SimplexQpResult qp = solve_simplex_qp(b.gram, vertex_correlations(b.set, target),
                                                        prob.algo.simplex_tol, prob.algo.simplex_max_iters);
            if (!qp.converged) throw MaxItersExceeded("rods_solve: discrete block did not converge", qp.u, qp.residual);
            Profile next = b.set.combination(qp.u);
            change = std::max(change, (next - points[j]).cwiseAbs().maxCoeff());
            S += next - points[j];
            points[j] = std::move(next);
            u[j] = qp.u;
        }
        S = aggregate();
        if (change <= tol) break;
    }
    if (change > tol) {
        throw MaxItersExceeded("rods_solve: no convergence after " + std::to_string(max_sweeps) + " sweeps", S,
                               change);
    }

    RelaxedOptimum out;
    ScheduleState& st = out.state;
    st.base = prob.fixed;
    st.normalizer = prob.normalizer;
    for (std::size_t i = 0; i < cont.size(); ++i) {
        Profile p = Profile::Zero(prob.slots());
        p.segment(prob.continuous[i].begin, cont[i].size()) = cont[i];
        st.continuous.push_back(std::move(p));
    }
    for (std::size_t j = 0; j < points.size(); ++j) {
        st.discrete.push_back(points[j]);
        st.relaxed_points.push_back(points[j]);
        st.weights.push_back(SimplexWeights{u[j]});
    }
    st.d = S / prob.normalizer;
    st.iteration = sweep;
    out.objective = variance_objective(st.d);
    out.sweeps = sweep + 1;
    return out;
}

// ---------------------------------------------------------------------------
// Equilibrium conditions
// ---------------------------------------------------------------------------

enum class EquilibriumKind {
    fixed_point, // fixed point of the randomized iteration (discrete profiles are placements)
    relaxed      // first-order optimality of the relaxed problem
};

struct EquilibriumReport {
    bool satisfied = false;
    double continuous_residual = 0.0;
    double discrete_residual = 0.0;
};

/*
 * Largest violation of the variational inequalities of each block.
 *
 * Continuous blocks: <d, p' - p_n> >= 0 over the box-budget set. Discrete
 * blocks, fixed_point: <N d - p_n, f_a - p_n> / (N - 1) >= 0 for every
 * placement; relaxed: <d, f_a - p_n> >= 0.
 */
inline EquilibriumReport equilibrium_check(const ScheduleState& state, const Scenario& s,
                                           EquilibriumKind kind, double tol)
{
    EquilibriumReport r;
    const Profile S = state.aggregate();
    const double N = state.normalizer;
    const Profile d = S / N;
    for (std::size_t i = 0; i < s.continuous_das.size(); ++i) {
        const auto& da = s.continuous_das[i];
        const Profile& p = state.continuous.at(i);
        const double gap = d.dot(p) - box_budget_linear_min(d, da.lower, da.upper, da.budget);
        r.continuous_residual = std::max(r.continuous_residual, gap);
    }
    for (std::size_t j = 0; j < s.discrete_das.size(); ++j) {
        const FeasibleSet set = feasible_windows(s.discrete_das[j], 1, s.grid);
        const Profile& p = state.discrete.at(j);
        Profile g;
        if (kind == EquilibriumKind::relaxed) {
            g = d;
        } else if (N <= 1.0) {
            g = S - p;
        } else {
            g = (S - p) / (N - 1.0);
        }
        const Vec scores = vertex_correlations(set, g);
        r.discrete_residual = std::max(r.discrete_residual, g.dot(p) - scores.minCoeff());
    }
    r.satisfied = r.continuous_residual <= tol && r.discrete_residual <= tol;
    return r;
}

} // namespace dshape
