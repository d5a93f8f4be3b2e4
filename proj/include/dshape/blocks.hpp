#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dshape/metrics.hpp"
#include "dshape/model.hpp"
#include "dshape/rng.hpp"
#include "dshape/subproblems.hpp"

namespace dshape {

/*
 * One scheduling problem over a horizon of H slots, as seen by the
 * coordinator: a fixed load (base traffic plus anything that can no longer
 * move), an optional volume of virtual traffic, and the adjustable blocks.
 * Offline runs use the whole day as horizon; the online controller builds one
 * of these per slot.
 */
struct ContinuousBlock {
    std::uint64_t key = 0;
    int begin = 0; // horizon index of the first window slot
    Profile lower; // window length
    Profile upper;
    double budget = 0.0;

    int end() const { return begin + static_cast<int>(upper.size()); }
};

struct DiscreteBlock {
    std::uint64_t key = 0;
    FeasibleSet set; // on the horizon grid
    Eigen::MatrixXd gram;
};

struct BlockProblem {
    Profile fixed;
    double virtual_total = 0.0; // water-filled over horizon slots [1, virtual_end)
    int virtual_end = -1;       // -1: up to the end of the horizon
    double normalizer = 1.0;    // N
    std::vector<ContinuousBlock> continuous;
    std::vector<DiscreteBlock> discrete;
    AlgoParams algo;
    std::uint64_t seed = 0;
    std::uint64_t step = 1; // slot the problem is solved at; labels the random streams

    int slots() const { return static_cast<int>(fixed.size()); }
};

struct BlockState {
    std::vector<Profile> continuous; // window length
    std::vector<SimplexWeights> weights;
    std::vector<int> choice;         // sampled placement per discrete block
    Profile aggregate;               // sum of all block profiles, horizon length
};

struct Signal {
    Profile q;
    Profile d;
};

inline ContinuousBlock make_continuous_block(std::uint64_t key, int begin, Profile lower, Profile upper,
                                             double budget)
{
    return ContinuousBlock{key, begin, std::move(lower), std::move(upper), budget};
}

inline DiscreteBlock make_discrete_block(std::uint64_t key, FeasibleSet set)
{
    DiscreteBlock b{key, std::move(set), {}};
    b.gram = gram_matrix(b.set);
    return b;
}

/// Stream for draw `draw` of block `key` at scheduling step `step`.
inline Substream algorithm_stream(std::uint64_t seed, std::uint64_t step, std::uint64_t key,
                                  std::uint64_t draw)
{
    return Substream(seed ^ stream::algorithm, step, key, draw);
}

inline void recompute_aggregate(const BlockProblem& prob, BlockState& state)
{
    state.aggregate = Profile::Zero(prob.slots());
    for (std::size_t i = 0; i < prob.continuous.size(); ++i) {
        const auto& b = prob.continuous[i];
        state.aggregate.segment(b.begin, b.upper.size()) += state.continuous[i];
    }
    for (std::size_t j = 0; j < prob.discrete.size(); ++j) {
        const auto& set = prob.discrete[j].set;
        state.aggregate.segment(set.first[static_cast<std::size_t>(state.choice[j])], set.length).array()
            += set.rate;
    }
}

/// Budget spread evenly over the window, made feasible by projection.
inline Profile initial_continuous(const ContinuousBlock& b, double tol)
{
    const auto len = b.upper.size();
    if (len == 0) return Profile();
    const Profile spread = Profile::Constant(len, b.budget / static_cast<double>(len));
    return project_box_budget(spread, b.lower, b.upper, b.budget, tol).profile;
}

/// Uniform weights over the placements, one placement drawn with draw index 0.
inline int initial_choice(const BlockProblem& prob, const DiscreteBlock& b, SimplexWeights& weights)
{
    weights = SimplexWeights::uniform(b.set.size());
    Substream rng = algorithm_stream(prob.seed, prob.step, b.key, 0);
    return sample_vertex(weights, rng);
}

inline BlockState initial_block_state(const BlockProblem& prob)
{
    BlockState s;
    for (const auto& b : prob.continuous) s.continuous.push_back(initial_continuous(b, prob.algo.bisection_tol));
    for (const auto& b : prob.discrete) {
        SimplexWeights w;
        s.choice.push_back(initial_choice(prob, b, w));
        s.weights.push_back(std::move(w));
    }
    recompute_aggregate(prob, s);
    return s;
}

/*
 * Coordinator: virtual traffic by water filling over horizon slots
 * [1, virtual_end) (the current slot gets none), then
 * d = (fixed + q + sum p) / N.
 */
inline Signal coordinator_signal(const BlockProblem& prob, const BlockState& state)
{
    const int H = prob.slots();
    Signal sig;
    const Profile load = prob.fixed + state.aggregate;
    sig.q = Profile::Zero(H);
    const int end = prob.virtual_end < 0 ? H : std::min(prob.virtual_end, H);
    if (prob.virtual_total > 0.0 && end > 1) {
        sig.q.segment(1, end - 1) = water_fill(load.segment(1, end - 1), prob.virtual_total);
    }
    sig.d = (load + sig.q) / prob.normalizer;
    return sig;
}

/*
 * One synchronous update of every block against the same announced d.
 * Returns the largest absolute change of any block profile.
 */
inline double descent_step(const BlockProblem& prob, BlockState& state, const Signal& sig, int iteration)
{
    const double N = prob.normalizer;
    double max_change = 0.0;
    for (std::size_t i = 0; i < prob.continuous.size(); ++i) {
        const auto& b = prob.continuous[i];
        Profile& p = state.continuous[i];
        if (p.size() == 0) continue;
        const Profile target = p - sig.d.segment(b.begin, p.size());
        Profile next = project_box_budget(target, b.lower, b.upper, b.budget, prob.algo.bisection_tol).profile;
        max_change = std::max(max_change, (next - p).cwiseAbs().maxCoeff());
        p = std::move(next);
    }
    for (std::size_t j = 0; j < prob.discrete.size(); ++j) {
        const auto& b = prob.discrete[j];
        const int old_choice = state.choice[j];
        Profile current = Profile::Zero(prob.slots());
        current.segment(b.set.first[static_cast<std::size_t>(old_choice)], b.set.length).setConstant(b.set.rate);
        if (N > 1.0) {
            const Profile y = (N / (N - 1.0)) * (current - sig.d);
            const Vec c = vertex_correlations(b.set, y);
            const SimplexQpResult qp =
                solve_simplex_qp(b.gram, c, prob.algo.simplex_tol, prob.algo.simplex_max_iters);
            if (!qp.converged) {
                throw MaxItersExceeded("discrete update did not reach tolerance", qp.u, qp.residual);
            }
            state.weights[j].u = qp.u;
        } else {
            // the quadratic term vanishes: best vertex of <d - p, f_a>
            const Vec scores = vertex_correlations(b.set, sig.d - current);
            Eigen::Index best = 0;
            for (Eigen::Index a = 1; a < scores.size(); ++a) {
                if (scores[a] < scores[best]) best = a;
            }
            state.weights[j] = SimplexWeights::indicator(b.set.size(), static_cast<int>(best));
        }
        Substream rng = algorithm_stream(prob.seed, prob.step, b.key, static_cast<std::uint64_t>(iteration) + 1);
        state.choice[j] = sample_vertex(state.weights[j], rng);
        if (state.choice[j] != old_choice) max_change = std::max(max_change, b.set.rate);
    }
    recompute_aggregate(prob, state);
    return max_change;
}

inline bool weights_are_point_masses(const BlockState& state)
{
    for (const auto& w : state.weights) {
        if (w.u.maxCoeff() < 1.0 - 1e-12) return false;
    }
    return true;
}

struct BlockRun {
    BlockState state;
    Signal signal;                          // announced for the final state
    std::vector<double> objective;          // V(d^k), k = 0..iterations
    std::vector<double> max_change;         // 0 for the initial row
    std::vector<std::vector<int>> choices;  // per iteration, per discrete block
    int iterations = 0;
};

/*
 * Runs `iterations` updates from `state`. With `stop_tol`, stops early once
 * no profile moves by more than stop_tol and every relaxed discrete point is
 * a vertex, i.e. the iteration has reached a fixed point.
 */
inline BlockRun run_blocks(const BlockProblem& prob, BlockState state, int iterations,
                           std::optional<double> stop_tol = {})
{
    BlockRun run;
    Signal sig = coordinator_signal(prob, state);
    run.objective.push_back(variance_objective(sig.d));
    run.max_change.push_back(0.0);
    run.choices.push_back(state.choice);
    for (int k = 0; k < iterations; ++k) {
        const double change = descent_step(prob, state, sig, k);
        sig = coordinator_signal(prob, state);
        run.objective.push_back(variance_objective(sig.d));
        run.max_change.push_back(change);
        run.choices.push_back(state.choice);
        run.iterations = k + 1;
        if (stop_tol && change <= *stop_tol && weights_are_point_masses(state)) break;
    }
    run.state = std::move(state);
    run.signal = std::move(sig);
    return run;
}

} // namespace dshape
