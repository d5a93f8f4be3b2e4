#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dshape/blocks.hpp"
#include "dshape/errors.hpp"
#include "dshape/metrics.hpp"
#include "dshape/model.hpp"
#include "dshape/offline.hpp"
#include "dshape/scenario.hpp"
#include "dshape/traffic.hpp"

namespace dshape {

struct ContinuousPlan {
    ContinuousDA da;
    std::uint64_t key = 0;
    Profile schedule;       // full grid; slots before t are history
    double residual = 0.0;  // budget not yet committed
};

struct DiscretePlan {
    DiscreteDA da;
    std::uint64_t key = 0;
    int start = 0;          // 1-based start of the sampled placement
    bool locked = false;    // started: the schedule can no longer change
    SimplexWeights weights; // over the placements still open at the last re-plan

    bool covers(int slot) const { return slot >= start && slot < start + da.length; }
};

struct OnlineState {
    TimeGrid grid;
    int t = 1; // next slot to commit
    std::vector<ContinuousPlan> continuous;
    std::vector<DiscretePlan> discrete;
    Profile committed;  // aggregate load of every committed slot
    Profile prediction; // b(t..T) used by the last step
    double virtual_total = 0.0;
    bool planned = false;

    explicit OnlineState(TimeGrid g = {}) : grid(g), committed(Profile::Zero(g.slots)) {}

    std::size_t arrived() const noexcept { return continuous.size() + discrete.size(); }

    int locked_count() const
    {
        return static_cast<int>(std::count_if(discrete.begin(), discrete.end(),
                                              [](const DiscretePlan& p) { return p.locked; }));
    }

    /// Deferrable volume still to be served at or after slot t.
    double remaining_volume() const
    {
        double v = 0.0;
        for (const auto& c : continuous) v += std::max(0.0, c.residual);
        for (const auto& p : discrete) {
            v += p.da.rate * std::max(0, p.start + p.da.length - std::max(p.start, t));
        }
        return v;
    }
};

struct StepInput {
    DeferrableSet arrivals; // revealed at this slot
    std::vector<std::uint64_t> continuous_keys;
    std::vector<std::uint64_t> discrete_keys;
    double observed_base = 0.0; // realized b(t)
    Profile prediction;         // b_t(t..T)
    double virtual_total = 0.0; // expected deferrable volume arriving after t
    int virtual_last = 0;       // last slot that volume can occupy; 0 for the end of the day
};

struct StepRecord {
    int t = 0;
    double horizon_objective = 0.0;
    double committed = 0.0; // aggregate load executed at t
    double q_total = 0.0;
    int locked_count = 0;
    int arrivals = 0;
    bool reoptimized = false;
    bool valley_fill_feasible = false;
};

/*
 * True iff a flat aggregate over the horizon can sit on top of the predicted
 * base: C = (sum b + virtual + remaining) / H >= b(tau) for every tau.
 */
inline bool valley_fill_feasibility(const Profile& prediction, double virtual_total, double remaining_volume)
{
    if (prediction.size() == 0) return true;
    const double level = (prediction.sum() + virtual_total + remaining_volume) / static_cast<double>(prediction.size());
    return level >= prediction.maxCoeff();
}

/*
 * One slot of the shrinking-horizon controller.
 *
 * Re-plans the horizon [t, T] with `iterations` block updates whenever the
 * information changed since the previous slot (new arrivals, a different base
 * prediction or virtual volume); otherwise the previous plan stands. Then
 * commits slot t. Discrete applications whose placement starts at t become
 * locked.
 */
inline StepRecord onds_step(OnlineState& state, const StepInput& in, const AlgoParams& algo, int iterations,
                            std::uint64_t seed, bool always_reoptimize = false)
{
    const int T = state.grid.slots;
    const int t = state.t;
    if (t > T) throw std::logic_error("onds_step: day already complete");
    const int H = T - t + 1;
    if (in.prediction.size() != H) throw LengthMismatch(static_cast<std::size_t>(H), static_cast<std::size_t>(in.prediction.size()));

    StepRecord rec;
    rec.t = t;
    rec.arrivals = static_cast<int>(in.arrivals.size());

    // new applications
    std::vector<bool> fresh_continuous(state.continuous.size(), false);
    for (std::size_t i = 0; i < in.arrivals.continuous.size(); ++i) {
        ContinuousPlan plan{in.arrivals.continuous[i], in.continuous_keys.at(i), Profile::Zero(T),
                            in.arrivals.continuous[i].budget};
        state.continuous.push_back(std::move(plan));
        fresh_continuous.push_back(true);
    }
    for (std::size_t j = 0; j < in.arrivals.discrete.size(); ++j) {
        const DiscreteDA& da = in.arrivals.discrete[j];
        const FeasibleSet set = feasible_windows(da, t, state.grid);
        DiscretePlan plan{da, in.discrete_keys.at(j), 0, false, SimplexWeights::uniform(set.size())};
        Substream rng = algorithm_stream(seed, static_cast<std::uint64_t>(t), plan.key, 0);
        plan.start = set.start_slot(sample_vertex(plan.weights, rng));
        state.discrete.push_back(std::move(plan));
    }

    bool changed = always_reoptimize || !state.planned || !in.arrivals.continuous.empty()
                   || !in.arrivals.discrete.empty() || in.virtual_total != state.virtual_total;
    if (!changed) {
        const Profile previous = state.prediction.tail(H);
        changed = previous != in.prediction;
    }

    // horizon problem
    BlockProblem prob;
    prob.fixed = in.prediction;
    prob.virtual_total = in.virtual_total;
    if (in.virtual_last > 0) prob.virtual_end = std::max(0, in.virtual_last - t + 1);
    prob.normalizer = population_normalizer(state.arrived());
    prob.algo = algo;
    prob.seed = seed;
    prob.step = static_cast<std::uint64_t>(t);
    BlockState bs;
    std::vector<std::size_t> cont_index;
    std::vector<std::size_t> disc_index;
    for (std::size_t i = 0; i < state.continuous.size(); ++i) {
        const auto& plan = state.continuous[i];
        const int first = std::max(plan.da.arrival, t);
        const int last = std::min(plan.da.deadline, T);
        if (last < first) continue;
        const int len = last - first + 1;
        const int g0 = first - 1;
        prob.continuous.push_back(make_continuous_block(plan.key, first - t, plan.da.lower.segment(g0, len),
                                                        plan.da.upper.segment(g0, len),
                                                        std::max(0.0, plan.residual)));
        cont_index.push_back(i);
        if (fresh_continuous[i]) {
            bs.continuous.push_back(initial_continuous(prob.continuous.back(), algo.bisection_tol));
        } else {
            bs.continuous.push_back(plan.schedule.segment(g0, len));
        }
    }
    for (std::size_t j = 0; j < state.discrete.size(); ++j) {
        const auto& plan = state.discrete[j];
        if (plan.locked) {
            for (int tau = std::max(plan.start, t); tau < plan.start + plan.da.length; ++tau) {
                prob.fixed[tau - t] += plan.da.rate;
            }
            continue;
        }
        FeasibleSet set = feasible_windows(plan.da, t, state.grid).shifted(t - 1, H);
        const auto it = std::find(set.first.begin(), set.first.end(), plan.start - t);
        if (it == set.first.end()) throw EmptyFeasibleSet(plan.da.id);
        const int choice = static_cast<int>(it - set.first.begin());
        bs.choice.push_back(choice);
        bs.weights.push_back(plan.weights.u.size() == set.size() ? plan.weights
                                                                   : SimplexWeights::indicator(set.size(), choice));
        prob.discrete.push_back(make_discrete_block(plan.key, std::move(set)));
        disc_index.push_back(j);
    }
    recompute_aggregate(prob, bs);

    rec.valley_fill_feasible = valley_fill_feasibility(in.prediction, in.virtual_total, state.remaining_volume());

    Signal sig;
    if (changed) {
        BlockRun run = run_blocks(prob, std::move(bs), iterations);
        bs = std::move(run.state);
        sig = std::move(run.signal);
        for (std::size_t k = 0; k < cont_index.size(); ++k) {
            auto& plan = state.continuous[cont_index[k]];
            const auto& b = prob.continuous[k];
            plan.schedule.segment(t - 1 + b.begin, b.upper.size()) = bs.continuous[k];
        }
        for (std::size_t k = 0; k < disc_index.size(); ++k) {
            auto& plan = state.discrete[disc_index[k]];
            plan.start = t + prob.discrete[k].set.first[static_cast<std::size_t>(bs.choice[k])];
            plan.weights = bs.weights[k];
        }
    } else {
        sig = coordinator_signal(prob, bs);
    }
    rec.reoptimized = changed;
    rec.horizon_objective = variance_objective(sig.d);
    rec.q_total = sig.q.sum();

    // commit slot t
    double load = in.observed_base;
    for (auto& plan : state.continuous) {
        const double rate = plan.schedule[t - 1];
        load += rate;
        plan.residual -= rate;
    }
    for (auto& plan : state.discrete) {
        if (plan.start == t) plan.locked = true;
        if (plan.covers(t)) load += plan.da.rate;
    }
    state.committed[t - 1] = load;
    rec.committed = load;
    rec.locked_count = state.locked_count();

    state.prediction = in.prediction;
    state.virtual_total = in.virtual_total;
    state.planned = true;
    state.t = t + 1;
    return rec;
}

// ---------------------------------------------------------------------------
// Full-day runs
// ---------------------------------------------------------------------------

enum class ForecastMode {
    updating, // b_t refreshed every slot
    realized, // exact knowledge of the realized base
    frozen    // the forecast made at t = 1, never refreshed
};

enum class VirtualSupport {
    reachable, // slots up to the latest deadline a future arrival can have
    horizon    // every slot after the current one
};

struct OnlineConfig {
    ForecastMode forecast = ForecastMode::updating;
    bool virtual_traffic = true;      // reserve room for expected future arrivals
    VirtualSupport support = VirtualSupport::reachable;
    bool known_in_advance = false;    // every recorded application visible from t = 1
    bool always_reoptimize = false;
};

/// Base traffic truth and forecasts drawn from one noise table.
struct BaseForecast {
    BaseTrafficModel model;
    NoiseTable noise;

    Profile realized() const { return realized_base(model, noise); }
};

struct OnlineResult {
    Profile committed; // aggregate load per slot
    Profile d;         // committed / N
    double objective = 0.0;
    std::vector<StepRecord> steps;
    OnlineState final_state;
};

inline OnlineResult onds_run(const Scenario& s, const DeferrableSet& arrivals, const BaseForecast& forecast,
                             const OnlineConfig& cfg, int iterations, std::uint64_t seed)
{
    const int T = s.grid.slots;
    if (forecast.model.mean.size() != T) throw LengthMismatch(static_cast<std::size_t>(T), static_cast<std::size_t>(forecast.model.mean.size()));
    const Profile realized = forecast.realized();
    const Profile frozen = predict_base(forecast.model, forecast.noise, 1).rates;

    OnlineState state(s.grid);
    OnlineResult out;
    for (int t = 1; t <= T; ++t) {
        StepInput in;
        for (std::size_t i = 0; i < arrivals.continuous.size(); ++i) {
            const auto& da = arrivals.continuous[i];
            if (cfg.known_in_advance ? t == 1 : da.arrival == t) {
                in.arrivals.continuous.push_back(da);
                in.continuous_keys.push_back(continuous_key(i));
            }
        }
        for (std::size_t j = 0; j < arrivals.discrete.size(); ++j) {
            const auto& da = arrivals.discrete[j];
            if (cfg.known_in_advance ? t == 1 : da.arrival == t) {
                in.arrivals.discrete.push_back(da);
                in.discrete_keys.push_back(discrete_key(arrivals.continuous.size(), j));
            }
        }
        in.observed_base = realized[t - 1];
        switch (cfg.forecast) {
        case ForecastMode::realized: in.prediction = realized.tail(T - t + 1); break;
        case ForecastMode::frozen: in.prediction = frozen.tail(T - t + 1); break;
        case ForecastMode::updating: in.prediction = predict_base(forecast.model, forecast.noise, t).rates; break;
        }
        if (cfg.virtual_traffic && !cfg.known_in_advance && s.arrival_model) {
            in.virtual_total = s.arrival_model->expected_volume_after(t, T);
            if (cfg.support == VirtualSupport::reachable) {
                in.virtual_last = std::min(T, s.arrival_model->latest_deadline());
            }
        }
        out.steps.push_back(onds_step(state, in, s.algo, iterations, seed, cfg.always_reoptimize));
    }
    out.committed = state.committed;
    out.d = out.committed / population_normalizer(arrivals.size());
    out.objective = variance_objective(out.d);
    out.final_state = std::move(state);
    return out;
}

/*
 * Bound on E[V(online) - V(offline)]:
 *   (2 / (T N^2)) sum ||p_n||^2 + (dl^2 / T) sum_{t=2}^{T} 1/t
 *   + (delta2 / T^2) sum_{t=0}^{T-1} F(t)^2 (T - t - 1) / (t + 1),
 * with F(t) = f(0) + ... + f(t).
 */
inline double online_bound(double delta_lambda, double delta2, const std::vector<double>& impulse, int slots,
                           double population, const std::vector<Profile>& discrete_profiles)
{
    if (slots < 2) throw std::invalid_argument("online_bound: need at least two slots");
    const double T = slots;
    double bound = offline_bound(slots, population, discrete_profiles);
    double harmonic = 0.0;
    for (int t = 2; t <= slots; ++t) harmonic += 1.0 / t;
    bound += delta_lambda * delta_lambda / T * harmonic;
    double F = 0.0;
    double filter = 0.0;
    for (int t = 0; t < slots; ++t) {
        F += t < static_cast<int>(impulse.size()) ? impulse[static_cast<std::size_t>(t)] : 0.0;
        filter += F * F * (T - t - 1) / (t + 1);
    }
    bound += delta2 / (T * T) * filter;
    return bound;
}

} // namespace dshape
