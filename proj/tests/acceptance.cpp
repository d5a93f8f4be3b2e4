// Acceptance suite: one line per criterion, "AC<n> PASS|FAIL: ...".
// Usage: dshape_acceptance [AC1 ... AC9]; no arguments runs everything.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>

#include "dshape/dshape.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace dshape;

namespace {

// AC1
constexpr int ac1_instances = 100;
constexpr double ac1_slack = 1e-9;
constexpr int ac1_max_iterations = 20000;
constexpr double ac1_fixed_point_tol = 1e-12;
constexpr double ac1_time_limit = 120.0;
// AC2
constexpr int ac2_instances = 30;
constexpr int ac2_seeds = 20;
constexpr int ac2_iterations = 200;
constexpr double ac2_relative_slack = 1e-12;
constexpr double ac2_time_limit = 10.0;
// AC3
constexpr int ac3_instances = 10;
constexpr int ac3_iterates = 5;
constexpr int ac3_resamples = 200;
constexpr int ac3_max_iterate = 20;
constexpr double ac3_standard_errors = 3.0;
constexpr double ac3_roundoff = 1e-12;
constexpr double ac3_time_limit = 60.0;
// AC4
constexpr int ac4_seeds = 50;
constexpr int ac4_continuous_iterations = 200;
constexpr double ac4_change_tol = 1e-8;
constexpr int ac4_mixed_iterations = 100;
constexpr int ac4_frozen_window = 10;
constexpr double ac4_frozen_share = 0.9;
constexpr double ac4_time_limit = 60.0;
// AC5
constexpr int ac5_seeds = 20;
constexpr int ac5_iterations = 30;
constexpr double ac5_tol = 1e-12;
constexpr double ac5_time_limit = 10.0;
// AC6
constexpr int ac6_seeds = 100;
constexpr int ac6_slots = 24;
constexpr int ac6_apps = 8;
constexpr double ac6_delta2 = 4.0;
constexpr int ac6_iterations = 30;
constexpr double ac6_standard_errors = 3.0;
constexpr double ac6_time_limit = 300.0;
// AC7
constexpr int ac7_reps = 10;
constexpr double ac7_max_gap = 0.10;
constexpr double ac7_standard_errors = 3.0;
constexpr double ac7_time_limit = 900.0;
// AC8
constexpr int ac8_reps = 10;
constexpr double ac8_sigma2 = 40.0;
constexpr double ac8_max_gap = 0.10;
constexpr double ac8_time_limit = 600.0;
// AC9
constexpr int ac9_box_instances = 10000;
constexpr double ac9_kkt_tol = 1e-8;
constexpr int ac9_simplex_instances = 200;
constexpr double ac9_grid_step = 1e-3;
constexpr double ac9_simplex_tol = 1e-3;
constexpr int ac9_valley_instances = 1000;
constexpr double ac9_valley_variance = 1e-18;
constexpr int ac9_prediction_draws = 100000;
constexpr double ac9_sigma2 = 100.0;
constexpr int ac9_lag = 48;
constexpr double ac9_variance_rel = 0.05;
constexpr double ac9_time_limit = 120.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double x, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string timing(double secs, double limit)
{
    return num(secs, 3) + " s (limit " + num(limit, 3) + " s)";
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs)
{
    MeanSe out;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) out.mean += x / n;
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

instances::Shape mixed_shape()
{
    return instances::Shape{}; // T = 24, N in [4, 40], half discrete
}

// ---------------------------------------------------------------------------

Outcome ac1()
{
    const Stopwatch clock;
    int violations = 0;
    int capped = 0;
    double worst_margin = -1e300;
    for (int i = 0; i < ac1_instances; ++i) {
        const auto seed = static_cast<std::uint64_t>(1000 + i);
        const auto inst = instances::random_instance(mixed_shape(), seed);
        const RunTrace tr = offds_run(inst.scenario, inst.base, ac1_max_iterations, seed,
                                      OffdsOptions{ac1_fixed_point_tol});
        if (static_cast<int>(tr.objective.size()) - 1 == ac1_max_iterations) ++capped;
        const RelaxedOptimum r = rods_solve(inst.scenario, inst.base, 1e-12);
        const double bound = offline_bound(inst.scenario.grid.slots, tr.final_state.normalizer, tr.final_state.discrete);
        const double margin = (tr.objective.back() - r.objective) - bound;
        worst_margin = std::max(worst_margin, margin);
        if (margin > ac1_slack) ++violations;
    }
    const double secs = clock.seconds();
    Outcome o;
    o.pass = violations == 0 && secs < ac1_time_limit;
    o.detail = "offline gap bound on " + std::to_string(ac1_instances) + " instances, " + std::to_string(violations)
               + " violations beyond " + num(ac1_slack) + ", worst (gap - bound) " + num(worst_margin) + ", "
               + std::to_string(capped) + " runs hit the iteration cap, " + timing(secs, ac1_time_limit);
    return o;
}

instances::Instance ac2_instance(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto integer = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    constexpr int T = 6;
    instances::Instance inst;
    Scenario& s = inst.scenario;
    s.grid.slots = T;
    s.base.mean = Profile(T);
    for (int t = 0; t < T; ++t) s.base.mean[t] = uniform(0.0, 20.0);
    inst.base = s.base.mean;
    const int a = integer(1, T - 1);
    const int dl = integer(a + 1, T);
    const double cap = uniform(1.0, 6.0);
    s.continuous_das.push_back(ContinuousDA::with_cap("c", a, dl, uniform(0.2, 0.9) * cap * (dl - a + 1), cap, s.grid));
    const int discrete = integer(1, 2);
    for (int j = 0; j < discrete; ++j) {
        const int length = integer(1, 3);
        const int arrival = integer(1, T - length);
        const int placements = integer(1, std::min(3, T - arrival - length + 2));
        s.discrete_das.push_back(DiscreteDA{"d" + std::to_string(j), arrival, arrival + length + placements - 1,
                                            uniform(1.0, 6.0), length});
    }
    return inst;
}

Outcome ac2()
{
    const Stopwatch clock;
    int violations = 0;
    for (int i = 0; i < ac2_instances; ++i) {
        const auto inst = ac2_instance(static_cast<std::uint64_t>(2000 + i));
        const double relaxed = rods_solve(inst.scenario, inst.base, 1e-13).objective;
        const double exact = oracle::brute_force_ods(inst.scenario, inst.base).objective;
        double best = std::numeric_limits<double>::infinity();
        for (int seed = 0; seed < ac2_seeds; ++seed) {
            const RunTrace tr = offds_run(inst.scenario, inst.base, ac2_iterations, static_cast<std::uint64_t>(seed),
                                          OffdsOptions{1e-13});
            best = std::min(best, tr.objective.back());
        }
        const double slack = ac2_relative_slack * std::max(1.0, exact);
        if (relaxed > exact + slack || exact > best + slack) {
            ++violations;
            std::printf("  AC2 instance %d: relaxed %.15g exact %.15g best Off-DS %.15g\n", i, relaxed, exact, best);
        }
    }
    const double secs = clock.seconds();
    Outcome o;
    o.pass = violations == 0 && secs < ac2_time_limit;
    o.detail = "relaxed <= exact integer optimum <= best of " + std::to_string(ac2_seeds) + " runs on "
               + std::to_string(ac2_instances) + " T=6 instances, " + std::to_string(violations)
               + " ordering violations, " + timing(secs, ac2_time_limit);
    return o;
}

Outcome ac3()
{
    const Stopwatch clock;
    int violations = 0;
    int checks = 0;
    double worst = -1e300;
    std::mt19937_64 pick(3);
    for (int i = 0; i < ac3_instances; ++i) {
        const auto seed = static_cast<std::uint64_t>(3000 + i);
        const auto inst = instances::random_instance(mixed_shape(), seed);
        for (int j = 0; j < ac3_iterates; ++j) {
            const int k = std::uniform_int_distribution<int>(0, ac3_max_iterate)(pick);
            const ScheduleState at = offds_run(inst.scenario, inst.base, k, seed).final_state;
            const double v = variance_objective(at.d);
            std::vector<double> next;
            for (int r = 0; r < ac3_resamples; ++r) {
                const ScheduleState s1 = offds_step(inst.scenario, at, static_cast<std::uint64_t>(1000000 + 1000 * j + r));
                next.push_back(variance_objective(s1.d));
            }
            const MeanSe m = mean_se(next);
            const double margin = m.mean - (v + ac3_standard_errors * m.se);
            worst = std::max(worst, margin / std::max(1.0, v));
            ++checks;
            if (margin > ac3_roundoff * std::max(1.0, v)) ++violations;
        }
    }
    const double secs = clock.seconds();
    Outcome o;
    o.pass = violations == 0 && secs < ac3_time_limit;
    o.detail = "expected one-step change at " + std::to_string(checks) + " iterates, " + std::to_string(ac3_resamples)
               + " resamples each, " + std::to_string(violations) + " violations of mean <= V + 3 SE, worst relative margin "
               + num(worst) + ", " + timing(secs, ac3_time_limit);
    return o;
}

Outcome ac4()
{
    const Stopwatch clock;
    int settled = 0;
    double worst = 0.0;
    for (int i = 0; i < ac4_seeds; ++i) {
        const auto seed = static_cast<std::uint64_t>(4000 + i);
        instances::Shape shape = mixed_shape();
        shape.discrete_share = 0.0;
        const auto inst = instances::random_instance(shape, seed);
        const RunTrace tr = offds_run(inst.scenario, inst.base, ac4_continuous_iterations, seed);
        double least = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < tr.max_change.size(); ++k) least = std::min(least, tr.max_change[k]);
        worst = std::max(worst, least);
        if (least < ac4_change_tol) ++settled;
    }
    int frozen = 0;
    for (int i = 0; i < ac4_seeds; ++i) {
        const auto seed = static_cast<std::uint64_t>(4500 + i);
        const auto inst = instances::random_instance(mixed_shape(), seed);
        const RunTrace tr = offds_run(inst.scenario, inst.base, ac4_mixed_iterations, seed);
        const auto& last = tr.placements.back();
        bool same = true;
        for (int k = ac4_mixed_iterations - ac4_frozen_window + 1; k < ac4_mixed_iterations; ++k) {
            same = same && tr.placements[static_cast<std::size_t>(k)] == last;
        }
        if (same) ++frozen;
    }
    const double secs = clock.seconds();
    const bool cont_ok = settled == ac4_seeds;
    const bool mixed_ok = frozen >= ac4_frozen_share * ac4_seeds;
    Outcome o;
    o.pass = cont_ok && mixed_ok && secs < ac4_time_limit;
    o.detail = "continuous-only: " + std::to_string(settled) + "/" + std::to_string(ac4_seeds) + " below "
               + num(ac4_change_tol) + " within " + std::to_string(ac4_continuous_iterations)
               + " iterations (worst " + num(worst) + "); mixed: " + std::to_string(frozen) + "/"
               + std::to_string(ac4_seeds) + " frozen over the last " + std::to_string(ac4_frozen_window) + " of "
               + std::to_string(ac4_mixed_iterations) + "; " + timing(secs, ac4_time_limit);
    return o;
}

BaseForecast exact_forecast(const Profile& mean)
{
    BaseForecast f;
    f.model.mean = mean;
    f.model.deviation = NoDeviation{};
    f.noise = NoiseTable::draw(static_cast<int>(mean.size()), 0);
    return f;
}

Outcome ac5()
{
    const Stopwatch clock;
    double worst = 0.0;
    for (int i = 0; i < ac5_seeds; ++i) {
        const auto seed = static_cast<std::uint64_t>(5000 + i);
        auto inst = instances::random_instance(mixed_shape(), seed);
        Scenario& s = inst.scenario;
        for (auto& c : s.continuous_das) c = ContinuousDA::with_cap(c.id, 1, c.deadline, c.budget, c.upper.maxCoeff(), s.grid);
        for (auto& d : s.discrete_das) d.arrival = 1;
        const double off = offds_run(s, inst.base, ac5_iterations, seed).objective.back();
        const double on = onds_run(s, s.applications(), exact_forecast(inst.base), OnlineConfig{}, ac5_iterations, seed).objective;
        worst = std::max(worst, std::abs(on - off));
    }
    const double secs = clock.seconds();
    Outcome o;
    o.pass = worst <= ac5_tol && secs < ac5_time_limit;
    o.detail = "online equals offline with everything known at t=1 on " + std::to_string(ac5_seeds)
               + " seeds, max |V_on - V_off| " + num(worst) + " (tol " + num(ac5_tol) + "), "
               + timing(secs, ac5_time_limit);
    return o;
}

Scenario ac6_scenario()
{
    std::mt19937_64 rng(6);
    Scenario s;
    s.grid.slots = ac6_slots;
    s.base.mean = Profile(ac6_slots);
    for (int t = 0; t < ac6_slots; ++t) s.base.mean[t] = 30.0 + 5.0 * std::sin(2.0 * M_PI * t / ac6_slots);
    CausalFilterDeviation dev;
    dev.delta2 = ac6_delta2;
    dev.impulse = {1.0};
    s.base.deviation = dev;
    for (int i = 0; i < ac6_apps; ++i) {
        const double budget = std::uniform_real_distribution<double>(30.0, 50.0)(rng);
        s.continuous_das.push_back(ContinuousDA::with_cap("c" + std::to_string(i), 1, ac6_slots, budget, 20.0, s.grid));
    }
    return s;
}

Outcome ac6()
{
    const Stopwatch clock;
    const Scenario s = ac6_scenario();
    OnlineConfig cfg;
    cfg.virtual_traffic = false;
    cfg.known_in_advance = true;
    std::vector<double> gaps;
    int infeasible_seeds = 0;
    for (int i = 0; i < ac6_seeds; ++i) {
        const auto seed = static_cast<std::uint64_t>(6000 + i);
        BaseForecast f;
        f.model = s.base;
        f.noise = NoiseTable::draw(ac6_slots, seed);
        const OnlineResult on = onds_run(s, s.applications(), f, cfg, ac6_iterations, seed);
        bool feasible = true;
        for (const auto& step : on.steps) feasible = feasible && step.valley_fill_feasible;
        if (!feasible) {
            ++infeasible_seeds;
            continue;
        }
        const double off = offds_run(s, f.realized(), ac1_max_iterations, seed, OffdsOptions{1e-12}).objective.back();
        gaps.push_back(on.objective - off);
    }
    const double N = static_cast<double>(ac6_apps);
    const double bound = online_bound(0.0, ac6_delta2, {1.0}, ac6_slots, N, {});
    const MeanSe m = mean_se(gaps);
    const double secs = clock.seconds();
    Outcome o;
    o.pass = infeasible_seeds == 0 && !gaps.empty() && m.mean <= bound + ac6_standard_errors * m.se
             && secs < ac6_time_limit;
    o.detail = "mean online - offline " + num(m.mean) + " (SE " + num(m.se) + ") vs bound " + num(bound) + " over "
               + std::to_string(gaps.size()) + " seeds, " + std::to_string(infeasible_seeds)
               + " seeds without valley-fill feasibility at some t; " + timing(secs, ac6_time_limit)
               + "\n  AC6 diagnostic: aggregate units, N^2 * mean gap " + num(N * N * m.mean) + " (SE "
               + num(N * N * m.se) + ") vs bound " + num(bound);
    return o;
}

Scenario day96()
{
    return load_scenario(std::string(DSHAPE_SCENARIO_DIR) + "/day96.json");
}

/// Mean and SE of the per-rep difference a - b over reps where both gaps are defined.
MeanSe paired(const SweepPoint& a, const SweepPoint& b)
{
    std::vector<double> diff;
    for (std::size_t r = 0; r < a.gaps.size(); ++r) {
        if (a.gaps[r] && b.gaps[r]) diff.push_back(*a.gaps[r] - *b.gaps[r]);
    }
    return mean_se(diff);
}

Outcome ac7()
{
    const Stopwatch clock;
    const Scenario s = day96();
    std::vector<double> sigma2s;
    for (int v = 0; v <= 100; v += 10) sigma2s.push_back(v);
    const auto pts = sweep_sigma(s, sigma2s, {1, 2, 3, 4}, ac7_reps, s.seed, s.algo.iterations);
    std::map<std::pair<double, int>, const SweepPoint*> at;
    for (const auto& p : pts) at[{p.value, p.case_id}] = &p;
    double worst = 0.0;
    std::string per_sigma;
    for (double v : sigma2s) {
        const double g = at[{v, 1}]->relative_gap.mean;
        worst = std::max(worst, g);
        per_sigma += (per_sigma.empty() ? "" : " ") + num(g, 3);
    }
    const MeanSe d21 = paired(*at[{100.0, 2}], *at[{100.0, 1}]);
    const MeanSe d34 = paired(*at[{100.0, 3}], *at[{100.0, 4}]);
    const bool ord21 = d21.mean <= ac7_standard_errors * d21.se;
    const bool ord34 = d34.mean <= ac7_standard_errors * d34.se;
    const double secs = clock.seconds();
    Outcome o;
    o.pass = worst <= ac7_max_gap && ord21 && ord34 && secs < ac7_time_limit;
    o.detail = "case 1 mean gap per sigma2 0..100: " + per_sigma + " (max " + num(worst, 3) + ", limit "
               + num(ac7_max_gap) + "); at sigma2=100 case2-case1 " + num(d21.mean, 3) + " (SE " + num(d21.se, 3)
               + ")" + (ord21 ? " ok" : " VIOLATED") + ", case3-case4 " + num(d34.mean, 3) + " (SE "
               + num(d34.se, 3) + ")" + (ord34 ? " ok" : " VIOLATED") + "; " + timing(secs, ac7_time_limit);
    return o;
}

Outcome ac8()
{
    const Stopwatch clock;
    const Scenario s = with_sigma2(day96(), ac8_sigma2);
    std::vector<double> fractions;
    for (int k = 0; k <= 10; ++k) fractions.push_back(0.25 + 0.05 * k);
    const auto pts = sweep_penetration(s, fractions, ac8_reps, s.seed, s.algo.iterations);
    double worst = 0.0;
    std::string per_point;
    for (const auto& p : pts) {
        worst = std::max(worst, p.relative_gap.mean);
        per_point += (per_point.empty() ? "" : " ") + num(p.relative_gap.mean, 3);
    }
    const double secs = clock.seconds();
    Outcome o;
    o.pass = worst <= ac8_max_gap && secs < ac8_time_limit;
    o.detail = "case 1 mean gap for discrete share 0.25..0.75 at sigma2=40: " + per_point + " (max " + num(worst, 3)
               + ", limit " + num(ac8_max_gap) + "); " + timing(secs, ac8_time_limit);
    return o;
}

Outcome ac9()
{
    const Stopwatch clock;
    std::mt19937_64 rng(9);
    auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto integer = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };

    double worst_kkt = 0.0;
    for (int i = 0; i < ac9_box_instances; ++i) {
        const int n = integer(1, 40);
        Profile target(n), lower(n), upper(n);
        for (int t = 0; t < n; ++t) {
            target[t] = uniform(-5.0, 5.0);
            lower[t] = uniform(0.0, 2.0);
            upper[t] = lower[t] + uniform(0.0, 3.0);
        }
        const double budget = lower.sum() + uniform(0.0, 1.0) * (upper - lower).sum();
        const Profile p = project_box_budget(target, lower, upper, budget, 1e-10).profile;
        const KktReport r = kkt_check(BoxBudgetProblem{target, lower, upper, budget}, p);
        worst_kkt = std::max({worst_kkt, r.primal_residual, r.dual_residual, r.complementarity});
    }

    double worst_simplex = 0.0;
    for (int i = 0; i < ac9_simplex_instances; ++i) {
        const int T = integer(3, 8);
        const int length = integer(1, T - 2);
        const int placements = integer(1, std::min(3, T - length + 1));
        const int arrival = integer(1, T - length - placements + 2);
        const TimeGrid grid{T};
        const DiscreteDA da{"x", arrival, arrival + length + placements - 1, uniform(1.0, 3.0), length};
        const FeasibleSet set = feasible_windows(da, 1, grid);
        Profile target(T);
        for (int t = 0; t < T; ++t) target[t] = uniform(-4.0, 6.0);
        const auto r = project_simplex_ls(set, target, 1e-9, 500);
        const double solver = oracle::simplex_objective(set, r.weights.u, target);
        const double grid_min = oracle::simplex_grid_min(set, target, ac9_grid_step);
        worst_simplex = std::max(worst_simplex, std::abs(solver - grid_min));
    }

    double worst_valley = 0.0;
    for (int i = 0; i < ac9_valley_instances; ++i) {
        const int H = integer(1, 96);
        Profile load(H);
        for (int t = 0; t < H; ++t) load[t] = uniform(0.0, 100.0);
        const Profile q = valley_fill(load, uniform(-50.0, 500.0));
        worst_valley = std::max(worst_valley, variance_objective(load + q));
    }

    const int T = ac9_lag + 1;
    BaseTrafficModel m;
    m.mean = Profile::Zero(T);
    m.deviation = CumulativeDeviation{ac9_sigma2};
    m.clamp_at_zero = false;
    double ss = 0.0;
    for (int k = 0; k < ac9_prediction_draws; ++k) {
        const NoiseTable noise = NoiseTable::draw(T, static_cast<std::uint64_t>(9000000 + k));
        const double err = predict_base(m, noise, 1).rates[ac9_lag] - realized_base(m, noise)[ac9_lag];
        ss += err * err;
    }
    const double empirical = ss / ac9_prediction_draws;
    const double expected = ac9_sigma2 * oracle::harmonic(ac9_lag);
    const double rel = std::abs(empirical / expected - 1.0);

    const double secs = clock.seconds();
    Outcome o;
    o.pass = worst_kkt <= ac9_kkt_tol && worst_simplex <= ac9_simplex_tol && worst_valley <= ac9_valley_variance
             && rel <= ac9_variance_rel && secs < ac9_time_limit;
    o.detail = "box KKT max " + num(worst_kkt) + " over " + std::to_string(ac9_box_instances) + " (tol "
               + num(ac9_kkt_tol) + "); simplex vs grid max " + num(worst_simplex) + " (tol " + num(ac9_simplex_tol)
               + "); valley-fill variance max " + num(worst_valley) + " (tol " + num(ac9_valley_variance)
               + "); prediction variance at lag " + std::to_string(ac9_lag) + " " + num(empirical) + " vs "
               + num(expected) + ", rel err " + num(rel) + " (tol " + num(ac9_variance_rel) + "); "
               + timing(secs, ac9_time_limit);
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
    std::vector<std::string> wanted(argv + 1, argv + argc);
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s %s: %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
