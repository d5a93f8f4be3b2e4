#pragma once

// Reference solvers for the tests. They share only the data types with the
// library and are written for clarity, not speed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "dshape/model.hpp"
#include "dshape/scenario.hpp"

namespace oracle {

using dshape::Profile;

/// Population variance, two-pass, written out.
inline double variance(const Profile& d)
{
    double mean = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) mean += d[i];
    mean /= static_cast<double>(d.size());
    double ss = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) ss += (d[i] - mean) * (d[i] - mean);
    return ss / static_cast<double>(d.size());
}

inline double clipped_sum(const Profile& target, const Profile& lower, const Profile& upper, double nu)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < target.size(); ++i) s += std::clamp(target[i] + nu, lower[i], upper[i]);
    return s;
}

/*
 * Box+budget projection by walking the breakpoints of the piecewise-linear
 * sum(nu) and interpolating exactly inside the bracketing segment.
 */
inline Profile breakpoint_projection(const Profile& target, const Profile& lower, const Profile& upper,
                                     double budget)
{
    std::vector<double> knots;
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        knots.push_back(lower[i] - target[i]);
        knots.push_back(upper[i] - target[i]);
    }
    std::sort(knots.begin(), knots.end());
    double nu = knots.front();
    if (clipped_sum(target, lower, upper, knots.back()) <= budget) {
        nu = knots.back();
    } else {
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            const double a = knots[k];
            const double b = knots[k + 1];
            const double sa = clipped_sum(target, lower, upper, a);
            const double sb = clipped_sum(target, lower, upper, b);
            if (sa <= budget && budget <= sb) {
                nu = sb > sa ? a + (budget - sa) * (b - a) / (sb - sa) : a;
                break;
            }
        }
    }
    Profile p(target.size());
    for (Eigen::Index i = 0; i < target.size(); ++i) p[i] = std::clamp(target[i] + nu, lower[i], upper[i]);
    return p;
}

/// The multiplier on a uniform grid of step h that best meets the budget.
inline double grid_multiplier(const Profile& target, const Profile& lower, const Profile& upper, double budget,
                              double from, double to, double h)
{
    double best = from;
    double err = std::numeric_limits<double>::infinity();
    for (double nu = from; nu <= to; nu += h) {
        const double e = std::abs(clipped_sum(target, lower, upper, nu) - budget);
        if (e < err) {
            err = e;
            best = nu;
        }
    }
    return best;
}

inline double simplex_objective(const dshape::FeasibleSet& set, const Eigen::VectorXd& u, const Profile& target)
{
    Profile p = Profile::Zero(set.slots);
    for (int a = 0; a < set.size(); ++a) {
        for (int k = 0; k < set.length; ++k) p[set.first[static_cast<std::size_t>(a)] + k] += u[a] * set.rate;
    }
    return (p - target).squaredNorm();
}

/// min over the simplex grid {u : u_a = k_a h, sum u = 1} for up to three vertices.
inline double simplex_grid_min(const dshape::FeasibleSet& set, const Profile& target, double h)
{
    const int A = set.size();
    const int steps = static_cast<int>(std::lround(1.0 / h));
    // objective = u' G u - 2 c' u + |target|^2 with G, c built from vertices
    Eigen::MatrixXd G(A, A);
    Eigen::VectorXd c(A);
    std::vector<Profile> f;
    for (int a = 0; a < A; ++a) f.push_back(set.vertex(a));
    for (int a = 0; a < A; ++a) {
        c[a] = f[a].dot(target);
        for (int b = 0; b < A; ++b) G(a, b) = f[a].dot(f[b]);
    }
    const double tt = target.squaredNorm();
    auto value = [&](const Eigen::VectorXd& u) { return u.dot(G * u) - 2.0 * c.dot(u) + tt; };
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(A);
    if (A == 1) {
        u[0] = 1.0;
        return value(u);
    }
    if (A == 2) {
        for (int i = 0; i <= steps; ++i) {
            u << i * h, 1.0 - i * h;
            best = std::min(best, value(u));
        }
        return best;
    }
    if (A != 3) throw std::invalid_argument("simplex_grid_min: at most three vertices");
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; i + j <= steps; ++j) {
            u << i * h, j * h, 1.0 - (i + j) * h;
            best = std::min(best, value(u));
        }
    }
    return best;
}

/*
 * Exact optimum of the integer problem on small instances: every combination
 * of discrete placements, with the continuous applications solved by cyclic
 * exact block minimization using breakpoint_projection.
 */
struct OdsOptimum {
    double objective = std::numeric_limits<double>::infinity();
    std::vector<int> starts; // 1-based
};

inline OdsOptimum brute_force_ods(const dshape::Scenario& s, const Profile& base)
{
    const int T = s.grid.slots;
    const double N = std::max<double>(1.0, static_cast<double>(s.population()));
    std::vector<std::vector<int>> options;
    for (const auto& da : s.discrete_das) {
        std::vector<int> starts;
        for (int st = da.arrival; st + da.length <= da.deadline && st + da.length - 1 <= T; ++st) starts.push_back(st);
        options.push_back(starts);
    }
    OdsOptimum best;
    std::vector<int> pick(options.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
        if (j < options.size()) {
            for (std::size_t k = 0; k < options[j].size(); ++k) {
                pick[j] = static_cast<int>(k);
                rec(j + 1);
            }
            return;
        }
        Profile fixed = base;
        std::vector<int> starts;
        for (std::size_t i = 0; i < options.size(); ++i) {
            const auto& da = s.discrete_das[i];
            const int st = options[i][static_cast<std::size_t>(pick[i])];
            starts.push_back(st);
            for (int k = 0; k < da.length; ++k) fixed[st - 1 + k] += da.rate;
        }
        std::vector<Profile> cont;
        for (const auto& da : s.continuous_das) {
            cont.push_back(breakpoint_projection(Profile::Zero(T), da.lower, da.upper, da.budget));
        }
        for (int sweep = 0; sweep < 100000; ++sweep) {
            double change = 0.0;
            for (std::size_t i = 0; i < cont.size(); ++i) {
                Profile others = fixed;
                for (std::size_t m = 0; m < cont.size(); ++m) {
                    if (m != i) others += cont[m];
                }
                const auto& da = s.continuous_das[i];
                Profile next = breakpoint_projection(-others, da.lower, da.upper, da.budget);
                change = std::max(change, (next - cont[i]).cwiseAbs().maxCoeff());
                cont[i] = next;
            }
            if (change <= 1e-14 || cont.size() <= 1) break;
        }
        Profile S = fixed;
        for (const auto& p : cont) S += p;
        const double v = variance(S / N);
        if (v < best.objective) {
            best.objective = v;
            best.starts = starts;
        }
    };
    rec(0);
    return best;
}

/// Harmonic number H(k).
inline double harmonic(int k)
{
    double h = 0.0;
    for (int j = 1; j <= k; ++j) h += 1.0 / j;
    return h;
}

} // namespace oracle
