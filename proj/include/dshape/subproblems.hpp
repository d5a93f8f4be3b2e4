#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dshape/errors.hpp"
#include "dshape/model.hpp"
#include "dshape/rng.hpp"

namespace dshape {

using Vec = Eigen::VectorXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// =======================================================================
// Box + budget projection
// =======================================================================

struct BoxBudgetResult {
    Profile profile;
    double multiplier = 0.0; // nu in p = clip(target + nu, lower, upper)
};

namespace detail {

inline double clipped_sum(const VecRef& target, const VecRef& lower, const VecRef& upper, double nu)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        s += std::clamp(target[i] + nu, lower[i], upper[i]);
    }
    return s;
}

inline double budget_slack(double budget) { return 1e-9 * std::max(1.0, std::abs(budget)); }

} // namespace detail

/*
 * Euclidean projection of `target` onto {p : lower <= p <= upper, sum p = budget}.
 *
 * Bisection on the scalar multiplier brackets the active set; the multiplier
 * is then recovered in closed form on that active set and the last rounding
 * error in the sum is spread over the free coordinates.
 */
inline BoxBudgetResult project_box_budget(const VecRef& target, const VecRef& lower,
                                          const VecRef& upper, double budget, double tol)
{
    const Eigen::Index n = target.size();
    if (lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("project_box_budget: size mismatch");
    }
    const double lo_sum = lower.sum();
    const double hi_sum = upper.sum();
    const double slack = detail::budget_slack(budget);
    if (budget < lo_sum - slack || budget > hi_sum + slack || (lower.array() > upper.array()).any()) {
        throw InfeasibleBudget("budget " + std::to_string(budget) + " outside ["
                               + std::to_string(lo_sum) + ", " + std::to_string(hi_sum) + "]");
    }
    BoxBudgetResult out;
    if (n == 0) return out;
    if (budget >= hi_sum) {
        out.profile = upper;
        out.multiplier = (upper - target).maxCoeff();
        return out;
    }
    if (budget <= lo_sum) {
        out.profile = lower;
        out.multiplier = (lower - target).minCoeff();
        return out;
    }

    double lo = (lower - target).minCoeff();
    double hi = (upper - target).maxCoeff();
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (detail::clipped_sum(target, lower, upper, mid) < budget) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double nu = 0.5 * (lo + hi);

    // closed form on the active set found by bisection
    double fixed = 0.0;
    double free_target = 0.0;
    int free_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = target[i] + nu;
        if (v <= lower[i]) {
            fixed += lower[i];
        } else if (v >= upper[i]) {
            fixed += upper[i];
        } else {
            free_target += target[i];
            ++free_count;
        }
    }
    if (free_count > 0) {
        const double exact = (budget - fixed - free_target) / free_count;
        bool consistent = true;
        for (Eigen::Index i = 0; i < n && consistent; ++i) {
            const double v_old = target[i] + nu;
            const double v_new = target[i] + exact;
            const bool was_free = v_old > lower[i] && v_old < upper[i];
            if (was_free) {
                consistent = v_new >= lower[i] && v_new <= upper[i];
            } else if (v_old <= lower[i]) {
                consistent = v_new <= lower[i];
            } else {
                consistent = v_new >= upper[i];
            }
        }
        if (consistent) nu = exact;
    }

    out.profile.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.profile[i] = std::clamp(target[i] + nu, lower[i], upper[i]);
    out.multiplier = nu;

    const double residual = budget - out.profile.sum();
    if (residual != 0.0 && free_count > 0) {
        const double share = residual / free_count;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (out.profile[i] > lower[i] && out.profile[i] < upper[i]) {
                out.profile[i] = std::clamp(out.profile[i] + share, lower[i], upper[i]);
            }
        }
    }
    return out;
}

// =======================================================================
// Least squares over the convex hull of placements
// =======================================================================

/// G_ab = <f_a, f_b>; placements overlap on max(0, l - |shift|) slots.
inline Eigen::MatrixXd gram_matrix(const FeasibleSet& set)
{
    const int A = set.size();
    Eigen::MatrixXd G(A, A);
    const double r2 = set.rate * set.rate;
    for (int a = 0; a < A; ++a) {
        for (int b = 0; b < A; ++b) {
            const int shift = std::abs(set.first[static_cast<std::size_t>(a)]
                                       - set.first[static_cast<std::size_t>(b)]);
            G(a, b) = r2 * std::max(0, set.length - shift);
        }
    }
    return G;
}

/// c_a = <f_a, y>.
inline Vec vertex_correlations(const FeasibleSet& set, const VecRef& y)
{
    Vec prefix(y.size() + 1);
    prefix[0] = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) prefix[i + 1] = prefix[i] + y[i];
    Vec c(set.size());
    for (int a = 0; a < set.size(); ++a) {
        const int f = set.first[static_cast<std::size_t>(a)];
        c[a] = set.rate * (prefix[f + set.length] - prefix[f]);
    }
    return c;
}

struct SimplexQpResult {
    Vec u;
    double residual = 0.0; // sum_b u_b g_b - min_a g_a, g = G u - c
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double simplex_residual(const Eigen::MatrixXd& G, const Vec& c, const Vec& u)
{
    const Vec g = G * u - c;
    return std::max(0.0, u.dot(g) - g.minCoeff());
}

/// Euclidean projection onto the probability simplex (sort-based).
inline Vec project_to_simplex(const Vec& v)
{
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) theta = candidate;
    }
    return (v.array() - theta).max(0.0).matrix();
}

/// Accelerated projected gradient, step 1/L with L a row-sum bound on |G|.
inline SimplexQpResult simplex_projected_gradient(const Eigen::MatrixXd& G, const Vec& c,
                                                  Vec start, double tol, int max_iters)
{
    const double L = std::max(G.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    SimplexQpResult best{start, simplex_residual(G, c, start), 0, false};
    Vec x = start;
    Vec y = x;
    double t = 1.0;
    for (int it = 1; it <= max_iters && best.residual > tol; ++it) {
        const Vec x_old = x;
        x = project_to_simplex(y - (G * y - c) / L);
        const double t_old = t;
        t = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const Vec step = x - x_old;
        // restart momentum when it points uphill
        if ((G * x - c).dot(step) > 0.0) {
            t = 1.0;
            y = x;
        } else {
            y = x + ((t_old - 1.0) / t) * step;
        }
        const double r = simplex_residual(G, c, x);
        if (r < best.residual) {
            best.u = x;
            best.residual = r;
        }
        best.iterations = it;
    }
    best.converged = best.residual <= tol;
    return best;
}

} // namespace detail

/*
 * min 1/2 u'Gu - c'u over the probability simplex, G positive definite.
 *
 * Primal active-set method: solve the equality-constrained problem on the
 * current support, step back to the simplex boundary when that solution
 * leaves it, and add the most attractive inactive vertex otherwise. Falls
 * back to accelerated projected gradient if the active-set loop fails.
 * `residual` is the variational-inequality gap; converged means <= tol.
 */
inline SimplexQpResult solve_simplex_qp(const Eigen::MatrixXd& G, const Vec& c, double tol,
                                        int max_iters)
{
    const int A = static_cast<int>(c.size());
    SimplexQpResult res;
    res.u = Vec::Zero(A);
    if (A == 1) {
        res.u[0] = 1.0;
        res.converged = true;
        return res;
    }
    int start = 0;
    for (int a = 1; a < A; ++a) {
        if (0.5 * G(a, a) - c[a] < 0.5 * G(start, start) - c[start]) start = a;
    }
    std::vector<int> support{start};
    res.u[start] = 1.0;

    const double add_tol = 0.1 * tol;
    bool failed = false;
    int it = 0;
    for (; it < max_iters; ++it) {
        const int k = static_cast<int>(support.size());
        Eigen::MatrixXd Gs(k, k);
        Vec cs(k);
        for (int i = 0; i < k; ++i) {
            cs[i] = c[support[static_cast<std::size_t>(i)]];
            for (int j = 0; j < k; ++j) {
                Gs(i, j) = G(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
            }
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(Gs);
        if (llt.info() != Eigen::Success) {
            failed = true;
            break;
        }
        const Vec x1 = llt.solve(cs);
        const Vec x2 = llt.solve(Vec::Ones(k));
        const double mu = (x1.sum() - 1.0) / x2.sum();
        const Vec z = x1 - mu * x2;

        if (z.minCoeff() > 0.0) {
            res.u.setZero();
            for (int i = 0; i < k; ++i) res.u[support[static_cast<std::size_t>(i)]] = z[i];
            const Vec g = G * res.u - c;
            const double level = res.u.dot(g);
            int entering = -1;
            double best_gain = add_tol;
            for (int a = 0; a < A; ++a) {
                if (res.u[a] > 0.0) continue;
                const double gain = level - g[a];
                if (gain > best_gain) {
                    best_gain = gain;
                    entering = a;
                }
            }
            if (entering < 0) break;
            support.push_back(entering);
            continue;
        }

        // step towards z until a support coordinate hits zero
        double alpha = 1.0;
        for (int i = 0; i < k; ++i) {
            const double ui = res.u[support[static_cast<std::size_t>(i)]];
            if (z[i] <= 0.0) alpha = std::min(alpha, ui / (ui - z[i]));
        }
        if (alpha <= 0.0) {
            failed = true;
            break;
        }
        std::vector<int> kept;
        for (int i = 0; i < k; ++i) {
            const int a = support[static_cast<std::size_t>(i)];
            const double v = res.u[a] + alpha * (z[i] - res.u[a]);
            if (v > 1e-15) {
                res.u[a] = v;
                kept.push_back(a);
            } else {
                res.u[a] = 0.0;
            }
        }
        if (kept.empty()) {
            failed = true;
            break;
        }
        res.u /= res.u.sum();
        support = std::move(kept);
    }
    res.iterations = it;
    res.residual = detail::simplex_residual(G, c, res.u);
    res.converged = !failed && res.residual <= tol;
    if (!res.converged) {
        SimplexQpResult pg = detail::simplex_projected_gradient(G, c, res.u, tol, max_iters);
        pg.iterations += res.iterations;
        if (pg.residual < res.residual) return pg;
    }
    return res;
}

struct SimplexLsResult {
    SimplexWeights weights;
    Profile point;
    double residual = 0.0;
    int iterations = 0;
};

/*
 * argmin_u || sum_a u_a f_a - target ||^2 over the probability simplex.
 * Throws MaxItersExceeded (with the best weights) if the optimality residual
 * stays above tol.
 */
inline SimplexLsResult project_simplex_ls(const FeasibleSet& vertices, const VecRef& target,
                                          double tol, int max_iters)
{
    if (vertices.size() < 1) throw std::invalid_argument("project_simplex_ls: no vertices");
    if (target.size() != vertices.slots) throw std::invalid_argument("project_simplex_ls: size mismatch");
    const Eigen::MatrixXd G = gram_matrix(vertices);
    const Vec c = vertex_correlations(vertices, target);
    const SimplexQpResult qp = solve_simplex_qp(G, c, tol, max_iters);
    if (!qp.converged) {
        throw MaxItersExceeded("project_simplex_ls: residual " + std::to_string(qp.residual)
                                   + " above tolerance",
                               qp.u, qp.residual);
    }
    return SimplexLsResult{SimplexWeights{qp.u}, vertices.combination(qp.u), qp.residual,
                           qp.iterations};
}

// =======================================================================
// Randomized rounding
// =======================================================================

/// Index a with probability u_a (lowest index on ties).
inline int sample_vertex(const SimplexWeights& weights, Substream& rng)
{
    const double draw = rng.uniform();
    double cumulative = 0.0;
    int last_positive = 0;
    for (Eigen::Index a = 0; a < weights.u.size(); ++a) {
        if (weights.u[a] <= 0.0) continue;
        last_positive = static_cast<int>(a);
        cumulative += weights.u[a];
        if (draw < cumulative) return static_cast<int>(a);
    }
    return last_positive;
}

// =======================================================================
// Virtual traffic
// =======================================================================

/*
 * argmin_q sum (load + q)^2 subject to sum q = total, sign unconstrained:
 * q = (total + sum load) / H - load, which makes load + q constant.
 */
inline Profile valley_fill(const VecRef& load, double total)
{
    const Eigen::Index H = load.size();
    if (H < 1) throw std::invalid_argument("valley_fill: empty horizon");
    const double level = (total + load.sum()) / static_cast<double>(H);
    return (level - load.array()).matrix();
}

/*
 * Same problem with q >= 0: pour `total` into the lowest slots until they
 * reach a common level. Coincides with valley_fill whenever that solution is
 * nonnegative; a zero total gives q = 0.
 */
inline Profile water_fill(const VecRef& load, double total)
{
    const Eigen::Index H = load.size();
    if (H < 1) throw std::invalid_argument("water_fill: empty horizon");
    if (total < 0.0) throw std::invalid_argument("water_fill: negative total");
    Profile q = Profile::Zero(H);
    if (total == 0.0) return q;
    std::vector<double> sorted(load.data(), load.data() + H);
    std::sort(sorted.begin(), sorted.end());
    double level = 0.0;
    double prefix = 0.0;
    for (Eigen::Index k = 0; k < H; ++k) {
        prefix += sorted[static_cast<std::size_t>(k)];
        level = (total + prefix) / static_cast<double>(k + 1);
        if (k + 1 == H || level <= sorted[static_cast<std::size_t>(k + 1)]) break;
    }
    for (Eigen::Index i = 0; i < H; ++i) q[i] = std::max(0.0, level - load[i]);
    return q;
}

// =======================================================================
// First-order optimality checks
// =======================================================================

struct KktReport {
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double complementarity = 0.0;

    bool within(double tol) const
    {
        return primal_residual <= tol && dual_residual <= tol && complementarity <= tol;
    }
};

struct BoxBudgetProblem {
    Profile target;
    Profile lower;
    Profile upper;
    double budget = 0.0;
};

struct SimplexProblem {
    FeasibleSet vertices;
    Profile target;
};

struct ValleyFillProblem {
    Profile load;
    double total = 0.0;
};

/// min over {lower <= p <= upper, sum p = budget} of <g, p>, by greedy filling.
inline double box_budget_linear_min(const VecRef& g, const VecRef& lower, const VecRef& upper,
                                    double budget)
{
    std::vector<Eigen::Index> order(static_cast<std::size_t>(g.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return g[a] < g[b]; });
    double value = g.dot(lower);
    double remaining = budget - lower.sum();
    for (Eigen::Index i : order) {
        if (remaining <= 0.0) break;
        const double take = std::min(remaining, upper[i] - lower[i]);
        value += take * g[i];
        remaining -= take;
    }
    return value;
}

/*
 * Residuals of the variational inequality <p - target, p' - p> >= 0 for all
 * feasible p'. The dual residual is max(0, -min_p' <p - target, p' - p>).
 */
inline KktReport kkt_check(const BoxBudgetProblem& prob, const Profile& p)
{
    KktReport r;
    r.primal_residual = std::abs(p.sum() - prob.budget);
    r.primal_residual = std::max(r.primal_residual, (prob.lower - p).cwiseMax(0.0).maxCoeff());
    r.primal_residual = std::max(r.primal_residual, (p - prob.upper).cwiseMax(0.0).maxCoeff());

    const Vec g = p - prob.target;
    r.dual_residual = std::max(0.0, g.dot(p) - box_budget_linear_min(g, prob.lower, prob.upper, prob.budget));

    // interior coordinates share one multiplier; bound coordinates sit on the right side of it
    const double eps = 1e-12;
    double interior_sum = 0.0;
    int interior = 0;
    double at_upper_max = -std::numeric_limits<double>::infinity();
    double at_lower_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const bool low = p[i] <= prob.lower[i] + eps;
        const bool high = p[i] >= prob.upper[i] - eps;
        if (low && high) continue;
        if (low) {
            at_lower_min = std::min(at_lower_min, g[i]);
        } else if (high) {
            at_upper_max = std::max(at_upper_max, g[i]);
        } else {
            interior_sum += g[i];
            ++interior;
        }
    }
    double nu = 0.0;
    if (interior > 0) {
        nu = interior_sum / interior;
    } else if (std::isfinite(at_upper_max) && std::isfinite(at_lower_min)) {
        nu = 0.5 * (at_upper_max + at_lower_min);
    } else {
        nu = std::isfinite(at_upper_max) ? at_upper_max : (std::isfinite(at_lower_min) ? at_lower_min : 0.0);
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const bool low = p[i] <= prob.lower[i] + eps;
        const bool high = p[i] >= prob.upper[i] - eps;
        if (low && high) continue;
        if (low) {
            worst = std::max(worst, nu - g[i]);
        } else if (high) {
            worst = std::max(worst, g[i] - nu);
        } else {
            worst = std::max(worst, std::abs(g[i] - nu));
        }
    }
    r.complementarity = worst;
    return r;
}

inline KktReport kkt_check(const SimplexProblem& prob, const SimplexWeights& w)
{
    KktReport r;
    r.primal_residual = std::max(std::abs(w.u.sum() - 1.0), std::max(0.0, -w.u.minCoeff()));
    const Profile point = prob.vertices.combination(w.u);
    const Vec g = vertex_correlations(prob.vertices, point - prob.target);
    const double g_min = g.minCoeff();
    r.dual_residual = std::max(0.0, w.u.dot(g) - g_min);
    double worst = 0.0;
    for (Eigen::Index a = 0; a < g.size(); ++a) worst = std::max(worst, w.u[a] * (g[a] - g_min));
    r.complementarity = worst;
    return r;
}

/// Sum constraint and flatness of load + q.
inline KktReport kkt_check(const ValleyFillProblem& prob, const Profile& q)
{
    KktReport r;
    r.primal_residual = std::abs(q.sum() - prob.total);
    const Vec filled = prob.load + q;
    r.dual_residual = filled.maxCoeff() - filled.minCoeff();
    r.complementarity = 0.0;
    return r;
}

} // namespace dshape
