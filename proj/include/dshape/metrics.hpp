#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dshape/errors.hpp"
#include "dshape/model.hpp"

namespace dshape {

/// V(d) = (1/T) sum_t (d(t) - mean d)^2.
inline double variance_objective(const Eigen::Ref<const Eigen::VectorXd>& d)
{
    if (d.size() < 1) throw std::invalid_argument("variance_objective: empty profile");
    const double mean = d.mean();
    return (d.array() - mean).square().sum() / static_cast<double>(d.size());
}

/// (2 / (T N^2)) sum ||p_n||^2 over the final discrete profiles.
inline double offline_bound(int slots, double population, const std::vector<Profile>& discrete_profiles)
{
    double total = 0.0;
    for (const auto& p : discrete_profiles) total += p.squaredNorm();
    if (total == 0.0) return 0.0;
    return 2.0 / (slots * population * population) * total;
}

struct GapReport {
    double v_subject = 0.0;
    double v_reference = 0.0;
    double absolute_gap = 0.0;
    std::optional<double> relative_gap; // empty when the reference has zero variance
    std::optional<double> bound;
    bool bound_satisfied = true;
};

inline constexpr double bound_slack = 1e-9;

/*
 * Gap of `v_subject` over `v_reference`. With `require_relative`, a zero
 * reference raises ZeroReference instead of leaving the relative gap empty.
 */
inline GapReport gap_report(double v_subject, double v_reference, std::optional<double> bound = {},
                            bool require_relative = false)
{
    GapReport r;
    r.v_subject = v_subject;
    r.v_reference = v_reference;
    r.absolute_gap = v_subject - v_reference;
    if (v_reference > 0.0) {
        r.relative_gap = r.absolute_gap / v_reference;
    } else if (require_relative) {
        throw ZeroReference(r.absolute_gap);
    }
    r.bound = bound;
    if (bound) r.bound_satisfied = r.absolute_gap <= *bound + bound_slack;
    return r;
}

} // namespace dshape
