#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dshape/errors.hpp"
#include "dshape/model.hpp"
#include "dshape/rng.hpp"

namespace dshape {

// ---------------------------------------------------------------------------
// Base traffic
// ---------------------------------------------------------------------------

struct NoDeviation {};

/// Innovations omega_s(tau) ~ N(0, sigma2 / (tau - s + 1)), revealed at slot s.
struct CumulativeDeviation {
    double sigma2 = 0.0;
};

/// b(tau) = mean(tau) + sum_s e(s) f(tau - s), e iid with variance delta2, f(0) = 1.
struct CausalFilterDeviation {
    double delta2 = 0.0;
    std::vector<double> impulse{1.0};

    double response(int lag) const
    {
        if (lag < 0 || lag >= static_cast<int>(impulse.size())) return 0.0;
        return impulse[static_cast<std::size_t>(lag)];
    }
};

using DeviationModel = std::variant<NoDeviation, CumulativeDeviation, CausalFilterDeviation>;

struct BaseTrafficModel {
    Profile mean;
    DeviationModel deviation = NoDeviation{};
    bool clamp_at_zero = true;
};

/*
 * Standard-normal draws for one (seed, grid). The cumulative model scales
 * `innovation(s, tau)` and the causal filter scales `shock(s)`; keeping them
 * unscaled lets sweeps over the noise level share one table.
 */
class NoiseTable {
public:
    NoiseTable() = default;

    static NoiseTable draw(int slots, std::uint64_t seed)
    {
        NoiseTable table;
        table.slots_ = slots;
        Substream rng(seed, stream::base_noise);
        std::normal_distribution<double> normal(0.0, 1.0);
        table.innovations_.resize(static_cast<std::size_t>(slots) * (slots + 1) / 2);
        for (auto& z : table.innovations_) z = normal(rng);
        table.shocks_.resize(static_cast<std::size_t>(slots));
        for (auto& z : table.shocks_) z = normal(rng);
        return table;
    }

    int slots() const noexcept { return slots_; }

    /// z_s(tau) for 1 <= s <= tau <= slots.
    double innovation(int s, int tau) const
    {
        const auto row = static_cast<std::size_t>(tau - 1) * tau / 2;
        return innovations_.at(row + static_cast<std::size_t>(s - 1));
    }

    /// z(s) for 1 <= s <= slots.
    double shock(int s) const { return shocks_.at(static_cast<std::size_t>(s - 1)); }

private:
    int slots_ = 0;
    std::vector<double> innovations_;
    std::vector<double> shocks_;
};

struct BasePrediction {
    Profile rates;                  // slots t..T
    std::vector<int> clamped_slots; // 1-based slots clamped to zero
};

namespace detail {

/// Base traffic at tau as seen with innovations revealed up to slot `known`.
inline double base_view(const BaseTrafficModel& model, const NoiseTable& noise, int known, int tau)
{
    double value = model.mean[tau - 1];
    const int last = std::min(known, tau);
    if (const auto* cum = std::get_if<CumulativeDeviation>(&model.deviation)) {
        if (cum->sigma2 > 0.0) {
            for (int s = 1; s <= last; ++s) {
                value += std::sqrt(cum->sigma2 / (tau - s + 1)) * noise.innovation(s, tau);
            }
        }
    } else if (const auto* cf = std::get_if<CausalFilterDeviation>(&model.deviation)) {
        if (cf->delta2 > 0.0) {
            const double scale = std::sqrt(cf->delta2);
            for (int s = 1; s <= last; ++s) value += scale * noise.shock(s) * cf->response(tau - s);
        }
    }
    return value;
}

} // namespace detail

/*
 * Prediction b_t(t..T) made at slot t.
 *
 * The current slot is fully observed; later slots carry only the innovations
 * revealed so far, so the prediction error at tau has variance
 * sigma2 * H(tau - t) (cumulative) or delta2 * sum_{s=t+1}^{tau} f(tau-s)^2
 * (causal filter).
 */
inline BasePrediction predict_base(const BaseTrafficModel& model, const NoiseTable& noise, int t)
{
    const int slots = static_cast<int>(model.mean.size());
    BasePrediction out;
    out.rates.resize(slots - t + 1);
    for (int tau = t; tau <= slots; ++tau) {
        double v = detail::base_view(model, noise, t, tau);
        if (model.clamp_at_zero && v < 0.0) {
            v = 0.0;
            out.clamped_slots.push_back(tau);
        }
        out.rates[tau - t] = v;
    }
    return out;
}

/// The realized trace: every innovation revealed.
inline Profile realized_base(const BaseTrafficModel& model, const NoiseTable& noise)
{
    const int slots = static_cast<int>(model.mean.size());
    Profile b(slots);
    for (int tau = 1; tau <= slots; ++tau) {
        double v = detail::base_view(model, noise, tau, tau);
        b[tau - 1] = (model.clamp_at_zero && v < 0.0) ? 0.0 : v;
    }
    return b;
}

/// Daily mean of diurnal_mean: a 48-slot-ahead error std of 10 sqrt(H(48)) is 32% of it.
inline constexpr double diurnal_level = 65.84;

/*
 * Synthetic diurnal mean curve: a night trough plus a midday and an evening
 * peak, sampled from 16:00 onwards and scaled to a daily mean of
 * diurnal_level. Values are made up for experiments; they are not measured
 * data.
 */
inline Profile diurnal_mean(int slots, int slot_minutes = 30, double start_hour = 16.0)
{
    auto bump = [](double hour, double centre, double width) {
        double diff = std::fmod(std::abs(hour - centre), 24.0);
        diff = std::min(diff, 24.0 - diff);
        return std::exp(-0.5 * (diff / width) * (diff / width));
    };
    auto shape = [&](double hour) {
        return 25.0 + 30.0 * bump(hour, 12.5, 3.0) + 45.0 * bump(hour, 21.0, 2.5) + 15.0 * bump(hour, 8.5, 1.5);
    };
    // normalize over one day at one-minute resolution so the level does not depend on the grid
    double day = 0.0;
    for (int m = 0; m < 24 * 60; ++m) day += shape((m + 0.5) / 60.0);
    const double scale = diurnal_level / (day / (24 * 60));
    Profile b(slots);
    for (int i = 0; i < slots; ++i) {
        const double hour = std::fmod(start_hour + (i + 0.5) * slot_minutes / 60.0, 24.0);
        b[i] = scale * shape(hour);
    }
    return b;
}

/*
 * Reads a trace with one value per line or "slot,value" rows. Blank lines and
 * lines starting with '#' are skipped.
 */
inline Profile parse_trace_csv(std::istream& in, int expected_slots)
{
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::string field = line;
        if (const auto comma = line.find(','); comma != std::string::npos) {
            field = line.substr(comma + 1);
        }
        double v = 0.0;
        std::size_t used = 0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            throw ParseError("not a number: '" + line + "'", line_no);
        }
        if (field.find_first_not_of(" \t\r", used) != std::string::npos) {
            throw ParseError("trailing characters: '" + line + "'", line_no);
        }
        if (!std::isfinite(v)) throw ParseError("non-finite value", line_no);
        if (v < 0.0) throw ParseError("negative traffic", line_no);
        values.push_back(v);
    }
    if (expected_slots > 0 && static_cast<int>(values.size()) != expected_slots) {
        throw LengthMismatch(static_cast<std::size_t>(expected_slots), values.size());
    }
    return Eigen::Map<const Profile>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Profile load_trace_csv(const std::string& path, int expected_slots)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file " + path);
    return parse_trace_csv(in, expected_slots);
}

// ---------------------------------------------------------------------------
// Deferrable arrivals
// ---------------------------------------------------------------------------

struct ArrivalModel {
    double shift = 0.0;               // m, added to every slot's Poisson count
    double rate = 4.0;                // lambda_p
    double continuous_fraction = 0.5;
    double budget_min = 12.0;
    double budget_max = 24.0;
    int slack_min = 6;
    int slack_max = 14;
    double rate_cap = 3.0;
    int cutoff = 48; // last slot with arrivals

    /// Expected number of arrivals at slot t.
    double mean_arrivals(int t) const { return (t >= 1 && t <= cutoff) ? shift + rate : 0.0; }

    /// Variance of the per-slot count.
    double arrival_variance(int t) const { return (t >= 1 && t <= cutoff) ? rate : 0.0; }

    double mean_budget() const { return 0.5 * (budget_min + budget_max); }

    /// Latest deadline any generated application can have.
    int latest_deadline() const
    {
        return cutoff + static_cast<int>(std::ceil(budget_max / rate_cap)) + slack_max;
    }

    /// Expected deferrable volume arriving strictly after slot t.
    double expected_volume_after(int t, int slots) const
    {
        double total = 0.0;
        for (int tau = t + 1; tau <= slots; ++tau) total += mean_budget() * mean_arrivals(tau);
        return total;
    }
};

/// Applications known to the scheduler, in arrival order within each class.
struct DeferrableSet {
    std::vector<ContinuousDA> continuous;
    std::vector<DiscreteDA> discrete;

    std::size_t size() const noexcept { return continuous.size() + discrete.size(); }
};

/*
 * Draws one day of arrivals: per slot up to the cutoff, m + Poisson(lambda_p)
 * applications, each continuous with the configured probability. Deadlines
 * past the end of the grid are clamped to the last slot.
 */
inline DeferrableSet generate_arrivals(const ArrivalModel& model, const TimeGrid& grid,
                                       std::uint64_t seed)
{
    Substream rng(seed, stream::arrivals);
    std::poisson_distribution<int> count(model.rate);
    std::uniform_real_distribution<double> budget(model.budget_min, model.budget_max);
    std::uniform_int_distribution<int> slack(model.slack_min, model.slack_max);
    std::bernoulli_distribution continuous(model.continuous_fraction);

    DeferrableSet out;
    int serial = 0;
    const int shift = static_cast<int>(std::lround(model.shift));
    for (int t = 1; t <= std::min(model.cutoff, grid.slots); ++t) {
        const int n = shift + (model.rate > 0.0 ? count(rng) : 0);
        for (int i = 0; i < n; ++i) {
            const bool is_continuous = continuous(rng);
            const double P = budget(rng);
            const int length = static_cast<int>(std::ceil(P / model.rate_cap));
            const int deadline = std::min(t + length + slack(rng), grid.slots);
            const std::string id = "da" + std::to_string(++serial);
            if (is_continuous) {
                out.continuous.push_back(
                    ContinuousDA::with_cap(id, t, deadline, P, model.rate_cap, grid));
            } else {
                out.discrete.push_back(
                    DiscreteDA::from_budget(id, t, deadline, length * model.rate_cap, model.rate_cap));
            }
        }
    }
    return out;
}

} // namespace dshape
