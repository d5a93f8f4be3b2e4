// dshape: command-line harness for the offline/online schedulers and the
// benchmark experiments. Every command writes CSV files plus manifest.json
// into its output directory.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dshape/dshape.hpp"

namespace fs = std::filesystem;
using namespace dshape;

namespace {

constexpr int exit_invalid = 2;
constexpr int exit_scheduling = 3;

struct Options {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    int reps = 10;
    std::string out;
    std::optional<int> iterations;
    std::string support = "reachable";
    std::string arrivals;
    int case_id = 1;
    std::vector<double> values;
    std::vector<int> ks;
    std::vector<int> cases{1, 2, 3, 4};
    double sigma2 = 40.0;
};

struct Loaded {
    Scenario s;
    std::uint64_t seed = 0;
    int iterations = 0;
    VirtualSupport support = VirtualSupport::reachable;
    fs::path out;
};

Loaded load(const Options& o, const std::string& command)
{
    Loaded l;
    l.s = load_scenario(o.scenario);
    const auto violations = validate_scenario(l.s);
    if (!violations.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& v : violations) msg += "\n  " + v.id + ": " + v.reason;
        throw ScenarioError(msg);
    }
    l.seed = o.seed.value_or(l.s.seed);
    l.iterations = o.iterations.value_or(l.s.algo.iterations);
    if (l.iterations < 0) throw std::invalid_argument("--iterations must be nonnegative");
    l.support = o.support == "horizon" ? VirtualSupport::horizon : VirtualSupport::reachable;
    l.out = o.out.empty() ? fs::path("out") / command : fs::path(o.out);
    fs::create_directories(l.out);
    return l;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    writer(os);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_manifest(const Loaded& l, const std::string& command, json config)
{
    config["iterations"] = l.iterations;
    config["virtual_support"] = l.support == VirtualSupport::horizon ? "horizon" : "reachable";
    write_file(l.out / "manifest.json",
               [&](std::ostream& os) { os << manifest(command, l.s, l.seed, config).dump(2) << '\n'; });
}

// arrival records: a single file, or a directory of rep_<r>.csv
std::vector<DeferrableSet> load_records(const std::string& path, const TimeGrid& grid)
{
    std::vector<DeferrableSet> out;
    if (!fs::is_directory(path)) {
        out.push_back(load_arrivals(path, grid));
        return out;
    }
    std::map<int, fs::path> files;
    const std::regex name(R"(rep_(\d+)\.csv)");
    for (const auto& e : fs::directory_iterator(path)) {
        std::smatch m;
        const std::string f = e.path().filename().string();
        if (std::regex_match(f, m, name)) files[std::stoi(m[1])] = e.path();
    }
    for (int r = 0; r < static_cast<int>(files.size()); ++r) {
        if (!files.count(r)) throw MissingArrivalRecord("missing rep_" + std::to_string(r) + ".csv in " + path);
        out.push_back(load_arrivals(files[r].string(), grid));
    }
    if (out.empty()) throw MissingArrivalRecord("no rep_<r>.csv files in " + path);
    return out;
}

int cmd_validate(const Options& o)
{
    const Scenario s = load_scenario(o.scenario);
    const auto violations = validate_scenario(s);
    for (const auto& v : violations) std::cout << v.id << ": " << v.reason << '\n';
    if (!violations.empty()) return exit_invalid;
    std::cout << "ok: " << s.grid.slots << " slots, " << s.population() << " applications"
              << (s.arrival_model ? ", arrival model" : "") << '\n';
    return 0;
}

int cmd_offline(const Options& o)
{
    Loaded l = load(o, "offline");
    const RepInputs rep = draw_rep(l.s, l.seed);
    const Scenario s = l.s.with_applications(rep.arrivals);
    const RunTrace trace = offds_run(s, realized_base(l.s.base, rep.noise), l.iterations, l.seed);
    write_file(l.out / "trace.csv", [&](std::ostream& os) { write_run_trace(os, trace); });
    write_file(l.out / "schedule.csv", [&](std::ostream& os) { write_schedule(os, s, trace.final_state); });
    write_file(l.out / "arrivals.csv", [&](std::ostream& os) { write_arrivals(os, rep.arrivals); });
    write_manifest(l, "offline", json::object());
    std::cout << "V = " << fmt(trace.objective.back()) << '\n';
    return 0;
}

int cmd_online(const Options& o)
{
    Loaded l = load(o, "online");
    const RepInputs rep = draw_rep(l.s, l.seed);
    const OnlineResult run = onds_run(l.s, rep.arrivals, BaseForecast{l.s.base, rep.noise},
                                      case_config(1, l.support), l.iterations, l.seed);
    const double ref = case_objective(0, l.s, rep, l.iterations);
    const GapReport gap = gap_report(run.objective, ref);
    write_file(l.out / "online_trace.csv", [&](std::ostream& os) { write_online_trace(os, run); });
    write_file(l.out / "summary.csv", [&](std::ostream& os) {
        write_summary(os, {SummaryRow{l.seed, run.objective, ref, gap.relative_gap}});
    });
    write_file(l.out / "arrivals.csv", [&](std::ostream& os) { write_arrivals(os, rep.arrivals); });
    write_manifest(l, "online", json::object());
    std::cout << "V_online = " << fmt(run.objective) << "  V_offline = " << fmt(ref)
              << "  relative_gap = " << fmt(gap.relative_gap) << '\n';
    return 0;
}

int cmd_case(const Options& o)
{
    Loaded l = load(o, "case" + std::to_string(o.case_id));
    CaseSummary c;
    json config{{"case", o.case_id}};
    if (!o.arrivals.empty()) {
        c = run_case(l.s, o.case_id, load_records(o.arrivals, l.s.grid), l.seed, l.iterations, l.support);
        config["arrivals"] = o.arrivals;
    } else {
        if (!l.s.arrival_model && o.case_id != 1 && o.case_id != 2 && l.s.population() == 0) {
            throw MissingArrivalRecord("case " + std::to_string(o.case_id) + " needs --arrivals");
        }
        c = run_case(l.s, o.case_id, o.reps, l.seed, l.iterations, l.support);
    }
    config["reps"] = static_cast<int>(c.reps.size());
    write_file(l.out / "summary.csv", [&](std::ostream& os) { write_case_summary(os, c); });
    double mean_v = 0.0;
    double mean_ref = 0.0;
    for (const auto& r : c.reps) {
        mean_v += r.v_case / static_cast<double>(c.reps.size());
        mean_ref += r.v_reference / static_cast<double>(c.reps.size());
    }
    write_file(l.out / "aggregate.csv", [&](std::ostream& os) {
        os << "case,reps,mean_relative_gap,std_error,mean_V_case,mean_V_offline\n";
        os << c.case_id << ',' << c.relative_gap.count << ','
           << (c.relative_gap.count ? fmt(c.relative_gap.mean) : std::string("undefined")) << ','
           << fmt(c.relative_gap.std_error) << ',' << fmt(mean_v) << ',' << fmt(mean_ref) << '\n';
    });
    fs::create_directories(l.out / "arrivals");
    for (std::size_t r = 0; r < c.arrivals.size(); ++r) {
        write_file(l.out / "arrivals" / ("rep_" + std::to_string(r) + ".csv"),
                   [&](std::ostream& os) { write_arrivals(os, c.arrivals[r]); });
    }
    write_manifest(l, "case", config);
    std::cout << "case " << c.case_id << ": mean relative gap "
              << (c.relative_gap.count ? fmt(c.relative_gap.mean) : std::string("undefined")) << " (se "
              << fmt(c.relative_gap.std_error) << ", " << c.relative_gap.count << " reps)\n";
    return 0;
}

std::vector<double> range(double from, double to, double step)
{
    std::vector<double> v;
    for (int i = 0; from + i * step <= to + 1e-9; ++i) v.push_back(from + i * step);
    return v;
}

int cmd_sweep_sigma(const Options& o)
{
    Loaded l = load(o, "sweep-sigma");
    const auto values = o.values.empty() ? range(0.0, 100.0, 10.0) : o.values;
    const auto pts = sweep_sigma(l.s, values, o.cases, o.reps, l.seed, l.iterations, l.support);
    write_file(l.out / "sweep_sigma.csv", [&](std::ostream& os) { write_sweep(os, "sigma2", pts); });
    write_manifest(l, "sweep-sigma", json{{"reps", o.reps}, {"sigma2", values}, {"cases", o.cases}});
    for (const auto& p : pts) {
        std::cout << "sigma2 " << fmt(p.value) << " case " << p.case_id << ": " << fmt(p.relative_gap.mean) << '\n';
    }
    return 0;
}

int cmd_sweep_penetration(const Options& o)
{
    Loaded l = load(o, "sweep-penetration");
    const auto values = o.values.empty() ? range(0.25, 0.75, 0.05) : o.values;
    const auto pts = sweep_penetration(with_sigma2(l.s, o.sigma2), values, o.reps, l.seed, l.iterations, l.support);
    write_file(l.out / "sweep_penetration.csv", [&](std::ostream& os) { write_sweep(os, "discrete_fraction", pts); });
    write_manifest(l, "sweep-penetration", json{{"reps", o.reps}, {"fractions", values}, {"sigma2", o.sigma2}});
    for (const auto& p : pts) std::cout << "fraction " << fmt(p.value) << ": " << fmt(p.relative_gap.mean) << '\n';
    return 0;
}

int cmd_sweep_iterations(const Options& o)
{
    Loaded l = load(o, "sweep-iterations");
    std::vector<int> ks = o.ks;
    if (ks.empty()) {
        for (int k = 1; k <= 40; ++k) ks.push_back(k);
    }
    if (*std::min_element(ks.begin(), ks.end()) < 0) throw std::invalid_argument("iteration counts must be >= 0");
    const auto pts = sweep_iterations(l.s, ks, o.reps, l.seed);
    write_file(l.out / "sweep_iterations.csv", [&](std::ostream& os) { write_iteration_study(os, pts); });
    write_manifest(l, "sweep-iterations", json{{"reps", o.reps}, {"ks", ks}});
    for (const auto& p : pts) std::cout << "K " << p.iterations << ": " << fmt(p.objective.mean) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Demand shaping schedulers and experiment harness"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool with_reps) {
        sub->add_option("scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Master seed (default: the scenario's)");
        sub->add_option("--out", o.out, "Output directory (default: out/<command>)");
        sub->add_option("--iterations", o.iterations, "Inner iterations K (default: the scenario's)");
        sub->add_option("--virtual-support", o.support, "Slots virtual traffic may occupy")
            ->check(CLI::IsMember({"reachable", "horizon"}));
        if (with_reps) sub->add_option("--reps", o.reps, "Repetitions")->check(CLI::PositiveNumber);
    };

    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);

    auto* offline = app.add_subcommand("offline", "Offline schedule on the realized base");
    common(offline, false);
    auto* online = app.add_subcommand("online", "Online schedule over one day, compared with offline");
    common(online, false);

    auto* kase = app.add_subcommand("case", "Benchmark case against the offline reference");
    kase->add_option("case", o.case_id, "Case id 0..4")->required()->check(CLI::Range(0, case_count - 1));
    common(kase, true);
    kase->add_option("--arrivals", o.arrivals, "Replay recorded arrivals (file or directory of rep_<r>.csv)")
        ->check(CLI::ExistingPath);

    auto* sigma = app.add_subcommand("sweep-sigma", "Relative gap per base noise level");
    common(sigma, true);
    sigma->add_option("--values", o.values, "sigma2 values (default 0,10,...,100)")->delimiter(',');
    sigma->add_option("--cases", o.cases, "Cases to run (default 1,2,3,4)")->delimiter(',')
        ->check(CLI::Range(0, case_count - 1));

    auto* pen = app.add_subcommand("sweep-penetration", "Case 1 gap per discrete share");
    common(pen, true);
    pen->add_option("--values", o.values, "Discrete fractions (default 0.25,0.30,...,0.75)")->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    pen->add_option("--sigma2", o.sigma2, "Base noise level")->check(CLI::NonNegativeNumber);

    auto* iters = app.add_subcommand("sweep-iterations", "Offline objective per iteration count");
    common(iters, true);
    iters->add_option("--values", o.ks, "Iteration counts (default 1..40)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_invalid;
    }

    try {
        if (*validate) return cmd_validate(o);
        if (*offline) return cmd_offline(o);
        if (*online) return cmd_online(o);
        if (*kase) return cmd_case(o);
        if (*sigma) return cmd_sweep_sigma(o);
        if (*pen) return cmd_sweep_penetration(o);
        if (*iters) return cmd_sweep_iterations(o);
    } catch (const InfeasibleBudget& e) {
        std::cerr << "scheduling failed: " << e.what() << '\n';
        return exit_scheduling;
    } catch (const EmptyFeasibleSet& e) {
        std::cerr << "scheduling failed: " << e.what() << '\n';
        return exit_scheduling;
    } catch (const MaxItersExceeded& e) {
        std::cerr << "scheduling failed: " << e.what() << " (residual " << fmt(e.residual()) << ")\n";
        return exit_scheduling;
    } catch (const ScenarioError& e) {
        std::cerr << e.what() << '\n';
        return exit_invalid;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const LengthMismatch& e) {
        std::cerr << "length mismatch: " << e.what() << '\n';
        return exit_invalid;
    } catch (const MissingArrivalRecord& e) {
        std::cerr << "missing arrival record: " << e.what() << '\n';
        return exit_invalid;
    } catch (const json::exception& e) {
        std::cerr << "scenario: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
