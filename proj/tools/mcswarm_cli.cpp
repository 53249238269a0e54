// Command line front end: batch sweeps, aggregation, plotting and ranking of
// coverage results, plus single runs and arena generation for inspection.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>

#include <CLI11.hpp>

#include "mcswarm/harness.hpp"

namespace fs = std::filesystem;
using namespace mcswarm;

namespace {

std::string run_filename(const RunRecord& rec) {
    return "run_" + to_string(rec.mode) + "_k" + format_k(rec.k) + "_a" +
           std::to_string(rec.arena_seed) + "_r" + std::to_string(rec.repetition) + ".csv";
}

int cmd_run(const std::string& plan_path, int workers, std::string out_dir, bool traces) {
    ExperimentPlan plan = load_plan(plan_path);
    if (!out_dir.empty()) plan.output_dir = out_dir;
    if (plan.output_dir.empty()) {
        std::cerr << "run: no output directory (plan output_dir or --out)\n";
        return 1;
    }
    if (traces) plan.write_traces = true;
    fs::create_directories(plan.output_dir);

    auto records = run_experiment(plan, workers);
    std::ofstream summary(plan.output_dir + "/summary.csv");
    summary << "mode,k,arena_seed,rep,final_coverage,false_occupied_rate,hi_fraction,status\n";
    int failures = 0;
    for (const auto& rec : records) {
        if (rec.failed) {
            ++failures;
            std::cerr << "run failed (" << to_string(rec.mode) << ", k=" << format_k(rec.k)
                      << ", seed=" << rec.arena_seed << "): " << rec.error << "\n";
            summary << to_string(rec.mode) << ',' << format_k(rec.k) << ',' << rec.arena_seed
                    << ',' << rec.repetition << ",,,,failed\n";
            continue;
        }
        std::ofstream out(plan.output_dir + "/" + run_filename(rec));
        write_series_csv(rec.series, out);
        double final_cov =
            rec.series.samples.empty() ? 0.0 : rec.series.samples.back().mean_coverage;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,ok\n", final_cov,
                      rec.false_occupied_rate, rec.hi_slot_fraction);
        summary << to_string(rec.mode) << ',' << format_k(rec.k) << ',' << rec.arena_seed << ','
                << rec.repetition << ',' << buf;
    }
    std::cout << records.size() - failures << "/" << records.size() << " runs completed -> "
              << plan.output_dir << "\n";
    return failures == 0 ? 0 : 1;
}

struct RunFileKey {
    CohesionMode mode;
    double k;
};

int cmd_aggregate(const std::string& in_dir, std::string out_dir) {
    if (out_dir.empty()) out_dir = in_dir;
    fs::create_directories(out_dir);
    std::regex pattern(R"(run_([a-z]+)_k([0-9.]+)_a([0-9]+)_r([0-9]+)\.csv)");
    std::map<std::pair<std::string, std::string>, std::vector<CoverageSeries>> groups;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in_dir)) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::smatch m;
        std::string name = path.filename().string();
        if (!std::regex_match(name, m, pattern)) continue;
        CoverageSeries series;
        series.mode = m[1];
        series.k = std::stod(m[2]);
        series.seed = std::stoull(m[3]);
        std::ifstream in(path);
        series.samples = read_series_csv(in);
        groups[{m[1], m[2]}].push_back(std::move(series));
    }
    if (groups.empty()) {
        std::cerr << "aggregate: no run_*.csv files in " << in_dir << "\n";
        return 1;
    }
    for (const auto& [key, series] : groups) {
        auto curve = aggregate(series, parse_cohesion_mode(key.first), std::stod(key.second));
        std::ofstream out(out_dir + "/coverage_" + key.first + "_" + key.second + ".csv");
        write_aggregate_csv(curve, out);
    }
    std::cout << groups.size() << " aggregate files -> " << out_dir << "\n";
    return 0;
}

std::vector<AggregateCurve> load_aggregates(const std::string& in_dir) {
    std::regex pattern(R"(coverage_([a-z]+)_([0-9.]+)\.csv)");
    std::vector<AggregateCurve> curves;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in_dir)) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::smatch m;
        std::string name = path.filename().string();
        if (!std::regex_match(name, m, pattern)) continue;
        std::ifstream in(path);
        curves.push_back(read_aggregate_csv(in, parse_cohesion_mode(m[1]), std::stod(m[2])));
    }
    return curves;
}

int cmd_plot(const std::string& in_dir, std::string out_dir) {
    if (out_dir.empty()) out_dir = in_dir;
    fs::create_directories(out_dir);
    auto curves = load_aggregates(in_dir);
    if (curves.empty()) {
        std::cerr << "plot: no coverage_*.csv files in " << in_dir << "\n";
        return 1;
    }
    std::map<std::string, std::vector<AggregateCurve>> by_k;
    for (auto& c : curves) by_k[format_k(c.k)].push_back(std::move(c));
    for (auto& [kstr, group] : by_k) {
        std::ofstream out(out_dir + "/coverage_k" + kstr + ".svg");
        write_coverage_svg(group, out);
    }
    std::cout << by_k.size() << " plots -> " << out_dir << "\n";
    return 0;
}

int cmd_rank(const std::string& in_dir, double k, double at_time) {
    auto curves = load_aggregates(in_dir);
    auto order = rank_modes(curves, k, at_time);
    std::cout << "ranking at k=" << format_k(k) << ", t=" << at_time << "s (best first):\n";
    for (std::size_t i = 0; i < order.size(); ++i)
        std::cout << "  " << i + 1 << ". " << to_string(order[i]) << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, std::string out_dir, bool trace) {
    SimConfig cfg = load_sim_config(config_path);
    if (out_dir.empty()) out_dir = ".";
    fs::create_directories(out_dir);
    std::ofstream trace_out;
    if (trace) trace_out.open(out_dir + "/trace_" + std::to_string(cfg.arena_seed) + ".csv");
    RunResult result = run_sim(cfg, trace ? &trace_out : nullptr);
    std::ofstream out(out_dir + "/coverage_" + std::to_string(cfg.arena_seed) + ".csv");
    write_series_csv(result.series, out);
    double final_cov =
        result.series.samples.empty() ? 0.0 : result.series.samples.back().mean_coverage;
    std::cout << "final coverage " << final_cov << ", false-occupied rate "
              << result.false_occupied_rate << ", HI fraction " << result.hi_slot_fraction
              << "\n";
    return 0;
}

int cmd_arena(std::uint64_t seed, const std::string& out_path) {
    Arena arena = generate_arena(seed, ArenaParams{});
    save_arena(arena, out_path);
    std::cout << "arena seed " << seed << ": " << arena.obstacles.size() << " obstacles, "
              << arena.accessible_count() << " accessible cells -> " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-criticality swarm exploration simulator"};
    app.require_subcommand(1);

    std::string plan_path, config_path, in_dir, out_dir, arena_out = "arena.json";
    int workers = 1;
    bool traces = false;
    double k = 1.0, at_time = -1.0;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "Run an experiment plan");
    run->add_option("--plan", plan_path, "Plan file (JSON)")->required();
    run->add_option("--workers", workers, "Worker threads");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--traces", traces, "Write per-run transmission traces");

    auto* agg = app.add_subcommand("aggregate", "Aggregate run series to median/IQR curves");
    agg->add_option("--in", in_dir, "Directory with run_*.csv files")->required();
    agg->add_option("--out", out_dir, "Output directory (default: --in)");

    auto* plot = app.add_subcommand("plot", "Render SVG coverage plots");
    plot->add_option("--in", in_dir, "Directory with coverage_*.csv files")->required();
    plot->add_option("--out", out_dir, "Output directory (default: --in)");

    auto* rank = app.add_subcommand("rank", "Rank cohesion modes by median coverage");
    rank->add_option("--in", in_dir, "Directory with coverage_*.csv files")->required();
    rank->add_option("--k", k, "Channel scaling factor")->required();
    rank->add_option("--time", at_time, "Time in seconds (default: last sample)");

    auto* sim = app.add_subcommand("simulate", "Run a single configuration");
    sim->add_option("--config", config_path, "Simulation config (JSON)")->required();
    sim->add_option("--out", out_dir, "Output directory");
    sim->add_flag("--trace", traces, "Write the transmission trace");

    auto* arena = app.add_subcommand("arena", "Generate and save an arena");
    arena->add_option("--seed", seed, "Arena seed");
    arena->add_option("--out", arena_out, "Output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(plan_path, workers, out_dir, traces);
        if (agg->parsed()) return cmd_aggregate(in_dir, out_dir);
        if (plot->parsed()) return cmd_plot(in_dir, out_dir);
        if (rank->parsed()) return cmd_rank(in_dir, k, at_time);
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, traces);
        if (arena->parsed()) return cmd_arena(seed, arena_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
