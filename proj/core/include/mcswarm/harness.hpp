#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mcswarm/sim.hpp"

namespace mcswarm {

/// A batch sweep: every (mode, k) pair runs on the identical arena set so
/// configurations are compared pairwise.
struct ExperimentPlan {
    int arena_count = 20;
    std::uint64_t arena_base_seed = 1;
    std::vector<double> k_values{0.125, 0.25, 0.5, 1.0};
    std::vector<CohesionMode> modes{CohesionMode::None, CohesionMode::Constant,
                                    CohesionMode::Half, CohesionMode::MixedCriticality};
    int repetitions = 1;
    std::string output_dir;
    bool write_traces = false;
    SimConfig base;  // arena params, weights, horizon etc.; seed/k/mode filled per run
};

ExperimentPlan load_plan(const std::string& path);
ExperimentPlan parse_plan(const std::string& json_text);

/// Concrete config for one run of the plan.
SimConfig plan_run_config(const ExperimentPlan& plan, CohesionMode mode, double k,
                          std::uint64_t arena_seed);

struct RunRecord {
    CohesionMode mode = CohesionMode::None;
    double k = 0.0;
    std::uint64_t arena_seed = 0;
    int repetition = 0;
    CoverageSeries series;
    double false_occupied_rate = 0.0;
    double hi_slot_fraction = 0.0;
    bool failed = false;
    std::string error;
};

/// Run every (mode, k, arena, repetition) combination on a worker pool.
/// Results are returned in deterministic (mode, k, seed, rep) order
/// regardless of scheduling; individual failures are recorded and do not
/// abort the sweep. workers <= 1 runs inline.
std::vector<RunRecord> run_experiment(const ExperimentPlan& plan, int workers = 1);

/// Median and interquartile-range curves across arenas for one (mode, k).
struct AggregateCurve {
    CohesionMode mode = CohesionMode::None;
    double k = 0.0;
    std::vector<double> time_s;
    std::vector<double> median;
    std::vector<double> q25;
    std::vector<double> q75;
};

/// Percentile with linear interpolation between order statistics
/// (h = (n-1)p). values need not be sorted.
double percentile(std::vector<double> values, double p);

AggregateCurve aggregate(std::span<const CoverageSeries> series, CohesionMode mode, double k);

void write_aggregate_csv(const AggregateCurve& curve, std::ostream& out);
AggregateCurve read_aggregate_csv(std::istream& in, CohesionMode mode, double k);

/// Overlay plot of the four modes for one k: median polylines with shaded
/// IQR bands. Output is deterministic text.
void write_coverage_svg(std::span<const AggregateCurve> curves, std::ostream& out);

/// Modes sorted by median coverage at the sample nearest at_time_s,
/// descending; ties keep declaration order. Throws if any of the four modes
/// is missing for this k.
std::vector<CohesionMode> rank_modes(std::span<const AggregateCurve> curves, double k,
                                     double at_time_s);

/// "0.125"-style short text for a k value, used in output file names.
std::string format_k(double k);

}  // namespace mcswarm
