#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "mcswarm/arena.hpp"
#include "mcswarm/channel.hpp"
#include "mcswarm/explorer.hpp"
#include "mcswarm/mac.hpp"
#include "mcswarm/rng.hpp"

namespace mcswarm {

/// Periodic TDMA schedule: slot position -> owning node, one slot per node.
struct SlotTable {
    std::vector<int> owner;

    explicit SlotTable(int n) {
        owner.resize(n);
        for (int i = 0; i < n; ++i) owner[i] = i;
    }
    int length() const { return static_cast<int>(owner.size()); }
    int owner_of(std::uint64_t slot) const { return owner[slot % owner.size()]; }
};

struct SimConfig {
    std::uint64_t arena_seed = 1;
    ArenaParams arena;
    ChannelParams channel;
    CohesionMode cohesion = CohesionMode::None;
    double hi_window_s = 3.0;
    std::uint32_t horizon_slots = 30000;
    std::uint32_t sample_period_slots = 100;
    // Retransmission count above which a node escalates to HI. Calibrated so
    // that escalation indicates sustained link failure rather than the
    // occasional lost ack that occurs even on healthy links.
    int retx_threshold = 6;
    std::uint32_t position_ttl_slots = 80;
    double slot_duration_s = 0.01;
    WeightConfig weights;
    KinematicsParams kinematics;
};

/// Load and validate a simulation configuration (JSON). Throws
/// std::invalid_argument listing every offending key.
SimConfig load_sim_config(const std::string& path);
SimConfig parse_sim_config(const std::string& json_text);

struct CoverageSample {
    double time_s = 0.0;
    double mean_coverage = 0.0;   // mean per-robot explored fraction of accessible cells
    double union_coverage = 0.0;  // fraction decided by at least one robot
};

struct CoverageSeries {
    std::string mode;
    double k = 0.0;
    std::uint64_t seed = 0;
    std::vector<CoverageSample> samples;
};

struct RunResult {
    CoverageSeries series;
    double false_occupied_rate = 0.0;  // false Occupied cells / decided cells
    double hi_slot_fraction = 0.0;     // robot-slots spent in HI
};

/// One deterministic slot-synchronous run. Each slot: controllers tick, the
/// slot owner broadcasts one frame, per-receiver channel draws decide
/// delivery, metrics are sampled.
class Simulation {
public:
    Simulation(const SimConfig& config, Arena arena, std::ostream* trace = nullptr);

    void step();
    RunResult run();

    std::uint64_t slot() const { return clock_; }
    const Arena& arena() const { return arena_; }
    const MacNode& mac(int id) const { return macs_[id]; }
    const Explorer& explorer(int id) const { return *explorers_[id]; }
    const RobotPose& pose(int id) const { return poses_[id]; }
    const RunResult& result() const { return result_; }

    static constexpr int kPositionBuffer = 0;
    static constexpr int kCellStatusBuffer = 1;

private:
    void sample_metrics();
    void finish_metrics();

    SimConfig config_;
    Arena arena_;
    SlotTable table_;
    Rng rng_;
    std::vector<RobotPose> poses_;
    std::vector<MacNode> macs_;
    std::vector<std::unique_ptr<Explorer>> explorers_;
    std::ostream* trace_;
    std::uint64_t clock_ = 0;
    std::uint64_t hi_robot_slots_ = 0;
    RunResult result_;
};

/// Generate the arena from the config seed and run to the horizon.
RunResult run_sim(const SimConfig& config, std::ostream* trace = nullptr);

/// CSV I/O for a single run's coverage series (columns:
/// time_s,coverage,union_coverage; no metadata so identical runs are
/// byte-identical).
void write_series_csv(const CoverageSeries& series, std::ostream& out);
std::vector<CoverageSample> read_series_csv(std::istream& in);

}  // namespace mcswarm
