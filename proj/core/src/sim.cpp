#include "mcswarm/sim.hpp"

#include <bit>
#include <cstdio>
#include <sstream>

namespace mcswarm {

namespace {

std::vector<BufferConfig> robot_buffers(const SimConfig& cfg) {
    // Position traffic is time sensitive: higher priority, bounded retry age.
    // Cell status messages never expire.
    BufferConfig position{Simulation::kPositionBuffer, 0, Criticality::HI,
                          cfg.position_ttl_slots};
    BufferConfig cell_status{Simulation::kCellStatusBuffer, 1, Criticality::HI, std::nullopt};
    return {position, cell_status};
}

std::uint64_t run_seed(const SimConfig& cfg) {
    std::uint64_t s = mix_seed(cfg.arena_seed, std::bit_cast<std::uint64_t>(cfg.channel.k));
    return mix_seed(s, static_cast<std::uint64_t>(cfg.cohesion));
}

const char* kind_name(FrameKind kind) {
    switch (kind) {
        case FrameKind::NoOp: return "noop";
        case FrameKind::Position: return "pos";
        case FrameKind::CellStatus: return "cell";
    }
    return "noop";
}

}  // namespace

Simulation::Simulation(const SimConfig& config, Arena arena, std::ostream* trace)
    : config_(config), arena_(std::move(arena)), table_(arena_.params.n_robots),
      rng_(run_seed(config)), trace_(trace) {
    int n = arena_.params.n_robots;
    if (static_cast<int>(arena_.starts.size()) != n)
        throw std::invalid_argument("sim: robot count does not match arena starts");
    ExplorerConfig ecfg;
    ecfg.weights = config_.weights;
    ecfg.mode = config_.cohesion;
    ecfg.hi_window_s = config_.hi_window_s;
    ecfg.slot_duration_s = config_.slot_duration_s;
    ecfg.kinematics = config_.kinematics;
    ecfg.position_buffer = kPositionBuffer;
    ecfg.cellstatus_buffer = kCellStatusBuffer;
    for (int i = 0; i < n; ++i) {
        poses_.push_back({arena_.starts[i].position, arena_.starts[i].heading});
        macs_.emplace_back(i, i, n, config_.retx_threshold, robot_buffers(config_));
        explorers_.push_back(
            std::make_unique<Explorer>(i, n, arena_.cells_x(), arena_.cells_y(), ecfg));
    }
    result_.series.mode = to_string(config_.cohesion);
    result_.series.k = config_.channel.k;
    result_.series.seed = config_.arena_seed;
    if (trace_) *trace_ << "slot,sender,kind,buffer,retx,mode,delivery\n";
}

void Simulation::step() {
    std::uint64_t t = clock_;
    int n = table_.length();

    // (1) Controller tick for every robot.
    std::vector<OutgoingMessage> outbox;
    for (int i = 0; i < n; ++i) {
        outbox.clear();
        explorers_[i]->tick(poses_[i], arena_, poses_, t, outbox);
        for (auto& msg : outbox) {
            if (msg.replace_unsent)
                macs_[i].enqueue_replacing_unsent(msg.buffer_id, msg.kind,
                                                  std::move(msg.payload), t);
            else
                macs_[i].enqueue(msg.buffer_id, msg.kind, std::move(msg.payload), t);
        }
    }

    // (2) The slot owner broadcasts one frame.
    int sender = table_.owner_of(t);
    int sender_slot = macs_[sender].own_slot();
    Frame frame = macs_[sender].on_own_slot(t);

    // (3) Independent per-receiver delivery draws, ascending node id.
    std::string outcomes;
    outcomes.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        if (i == sender) continue;
        bool ok = deliver(poses_[sender].position, poses_[i].position, config_.channel, rng_);
        outcomes.push_back(ok ? '1' : '0');
        if (ok) {
            auto delivered = macs_[i].on_receive(frame, sender_slot);
            if (delivered)
                explorers_[i]->on_payload(delivered->sender, delivered->kind,
                                          delivered->payload, t);
        } else {
            macs_[i].on_foreign_slot_silence(sender_slot);
        }
    }
    for (int i = 0; i < n; ++i) {
        explorers_[i]->note_mode(macs_[i].mode(), t);
        if (macs_[i].mode() == Criticality::HI) ++hi_robot_slots_;
    }

    if (trace_) {
        *trace_ << t << ',' << sender << ',' << kind_name(frame.kind) << ',';
        if (!frame.is_noop()) *trace_ << frame.buffer_id;
        *trace_ << ',' << (frame.retransmission ? 1 : 0) << ',' << to_string(frame.sender_mode)
                << ',' << outcomes << '\n';
    }

    // (4) Metrics, (5) advance the clock.
    ++clock_;
    if (config_.sample_period_slots > 0 && clock_ % config_.sample_period_slots == 0)
        sample_metrics();
}

void Simulation::sample_metrics() {
    std::size_t accessible_total = arena_.accessible_count();
    if (accessible_total == 0) return;
    int w = arena_.cells_x(), h = arena_.cells_y();
    std::size_t union_decided = 0;
    double sum_fraction = 0.0;
    std::vector<std::size_t> per_robot(explorers_.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Cell c{x, y};
            if (!arena_.is_accessible(c)) continue;
            bool any = false;
            for (std::size_t i = 0; i < explorers_.size(); ++i) {
                if (explorers_[i]->map().at(c) != CellState::Unknown) {
                    ++per_robot[i];
                    any = true;
                }
            }
            if (any) ++union_decided;
        }
    }
    for (std::size_t cnt : per_robot)
        sum_fraction += static_cast<double>(cnt) / static_cast<double>(accessible_total);
    CoverageSample sample;
    sample.time_s = static_cast<double>(clock_) * config_.slot_duration_s;
    sample.mean_coverage = sum_fraction / static_cast<double>(explorers_.size());
    sample.union_coverage =
        static_cast<double>(union_decided) / static_cast<double>(accessible_total);
    result_.series.samples.push_back(sample);
}

void Simulation::finish_metrics() {
    std::size_t decided = 0, false_occupied = 0;
    int w = arena_.cells_x(), h = arena_.cells_y();
    for (const auto& explorer : explorers_) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                Cell c{x, y};
                CellState s = explorer->map().at(c);
                if (s == CellState::Unknown) continue;
                ++decided;
                if (s == CellState::Occupied && !arena_.cell_has_obstacle(c)) ++false_occupied;
            }
        }
    }
    result_.false_occupied_rate =
        decided == 0 ? 0.0 : static_cast<double>(false_occupied) / static_cast<double>(decided);
    std::uint64_t robot_slots = clock_ * explorers_.size();
    result_.hi_slot_fraction =
        robot_slots == 0 ? 0.0
                         : static_cast<double>(hi_robot_slots_) / static_cast<double>(robot_slots);
}

RunResult Simulation::run() {
    while (clock_ < config_.horizon_slots) step();
    finish_metrics();
    return result_;
}

RunResult run_sim(const SimConfig& config, std::ostream* trace) {
    Arena arena = generate_arena(config.arena_seed, config.arena);
    Simulation sim(config, std::move(arena), trace);
    return sim.run();
}

void write_series_csv(const CoverageSeries& series, std::ostream& out) {
    out << "time_s,coverage,union_coverage\n";
    char buf[96];
    for (const auto& s : series.samples) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.6f,%.6f\n", s.time_s, s.mean_coverage,
                      s.union_coverage);
        out << buf;
    }
}

std::vector<CoverageSample> read_series_csv(std::istream& in) {
    std::vector<CoverageSample> samples;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("series csv: empty input");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CoverageSample s;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &s.time_s, &s.mean_coverage,
                        &s.union_coverage) != 3)
            throw std::runtime_error("series csv: malformed row: " + line);
        samples.push_back(s);
    }
    return samples;
}

}  // namespace mcswarm
