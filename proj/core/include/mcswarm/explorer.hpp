#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcswarm/arena.hpp"
#include "mcswarm/geometry.hpp"
#include "mcswarm/grid_map.hpp"
#include "mcswarm/mac.hpp"

namespace mcswarm {

struct RobotPose {
    Vec2 position;
    double heading = 0.0;  // radians, 0 = +x
};

/// Target-cell scoring weights. Lower total score wins.
struct WeightConfig {
    double diagonal = 1.0;
    double prev_cell = 1.0;
    double linger_rate = 0.5;  // per second spent in the current cell
    double obstacle = 1000.0;
    double unexplored_bonus = -10.0;
    // Indexed by cell distance 0..6 to the nearest peer target; 0 beyond.
    std::array<double, 7> separation_table{400000.0, 200000.0, 100000.0, 4.0, 1.0, 0.25, 0.1};
    double cohesion_coeff = 8.0;  // weight = coeff * d^3
    // Length unit, in meters, of the centroid distance d fed into the cohesion
    // weight. Calibrated so that constant cohesion keeps the swarm connected
    // across channel conditions while remaining mobile.
    double cohesion_distance_scale = 0.9;
    double frontier_per_cell = 1.0;
};

enum class CohesionMode { None = 0, Constant = 1, Half = 2, MixedCriticality = 3 };

std::string to_string(CohesionMode mode);
CohesionMode parse_cohesion_mode(const std::string& name);

struct KinematicsParams {
    double max_speed = 0.13;          // m/s
    double max_turn_rate = M_PI;      // rad/s
    double robot_radius = 0.035;      // m
    double sensor_range = 0.10;       // m beyond the robot radius
    double sensor_half_angle = 0.4363323129985824;  // 25 degrees, cone half-width
    double heading_gate = 0.5235987755982988;       // 30 degrees: drive only when aligned
};

struct PeerInfo {
    Cell target;
    std::uint64_t slot = 0;  // slot of reception
};

// Payload encodings: Position = target cell (2 bytes, x then y);
// CellStatus = cell (2 bytes) + status byte (1 = clear, 2 = occupied).
std::vector<std::uint8_t> encode_position(const Cell& target);
Cell decode_position(std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> encode_cell_status(const Cell& cell, CellState state);
std::pair<Cell, CellState> decode_cell_status(std::span<const std::uint8_t> payload);

/// Cohesion weight for a candidate at distance d from the swarm centroid.
/// hi_recent: whether the MAC reported HI within the configured window.
double apply_cohesion(CohesionMode mode, double centroid_distance, bool hi_recent,
                      const WeightConfig& weights);

/// Arithmetic mean of the robot's own position and every heard-from peer's
/// last reported target-cell center.
Vec2 swarm_centroid(const Vec2& own_position, std::span<const Vec2> peer_points);

/// Inputs to one round of target-cell scoring, shared by all nine candidates.
struct ScoreContext {
    Cell current;
    std::optional<Cell> previous;
    double seconds_in_cell = 0.0;
    Vec2 position;
    double heading = 0.0;
    const GridMap* map = nullptr;
    const std::vector<std::uint16_t>* frontier = nullptr;
    std::vector<Cell> peer_targets;
    CohesionMode mode = CohesionMode::None;
    bool hi_recent = false;
    Vec2 centroid;
    double cell_size = 0.1;
    const WeightConfig* weights = nullptr;
};

double score_cell(const Cell& candidate, const ScoreContext& ctx);

/// Candidate enumeration order; ties in score go to the earlier entry.
/// N, NE, E, SE, S, SW, W, NW, center (grid north = +y).
std::array<Cell, 9> neighborhood(const Cell& center);

/// Argmin of score_cell over the in-grid 3x3 neighborhood.
Cell select_target(const ScoreContext& ctx);

/// One 10ms unicycle step toward the target cell center: turn at the max
/// rate, drive forward when the heading error is inside the gate, and stop
/// at contact with walls, obstacles, or other robots.
RobotPose drive(const RobotPose& pose, const Vec2& goal, double dt, const KinematicsParams& kin,
                const Arena& arena, std::span<const Vec2> other_robots);

/// A message the controller wants the MAC to carry.
struct OutgoingMessage {
    int buffer_id = 0;
    FrameKind kind = FrameKind::NoOp;
    std::vector<std::uint8_t> payload;
    bool replace_unsent = false;
};

struct ExplorerConfig {
    WeightConfig weights;
    CohesionMode mode = CohesionMode::None;
    double hi_window_s = 3.0;
    double slot_duration_s = 0.01;
    KinematicsParams kinematics;
    int position_buffer = 0;
    int cellstatus_buffer = 1;
    double peer_filter_radius = 0.15;  // range hits this close to a known peer target are ignored
    std::uint32_t stay_reselect_slots = 10;
    std::uint32_t unreachable_window_slots = 200;
    double unreachable_progress = 0.01;  // metres over the window
};

/// Per-robot exploration controller: map maintenance, target selection,
/// message production and consumption.
class Explorer {
public:
    Explorer(int robot_id, int n_robots, int cells_x, int cells_y, ExplorerConfig config);

    /// One controller tick: sense, update the map, reselect the target when
    /// due, and drive. all_poses holds the true poses of every robot
    /// (self included); messages to send are appended to out.
    void tick(RobotPose& pose, const Arena& arena, std::span<const RobotPose> all_poses,
              std::uint64_t slot, std::vector<OutgoingMessage>& out);

    /// A payload delivered by the MAC. Malformed payloads are dropped.
    void on_payload(int sender, FrameKind kind, std::span<const std::uint8_t> payload,
                    std::uint64_t slot);

    /// Record the MAC's criticality at the end of a slot.
    void note_mode(Criticality mode, std::uint64_t slot);

    const GridMap& map() const { return map_; }
    std::optional<Cell> target() const { return target_; }
    const std::optional<PeerInfo>& peer(int id) const { return peers_[id]; }
    std::optional<std::uint64_t> last_hi_slot() const { return last_hi_slot_; }
    bool hi_recent(std::uint64_t now_slot) const;
    double last_cohesion_term() const { return last_cohesion_term_; }

private:
    struct RayHit {
        double dist;
        Vec2 point;
    };
    std::optional<RayHit> sense_hit(const RobotPose& pose, const Arena& arena,
                                    std::span<const RobotPose> all_poses) const;
    void reselect(const RobotPose& pose, const Arena& arena, std::uint64_t slot,
                  std::vector<OutgoingMessage>& out);

    int id_;
    int n_robots_;
    ExplorerConfig cfg_;
    GridMap map_;
    std::vector<std::optional<PeerInfo>> peers_;
    std::optional<Cell> target_;
    bool target_is_stay_ = false;
    Cell current_cell_{-1, -1};
    std::optional<Cell> previous_cell_;
    std::uint64_t entered_cell_slot_ = 0;
    std::uint64_t last_select_slot_ = 0;
    std::optional<std::uint64_t> last_hi_slot_;
    bool proximity_active_ = false;
    double last_cohesion_term_ = 0.0;
    std::vector<Vec2> position_history_;  // ring buffer, unreachable detection
    std::size_t history_next_ = 0;
    std::uint64_t ticks_ = 0;
};

}  // namespace mcswarm
