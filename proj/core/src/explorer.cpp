#include "mcswarm/explorer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcswarm {

std::string to_string(CohesionMode mode) {
    switch (mode) {
        case CohesionMode::None: return "none";
        case CohesionMode::Constant: return "constant";
        case CohesionMode::Half: return "half";
        case CohesionMode::MixedCriticality: return "mixed";
    }
    return "none";
}

CohesionMode parse_cohesion_mode(const std::string& name) {
    if (name == "none") return CohesionMode::None;
    if (name == "constant") return CohesionMode::Constant;
    if (name == "half") return CohesionMode::Half;
    if (name == "mixed") return CohesionMode::MixedCriticality;
    throw std::invalid_argument("unknown cohesion mode: " + name);
}

std::vector<std::uint8_t> encode_position(const Cell& target) {
    return {static_cast<std::uint8_t>(target.x), static_cast<std::uint8_t>(target.y)};
}

Cell decode_position(std::span<const std::uint8_t> payload) {
    if (payload.size() != 2) throw std::invalid_argument("position payload: bad size");
    return {payload[0], payload[1]};
}

std::vector<std::uint8_t> encode_cell_status(const Cell& cell, CellState state) {
    return {static_cast<std::uint8_t>(cell.x), static_cast<std::uint8_t>(cell.y),
            static_cast<std::uint8_t>(state)};
}

std::pair<Cell, CellState> decode_cell_status(std::span<const std::uint8_t> payload) {
    if (payload.size() != 3) throw std::invalid_argument("cell status payload: bad size");
    if (payload[2] != static_cast<std::uint8_t>(CellState::Clear) &&
        payload[2] != static_cast<std::uint8_t>(CellState::Occupied))
        throw std::invalid_argument("cell status payload: bad status byte");
    return {{payload[0], payload[1]}, static_cast<CellState>(payload[2])};
}

double apply_cohesion(CohesionMode mode, double centroid_distance, bool hi_recent,
                      const WeightConfig& weights) {
    double d = centroid_distance;
    switch (mode) {
        case CohesionMode::None: return 0.0;
        case CohesionMode::Constant: return weights.cohesion_coeff * d * d * d;
        case CohesionMode::Half: {
            double hd = d / 2.0;
            return weights.cohesion_coeff * hd * hd * hd;
        }
        case CohesionMode::MixedCriticality:
            return hi_recent ? weights.cohesion_coeff * d * d * d : 0.0;
    }
    return 0.0;
}

Vec2 swarm_centroid(const Vec2& own_position, std::span<const Vec2> peer_points) {
    Vec2 sum = own_position;
    for (const auto& p : peer_points) sum = sum + p;
    double n = 1.0 + static_cast<double>(peer_points.size());
    return {sum.x / n, sum.y / n};
}

std::array<Cell, 9> neighborhood(const Cell& c) {
    return {Cell{c.x, c.y + 1},     Cell{c.x + 1, c.y + 1}, Cell{c.x + 1, c.y},
            Cell{c.x + 1, c.y - 1}, Cell{c.x, c.y - 1},     Cell{c.x - 1, c.y - 1},
            Cell{c.x - 1, c.y},     Cell{c.x - 1, c.y + 1}, Cell{c.x, c.y}};
}

double score_cell(const Cell& cand, const ScoreContext& ctx) {
    const WeightConfig& w = *ctx.weights;
    double score = 0.0;

    int dx = cand.x - ctx.current.x;
    int dy = cand.y - ctx.current.y;
    if (dx != 0 && dy != 0) score += w.diagonal;
    if (dx == 0 && dy == 0) score += w.linger_rate * ctx.seconds_in_cell;
    if (ctx.previous && cand == *ctx.previous) score += w.prev_cell;

    CellState state = ctx.map->at(cand);
    if (state == CellState::Occupied) score += w.obstacle;
    if (state == CellState::Unknown) score += w.unexplored_bonus;

    if (!ctx.peer_targets.empty()) {
        int nearest = std::numeric_limits<int>::max();
        for (const auto& t : ctx.peer_targets) nearest = std::min(nearest, chebyshev(cand, t));
        if (nearest < static_cast<int>(w.separation_table.size()))
            score += w.separation_table[nearest];
    }

    Vec2 center{(cand.x + 0.5) * ctx.cell_size, (cand.y + 0.5) * ctx.cell_size};
    Vec2 dir = center - ctx.position;
    if (dir.norm() > 1e-9) {
        Vec2 forward{std::cos(ctx.heading), std::sin(ctx.heading)};
        score -= forward.dot(dir.normalized());
    }

    score += w.frontier_per_cell *
             (*ctx.frontier)[static_cast<std::size_t>(cand.y) * ctx.map->width() + cand.x];

    score += apply_cohesion(ctx.mode, distance(center, ctx.centroid) / w.cohesion_distance_scale,
                            ctx.hi_recent, w);
    return score;
}

Cell select_target(const ScoreContext& ctx) {
    Cell best = ctx.current;
    double best_score = std::numeric_limits<double>::infinity();
    for (const Cell& cand : neighborhood(ctx.current)) {
        if (!ctx.map->in_grid(cand)) continue;
        double s = score_cell(cand, ctx);
        if (s < best_score) {
            best_score = s;
            best = cand;
        }
    }
    return best;
}

namespace {

/// Ray/axis-aligned-box intersection; returns entry distance if within range.
std::optional<double> ray_box(const Vec2& origin, const Vec2& dir, const Obstacle& box,
                              double max_range) {
    double tmin = 0.0, tmax = max_range;
    const double lo[2] = {box.min_x(), box.min_y()};
    const double hi[2] = {box.max_x(), box.max_y()};
    const double o[2] = {origin.x, origin.y};
    const double d[2] = {dir.x, dir.y};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(d[axis]) < 1e-12) {
            if (o[axis] < lo[axis] || o[axis] > hi[axis]) return std::nullopt;
        } else {
            double t1 = (lo[axis] - o[axis]) / d[axis];
            double t2 = (hi[axis] - o[axis]) / d[axis];
            if (t1 > t2) std::swap(t1, t2);
            tmin = std::max(tmin, t1);
            tmax = std::min(tmax, t2);
            if (tmin > tmax) return std::nullopt;
        }
    }
    return tmin;
}

std::optional<double> ray_circle(const Vec2& origin, const Vec2& dir, const Vec2& center,
                                 double radius, double max_range) {
    Vec2 oc = origin - center;
    double b = oc.dot(dir);
    double c = oc.dot(oc) - radius * radius;
    double disc = b * b - c;
    if (disc < 0.0) return std::nullopt;
    double t = -b - std::sqrt(disc);
    if (t < 0.0) t = -b + std::sqrt(disc);
    if (t < 0.0 || t > max_range) return std::nullopt;
    return t;
}

bool position_free(const Vec2& p, double radius, const Arena& arena,
                   std::span<const Vec2> other_robots) {
    if (p.x < radius || p.y < radius || p.x > arena.params.width - radius ||
        p.y > arena.params.height - radius)
        return false;
    for (const auto& obs : arena.obstacles) {
        if (obs.distance_to(p) < radius) return false;
    }
    for (const auto& o : other_robots) {
        if (distance(p, o) < 2.0 * radius) return false;
    }
    return true;
}

}  // namespace

RobotPose drive(const RobotPose& pose, const Vec2& goal, double dt, const KinematicsParams& kin,
                const Arena& arena, std::span<const Vec2> other_robots) {
    RobotPose next = pose;
    Vec2 to_goal = goal - pose.position;
    if (to_goal.norm() < 0.005) return next;  // at the target center

    double desired = std::atan2(to_goal.y, to_goal.x);
    double err = wrap_angle(desired - pose.heading);
    double turn = std::clamp(err, -kin.max_turn_rate * dt, kin.max_turn_rate * dt);
    next.heading = wrap_angle(pose.heading + turn);

    if (std::abs(wrap_angle(desired - next.heading)) < kin.heading_gate) {
        double dist = std::min(kin.max_speed * dt, to_goal.norm());
        Vec2 step{std::cos(next.heading) * dist, std::sin(next.heading) * dist};
        Vec2 full = pose.position + step;
        if (position_free(full, kin.robot_radius, arena, other_robots)) {
            next.position = full;
        } else {
            Vec2 half = pose.position + step * 0.5;
            if (position_free(half, kin.robot_radius, arena, other_robots))
                next.position = half;
            // else: contact, stay put
        }
    }
    return next;
}

Explorer::Explorer(int robot_id, int n_robots, int cells_x, int cells_y, ExplorerConfig config)
    : id_(robot_id),
      n_robots_(n_robots),
      cfg_(std::move(config)),
      map_(cells_x, cells_y),
      peers_(n_robots),
      position_history_(cfg_.unreachable_window_slots) {}

std::optional<Explorer::RayHit> Explorer::sense_hit(const RobotPose& pose, const Arena& arena,
                                                    std::span<const RobotPose> all_poses) const {
    double range = cfg_.kinematics.robot_radius + cfg_.kinematics.sensor_range;
    std::optional<RayHit> best;
    const double angles[3] = {-cfg_.kinematics.sensor_half_angle, 0.0,
                              cfg_.kinematics.sensor_half_angle};
    for (double a : angles) {
        Vec2 dir{std::cos(pose.heading + a), std::sin(pose.heading + a)};
        for (const auto& obs : arena.obstacles) {
            if (auto t = ray_box(pose.position, dir, obs, range)) {
                if (!best || *t < best->dist) best = RayHit{*t, pose.position + dir * *t};
            }
        }
        for (int i = 0; i < static_cast<int>(all_poses.size()); ++i) {
            if (i == id_) continue;
            if (auto t = ray_circle(pose.position, dir, all_poses[i].position,
                                    cfg_.kinematics.robot_radius, range)) {
                if (!best || *t < best->dist) best = RayHit{*t, pose.position + dir * *t};
            }
        }
    }
    return best;
}

void Explorer::reselect(const RobotPose& pose, const Arena& arena, std::uint64_t slot,
                        std::vector<OutgoingMessage>& out) {
    ScoreContext ctx;
    ctx.current = current_cell_;
    ctx.previous = previous_cell_;
    ctx.seconds_in_cell = static_cast<double>(slot - entered_cell_slot_) * cfg_.slot_duration_s;
    ctx.position = pose.position;
    ctx.heading = pose.heading;
    ctx.map = &map_;
    auto frontier = frontier_field(map_);
    ctx.frontier = &frontier;
    std::vector<Vec2> peer_points;
    for (const auto& p : peers_) {
        if (p) {
            ctx.peer_targets.push_back(p->target);
            peer_points.push_back(arena.cell_center(p->target));
        }
    }
    ctx.mode = cfg_.mode;
    ctx.hi_recent = hi_recent(slot);
    ctx.centroid = swarm_centroid(pose.position, peer_points);
    ctx.cell_size = arena.params.cell_size;
    ctx.weights = &cfg_.weights;

    Cell chosen = select_target(ctx);
    last_cohesion_term_ = apply_cohesion(
        ctx.mode,
        distance(arena.cell_center(chosen), ctx.centroid) / cfg_.weights.cohesion_distance_scale,
        ctx.hi_recent, cfg_.weights);
    last_select_slot_ = slot;
    target_is_stay_ = chosen == current_cell_;
    if (!target_ || !(*target_ == chosen)) {
        target_ = chosen;
        out.push_back({cfg_.position_buffer, FrameKind::Position, encode_position(chosen), true});
    }
}

bool Explorer::hi_recent(std::uint64_t now_slot) const {
    if (!last_hi_slot_) return false;
    auto window = static_cast<std::uint64_t>(cfg_.hi_window_s / cfg_.slot_duration_s + 0.5);
    return now_slot - *last_hi_slot_ <= window;
}

void Explorer::tick(RobotPose& pose, const Arena& arena, std::span<const RobotPose> all_poses,
                    std::uint64_t slot, std::vector<OutgoingMessage>& out) {
    Cell cur = arena.cell_of(pose.position);
    if (!(cur == current_cell_)) {
        if (current_cell_.x >= 0) previous_cell_ = current_cell_;
        current_cell_ = cur;
        entered_cell_slot_ = slot;
    }

    // Sensing: own cell is clear; a range hit marks the hit cell occupied
    // unless the hit is near a known peer target (likely another robot).
    if (map_.update(cur, CellState::Clear))
        out.push_back({cfg_.cellstatus_buffer, FrameKind::CellStatus,
                       encode_cell_status(cur, CellState::Clear), false});
    auto hit = sense_hit(pose, arena, all_poses);
    proximity_active_ = hit.has_value();
    if (hit) {
        bool near_peer = false;
        for (const auto& p : peers_) {
            if (p && distance(hit->point, arena.cell_center(p->target)) < cfg_.peer_filter_radius) {
                near_peer = true;
                break;
            }
        }
        Cell hit_cell = arena.cell_of(hit->point);
        if (!near_peer && arena.in_grid(hit_cell) && map_.update(hit_cell, CellState::Occupied))
            out.push_back({cfg_.cellstatus_buffer, FrameKind::CellStatus,
                           encode_cell_status(hit_cell, CellState::Occupied), false});
    }

    // Target maintenance. A target equal to the current cell ("stay") counts
    // as reached immediately and is only re-evaluated after a short cooldown.
    bool reached = target_ && cur == *target_;
    bool stuck = false;
    if (target_ && !reached && ticks_ >= position_history_.size() && proximity_active_ &&
        slot - last_select_slot_ >= position_history_.size()) {
        const Vec2& old = position_history_[history_next_];
        stuck = distance(pose.position, old) < cfg_.unreachable_progress;
    }
    if (!target_ || (reached && !target_is_stay_) ||
        (reached && target_is_stay_ && slot - last_select_slot_ >= cfg_.stay_reselect_slots) ||
        stuck) {
        reselect(pose, arena, slot, out);
    }

    position_history_[history_next_] = pose.position;
    history_next_ = (history_next_ + 1) % position_history_.size();
    ++ticks_;

    if (target_) {
        std::vector<Vec2> others;
        others.reserve(all_poses.size() - 1);
        for (int i = 0; i < static_cast<int>(all_poses.size()); ++i) {
            if (i != id_) others.push_back(all_poses[i].position);
        }
        pose = drive(pose, arena.cell_center(*target_), cfg_.slot_duration_s, cfg_.kinematics,
                     arena, others);
    }
}

void Explorer::on_payload(int sender, FrameKind kind, std::span<const std::uint8_t> payload,
                          std::uint64_t slot) {
    try {
        if (kind == FrameKind::Position) {
            Cell t = decode_position(payload);
            if (sender >= 0 && sender < n_robots_ && sender != id_ && map_.in_grid(t))
                peers_[sender] = PeerInfo{t, slot};
        } else if (kind == FrameKind::CellStatus) {
            auto [cell, state] = decode_cell_status(payload);
            if (map_.in_grid(cell)) map_.update(cell, state);
        }
    } catch (const std::invalid_argument&) {
        // malformed payload: dropped
    }
}

void Explorer::note_mode(Criticality mode, std::uint64_t slot) {
    if (mode == Criticality::HI) last_hi_slot_ = slot;
}

}  // namespace mcswarm
