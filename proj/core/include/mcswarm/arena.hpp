#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcswarm/geometry.hpp"

namespace mcswarm {

struct ArenaParams {
    double width = 6.0;   // metres
    double height = 6.0;
    double cell_size = 0.1;
    int n_robots = 10;
    double start_square = 1.8;      // side of the square the robots start in
    double robot_spacing = 0.3;     // minimum pairwise start distance
    double robot_radius = 0.035;
    int max_obstacles = 17;         // count drawn uniformly from 0..max
    double obstacle_min_side = 0.2;
    double obstacle_max_side = 0.4;
    double obstacle_separation = 0.5;  // from other obstacles and robot starts
};

/// Axis-aligned box obstacle, metres.
struct Obstacle {
    Vec2 center;
    double width = 0.0;
    double height = 0.0;

    double min_x() const { return center.x - width / 2.0; }
    double max_x() const { return center.x + width / 2.0; }
    double min_y() const { return center.y - height / 2.0; }
    double max_y() const { return center.y + height / 2.0; }

    /// Euclidean distance from a point to the box (0 inside).
    double distance_to(const Vec2& p) const;
    bool intersects_cell(int cx, int cy, double cell_size) const;
};

struct StartPose {
    Vec2 position;
    double heading = 0.0;  // radians
};

/// Ground truth for one run: world geometry plus the set of grid cells
/// reachable from the robots' starting positions.
struct Arena {
    ArenaParams params;
    std::uint64_t seed = 0;
    std::vector<Obstacle> obstacles;
    std::vector<StartPose> starts;
    std::vector<std::uint8_t> accessible;  // cells_x * cells_y, row-major, 1 = reachable

    int cells_x() const { return static_cast<int>(params.width / params.cell_size + 0.5); }
    int cells_y() const { return static_cast<int>(params.height / params.cell_size + 0.5); }
    bool in_grid(const Cell& c) const {
        return c.x >= 0 && c.y >= 0 && c.x < cells_x() && c.y < cells_y();
    }
    bool is_accessible(const Cell& c) const {
        return in_grid(c) && accessible[static_cast<std::size_t>(c.y) * cells_x() + c.x];
    }
    std::size_t accessible_count() const;

    /// True ground-truth occupancy: a cell any obstacle overlaps.
    bool cell_has_obstacle(const Cell& c) const;

    Cell cell_of(const Vec2& p) const {
        return {static_cast<int>(p.x / params.cell_size), static_cast<int>(p.y / params.cell_size)};
    }
    Vec2 cell_center(const Cell& c) const {
        return {(c.x + 0.5) * params.cell_size, (c.y + 0.5) * params.cell_size};
    }
};

/// Deterministically generate an arena: robots first, by rejection sampling in
/// a start square clamped inside the walls, then up to max_obstacles boxes.
/// If placement repeatedly fails the whole arena is regenerated from a
/// derived sub-seed.
Arena generate_arena(std::uint64_t seed, const ArenaParams& params);

/// Flood fill (8-connected) from the robot start cells through cells that no
/// obstacle overlaps.
std::vector<std::uint8_t> accessible_cells(const Arena& arena);

void save_arena(const Arena& arena, const std::string& path);
Arena load_arena(const std::string& path);

}  // namespace mcswarm
