#include "mcswarm/arena.hpp"

#include <cstdio>
#include <deque>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mcswarm/rng.hpp"

namespace mcswarm {

double Obstacle::distance_to(const Vec2& p) const {
    double dx = std::max({min_x() - p.x, 0.0, p.x - max_x()});
    double dy = std::max({min_y() - p.y, 0.0, p.y - max_y()});
    return std::hypot(dx, dy);
}

bool Obstacle::intersects_cell(int cx, int cy, double cell_size) const {
    double x0 = cx * cell_size, x1 = (cx + 1) * cell_size;
    double y0 = cy * cell_size, y1 = (cy + 1) * cell_size;
    return min_x() < x1 && max_x() > x0 && min_y() < y1 && max_y() > y0;
}

std::size_t Arena::accessible_count() const {
    std::size_t n = 0;
    for (auto v : accessible) n += v;
    return n;
}

bool Arena::cell_has_obstacle(const Cell& c) const {
    for (const auto& obs : obstacles) {
        if (obs.intersects_cell(c.x, c.y, params.cell_size)) return true;
    }
    return false;
}

namespace {

/// Gap between two boxes (0 if they touch or overlap).
double box_gap(const Obstacle& a, const Obstacle& b) {
    double dx = std::max({b.min_x() - a.max_x(), 0.0, a.min_x() - b.max_x()});
    double dy = std::max({b.min_y() - a.max_y(), 0.0, a.min_y() - b.max_y()});
    return std::hypot(dx, dy);
}

constexpr int kMaxPlacementAttempts = 2000;

bool try_generate(std::uint64_t seed, const ArenaParams& params, Arena& out) {
    Rng rng(seed);
    out = Arena{};
    out.params = params;
    out.seed = seed;

    // Start square clamped to lie inside the walls, with room for the robots.
    double margin = params.start_square / 2.0;
    double cx = rng.uniform(margin, params.width - margin);
    double cy = rng.uniform(margin, params.height - margin);
    double r = params.robot_radius;
    double lo_x = std::max(cx - margin, r), hi_x = std::min(cx + margin, params.width - r);
    double lo_y = std::max(cy - margin, r), hi_y = std::min(cy + margin, params.height - r);

    for (int i = 0; i < params.n_robots; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
            Vec2 p{rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
            bool ok = true;
            for (const auto& s : out.starts) {
                if (distance(p, s.position) < params.robot_spacing) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                out.starts.push_back({p, rng.uniform(0.0, 2.0 * M_PI)});
                placed = true;
                break;
            }
        }
        if (!placed) return false;
    }

    int n_obstacles = static_cast<int>(rng.integer(params.max_obstacles + 1));
    for (int i = 0; i < n_obstacles; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
            Obstacle obs;
            obs.width = rng.uniform(params.obstacle_min_side, params.obstacle_max_side);
            obs.height = rng.uniform(params.obstacle_min_side, params.obstacle_max_side);
            obs.center = {rng.uniform(obs.width / 2.0, params.width - obs.width / 2.0),
                          rng.uniform(obs.height / 2.0, params.height - obs.height / 2.0)};
            bool ok = true;
            for (const auto& other : out.obstacles) {
                if (box_gap(obs, other) < params.obstacle_separation) {
                    ok = false;
                    break;
                }
            }
            for (const auto& s : out.starts) {
                if (ok && obs.distance_to(s.position) < params.obstacle_separation) ok = false;
            }
            if (ok) {
                out.obstacles.push_back(obs);
                placed = true;
                break;
            }
        }
        if (!placed) return false;
    }

    out.accessible = accessible_cells(out);
    return true;
}

}  // namespace

Arena generate_arena(std::uint64_t seed, const ArenaParams& params) {
    if (params.n_robots < 1) throw std::invalid_argument("arena: n_robots must be >= 1");
    // Rough capacity check: disks of radius spacing/2 must fit in the square.
    double square_area = params.start_square * params.start_square;
    double disk_area = M_PI * params.robot_spacing * params.robot_spacing / 4.0;
    if (params.n_robots * disk_area > square_area)
        throw std::invalid_argument("arena: too many robots for the start square");

    Arena arena;
    std::uint64_t s = seed;
    for (int round = 0; round < 64; ++round) {
        if (try_generate(s, params, arena)) return arena;
        std::fprintf(stderr, "arena: placement failed for seed %llu, retrying\n",
                     static_cast<unsigned long long>(s));
        s = mix_seed(s, 0x0badf00d + round);
    }
    throw std::runtime_error("arena: generation failed repeatedly");
}

std::vector<std::uint8_t> accessible_cells(const Arena& arena) {
    int w = arena.cells_x(), h = arena.cells_y();
    std::vector<std::uint8_t> blocked(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (arena.cell_has_obstacle({x, y})) blocked[static_cast<std::size_t>(y) * w + x] = 1;
        }
    }
    std::vector<std::uint8_t> reach(static_cast<std::size_t>(w) * h, 0);
    std::deque<Cell> queue;
    for (const auto& s : arena.starts) {
        Cell c = arena.cell_of(s.position);
        std::size_t idx = static_cast<std::size_t>(c.y) * w + c.x;
        if (!blocked[idx] && !reach[idx]) {
            reach[idx] = 1;
            queue.push_back(c);
        }
    }
    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                Cell n{c.x + dx, c.y + dy};
                if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
                std::size_t idx = static_cast<std::size_t>(n.y) * w + n.x;
                if (!blocked[idx] && !reach[idx]) {
                    reach[idx] = 1;
                    queue.push_back(n);
                }
            }
        }
    }
    return reach;
}

void save_arena(const Arena& arena, const std::string& path) {
    nlohmann::json j;
    j["width"] = arena.params.width;
    j["height"] = arena.params.height;
    j["cell_size"] = arena.params.cell_size;
    j["seed"] = arena.seed;
    j["obstacles"] = nlohmann::json::array();
    for (const auto& o : arena.obstacles)
        j["obstacles"].push_back({{"x", o.center.x}, {"y", o.center.y}, {"w", o.width}, {"h", o.height}});
    j["starts"] = nlohmann::json::array();
    for (const auto& s : arena.starts)
        j["starts"].push_back({{"x", s.position.x}, {"y", s.position.y}, {"heading", s.heading}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("arena: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

Arena load_arena(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("arena: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("arena: parse error in " + path + ": " + e.what());
    }
    try {
        Arena arena;
        arena.params.width = j.at("width").get<double>();
        arena.params.height = j.at("height").get<double>();
        arena.params.cell_size = j.at("cell_size").get<double>();
        arena.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& o : j.at("obstacles")) {
            Obstacle obs;
            obs.center = {o.at("x").get<double>(), o.at("y").get<double>()};
            obs.width = o.at("w").get<double>();
            obs.height = o.at("h").get<double>();
            arena.obstacles.push_back(obs);
        }
        for (const auto& s : j.at("starts")) {
            arena.starts.push_back(
                {{s.at("x").get<double>(), s.at("y").get<double>()}, s.at("heading").get<double>()});
        }
        arena.params.n_robots = static_cast<int>(arena.starts.size());
        arena.accessible = accessible_cells(arena);
        return arena;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("arena: malformed file " + path + ": " + e.what());
    }
}

}  // namespace mcswarm
