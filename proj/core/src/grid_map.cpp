#include "mcswarm/grid_map.hpp"

#include <deque>

namespace mcswarm {

std::vector<std::uint16_t> frontier_field(const GridMap& map) {
    int w = map.width(), h = map.height();
    std::uint16_t sentinel = frontier_sentinel(map);
    std::vector<std::uint16_t> dist(static_cast<std::size_t>(w) * h, sentinel);
    std::deque<Cell> queue;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (map.at({x, y}) == CellState::Unknown) {
                dist[static_cast<std::size_t>(y) * w + x] = 0;
                queue.push_back({x, y});
            }
        }
    }
    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        std::uint16_t d = dist[static_cast<std::size_t>(c.y) * w + c.x];
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                Cell n{c.x + dx, c.y + dy};
                if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
                if (map.at(n) == CellState::Occupied) continue;
                std::size_t idx = static_cast<std::size_t>(n.y) * w + n.x;
                if (dist[idx] > d + 1) {
                    dist[idx] = d + 1;
                    queue.push_back(n);
                }
            }
        }
    }
    return dist;
}

}  // namespace mcswarm
