#pragma once

#include <cstdint>
#include <vector>

#include "mcswarm/geometry.hpp"

namespace mcswarm {

enum class CellState : std::uint8_t { Unknown = 0, Clear = 1, Occupied = 2 };

/// Per-robot occupancy knowledge. Cells only gain information: Unknown may
/// become Clear or Occupied, Clear may become Occupied, Occupied is final.
class GridMap {
public:
    GridMap(int width, int height)
        : width_(width), height_(height),
          cells_(static_cast<std::size_t>(width) * height, CellState::Unknown) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_grid(const Cell& c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
    }

    CellState at(const Cell& c) const { return cells_[index(c)]; }

    /// Apply an observation; Occupied wins conflicts. Returns true if the
    /// cell's state changed.
    bool update(const Cell& c, CellState state) {
        CellState& cur = cells_[index(c)];
        if (state == CellState::Unknown || cur == state) return false;
        if (cur == CellState::Occupied) return false;
        if (cur == CellState::Unknown) ++decided_;
        cur = state;
        return true;
    }

    std::size_t decided_count() const { return decided_; }

private:
    std::size_t index(const Cell& c) const {
        return static_cast<std::size_t>(c.y) * width_ + c.x;
    }

    int width_;
    int height_;
    std::vector<CellState> cells_;
    std::size_t decided_ = 0;
};

/// Distance (in cells, 8-connected) from every cell to the nearest Unknown
/// cell, moving only through cells not known to be Occupied. Unknown cells
/// are at distance 0; unreachable and Occupied cells get the sentinel
/// width + height.
std::vector<std::uint16_t> frontier_field(const GridMap& map);

inline std::uint16_t frontier_sentinel(const GridMap& map) {
    return static_cast<std::uint16_t>(map.width() + map.height());
}

}  // namespace mcswarm
