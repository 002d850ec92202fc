#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmdp/types.hpp"

namespace pmdp {

/// Grid layout and dynamics parameters. States are all cells (walls
/// included) indexed row-major; walls are never given probability mass.
struct GridSpec {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> wall; // row-major, 1 = wall
    std::vector<int> door_cells;
    std::vector<int> target_cells;     // obstacle objective reward
    std::vector<int> constraint_cells; // obstacle objective penalty
    int start_cell = -1;
    double noise = 0.1; // probability mass displaced to an open neighbor of the destination

    int num_cells() const { return width * height; }
    int cell(int row, int col) const { return row * width + col; }
    bool is_wall(int c) const { return wall[static_cast<std::size_t>(c)] != 0; }

    void validate() const;
};

/// Parses the plain-text map format: '#' wall, '.' open, 'D' door, 'S' start,
/// 'T' target, 'C' constraint, one row per line. Noise is not part of the
/// file; set it on the returned spec.
GridSpec parse_map(const std::string& text);

GridSpec load_map_file(const std::string& path);

/// Cardinal actions plus stay; kAction* index the kernel's action axis.
inline constexpr int kActionUp = 0;
inline constexpr int kActionDown = 1;
inline constexpr int kActionLeft = 2;
inline constexpr int kActionRight = 3;
inline constexpr int kActionStay = 4;
inline constexpr int kGridActions = 5;

/// World the protocol runs against: true dynamics and the target initial
/// state-action distribution.
struct Environment {
    SpaceDims dims;
    TransitionKernel kernel;
    Dist rho;
};

/// Builds the gridworld kernel: the intended move (blocked moves resolve to
/// stay) receives mass 1 - noise, and the noise mass spreads uniformly over
/// the open neighbors of the destination. rho is a Dirac at the start cell
/// paired with `rho_action` (stay by default, matching the return-to-base
/// story). Dynamics are stationary and replicated across the horizon.
Environment four_room_kernel(const GridSpec& spec, int horizon, int rho_action = kActionStay);

/// Canonical 11 x 11 four-room map with centered doors, start in the upper
/// left corner, target and constraint cells for the obstacle task.
std::string four_room_11_map();

/// Reduced 7 x 7 two-room map for fast runs.
std::string two_room_7_map();

/// Wider 9 x 7 two-room map with a constraint block, used by the reduced
/// obstacle preset.
std::string two_room_9_map();

/// Open 5 x 5 map (no interior walls).
std::string open_5_map();

} // namespace pmdp
