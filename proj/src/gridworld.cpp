#include "pmdp/gridworld.hpp"

#include <fstream>
#include <sstream>

namespace pmdp {

void GridSpec::validate() const {
    if (width < 1 || height < 1) throw ConfigError("GridSpec: empty grid");
    if (static_cast<int>(wall.size()) != num_cells()) throw ConfigError("GridSpec: mask size mismatch");
    if (noise < 0.0 || noise > 1.0) throw ConfigError("GridSpec: noise must lie in [0, 1]");
    if (start_cell < 0 || start_cell >= num_cells() || is_wall(start_cell))
        throw ConfigError("GridSpec: start cell missing or on a wall");
    for (int c : door_cells)
        if (c < 0 || c >= num_cells() || is_wall(c)) throw ConfigError("GridSpec: door on a wall");
    for (int c : target_cells)
        if (c < 0 || c >= num_cells() || is_wall(c)) throw ConfigError("GridSpec: target on a wall");
    for (int c : constraint_cells)
        if (c < 0 || c >= num_cells() || is_wall(c))
            throw ConfigError("GridSpec: constraint on a wall");
}

GridSpec parse_map(const std::string& text) {
    GridSpec spec;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw ConfigError("parse_map: empty map");
    spec.height = static_cast<int>(rows.size());
    spec.width = static_cast<int>(rows[0].size());
    spec.wall.assign(static_cast<std::size_t>(spec.num_cells()), 0);

    for (int r = 0; r < spec.height; ++r) {
        if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != spec.width)
            throw ConfigError("parse_map: ragged row " + std::to_string(r));
        for (int c = 0; c < spec.width; ++c) {
            const int cell = spec.cell(r, c);
            switch (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) {
                case '#': spec.wall[static_cast<std::size_t>(cell)] = 1; break;
                case '.': break;
                case 'D': spec.door_cells.push_back(cell); break;
                case 'S':
                    if (spec.start_cell >= 0) throw ConfigError("parse_map: multiple start cells");
                    spec.start_cell = cell;
                    break;
                case 'T': spec.target_cells.push_back(cell); break;
                case 'C': spec.constraint_cells.push_back(cell); break;
                default: throw ConfigError("parse_map: unknown map character");
            }
        }
    }
    if (spec.start_cell < 0) throw ConfigError("parse_map: no start cell");
    spec.validate();
    return spec;
}

GridSpec load_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open map file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_map(buffer.str());
}

namespace {

std::vector<int> open_neighbors(const GridSpec& spec, int cell) {
    const int r = cell / spec.width;
    const int c = cell % spec.width;
    std::vector<int> out;
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
        const int nr = r + dr[k];
        const int nc = c + dc[k];
        if (nr < 0 || nr >= spec.height || nc < 0 || nc >= spec.width) continue;
        const int n = spec.cell(nr, nc);
        if (!spec.is_wall(n)) out.push_back(n);
    }
    return out;
}

int destination(const GridSpec& spec, int cell, int action) {
    if (action == kActionStay) return cell;
    const int r = cell / spec.width;
    const int c = cell % spec.width;
    int nr = r, nc = c;
    switch (action) {
        case kActionUp: --nr; break;
        case kActionDown: ++nr; break;
        case kActionLeft: --nc; break;
        case kActionRight: ++nc; break;
        default: throw ConfigError("gridworld: unknown action");
    }
    if (nr < 0 || nr >= spec.height || nc < 0 || nc >= spec.width) return cell;
    const int dest = spec.cell(nr, nc);
    return spec.is_wall(dest) ? cell : dest;
}

} // namespace

Environment four_room_kernel(const GridSpec& spec, int horizon, int rho_action) {
    spec.validate();
    if (horizon < 1) throw ConfigError("four_room_kernel: horizon must be >= 1");
    if (rho_action < 0 || rho_action >= kGridActions)
        throw ConfigError("four_room_kernel: rho_action out of range");

    Environment env;
    env.dims = {spec.num_cells(), kGridActions, horizon};

    MatrixXd one_step = MatrixXd::Zero(env.dims.pairs(), env.dims.num_states);
    for (int x = 0; x < env.dims.num_states; ++x) {
        for (int a = 0; a < kGridActions; ++a) {
            const int row = env.dims.pair_index(x, a);
            if (spec.is_wall(x)) {
                one_step(row, x) = 1.0; // unreachable; keeps the row stochastic
                continue;
            }
            const int dest = destination(spec, x, a);
            const std::vector<int> spill = open_neighbors(spec, dest);
            if (spill.empty()) {
                one_step(row, dest) = 1.0;
                continue;
            }
            one_step(row, dest) += 1.0 - spec.noise;
            const double share = spec.noise / static_cast<double>(spill.size());
            for (int n : spill) one_step(row, n) += share;
        }
    }
    env.kernel = TransitionKernel::stationary(one_step, horizon);

    env.rho = Dist::Zero(env.dims.pairs());
    env.rho[env.dims.pair_index(spec.start_cell, rho_action)] = 1.0;
    return env;
}

std::string four_room_11_map() {
    return "S....#.....\n"
           ".....#.....\n"
           ".....D.....\n"
           ".....#.....\n"
           ".....#.....\n"
           "##D#####D##\n"
           ".....#.....\n"
           ".....#.....\n"
           "....CDC.T..\n"
           ".....#.....\n"
           ".....#.....\n";
}

std::string two_room_7_map() {
    return "S..#...\n"
           "...#...\n"
           "...#C..\n"
           "...D..T\n"
           "...#C..\n"
           "...#...\n"
           "...#...\n";
}

std::string two_room_9_map() {
    return "S...#....\n"
           "....#CC..\n"
           "....#CC..\n"
           "....D.T..\n"
           "....#CC..\n"
           "....#CC..\n"
           "....#....\n";
}

std::string open_5_map() {
    return "S....\n"
           ".....\n"
           ".....\n"
           ".....\n"
           ".....\n";
}

} // namespace pmdp
