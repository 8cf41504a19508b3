#pragma once

#include "mobility/team.hpp"

namespace mobility::coordination {

/// Signal-free intersection with two approaching vehicles sharing one
/// merging cell. Each vehicle advances 0 or 1 cell per decision; cells are
/// numbered 0..cells, the merging cell is cells-1 and cells is the exit.
/// Simultaneous occupancy of the merging cell is a collision: the causing
/// decision and every step spent crashed cost `collision_penalty`, any
/// other step costs 1 per vehicle not yet through. The second vehicle is
/// the human-driven one: with noise > 0 it misreads its own position one
/// cell ahead with that probability.
struct IntersectionParams {
    int cells = 2;                    // cells per approach, >= 2
    int delay = 1;                    // sharing delay, < horizon
    double noise = 0.0;               // in [0, 1): second member's misread probability
    int horizon = 0;                  // 0 picks 2 * cells
    double collision_penalty = 0.0;   // 0 picks 1000 * horizon
};

TeamModel build_intersection_scenario(const IntersectionParams& params);

/// State index of the position pair (goal = cells), for tests and tools.
int intersection_state(const IntersectionParams& params, int position1, int position2);

}  // namespace mobility::coordination
