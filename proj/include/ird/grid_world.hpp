#pragma once

#include "ird/terrain.hpp"
#include "ird/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ird {

// Deterministic finite-horizon gridworld. Movement in the four cardinal
// directions; moves off the edge stay in place; target cells are absorbing
// (every action self-loops). Immutable after construction.
struct WorldModel {
  int width = 0;
  int height = 0;
  StateId start = 0;
  int horizon = 0;
  // successor[a][s] = next state when taking action a in state s.
  std::array<std::vector<StateId>, kNumActions> successor;

  int num_states() const { return width * height; }
  StateId next(StateId s, Action a) const {
    return successor[static_cast<int>(a)][s];
  }
  int x_of(StateId s) const { return s % width; }
  int y_of(StateId s) const { return s / width; }
  StateId state_at(int x, int y) const { return y * width + x; }

  // Structural hash over geometry, start, horizon and the transition table.
  std::uint64_t fingerprint() const;
};

WorldModel build_world(const TerrainLayout& layout, int horizon, StateId start);

// A length-H action sequence together with the H+1 states it visits.
struct Trajectory {
  std::vector<StateId> states;
  std::vector<Action> actions;

  bool operator==(const Trajectory&) const = default;
};

// Expands an action sequence from the world's start state.
Trajectory roll_out(const WorldModel& world, std::span<const Action> actions);

}  // namespace ird
