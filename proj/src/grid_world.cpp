#include "ird/grid_world.hpp"

#include <stdexcept>

namespace ird {

const char* action_name(Action a) {
  switch (a) {
    case Action::Up:
      return "up";
    case Action::Down:
      return "down";
    case Action::Left:
      return "left";
    case Action::Right:
      return "right";
  }
  return "?";
}

std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index) {
  return mix_seed(mix_seed(master ^ tag) + index);
}

std::uint64_t WorldModel::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
  };
  mix(static_cast<std::uint64_t>(width));
  mix(static_cast<std::uint64_t>(height));
  mix(static_cast<std::uint64_t>(start));
  mix(static_cast<std::uint64_t>(horizon));
  for (const auto& per_action : successor)
    for (StateId s : per_action) mix(static_cast<std::uint64_t>(s));
  return h;
}

WorldModel build_world(const TerrainLayout& layout, int horizon,
                       StateId start) {
  if (layout.width <= 0 || layout.height <= 0)
    throw std::invalid_argument("build_world: empty grid");
  if (horizon < 1) throw std::invalid_argument("build_world: horizon must be >= 1");
  if (start < 0 || start >= layout.num_cells())
    throw std::invalid_argument("build_world: start state out of bounds");

  WorldModel world;
  world.width = layout.width;
  world.height = layout.height;
  world.start = start;
  world.horizon = horizon;
  const int n = layout.num_cells();
  for (auto& per_action : world.successor) per_action.resize(n);

  for (int y = 0; y < layout.height; ++y) {
    for (int x = 0; x < layout.width; ++x) {
      const StateId s = world.state_at(x, y);
      if (layout.at(x, y) == Terrain::Target) {
        for (int a = 0; a < kNumActions; ++a) world.successor[a][s] = s;
        continue;
      }
      auto put = [&](Action a, int nx, int ny) {
        const bool in_bounds =
            nx >= 0 && nx < layout.width && ny >= 0 && ny < layout.height;
        world.successor[static_cast<int>(a)][s] =
            in_bounds ? world.state_at(nx, ny) : s;
      };
      put(Action::Up, x, y - 1);
      put(Action::Down, x, y + 1);
      put(Action::Left, x - 1, y);
      put(Action::Right, x + 1, y);
    }
  }
  return world;
}

Trajectory roll_out(const WorldModel& world, std::span<const Action> actions) {
  Trajectory traj;
  traj.states.reserve(actions.size() + 1);
  traj.actions.assign(actions.begin(), actions.end());
  StateId s = world.start;
  traj.states.push_back(s);
  for (Action a : actions) {
    s = world.next(s, a);
    traj.states.push_back(s);
  }
  return traj;
}

}  // namespace ird
