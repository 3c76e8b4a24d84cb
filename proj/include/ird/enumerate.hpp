#pragma once

#include "ird/grid_world.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ird {

inline constexpr std::int64_t kEnumerationGuard = 10'000'000;

// 4^H, or -1 on overflow past the guard.
std::int64_t trajectory_count(int horizon);

// All 4^H trajectories of the world, in action-lexicographic order
// (up < down < left < right). Throws std::invalid_argument when 4^H exceeds
// kEnumerationGuard.
std::vector<Trajectory> enumerate_trajectories(const WorldModel& world);

// Streaming variant; avoids materialising the full set.
void for_each_trajectory(const WorldModel& world,
                         const std::function<void(const Trajectory&)>& fn);

}  // namespace ird
