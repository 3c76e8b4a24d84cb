#include "ird/enumerate.hpp"

#include <stdexcept>

namespace ird {

std::int64_t trajectory_count(int horizon) {
  std::int64_t n = 1;
  for (int t = 0; t < horizon; ++t) {
    n *= kNumActions;
    if (n > kEnumerationGuard) return -1;
  }
  return n;
}

void for_each_trajectory(const WorldModel& world,
                         const std::function<void(const Trajectory&)>& fn) {
  if (trajectory_count(world.horizon) < 0)
    throw std::invalid_argument("enumerate_trajectories: 4^H exceeds guard");

  Trajectory traj;
  traj.states.assign(1, world.start);
  traj.actions.clear();

  // Depth-first over action sequences in fixed action order.
  std::function<void()> recurse = [&]() {
    if (static_cast<int>(traj.actions.size()) == world.horizon) {
      fn(traj);
      return;
    }
    for (Action a : kActionOrder) {
      traj.actions.push_back(a);
      traj.states.push_back(world.next(traj.states.back(), a));
      recurse();
      traj.states.pop_back();
      traj.actions.pop_back();
    }
  };
  recurse();
}

std::vector<Trajectory> enumerate_trajectories(const WorldModel& world) {
  std::vector<Trajectory> out;
  const std::int64_t n = trajectory_count(world.horizon);
  if (n < 0)
    throw std::invalid_argument("enumerate_trajectories: 4^H exceeds guard");
  out.reserve(static_cast<std::size_t>(n));
  for_each_trajectory(world, [&out](const Trajectory& t) { out.push_back(t); });
  return out;
}

}  // namespace ird
