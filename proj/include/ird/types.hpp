#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace ird {

using StateId = int;

// Reward weights and feature vectors share one dense representation.
using WeightVector = Eigen::VectorXd;

// Fixed action order; planners break ties by scanning in this order.
enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr int kNumActions = 4;

inline constexpr std::array<Action, kNumActions> kActionOrder = {
    Action::Up, Action::Down, Action::Left, Action::Right};

const char* action_name(Action a);

// splitmix64 step; used to derive independent seed streams from a master seed.
std::uint64_t mix_seed(std::uint64_t seed);

// Derives the seed for a named stream (tag) and index from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index = 0);

}  // namespace ird
