#pragma once

#include "safe_mpomdp/belief.hpp"
#include "safe_mpomdp/dtbf.hpp"
#include "safe_mpomdp/flat_adapter.hpp"
#include "safe_mpomdp/gridworld.hpp"
#include "safe_mpomdp/joint_space.hpp"
#include "safe_mpomdp/mission.hpp"
#include "safe_mpomdp/model.hpp"
#include "safe_mpomdp/planner.hpp"
#include "safe_mpomdp/rng.hpp"
