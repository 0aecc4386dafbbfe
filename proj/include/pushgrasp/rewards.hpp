#pragma once

#include "pushgrasp/common.hpp"
#include "pushgrasp/sim.hpp"

namespace pg::rewards {

/// Two readings of "no change detected":
///  - Conjunction: change requires both the ring change and the occupancy
///    drop, so -0.5 fires unless both hold (literal reading; default).
///  - Split: -0.5 only when the ring did not change at all; the occupancy
///    drop is only required for the +0.5 arm.
enum class ChangePredicate { Conjunction, Split };

struct PushRewardParams {
    double tau_q = 0.1;   // grasp-Q improvement threshold
    double tau_o = 0.1;   // occupancy decrease threshold
    int tau_c = 10;       // changed ring cells threshold
    ChangePredicate predicate = ChangePredicate::Conjunction;
};

struct PushRewardInputs {
    double q_before = 0.0;   // max grasp Q in the goal mask before the push
    double q_after = 0.0;    // same, after the push
    int changed_cells = 0;   // ring cells whose depth changed
    double o_decreased = 0.0;
};

/// 1 iff the grasp succeeded on the goal object.
double grasp_reward(const sim::StepOutcome& outcome, ObjectId goal_id);

bool change_detected(const PushRewardInputs& in, const PushRewardParams& params);

/// +0.5 / -0.5 / 0 push reward from grasp-Q improvement and change detection.
double push_reward(const PushRewardInputs& in, const PushRewardParams& params);

/// Ablation comparator: +-0.5 from change detection alone, ignoring Q terms.
double handcrafted_only_reward(const PushRewardInputs& in, const PushRewardParams& params);

}  // namespace pg::rewards
