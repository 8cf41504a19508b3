#pragma once

#include <limits>
#include <vector>

#include "mobility/market.hpp"

namespace mobility::solver {

using market::Assignment;
using market::PlannerConfig;
using network::Scenario;
using network::ServiceId;
using network::TravelerId;

enum class SolveStatus { optimal, infeasible };

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    Assignment assignment;  // meaningful only when status == optimal
    double objective = std::numeric_limits<double>::infinity();
    long explored_nodes = 0;
    double root_lower_bound = 0.0;
};

/// Precomputed per-subclass data. All subclass members share one
/// origin-destination pair, so they share one feasible-service menu; costs
/// are tabulated per (member, menu service, co-traveler count) so that both
/// solvers evaluate candidate assignments through the exact same table
/// lookups and summation order.
class SubclassContext {
public:
    SubclassContext(const std::vector<TravelerId>& subclass, const Scenario& scenario,
                    const PlannerConfig& config);

    int member_count() const { return static_cast<int>(members_.size()); }
    int menu_size() const { return static_cast<int>(menu_.size()); }
    const std::vector<TravelerId>& members() const { return members_; }
    const std::vector<ServiceId>& menu() const { return menu_; }
    int capacity(int menu_index) const { return capacities_[menu_index]; }
    bool equity_enabled() const { return equity_enabled_; }

    /// Weighted per-member cost (omega1 * inconvenience + omega2 * operating
    /// share) when the member uses the given menu service with `psi`
    /// co-travelers.
    double member_cost(int member, int menu_index, int psi) const {
        return costs_[member][menu_index][psi];
    }
    double member_phi(int member, int menu_index, int psi) const {
        return phis_[member][menu_index][psi];
    }

    /// Objective of a complete assignment (menu indices per member).
    double evaluate(const std::vector<int>& choice) const;

    /// True when the assignment respects every service capacity.
    bool capacity_ok(const std::vector<int>& choice) const;

    /// True when the equity bound is disabled or the Gini coefficient of the
    /// induced inconvenience vector stays within it.
    bool equity_ok(const std::vector<int>& choice) const;

    /// Admissible lower bound on the objective of any feasible completion of
    /// a prefix assignment (members 0..prefix.size()-1 decided). Valid
    /// because per-member cost is nondecreasing in co-occupancy.
    double partial_lower_bound(const std::vector<int>& prefix) const;

    Assignment to_assignment(const std::vector<int>& choice) const;

private:
    std::vector<TravelerId> members_;
    std::vector<ServiceId> menu_;
    std::vector<int> capacities_;
    bool equity_enabled_ = false;
    double equity_gmax_ = 1.0;
    // costs_[member][menu service][co-traveler count]
    std::vector<std::vector<std::vector<double>>> costs_;
    std::vector<std::vector<std::vector<double>>> phis_;
};

/// Global minimizer of the weighted subclass objective over assignments with
/// one feasible service per member, service usage within capacity, and the
/// equity bound. Best-first branch and bound; among equal-objective optima
/// returns the lexicographically smallest assignment (members by id,
/// services by index). Infeasible only when the equity bound excludes every
/// capacity-feasible assignment.
SolveResult solve_subclass(const std::vector<TravelerId>& subclass, const Scenario& scenario,
                           const PlannerConfig& config);

/// Exhaustive reference solver with identical tie-breaking. Throws
/// InstanceTooLargeError when the candidate count exceeds the enumeration
/// bound (about 1e6).
SolveResult brute_force_solve(const std::vector<TravelerId>& subclass,
                              const Scenario& scenario, const PlannerConfig& config);

/// Independent solve per subclass, in subclass order. `workers` > 1 solves
/// subclasses concurrently; results are merged by subclass index so the
/// output is identical for any worker count.
std::vector<SolveResult> solve_all(const Scenario& scenario, const PlannerConfig& config,
                                   int workers = 1);

}  // namespace mobility::solver
