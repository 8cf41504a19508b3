#pragma once

namespace mobility::market {

/// Planner-level knobs shared by the objective, the equity constraint and
/// the inconvenience metric. omega1/omega2 normalize the two objective
/// terms; equity_gmax bounds the Gini coefficient of inconvenience within a
/// subclass (1.0 disables the bound since the Gini of a non-negative vector
/// never exceeds 1); co_traveler_penalty is the money charge per co-traveler
/// beyond a traveler's tolerance.
struct PlannerConfig {
    double omega1 = 1.0;
    double omega2 = 1.0;
    double equity_gmax = 1.0;
    double co_traveler_penalty = 1.0;

    bool equity_enabled() const { return equity_gmax < 1.0; }
};

}  // namespace mobility::market
