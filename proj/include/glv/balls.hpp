#pragma once

#include <string>
#include <vector>

#include "glv/detect.hpp"

namespace glv {

/// The circle-bound envelope lambda and its primitive Lambda, carrying the
/// pinned constants. lambda(x) = min(c2/eps, (pi/x) / (1 + x/2 + pi eps/(c0 x))).
class LowerBoundProfile {
public:
    LowerBoundProfile(double epsilon, BoundConstants cst);

    double epsilon() const { return eps_; }
    const BoundConstants& constants() const { return cst_; }

    double lambda(double x) const;
    /// Adaptive quadrature of lambda from 0 to s, relative error <= 1e-8.
    double Lambda(double s) const;
    /// x where the two branches of lambda cross.
    double branch_cross() const { return xcross_; }

private:
    double eps_;
    BoundConstants cst_;
    double xcross_;
};

struct TraceEventBall {
    Vec2 center;
    double radius;  // at the event parameter
    int degree;
    bool growing;
    bool in_U;  // ball contained in the eroded region
};

struct TraceEvent {
    double s = 0.0;
    enum class Kind { Seed, Onset, Merge, Exit, Stop } kind = Kind::Seed;
    std::vector<TraceEventBall> before;
    std::vector<TraceEventBall> after;
};

class GrowthTrace {
public:
    std::vector<TraceEvent> events;
    double s_final = 0.0;

    /// The family at parameter s (radii grown linearly past the last event).
    BallFamily family_at(double s) const;
    double total_radius_at(double s) const;
    /// Smallest s at which the total radius reaches `target` (or s_final).
    double s_for_total_radius(double target) const;
    std::string to_json_lines() const;
};

/// Event-driven growing and merging: each eligible ball (nonzero degree,
/// contained in the eroded region) grows keeping r = s|d|; touching balls
/// merge into one of summed radius. Exact event times, no time stepping.
GrowthTrace grow_and_merge(const BallFamily& seed, const ComplexGrid& u, const VectorGrid& a,
                           const Region& region, double s_target, const BoundConstants& cst);

struct DichotomyRow {
    Vec2 center;
    double radius;
    int degree;
    double energy;
    double bound;  // pi |d| (log(r/(eps Cbar)) - C)
    double slack;
    bool in_U;
};

struct DichotomyVerdict {
    bool branch1 = false;  // total energy already >= Cbar log(r/eps)
    double branch1_lhs = 0.0;
    double branch1_rhs = 0.0;
    bool branch2 = false;  // every interior ball meets the per-ball bound
    double branch2_min_slack = 0.0;
    std::vector<DichotomyRow> rows;
    double c_bar = 0.0;
    bool c_bar_clamped = false;
    std::string to_csv() const;
};

struct ConstructResult {
    BallFamily family;
    DichotomyVerdict verdict;
    GrowthTrace trace;
};

/// Full construction: essential cover grown to the target total radius,
/// merged with small balls covering the remaining sublevel components, and
/// the two-branch lower-bound verdict evaluated on the result.
ConstructResult construct(const ComplexGrid& u, const VectorGrid& a, const Region& region,
                          double r_target, double c_bar, const BoundConstants& cst);

}  // namespace glv
