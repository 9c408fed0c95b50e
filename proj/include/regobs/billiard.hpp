#ifndef REGOBS_BILLIARD_HPP
#define REGOBS_BILLIARD_HPP

#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace regobs
{
    /// Incidence cosines at or below this value classify a boundary encounter as glancing.
    constexpr double glancing_tolerance = 1e-9;

    struct PhasePoint
    {
        Vec2 x;
        Vec2 dir;
        double t = 0.0;
    };

    enum class EventKind
    {
        Hyperbolic,
        Glancing,
        Corner
    };

    struct BoundaryEvent
    {
        Vec2 x_hit;
        double t_hit;
        /// |cos| of the angle between the incoming direction and the normal.
        double incidence_cos;
        EventKind kind;
    };

    enum class Termination
    {
        None,
        TimeBudget,
        Corner,
        GlidingExit
    };

    struct Segment
    {
        Vec2 start;
        Vec2 end;
        double t_start;
        double t_end;
    };

    struct RayPath
    {
        std::vector<Segment> segments;
        std::vector<BoundaryEvent> events;
        Termination terminated = Termination::TimeBudget;
    };

    const char * termination_name(Termination t);
    const char * event_kind_name(EventKind k);

    /// Earliest boundary encounter of the straight ray x + s*dir, s >= 0. A point already on the
    /// boundary travelling outward (or along a face) meets the boundary at s = 0.
    std::optional<BoundaryEvent> next_boundary_hit(const Domain& domain, const PhasePoint& phase);

    /// Specular reflection at a hyperbolic event; throws NotHyperbolic otherwise.
    Vec2 reflect(const Domain& domain, const BoundaryEvent& event, Vec2 dir_in);

    /// Broken ray up to t_max. Glancing encounters terminate with GlidingExit: seen from inside
    /// a convex domain the tangent ray leaves the closure, so the point is gliding rather than
    /// diffractive and no straight continuation exists. Corners terminate with Corner.
    RayPath flow(const Domain& domain, const PhasePoint& phase, double t_max);

    struct HitResult
    {
        double time = infinity;
        /// None when the target was reached, otherwise why tracing stopped.
        Termination reason = Termination::TimeBudget;

        bool hit() const { return reason == Termination::None; }
    };

    /// First time in [phase.t, t_max) at which the ray lies in the closed target region.
    HitResult trace_to_region(const Domain& domain, const PhasePoint& phase, const Region& target, double t_max);

    /// Elapsed time until the ray first lies in the target, or nullopt. Rays that terminate early
    /// bump `terminated_counter` when provided.
    std::optional<double> first_hit_time(const Domain& domain, const PhasePoint& phase, const Region& target,
                                         double t_max, int * terminated_counter = nullptr);

    /// Elapsed time until the first boundary event inside gamma, or nullopt. With
    /// nondiffractive_only set, corner encounters do not count; hyperbolic and glancing
    /// (gliding) encounters do.
    std::optional<double> first_boundary_hit(const Domain& domain, const PhasePoint& phase, const Region& gamma,
                                             double t_max, bool nondiffractive_only);
} // namespace regobs

#endif
