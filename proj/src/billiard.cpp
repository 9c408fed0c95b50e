#include "regobs/billiard.hpp"

#include <algorithm>

namespace regobs
{
    namespace
    {
        /// Guard against rays that keep producing zero-length hits.
        constexpr int max_zero_hits = 4;

        void require_phase(const Domain& domain, const PhasePoint& phase)
        {
            require(std::abs(norm(phase.dir) - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "direction must be a unit vector");
            require(domain.contains(phase.x, 1e-9 * domain.diameter()), ErrorCode::InvalidArgument,
                    "phase point outside the domain");
            if (domain.dimension() == 1)
                require(phase.dir.y == 0.0, ErrorCode::InvalidArgument, "1-d directions are +1 or -1");
        }

        /// Generic walker: calls on_segment(start, dir, length, t0) for each straight piece and
        /// on_event(event) for each boundary event. Either callback returns true to stop.
        template <class OnSegment, class OnEvent>
        Termination walk(const Domain& domain, PhasePoint cur, double t_max, OnSegment on_segment, OnEvent on_event)
        {
            int zero_hits = 0;
            while (cur.t < t_max)
            {
                const auto ev = next_boundary_hit(domain, cur);
                const double remaining = t_max - cur.t;
                const double s_hit = ev ? ev->t_hit - cur.t : infinity;
                if (s_hit >= remaining)
                {
                    return on_segment(cur.x, cur.dir, remaining, cur.t) ? Termination::None : Termination::TimeBudget;
                }
                if (s_hit > 0.0)
                {
                    if (on_segment(cur.x, cur.dir, s_hit, cur.t))
                        return Termination::None;
                    zero_hits = 0;
                }
                else if (++zero_hits > max_zero_hits)
                    return Termination::Corner;

                if (on_event(*ev))
                    return Termination::None;
                if (ev->kind == EventKind::Corner)
                    return Termination::Corner;
                if (ev->kind == EventKind::Glancing)
                    return Termination::GlidingExit;
                cur.dir = reflect(domain, *ev, cur.dir);
                cur.x = ev->x_hit;
                cur.t = ev->t_hit;
            }
            return Termination::TimeBudget;
        }
    } // namespace

    const char * termination_name(Termination t)
    {
        switch (t)
        {
        case Termination::None: return "None";
        case Termination::TimeBudget: return "TimeBudget";
        case Termination::Corner: return "Corner";
        case Termination::GlidingExit: return "GlidingExit";
        }
        return "?";
    }

    const char * event_kind_name(EventKind k)
    {
        switch (k)
        {
        case EventKind::Hyperbolic: return "Hyperbolic";
        case EventKind::Glancing: return "Glancing";
        case EventKind::Corner: return "Corner";
        }
        return "?";
    }

    std::optional<BoundaryEvent> next_boundary_hit(const Domain& domain, const PhasePoint& phase)
    {
        const Vec2 x = phase.x, d = phase.dir;
        if (auto iv = domain.as<Interval>())
        {
            if (d.x == 0.0)
                return std::nullopt;
            const double s = std::max(0.0, d.x > 0.0 ? (iv->b - x.x) / d.x : (iv->a - x.x) / d.x);
            return BoundaryEvent{Vec2(d.x > 0.0 ? iv->b : iv->a, 0.0), phase.t + s, 1.0, EventKind::Hyperbolic};
        }

        if (auto disk = domain.as<Disk>())
        {
            const Vec2 f = x - disk->center;
            const double b = dot(f, d);
            const double c = std::min(0.0, dot(f, f) - disk->radius * disk->radius);
            const double sq = std::sqrt(b * b - c);
            double s;
            if (b < 0.0)
                s = -b + sq;
            else
                s = (b + sq) > 0.0 ? -c / (b + sq) : 0.0;
            s = std::max(s, 0.0);
            const Vec2 hit = domain.snap_to_boundary(x + s * d);
            const Vec2 n = (hit - disk->center) * (1.0 / disk->radius);
            const double ic = std::min(1.0, std::abs(dot(d, n)));
            return BoundaryEvent{hit, phase.t + s, ic, ic <= glancing_tolerance ? EventKind::Glancing : EventKind::Hyperbolic};
        }

        auto r = domain.as<Rectangle>();
        const double tol = domain.boundary_tolerance();

        // already on a face and moving along it
        if (std::abs(domain.signed_distance(x)) <= tol && !domain.is_corner(x))
        {
            const Vec2 n = domain.boundary_normal(domain.snap_to_boundary(x));
            const double dn = dot(d, n);
            if (std::abs(dn) <= glancing_tolerance)
                return BoundaryEvent{x, phase.t, std::abs(dn), EventKind::Glancing};
        }

        double sx = infinity, sy = infinity;
        if (d.x > 0.0)
            sx = (r->corner_max.x - x.x) / d.x;
        else if (d.x < 0.0)
            sx = (r->corner_min.x - x.x) / d.x;
        if (d.y > 0.0)
            sy = (r->corner_max.y - x.y) / d.y;
        else if (d.y < 0.0)
            sy = (r->corner_min.y - x.y) / d.y;
        sx = std::max(sx, 0.0);
        sy = std::max(sy, 0.0);
        const double s = std::min(sx, sy);
        if (!std::isfinite(s))
            return std::nullopt;

        Vec2 hit = x + s * d;
        if (sx <= sy)
            hit.x = d.x > 0.0 ? r->corner_max.x : r->corner_min.x;
        if (sy <= sx)
            hit.y = d.y > 0.0 ? r->corner_max.y : r->corner_min.y;
        hit = domain.project(hit);

        if (domain.is_corner(hit))
            return BoundaryEvent{hit, phase.t + s, 0.0, EventKind::Corner};
        const double ic = sx <= sy ? std::abs(d.x) : std::abs(d.y);
        return BoundaryEvent{hit, phase.t + s, ic, ic <= glancing_tolerance ? EventKind::Glancing : EventKind::Hyperbolic};
    }

    Vec2 reflect(const Domain& domain, const BoundaryEvent& event, Vec2 dir_in)
    {
        require(event.kind == EventKind::Hyperbolic, ErrorCode::NotHyperbolic, "reflection needs a hyperbolic event");
        const auto disk = domain.as<Disk>();
        const Vec2 n = disk ? (event.x_hit - disk->center) * (1.0 / disk->radius) : domain.boundary_normal(event.x_hit);
        Vec2 out = dir_in - (2.0 * dot(dir_in, n)) * n;
        if (domain.dimension() == 1)
            return {out.x > 0.0 ? 1.0 : -1.0, 0.0};
        return normalized(out);
    }

    RayPath flow(const Domain& domain, const PhasePoint& phase, double t_max)
    {
        require(t_max > 0.0, ErrorCode::InvalidArgument, "flow needs t_max > 0");
        require_phase(domain, phase);
        RayPath path;
        const double t_end = phase.t + t_max;
        path.terminated = walk(
            domain, phase, t_end,
            [&](Vec2 p, Vec2 d, double len, double t0) {
                path.segments.push_back({p, p + len * d, t0, t0 + len});
                return false;
            },
            [&](const BoundaryEvent& ev) {
                path.events.push_back(ev);
                return false;
            });
        return path;
    }

    HitResult trace_to_region(const Domain& domain, const PhasePoint& phase, const Region& target, double t_max)
    {
        HitResult result;
        if (target.contains(phase.x))
            return {phase.t, Termination::None};
        const Termination reason = walk(
            domain, phase, t_max,
            [&](Vec2 p, Vec2 d, double len, double t0) {
                const double s = target.first_entry(p, d, len);
                if (std::isfinite(s) && t0 + s < t_max)
                {
                    result.time = t0 + s;
                    return true;
                }
                return false;
            },
            [](const BoundaryEvent&) { return false; });
        result.reason = reason;
        if (reason != Termination::None)
            result.time = infinity;
        return result;
    }

    std::optional<double> first_hit_time(const Domain& domain, const PhasePoint& phase, const Region& target,
                                         double t_max, int * terminated_counter)
    {
        require(target.is_interior(), ErrorCode::BoundaryRegion, "target lives on the boundary");
        require(t_max > 0.0, ErrorCode::InvalidArgument, "t_max must be positive");
        require_phase(domain, phase);
        const auto r = trace_to_region(domain, phase, target, phase.t + t_max);
        if (r.hit())
            return r.time - phase.t;
        if (terminated_counter && (r.reason == Termination::Corner || r.reason == Termination::GlidingExit))
            ++*terminated_counter;
        return std::nullopt;
    }

    std::optional<double> first_boundary_hit(const Domain& domain, const PhasePoint& phase, const Region& gamma,
                                             double t_max, bool nondiffractive_only)
    {
        require(!gamma.is_interior(), ErrorCode::InteriorRegion, "gamma must be a boundary region");
        require(t_max > 0.0, ErrorCode::InvalidArgument, "t_max must be positive");
        require_phase(domain, phase);
        const double t_end = phase.t + t_max;
        std::optional<double> found;
        walk(
            domain, phase, t_end, [](Vec2, Vec2, double, double) { return false; },
            [&](const BoundaryEvent& ev) {
                if (ev.t_hit >= t_end || !gamma.contains(ev.x_hit))
                    return false;
                if (nondiffractive_only && ev.kind == EventKind::Corner)
                    return false;
                found = ev.t_hit - phase.t;
                return true;
            });
        return found;
    }
} // namespace regobs
