#include "regobs/geometry.hpp"

#include <algorithm>
#include <array>

namespace regobs
{
    namespace
    {
        bool angle_in_range(double theta, double angle_min, double angle_max, double tol)
        {
            const double span = angle_max - angle_min;
            if (span >= 2.0 * pi - tol)
                return true;
            const double d = wrap_angle(theta - angle_min);
            return d <= span + tol || d >= 2.0 * pi - tol;
        }

        double distance_to_segment(Vec2 x, Vec2 p0, Vec2 p1)
        {
            const Vec2 e = p1 - p0;
            const double len2 = dot(e, e);
            if (len2 == 0.0)
                return norm(x - p0);
            const double s = std::clamp(dot(x - p0, e) / len2, 0.0, 1.0);
            return norm(x - (p0 + s * e));
        }

        double distance_to_arc(Vec2 x, Vec2 c, double r, double angle_min, double angle_max)
        {
            const Vec2 f = x - c;
            const double rho = norm(f);
            if (rho > 0.0 && angle_in_range(polar_angle(f), angle_min, angle_max, 0.0))
                return std::abs(rho - r);
            return std::min(norm(x - (c + r * unit_from_angle(angle_min))),
                            norm(x - (c + r * unit_from_angle(angle_max))));
        }

        /// Fixed-capacity candidate list used by the ray/region intersection routines.
        struct Roots
        {
            std::array<double, 16> s{};
            int n = 0;

            void add(double v)
            {
                if (n < static_cast<int>(s.size()) && std::isfinite(v))
                    s[n++] = v;
            }

            void add_circle(Vec2 p, Vec2 d, Vec2 c, double r)
            {
                const Vec2 f = p - c;
                const double b = dot(f, d);
                const double cc = dot(f, f) - r * r;
                const double disc = b * b - cc;
                if (disc < 0.0)
                    return;
                const double sq = std::sqrt(disc);
                add(-b - sq);
                add(-b + sq);
            }

            void add_line(Vec2 p, Vec2 d, int axis, double value)
            {
                const double da = axis == 0 ? d.x : d.y;
                const double pa = axis == 0 ? p.x : p.y;
                if (da != 0.0)
                    add((value - pa) / da);
            }

            void add_ray(Vec2 p, Vec2 d, Vec2 c, Vec2 u)
            {
                const double den = cross(d, u);
                if (den != 0.0)
                    add(-cross(p - c, u) / den);
            }
        };

        std::vector<Vec2> circle_samples(Vec2 c, double r, double h)
        {
            std::vector<Vec2> out;
            const int n = std::max(8, static_cast<int>(std::ceil(2.0 * pi * r / h)));
            out.reserve(n);
            for (int k = 0; k < n; ++k)
                out.push_back(c + r * unit_from_angle(2.0 * pi * k / n));
            return out;
        }

        void segment_samples(std::vector<Vec2>& out, Vec2 p0, Vec2 p1, double h)
        {
            const int n = std::max(1, static_cast<int>(std::ceil(norm(p1 - p0) / h)));
            for (int k = 0; k <= n; ++k)
                out.push_back(p0 + (static_cast<double>(k) / n) * (p1 - p0));
        }
    } // namespace

    // ------------------------------------------------------------------ Domain

    Domain Domain::interval(double a, double b)
    {
        require(a < b, ErrorCode::InvalidArgument, "Interval requires a < b");
        return Domain(Interval{a, b});
    }

    Domain Domain::disk(Vec2 center, double radius)
    {
        require(radius > 0.0, ErrorCode::InvalidArgument, "Disk requires radius > 0");
        return Domain(Disk{center, radius});
    }

    Domain Domain::rectangle(Vec2 lo, Vec2 hi)
    {
        require(lo.x < hi.x && lo.y < hi.y, ErrorCode::InvalidArgument,
                "Rectangle requires corner_min < corner_max componentwise");
        return Domain(Rectangle{lo, hi});
    }

    double Domain::diameter() const
    {
        if (auto i = as<Interval>())
            return i->b - i->a;
        if (auto d = as<Disk>())
            return 2.0 * d->radius;
        auto r = as<Rectangle>();
        return norm(r->corner_max - r->corner_min);
    }

    double Domain::inradius() const
    {
        if (auto i = as<Interval>())
            return 0.5 * (i->b - i->a);
        if (auto d = as<Disk>())
            return d->radius;
        auto r = as<Rectangle>();
        return 0.5 * std::min(r->corner_max.x - r->corner_min.x, r->corner_max.y - r->corner_min.y);
    }

    std::pair<Vec2, Vec2> Domain::bounding_box() const
    {
        if (auto i = as<Interval>())
            return {Vec2(i->a, 0.0), Vec2(i->b, 0.0)};
        if (auto d = as<Disk>())
            return {d->center - Vec2(d->radius, d->radius), d->center + Vec2(d->radius, d->radius)};
        auto r = as<Rectangle>();
        return {r->corner_min, r->corner_max};
    }

    double Domain::signed_distance(Vec2 x) const
    {
        if (auto i = as<Interval>())
            return std::max(i->a - x.x, x.x - i->b);
        if (auto d = as<Disk>())
            return norm(x - d->center) - d->radius;
        auto r = as<Rectangle>();
        const double dx = std::max(r->corner_min.x - x.x, x.x - r->corner_max.x);
        const double dy = std::max(r->corner_min.y - x.y, x.y - r->corner_max.y);
        if (dx <= 0.0 && dy <= 0.0)
            return std::max(dx, dy);
        return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
    }

    bool Domain::is_corner(Vec2 x) const
    {
        auto r = as<Rectangle>();
        if (!r)
            return false;
        const double tol = corner_tolerance();
        const std::array<Vec2, 4> corners = {r->corner_min, Vec2(r->corner_max.x, r->corner_min.y), r->corner_max,
                                             Vec2(r->corner_min.x, r->corner_max.y)};
        for (auto c : corners)
            if (norm(x - c) <= tol)
                return true;
        return false;
    }

    Vec2 Domain::boundary_normal(Vec2 x) const
    {
        require(std::abs(signed_distance(x)) <= 1e-9 * diameter(), ErrorCode::InvalidArgument,
                "boundary_normal requires a boundary point");
        if (auto i = as<Interval>())
            return std::abs(x.x - i->a) < std::abs(x.x - i->b) ? Vec2(-1.0, 0.0) : Vec2(1.0, 0.0);
        if (auto d = as<Disk>())
            return normalized(x - d->center);
        require(!is_corner(x), ErrorCode::CornerPoint, "normal undefined at a Rectangle corner");
        auto r = as<Rectangle>();
        const std::array<double, 4> gaps = {std::abs(x.x - r->corner_min.x), std::abs(x.x - r->corner_max.x),
                                            std::abs(x.y - r->corner_min.y), std::abs(x.y - r->corner_max.y)};
        const auto k = std::min_element(gaps.begin(), gaps.end()) - gaps.begin();
        static const std::array<Vec2, 4> normals = {Vec2(-1, 0), Vec2(1, 0), Vec2(0, -1), Vec2(0, 1)};
        return normals[k];
    }

    Vec2 Domain::project(Vec2 x) const
    {
        if (auto i = as<Interval>())
            return {std::clamp(x.x, i->a, i->b), 0.0};
        if (auto d = as<Disk>())
        {
            const Vec2 f = x - d->center;
            const double r = norm(f);
            return r <= d->radius ? x : d->center + (d->radius / r) * f;
        }
        auto r = as<Rectangle>();
        return {std::clamp(x.x, r->corner_min.x, r->corner_max.x), std::clamp(x.y, r->corner_min.y, r->corner_max.y)};
    }

    Vec2 Domain::snap_to_boundary(Vec2 x) const
    {
        if (auto i = as<Interval>())
            return {std::abs(x.x - i->a) < std::abs(x.x - i->b) ? i->a : i->b, 0.0};
        if (auto d = as<Disk>())
        {
            const Vec2 f = x - d->center;
            return d->center + (d->radius / norm(f)) * f;
        }
        auto r = as<Rectangle>();
        Vec2 p = project(x);
        const std::array<double, 4> gaps = {std::abs(p.x - r->corner_min.x), std::abs(p.x - r->corner_max.x),
                                            std::abs(p.y - r->corner_min.y), std::abs(p.y - r->corner_max.y)};
        const auto k = std::min_element(gaps.begin(), gaps.end()) - gaps.begin();
        switch (k)
        {
        case 0: p.x = r->corner_min.x; break;
        case 1: p.x = r->corner_max.x; break;
        case 2: p.y = r->corner_min.y; break;
        default: p.y = r->corner_max.y; break;
        }
        return p;
    }

    std::vector<Vec2> Domain::boundary_samples(double h) const
    {
        if (auto i = as<Interval>())
            return {Vec2(i->a, 0.0), Vec2(i->b, 0.0)};
        if (auto d = as<Disk>())
            return circle_samples(d->center, d->radius, h);
        auto r = as<Rectangle>();
        const Vec2 a = r->corner_min, b(r->corner_max.x, r->corner_min.y), c = r->corner_max,
                   e(r->corner_min.x, r->corner_max.y);
        std::vector<Vec2> out;
        segment_samples(out, a, b, h);
        segment_samples(out, b, c, h);
        segment_samples(out, c, e, h);
        segment_samples(out, e, a, h);
        return out;
    }

    std::vector<Vec2> Domain::lattice_samples(double h) const
    {
        std::vector<Vec2> out;
        if (auto i = as<Interval>())
        {
            const int n = std::max(1, static_cast<int>(std::ceil((i->b - i->a) / h)));
            for (int k = 0; k <= n; ++k)
                out.emplace_back(i->a + (i->b - i->a) * k / n, 0.0);
            return out;
        }
        if (auto d = as<Disk>())
        {
            const int n = static_cast<int>(std::ceil(d->radius / h));
            for (int j = -n; j <= n; ++j)
                for (int k = -n; k <= n; ++k)
                {
                    const Vec2 p = d->center + Vec2(k * h, j * h);
                    if (contains(p))
                        out.push_back(p);
                }
            return out;
        }
        auto r = as<Rectangle>();
        const Vec2 ext = r->corner_max - r->corner_min;
        const int nx = std::max(1, static_cast<int>(std::ceil(ext.x / h)));
        const int ny = std::max(1, static_cast<int>(std::ceil(ext.y / h)));
        for (int j = 0; j <= ny; ++j)
            for (int k = 0; k <= nx; ++k)
                out.push_back(r->corner_min + Vec2(ext.x * k / nx, ext.y * j / ny));
        return out;
    }

    double signed_distance(const Domain& domain, Vec2 x) { return domain.signed_distance(x); }
    Vec2 boundary_normal(const Domain& domain, Vec2 x) { return domain.boundary_normal(x); }

    // ------------------------------------------------------------------ Region

    Region::Region(const Domain& domain, RegionDescriptor descriptor) : domain_(domain), descriptor_(std::move(descriptor))
    {
        if (auto s = as<AngularSectorNeighborhood>())
        {
            edge_min_ = unit_from_angle(s->angle_min);
            edge_max_ = unit_from_angle(s->angle_max);
        }
        else if (auto a = as<BoundaryArc>())
        {
            edge_min_ = unit_from_angle(a->angle_min);
            edge_max_ = unit_from_angle(a->angle_max);
        }
    }

    bool Region::in_angular_range(Vec2 f, double angle_min, double angle_max, double tol) const
    {
        // tol is a length; wedges narrower than pi use half-plane tests instead of atan2
        if (angle_max - angle_min <= pi)
            return cross(edge_min_, f) >= -tol && cross(f, edge_max_) >= -tol;
        const double rho = norm(f);
        return angle_in_range(polar_angle(f), angle_min, angle_max, tol / std::max(rho, 1e-300));
    }

    Region Region::interval_union(const Domain& d, std::vector<std::pair<double, double>> parts)
    {
        auto iv = d.as<Interval>();
        require(iv != nullptr, ErrorCode::InvalidArgument, "IntervalUnion requires an Interval domain");
        std::sort(parts.begin(), parts.end());
        for (std::size_t k = 0; k < parts.size(); ++k)
        {
            require(parts[k].first < parts[k].second, ErrorCode::InvalidArgument, "IntervalUnion part needs l < r");
            require(parts[k].first >= iv->a && parts[k].second <= iv->b, ErrorCode::InvalidArgument,
                    "IntervalUnion part escapes the domain");
            if (k > 0)
                require(parts[k].first >= parts[k - 1].second, ErrorCode::InvalidArgument,
                        "IntervalUnion parts must be disjoint");
        }
        return Region(d, IntervalUnion{std::move(parts)});
    }

    Region Region::annulus(const Domain& d, Vec2 center, double r_inner, double r_outer)
    {
        require(d.dimension() == 2, ErrorCode::InvalidArgument, "Annulus requires a 2-d domain");
        require(r_inner >= 0.0 && r_inner < r_outer, ErrorCode::InvalidArgument, "Annulus requires 0 <= r_inner < r_outer");
        const double tol = 1e-12 * d.diameter();
        if (auto disk = d.as<Disk>())
            require(norm(center - disk->center) + r_outer <= disk->radius + tol, ErrorCode::InvalidArgument,
                    "Annulus escapes the disk domain");
        else
        {
            auto r = d.as<Rectangle>();
            require(center.x - r_outer >= r->corner_min.x - tol && center.x + r_outer <= r->corner_max.x + tol &&
                        center.y - r_outer >= r->corner_min.y - tol && center.y + r_outer <= r->corner_max.y + tol,
                    ErrorCode::InvalidArgument, "Annulus escapes the rectangle domain");
        }
        return Region(d, Annulus{center, r_inner, r_outer});
    }

    Region Region::angular_sector(const Domain& d, double angle_min, double angle_max, double depth)
    {
        auto disk = d.as<Disk>();
        require(disk != nullptr, ErrorCode::InvalidArgument, "AngularSectorNeighborhood requires a Disk domain");
        require(angle_min < angle_max && angle_max - angle_min <= 2.0 * pi, ErrorCode::InvalidArgument,
                "AngularSectorNeighborhood needs angle_min < angle_max spanning at most 2 pi");
        require(depth > 0.0 && depth <= disk->radius, ErrorCode::InvalidArgument,
                "AngularSectorNeighborhood depth must lie in (0, radius]");
        return Region(d, AngularSectorNeighborhood{disk->center, disk->radius, angle_min, angle_max, depth});
    }

    Region Region::strip(const Domain& d, int axis, double threshold, Strip::Side side)
    {
        require(axis == 0 || (axis == 1 && d.dimension() == 2), ErrorCode::InvalidArgument, "Strip axis out of range");
        return Region(d, Strip{axis, threshold, side});
    }

    Region Region::collar(const Domain& d, double depth)
    {
        require(depth > 0.0, ErrorCode::InvalidArgument, "Collar depth must be positive");
        return Region(d, Collar{depth});
    }

    Region Region::whole(const Domain& d) { return Region(d, WholeDomain{}); }

    Region Region::boundary_arc(const Domain& d, double angle_min, double angle_max)
    {
        auto disk = d.as<Disk>();
        require(disk != nullptr, ErrorCode::InvalidArgument, "BoundaryArc requires a Disk domain");
        require(angle_min < angle_max && angle_max - angle_min <= 2.0 * pi, ErrorCode::InvalidArgument,
                "BoundaryArc needs angle_min < angle_max spanning at most 2 pi");
        return Region(d, BoundaryArc{disk->center, disk->radius, angle_min, angle_max});
    }

    Region Region::boundary_segments(const Domain& d, std::vector<std::pair<Vec2, Vec2>> segments)
    {
        const double tol = 1e-9 * d.diameter();
        for (auto& [p0, p1] : segments)
        {
            require(std::abs(d.signed_distance(p0)) <= tol && std::abs(d.signed_distance(p1)) <= tol &&
                        std::abs(d.signed_distance(0.5 * (p0 + p1))) <= tol,
                    ErrorCode::InvalidArgument, "boundary segment does not lie on the boundary");
        }
        return Region(d, BoundarySegmentUnion{std::move(segments)});
    }

    Region Region::grid_mask(const Domain& d, GridMask mask)
    {
        require(mask.nx > 0 && mask.ny > 0 && mask.spacing > 0.0, ErrorCode::InvalidArgument, "GridMask shape invalid");
        require(mask.bits.size() == static_cast<std::size_t>(mask.nx) * mask.ny, ErrorCode::InvalidArgument,
                "GridMask bitset size mismatch");
        return Region(d, std::move(mask));
    }

    Carrier Region::carrier() const
    {
        return (as<BoundaryArc>() || as<BoundarySegmentUnion>()) ? Carrier::Boundary : Carrier::Interior;
    }

    bool Region::contains(Vec2 x, double tol) const
    {
        return std::visit(
            [&](const auto& r) -> bool {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, IntervalUnion>)
                {
                    for (auto [l, rr] : r.parts)
                        if (x.x >= l - tol && x.x <= rr + tol)
                            return true;
                    return false;
                }
                else if constexpr (std::is_same_v<T, Annulus>)
                {
                    const double rho = norm(x - r.center);
                    return rho >= r.r_inner - tol && rho <= r.r_outer + tol;
                }
                else if constexpr (std::is_same_v<T, AngularSectorNeighborhood>)
                {
                    const Vec2 f = x - r.center;
                    const double rho = norm(f);
                    if (rho < r.radius - r.depth - tol || rho > r.radius + tol)
                        return false;
                    return in_angular_range(f, r.angle_min, r.angle_max, tol);
                }
                else if constexpr (std::is_same_v<T, Strip>)
                {
                    const double v = r.axis == 0 ? x.x : x.y;
                    return r.side == Strip::Side::Below ? v <= r.threshold + tol : v >= r.threshold - tol;
                }
                else if constexpr (std::is_same_v<T, Collar>)
                {
                    const double sd = domain_.signed_distance(x);
                    return sd <= tol && -sd <= r.depth + tol;
                }
                else if constexpr (std::is_same_v<T, WholeDomain>)
                    return domain_.contains(x, tol);
                else if constexpr (std::is_same_v<T, BoundaryArc>)
                {
                    const Vec2 f = x - r.center;
                    const double rho = norm(f);
                    return std::abs(rho - r.radius) <= tol && in_angular_range(f, r.angle_min, r.angle_max, tol);
                }
                else if constexpr (std::is_same_v<T, BoundarySegmentUnion>)
                {
                    for (auto& [p0, p1] : r.segments)
                        if (distance_to_segment(x, p0, p1) <= tol)
                            return true;
                    return false;
                }
                else
                {
                    const long i = std::lround((x.x - r.origin.x) / r.spacing);
                    const long j = std::lround((x.y - r.origin.y) / r.spacing);
                    if (i < 0 || j < 0 || i >= r.nx || j >= r.ny)
                        return false;
                    return r.bits[static_cast<std::size_t>(i + r.nx * j)];
                }
            },
            descriptor_);
    }

    double Region::distance(Vec2 x) const
    {
        return std::visit(
            [&](const auto& r) -> double {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, IntervalUnion>)
                {
                    double best = infinity;
                    for (auto [l, rr] : r.parts)
                        best = std::min(best, std::max({l - x.x, x.x - rr, 0.0}));
                    return best;
                }
                else if constexpr (std::is_same_v<T, Annulus>)
                {
                    const double rho = norm(x - r.center);
                    return std::max({r.r_inner - rho, rho - r.r_outer, 0.0});
                }
                else if constexpr (std::is_same_v<T, AngularSectorNeighborhood>)
                {
                    const Vec2 f = x - r.center;
                    const double rho = norm(f);
                    const double r_in = r.radius - r.depth;
                    if (rho > 0.0 && angle_in_range(polar_angle(f), r.angle_min, r.angle_max, 0.0))
                        return std::max({r_in - rho, rho - r.radius, 0.0});
                    const Vec2 u0 = unit_from_angle(r.angle_min), u1 = unit_from_angle(r.angle_max);
                    return std::min(distance_to_segment(x, r.center + r_in * u0, r.center + r.radius * u0),
                                    distance_to_segment(x, r.center + r_in * u1, r.center + r.radius * u1));
                }
                else if constexpr (std::is_same_v<T, Strip>)
                {
                    const double v = r.axis == 0 ? x.x : x.y;
                    return std::max(0.0, r.side == Strip::Side::Below ? v - r.threshold : r.threshold - v);
                }
                else if constexpr (std::is_same_v<T, Collar>)
                    return std::max(0.0, -domain_.signed_distance(x) - r.depth);
                else if constexpr (std::is_same_v<T, WholeDomain>)
                    return std::max(0.0, domain_.signed_distance(x));
                else if constexpr (std::is_same_v<T, BoundaryArc>)
                    return distance_to_arc(x, r.center, r.radius, r.angle_min, r.angle_max);
                else if constexpr (std::is_same_v<T, BoundarySegmentUnion>)
                {
                    double best = infinity;
                    for (auto& [p0, p1] : r.segments)
                        best = std::min(best, distance_to_segment(x, p0, p1));
                    return best;
                }
                else
                {
                    double best = infinity;
                    for (int j = 0; j < r.ny; ++j)
                        for (int i = 0; i < r.nx; ++i)
                            if (r.bits[static_cast<std::size_t>(i + r.nx * j)])
                                best = std::min(best, norm(x - (r.origin + Vec2(i * r.spacing, j * r.spacing))));
                    return best;
                }
            },
            descriptor_);
    }

    double Region::first_entry(Vec2 p, Vec2 d, double length, double sample_step) const
    {
        const double tol = default_tolerance();
        if (contains(p, tol))
            return 0.0;

        if (auto sec = as<AngularSectorNeighborhood>(); sec && sec->angle_max - sec->angle_min <= pi)
        {
            // line meets a wedge narrower than pi in one interval; intersect it with the band
            double lo = 0.0, hi = length;
            auto half_plane = [&](double a, double b) {
                if (b > 0.0)
                    lo = std::max(lo, -a / b);
                else if (b < 0.0)
                    hi = std::min(hi, -a / b);
                else if (a < 0.0)
                    hi = -1.0;
            };
            const Vec2 f = p - sec->center;
            half_plane(cross(edge_min_, f) + tol, cross(edge_min_, d));
            half_plane(cross(f, edge_max_) + tol, cross(d, edge_max_));
            const double b = dot(f, d), ff = dot(f, f);
            const double r_out = sec->radius + tol, r_in = sec->radius - sec->depth - tol;
            const double disc_out = b * b - (ff - r_out * r_out);
            if (disc_out < 0.0)
                return infinity;
            lo = std::max(lo, -b - std::sqrt(disc_out));
            hi = std::min(hi, -b + std::sqrt(disc_out));
            if (lo > hi)
                return infinity;
            const double disc_in = b * b - (ff - r_in * r_in);
            if (r_in > 0.0 && disc_in > 0.0)
            {
                const double i1 = -b - std::sqrt(disc_in), i2 = -b + std::sqrt(disc_in);
                if (lo > i1 && lo < i2)
                    lo = i2;
            }
            return lo <= hi ? lo : infinity;
        }

        if (auto m = as<GridMask>())
        {
            const double step = sample_step > 0.0 ? sample_step : 0.25 * m->spacing;
            const int n = static_cast<int>(std::ceil(length / step));
            for (int k = 1; k <= n; ++k)
            {
                const double s = std::min(length, k * step);
                if (contains(p + s * d, tol))
                    return s;
            }
            return infinity;
        }

        Roots roots;
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, IntervalUnion>)
                {
                    for (auto [l, rr] : r.parts)
                    {
                        roots.add_line(p, d, 0, l);
                        roots.add_line(p, d, 0, rr);
                    }
                }
                else if constexpr (std::is_same_v<T, Annulus>)
                {
                    roots.add_circle(p, d, r.center, r.r_outer);
                    if (r.r_inner > 0.0)
                        roots.add_circle(p, d, r.center, r.r_inner);
                }
                else if constexpr (std::is_same_v<T, AngularSectorNeighborhood>)
                {
                    roots.add_circle(p, d, r.center, r.radius);
                    roots.add_circle(p, d, r.center, r.radius - r.depth);
                    roots.add_ray(p, d, r.center, unit_from_angle(r.angle_min));
                    roots.add_ray(p, d, r.center, unit_from_angle(r.angle_max));
                }
                else if constexpr (std::is_same_v<T, Strip>)
                    roots.add_line(p, d, r.axis, r.threshold);
                else if constexpr (std::is_same_v<T, Collar>)
                {
                    if (auto iv = domain_.as<Interval>())
                    {
                        roots.add_line(p, d, 0, iv->a + r.depth);
                        roots.add_line(p, d, 0, iv->b - r.depth);
                    }
                    else if (auto disk = domain_.as<Disk>())
                        roots.add_circle(p, d, disk->center, disk->radius - r.depth);
                    else
                    {
                        auto rect = domain_.as<Rectangle>();
                        roots.add_line(p, d, 0, rect->corner_min.x + r.depth);
                        roots.add_line(p, d, 0, rect->corner_max.x - r.depth);
                        roots.add_line(p, d, 1, rect->corner_min.y + r.depth);
                        roots.add_line(p, d, 1, rect->corner_max.y - r.depth);
                    }
                }
                else if constexpr (std::is_same_v<T, WholeDomain>)
                    roots.add(0.0);
                else if constexpr (std::is_same_v<T, BoundaryArc> || std::is_same_v<T, BoundarySegmentUnion>)
                {
                    // boundary regions are met only at the segment end, where the ray hits the boundary
                    roots.add(length);
                }
            },
            descriptor_);

        std::sort(roots.s.begin(), roots.s.begin() + roots.n);
        const double slack = 1e-12 * std::max(1.0, length);
        for (int k = 0; k < roots.n; ++k)
        {
            double s = roots.s[k];
            if (s < -slack || s > length + slack)
                continue;
            s = std::clamp(s, 0.0, length);
            if (contains(p + s * d, tol))
                return s;
        }
        return infinity;
    }

    std::vector<Vec2> Region::boundary_samples(double h) const
    {
        std::vector<Vec2> out;
        const double tol = default_tolerance();
        auto keep_in_domain = [&](Vec2 q) {
            if (domain_.contains(q, tol))
                out.push_back(q);
        };

        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, IntervalUnion>)
                {
                    for (auto [l, rr] : r.parts)
                    {
                        out.emplace_back(l, 0.0);
                        out.emplace_back(rr, 0.0);
                    }
                }
                else if constexpr (std::is_same_v<T, Annulus>)
                {
                    for (auto q : circle_samples(r.center, r.r_outer, h))
                        keep_in_domain(q);
                    if (r.r_inner > 0.0)
                        for (auto q : circle_samples(r.center, r.r_inner, h))
                            keep_in_domain(q);
                    else
                        out.push_back(r.center);
                }
                else if constexpr (std::is_same_v<T, AngularSectorNeighborhood>)
                {
                    const double r_in = r.radius - r.depth;
                    const Vec2 u0 = unit_from_angle(r.angle_min), u1 = unit_from_angle(r.angle_max);
                    segment_samples(out, r.center + r_in * u0, r.center + r.radius * u0, h);
                    segment_samples(out, r.center + r_in * u1, r.center + r.radius * u1, h);
                    const int n = std::max(2, static_cast<int>(std::ceil((r.angle_max - r.angle_min) * r.radius / h)));
                    for (int k = 0; k <= n; ++k)
                    {
                        const Vec2 u = unit_from_angle(r.angle_min + (r.angle_max - r.angle_min) * k / n);
                        out.push_back(r.center + r.radius * u);
                        out.push_back(r.center + r_in * u);
                    }
                }
                else if constexpr (std::is_same_v<T, Strip>)
                {
                    if (auto iv = domain_.as<Interval>())
                    {
                        if (r.threshold >= iv->a && r.threshold <= iv->b)
                            out.emplace_back(r.threshold, 0.0);
                    }
                    else if (auto disk = domain_.as<Disk>())
                    {
                        const double off = r.threshold - (r.axis == 0 ? disk->center.x : disk->center.y);
                        if (std::abs(off) <= disk->radius)
                        {
                            const double half = std::sqrt(disk->radius * disk->radius - off * off);
                            const Vec2 c = disk->center;
                            const Vec2 p0 = r.axis == 0 ? Vec2(r.threshold, c.y - half) : Vec2(c.x - half, r.threshold);
                            const Vec2 p1 = r.axis == 0 ? Vec2(r.threshold, c.y + half) : Vec2(c.x + half, r.threshold);
                            segment_samples(out, p0, p1, h);
                        }
                    }
                    else
                    {
                        auto rect = domain_.as<Rectangle>();
                        const Vec2 lo = rect->corner_min, hi = rect->corner_max;
                        if (r.axis == 0 && r.threshold >= lo.x && r.threshold <= hi.x)
                            segment_samples(out, Vec2(r.threshold, lo.y), Vec2(r.threshold, hi.y), h);
                        if (r.axis == 1 && r.threshold >= lo.y && r.threshold <= hi.y)
                            segment_samples(out, Vec2(lo.x, r.threshold), Vec2(hi.x, r.threshold), h);
                    }
                }
                else if constexpr (std::is_same_v<T, Collar>)
                {
                    if (auto iv = domain_.as<Interval>())
                    {
                        out.emplace_back(iv->a + r.depth, 0.0);
                        out.emplace_back(iv->b - r.depth, 0.0);
                    }
                    else if (auto disk = domain_.as<Disk>())
                    {
                        for (auto q : circle_samples(disk->center, disk->radius - r.depth, h))
                            out.push_back(q);
                    }
                    else
                    {
                        auto rect = domain_.as<Rectangle>();
                        const Vec2 lo = rect->corner_min + Vec2(r.depth, r.depth);
                        const Vec2 hi = rect->corner_max - Vec2(r.depth, r.depth);
                        if (lo.x <= hi.x && lo.y <= hi.y)
                        {
                            segment_samples(out, lo, Vec2(hi.x, lo.y), h);
                            segment_samples(out, Vec2(hi.x, lo.y), hi, h);
                            segment_samples(out, hi, Vec2(lo.x, hi.y), h);
                            segment_samples(out, Vec2(lo.x, hi.y), lo, h);
                        }
                    }
                }
                else if constexpr (std::is_same_v<T, BoundaryArc>)
                {
                    const int n = std::max(2, static_cast<int>(std::ceil((r.angle_max - r.angle_min) * r.radius / h)));
                    for (int k = 0; k <= n; ++k)
                        out.push_back(r.center + r.radius * unit_from_angle(r.angle_min + (r.angle_max - r.angle_min) * k / n));
                }
                else if constexpr (std::is_same_v<T, BoundarySegmentUnion>)
                {
                    for (auto& [p0, p1] : r.segments)
                        segment_samples(out, p0, p1, h);
                }
            },
            descriptor_);

        if (is_interior())
            for (auto q : domain_.boundary_samples(h))
                if (contains(q, tol))
                    out.push_back(q);
        return out;
    }

    bool Region::is_empty() const
    {
        if (auto u = as<IntervalUnion>())
            return u->parts.empty();
        if (auto m = as<GridMask>())
            return std::none_of(m->bits.begin(), m->bits.end(), [](bool b) { return b; });
        if (auto s = as<BoundarySegmentUnion>())
            return s->segments.empty();
        if (as<Strip>())
        {
            for (auto q : domain_.boundary_samples(domain_.diameter() / 64.0))
                if (contains(q))
                    return false;
            for (auto q : domain_.lattice_samples(domain_.diameter() / 64.0))
                if (contains(q))
                    return false;
            return true;
        }
        return false;
    }

    // ---------------------------------------------------------------- distances

    DistanceValue geodesic_distance_to_region(const Domain& domain, const Region& region, Vec2 x, bool allow_approximate)
    {
        require(region.is_interior(), ErrorCode::BoundaryRegion, "geodesic distance needs an interior region");
        require(domain.contains(x, 1e-9 * domain.diameter()), ErrorCode::InvalidArgument, "point outside the domain");
        if (!region.distance_is_exact())
        {
            require(allow_approximate, ErrorCode::UnsupportedRegion, "GridMask distance is only grid-sampled");
            return {region.distance(x), true};
        }
        return {region.distance(x), false};
    }

    double uc_time(const Domain& domain, const Region& omega, const UcOptions& opts)
    {
        require(omega.is_interior(), ErrorCode::BoundaryRegion, "uc_time needs an interior region");
        require(!omega.is_empty(), ErrorCode::EmptyRegion, "uc_time needs a nonempty region");

        const double diam = domain.diameter();
        const double h = opts.sample_fraction * diam;
        const double tol = opts.tol_fraction * diam;

        std::vector<Vec2> samples = domain.lattice_samples(h);
        for (auto q : domain.boundary_samples(h))
            samples.push_back(q);

        auto f = [&](Vec2 p) { return omega.distance(domain.project(p)); };

        // a few best samples seed the refinement; distinct seeds guard against plateaus
        std::vector<std::pair<double, Vec2>> scored;
        scored.reserve(samples.size());
        for (auto q : samples)
            scored.emplace_back(f(q), q);
        const std::size_t n_seed = std::min<std::size_t>(4, scored.size());
        std::partial_sort(scored.begin(), scored.begin() + n_seed, scored.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });

        double best = scored.front().first;
        const bool planar = domain.dimension() == 2;
        static const std::array<Vec2, 8> moves = {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1),
                                                  Vec2(1, 1), Vec2(-1, -1), Vec2(1, -1), Vec2(-1, 1)};
        for (std::size_t s = 0; s < n_seed; ++s)
        {
            Vec2 p = scored[s].second;
            double val = scored[s].first;
            double step = h;
            while (step > tol)
            {
                bool improved = false;
                for (std::size_t m = 0; m < (planar ? moves.size() : 2); ++m)
                {
                    const Vec2 q = domain.project(p + step * moves[m]);
                    const double fq = f(q);
                    if (fq > val)
                    {
                        val = fq;
                        p = q;
                        improved = true;
                    }
                }
                if (!improved)
                    step *= 0.5;
            }
            best = std::max(best, val);
        }
        return 2.0 * best;
    }
} // namespace regobs
