#ifndef REGOBS_GEOMETRY_HPP
#define REGOBS_GEOMETRY_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace regobs
{
    constexpr double pi = 3.14159265358979323846;
    constexpr double infinity = std::numeric_limits<double>::infinity();

    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;

        Vec2() = default;
        constexpr Vec2(double x_, double y_ = 0.0) : x(x_), y(y_) {}

        Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
        Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
        Vec2 operator-() const { return {-x, -y}; }
        Vec2 operator*(double s) const { return {s * x, s * y}; }
        Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
        bool operator==(const Vec2&) const = default;
    };

    inline Vec2 operator*(double s, Vec2 v) { return v * s; }
    inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
    inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
    inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
    inline Vec2 normalized(Vec2 a) { const double n = norm(a); return {a.x / n, a.y / n}; }
    inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

    /// Angle of `a` relative to the positive x axis, in (-pi, pi].
    inline double polar_angle(Vec2 a) { return std::atan2(a.y, a.x); }

    /// Maps an angle into [0, 2 pi).
    inline double wrap_angle(double theta)
    {
        double r = std::fmod(theta, 2.0 * pi);
        if (r < 0.0)
            r += 2.0 * pi;
        return r;
    }

    struct Interval
    {
        double a;
        double b;
    };

    struct Disk
    {
        Vec2 center;
        double radius;
    };

    struct Rectangle
    {
        Vec2 corner_min;
        Vec2 corner_max;
    };

    /// Model spatial domain. Points of an Interval domain are stored as Vec2 with y = 0.
    class Domain
    {
    public:
        using Shape = std::variant<Interval, Disk, Rectangle>;

        static Domain interval(double a, double b);
        static Domain disk(Vec2 center, double radius);
        static Domain rectangle(Vec2 corner_min, Vec2 corner_max);

        const Shape& shape() const { return shape_; }

        template <class T>
        const T * as() const { return std::get_if<T>(&shape_); }

        int dimension() const { return as<Interval>() ? 1 : 2; }
        double diameter() const;

        /// Inradius: sup over the domain of the distance to the boundary.
        double inradius() const;

        std::pair<Vec2, Vec2> bounding_box() const;

        double corner_tolerance() const { return 1e-9 * diameter(); }
        double boundary_tolerance() const { return 1e-12 * diameter(); }

        double signed_distance(Vec2 x) const;
        bool contains(Vec2 x, double tol = 0.0) const { return signed_distance(x) <= tol; }

        /// Outward unit normal at a boundary point; throws CornerPoint at Rectangle corners.
        Vec2 boundary_normal(Vec2 x_boundary) const;

        /// Nearest point of the closed domain.
        Vec2 project(Vec2 x) const;

        /// Nearest boundary point (exact snap used after ray-boundary intersections).
        Vec2 snap_to_boundary(Vec2 x) const;

        bool is_corner(Vec2 x) const;

        /// Points of the boundary at spacing about h; always includes Rectangle corners
        /// and Interval endpoints.
        std::vector<Vec2> boundary_samples(double h) const;

        /// Nodes of a lattice with spacing h that lie in the closed domain.
        std::vector<Vec2> lattice_samples(double h) const;

    private:
        explicit Domain(Shape s) : shape_(s) {}
        Shape shape_;
    };

    double signed_distance(const Domain& domain, Vec2 x);
    Vec2 boundary_normal(const Domain& domain, Vec2 x_boundary);

    // ---------------------------------------------------------------- regions

    enum class Carrier
    {
        Interior,
        Boundary
    };

    struct IntervalUnion
    {
        std::vector<std::pair<double, double>> parts;
    };

    struct Annulus
    {
        Vec2 center;
        double r_inner;
        double r_outer;
    };

    /// Points of a disk of the given radius with polar angle in [angle_min, angle_max]
    /// and within `depth` of the circle.
    struct AngularSectorNeighborhood
    {
        Vec2 center;
        double radius;
        double angle_min;
        double angle_max;
        double depth;
    };

    struct Strip
    {
        enum class Side
        {
            Below,
            Above
        };
        int axis;
        double threshold;
        Side side;
    };

    /// Points of the domain within `depth` of its boundary.
    struct Collar
    {
        double depth;
    };

    struct WholeDomain
    {
    };

    struct BoundaryArc
    {
        Vec2 center;
        double radius;
        double angle_min;
        double angle_max;
    };

    struct BoundarySegmentUnion
    {
        std::vector<std::pair<Vec2, Vec2>> segments;
    };

    /// Bitset over a lattice (origin + i*spacing, origin + j*spacing).
    struct GridMask
    {
        Vec2 origin;
        double spacing;
        int nx;
        int ny;
        std::vector<bool> bits;
    };

    using RegionDescriptor = std::variant<IntervalUnion, Annulus, AngularSectorNeighborhood, Strip, Collar,
                                          WholeDomain, BoundaryArc, BoundarySegmentUnion, GridMask>;

    /// Measurable subset of a domain (observation set, support set) or of its boundary.
    /// Membership is closure membership; `distance` is the Euclidean distance to the closure.
    class Region
    {
    public:
        Region(const Domain& domain, RegionDescriptor descriptor);

        static Region interval_union(const Domain& d, std::vector<std::pair<double, double>> parts);
        static Region annulus(const Domain& d, Vec2 center, double r_inner, double r_outer);
        static Region ball(const Domain& d, Vec2 center, double radius) { return annulus(d, center, 0.0, radius); }
        static Region angular_sector(const Domain& d, double angle_min, double angle_max, double depth);
        static Region strip(const Domain& d, int axis, double threshold, Strip::Side side);
        static Region collar(const Domain& d, double depth);
        static Region whole(const Domain& d);
        static Region boundary_arc(const Domain& d, double angle_min, double angle_max);
        static Region boundary_segments(const Domain& d, std::vector<std::pair<Vec2, Vec2>> segments);
        static Region grid_mask(const Domain& d, GridMask mask);

        Carrier carrier() const;
        bool is_interior() const { return carrier() == Carrier::Interior; }
        const Domain& domain() const { return domain_; }
        const RegionDescriptor& descriptor() const { return descriptor_; }

        template <class T>
        const T * as() const { return std::get_if<T>(&descriptor_); }

        double default_tolerance() const { return 1e-10 * domain_.diameter(); }

        bool contains(Vec2 x) const { return contains(x, default_tolerance()); }
        bool contains(Vec2 x, double tol) const;

        /// Euclidean distance to the closure; approximate (nearest set node) for GridMask.
        double distance(Vec2 x) const;
        bool distance_is_exact() const { return !as<GridMask>(); }

        /// Smallest s in [0, length] with p + s*dir in the closure, or +infinity.
        /// Exact for every analytic descriptor; GridMask is sampled at step `sample_step`.
        double first_entry(Vec2 p, Vec2 dir, double length, double sample_step = 0.0) const;

        /// Points on the boundary of the region (inside the closed domain) together with
        /// the part of the domain boundary contained in the region, at spacing about h.
        std::vector<Vec2> boundary_samples(double h) const;

        /// True when the region has no point in the closed domain (as far as sampling at
        /// spacing h can tell for masks).
        bool is_empty() const;

    private:
        bool in_angular_range(Vec2 f, double angle_min, double angle_max, double tol) const;

        Domain domain_;
        RegionDescriptor descriptor_;
        // unit vectors along the angular limits of sector and arc descriptors
        Vec2 edge_min_;
        Vec2 edge_max_;
    };

    /// Result of a distance query together with its provenance.
    struct DistanceValue
    {
        double value;
        bool approximate;
    };

    /// Distance inside the closed domain from x to the region. For the convex model domains
    /// the straight segment stays in the domain, so this is the Euclidean distance.
    /// GridMask regions throw UnsupportedRegion unless `allow_approximate` is set, in which
    /// case the grid-sampled minimum is returned and flagged.
    DistanceValue geodesic_distance_to_region(const Domain& domain, const Region& region, Vec2 x,
                                              bool allow_approximate = false);

    struct UcOptions
    {
        /// Sampling resolution as a fraction of the diameter.
        double sample_fraction = 1.0 / 200.0;
        /// Refinement tolerance as a fraction of the diameter.
        double tol_fraction = 1e-6;
    };

    /// Twice the sup over the closed domain of the distance to omega.
    double uc_time(const Domain& domain, const Region& omega, const UcOptions& opts = {});
} // namespace regobs

#endif
