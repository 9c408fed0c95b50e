#include "doctest.h"

#include <random>

#include "regobs/geometry.hpp"

using namespace regobs;

namespace
{
    Domain unit_square() { return Domain::rectangle({0.0, 0.0}, {1.0, 1.0}); }

    Region one_d_omega(const Domain& d)
    {
        return Region::interval_union(d, {{-1.0, -0.75}, {0.75, 1.0}});
    }
}

TEST_CASE("signed distance on the three shapes")
{
    CHECK(signed_distance(Domain::interval(-1, 1), {0.0}) == doctest::Approx(-1.0));
    CHECK(signed_distance(Domain::disk({0, 0}, 1), {0.3, 0.4}) == doctest::Approx(-0.5));
    CHECK(signed_distance(unit_square(), {0.5, 1.2}) == doctest::Approx(0.2));
    CHECK(signed_distance(unit_square(), {1.3, 1.4}) == doctest::Approx(0.5));
    CHECK(signed_distance(unit_square(), {0.2, 0.5}) == doctest::Approx(-0.2));
}

TEST_CASE("invalid shapes are rejected")
{
    CHECK_THROWS_AS(Domain::interval(1, 1), Error);
    CHECK_THROWS_AS(Domain::disk({0, 0}, 0.0), Error);
    CHECK_THROWS_AS(Domain::rectangle({0, 0}, {1, 0}), Error);
}

TEST_CASE("signed distance is 1-Lipschitz")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Domain shapes[] = {Domain::interval(-1, 1), Domain::disk({0.1, -0.2}, 1.0), unit_square()};
    for (const auto& d : shapes)
        for (int k = 0; k < 2000; ++k)
        {
            Vec2 a(u(rng), d.dimension() == 2 ? u(rng) : 0.0);
            Vec2 b(u(rng), d.dimension() == 2 ? u(rng) : 0.0);
            CHECK(std::abs(d.signed_distance(a) - d.signed_distance(b)) <= norm(a - b) + 1e-14);
        }
}

TEST_CASE("boundary normals")
{
    const Vec2 n = boundary_normal(Domain::disk({0, 0}, 1), {1.0, 0.0});
    CHECK(n.x == doctest::Approx(1.0));
    CHECK(n.y == doctest::Approx(0.0));
    const Vec2 m = boundary_normal(unit_square(), {0.5, 0.0});
    CHECK(m.x == doctest::Approx(0.0));
    CHECK(m.y == doctest::Approx(-1.0));

    try
    {
        boundary_normal(unit_square(), {0.0, 0.0});
        FAIL("corner accepted");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::CornerPoint);
    }
    CHECK_THROWS_AS(boundary_normal(unit_square(), {0.5, 0.5}), Error);

    const Domain disk = Domain::disk({0.2, 0.1}, 0.7);
    for (auto p : disk.boundary_samples(0.05))
        CHECK(std::abs(norm(disk.boundary_normal(p)) - 1.0) <= 1e-12);
}

TEST_CASE("boundary samples lie on the boundary")
{
    const Domain shapes[] = {Domain::interval(-1, 1), Domain::disk({0.1, -0.2}, 1.3), unit_square()};
    for (const auto& d : shapes)
        for (auto p : d.boundary_samples(0.01))
            CHECK(std::abs(d.signed_distance(p)) <= 1e-12 * d.diameter());
}

TEST_CASE("geodesic distance to regions")
{
    const Domain line = Domain::interval(-1, 1);
    const auto omega = one_d_omega(line);
    CHECK(geodesic_distance_to_region(line, omega, {0.0}).value == doctest::Approx(0.75));

    const Domain disk = Domain::disk({0, 0}, 1);
    const auto ring = Region::annulus(disk, {0, 0}, 0.8, 1.0);
    CHECK(geodesic_distance_to_region(disk, ring, {0.0, 0.0}).value == doctest::Approx(0.8));
    CHECK(geodesic_distance_to_region(disk, ring, {0.0, 0.9}).value == 0.0);
    CHECK(geodesic_distance_to_region(disk, ring, {0.0, 0.5}).value > 0.0);

    GridMask mask{{0.0, 0.0}, 0.1, 11, 11, std::vector<bool>(121, false)};
    mask.bits[5 + 11 * 5] = true;
    const auto grid = Region::grid_mask(unit_square(), mask);
    CHECK_THROWS_AS(geodesic_distance_to_region(unit_square(), grid, {0.0, 0.0}), Error);
    const auto approx = geodesic_distance_to_region(unit_square(), grid, {0.0, 0.0}, true);
    CHECK(approx.approximate);
    CHECK(approx.value == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("distance vanishes exactly on the closed region")
{
    const Domain disk = Domain::disk({0, 0}, 1);
    const Region regions[] = {Region::annulus(disk, {0, 0}, 0.5, 0.9),
                              Region::angular_sector(disk, -pi / 3, pi / 3, 0.2),
                              Region::strip(disk, 0, -0.4, Strip::Side::Below), Region::collar(disk, 0.1)};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& r : regions)
        for (int k = 0; k < 3000; ++k)
        {
            const Vec2 x(u(rng), u(rng));
            if (!disk.contains(x))
                continue;
            const double dist = r.distance(x);
            if (r.contains(x, 0.0))
                CHECK(dist == 0.0);
            else
                CHECK(dist > 0.0);
        }
}

TEST_CASE("region validation")
{
    const Domain line = Domain::interval(-1, 1);
    CHECK_THROWS_AS(Region::interval_union(line, {{-0.5, 0.2}, {0.1, 0.4}}), Error);
    CHECK_THROWS_AS(Region::interval_union(line, {{-1.5, 0.2}}), Error);
    const Domain disk = Domain::disk({0, 0}, 1);
    CHECK_THROWS_AS(Region::annulus(disk, {0.5, 0}, 0.0, 0.6), Error);
    CHECK_THROWS_AS(Region::angular_sector(unit_square(), 0, 1, 0.1), Error);
    CHECK_THROWS_AS(Region::boundary_segments(unit_square(), {{{0.2, 0.2}, {0.8, 0.2}}}), Error);
    CHECK(Region::boundary_arc(disk, -1, 1).carrier() == Carrier::Boundary);
}

TEST_CASE("first entry along a segment")
{
    const Domain disk = Domain::disk({0, 0}, 1);
    const auto ring = Region::annulus(disk, {0, 0}, 0.8, 1.0);
    CHECK(ring.first_entry({0, 0}, {1, 0}, 1.0) == doctest::Approx(0.8));
    CHECK(ring.first_entry({0, 0}, {1, 0}, 0.5) == infinity);

    const auto sector = Region::angular_sector(disk, -pi / 3, pi / 3, 0.1);
    CHECK(sector.first_entry({0, 0}, {1, 0}, 1.0) == doctest::Approx(0.9));
    // chord crossing the sector through its straight edge
    const Vec2 start(0.95 * std::cos(pi / 2), 0.95 * std::sin(pi / 2));
    const double s = sector.first_entry(start, normalized(Vec2(1, 0) - start), 2.0);
    CHECK(std::isfinite(s));
    CHECK(sector.contains(start + s * normalized(Vec2(1, 0) - start)));

    const Domain line = Domain::interval(-1, 1);
    const auto omega = one_d_omega(line);
    CHECK(omega.first_entry({-0.25}, {1.0}, 1.25) == doctest::Approx(1.0));
    CHECK(omega.first_entry({-0.25}, {-1.0}, 0.75) == doctest::Approx(0.5));
    CHECK(omega.first_entry({0.8}, {-1.0}, 0.75) == 0.0);
}

TEST_CASE("uc time of the worked examples")
{
    const Domain line = Domain::interval(-1, 1);
    CHECK(uc_time(line, one_d_omega(line)) == doctest::Approx(1.5).epsilon(1e-9));

    const Domain disk = Domain::disk({0, 0}, 1);
    CHECK(uc_time(disk, Region::annulus(disk, {0, 0}, 0.8, 1.0)) == doctest::Approx(1.6).epsilon(1e-6));
    CHECK(uc_time(disk, Region::ball(disk, {0, 0}, 0.5)) == doctest::Approx(1.0).epsilon(1e-6));

    for (double eps : {0.05, 0.1, 0.2})
        CHECK(uc_time(unit_square(), Region::collar(unit_square(), eps)) == doctest::Approx(1.0 - 2.0 * eps).epsilon(1e-6));

    CHECK(uc_time(disk, Region::whole(disk)) == 0.0);
    CHECK_THROWS_AS(uc_time(line, Region::interval_union(line, {})), Error);
}

TEST_CASE("uc time is monotone under inclusion")
{
    const Domain line = Domain::interval(-1, 1);
    const double small = uc_time(line, Region::interval_union(line, {{-1.0, -0.9}, {0.9, 1.0}}));
    const double mid = uc_time(line, Region::interval_union(line, {{-1.0, -0.75}, {0.75, 1.0}}));
    const double big = uc_time(line, Region::interval_union(line, {{-1.0, -0.5}, {0.2, 1.0}}));
    CHECK(small >= mid);
    CHECK(mid >= big);
    CHECK(small == doctest::Approx(1.8));
    CHECK(big == doctest::Approx(0.7));
}
