#include "doctest.h"

#include <random>

#include "regobs/wave1d.hpp"

using namespace regobs;

namespace
{
    /// Smooth bump supported in (lo, hi).
    double bump(double x, double lo, double hi)
    {
        if (x <= lo || x >= hi)
            return 0.0;
        const double s = (2.0 * x - lo - hi) / (hi - lo);
        return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }

    /// Data whose w_minus vanishes: u1 = -D u0 with the centered difference.
    LineState rightward(const LineGrid& g, double lo, double hi)
    {
        LineState s{g, Eigen::VectorXd::Zero(g.nodes()), Eigen::VectorXd::Zero(g.nodes())};
        for (int i = 0; i <= g.cells; ++i)
            s.u0[i] = bump(g.x(i), lo, hi);
        for (int i = 1; i < g.cells; ++i)
            s.u1[i] = -(s.u0[i + 1] - s.u0[i - 1]) / (2.0 * g.h());
        return s;
    }

    LineState smooth_state(const LineGrid& g)
    {
        LineState s{g, Eigen::VectorXd::Zero(g.nodes()), Eigen::VectorXd::Zero(g.nodes())};
        for (int i = 0; i <= g.cells; ++i)
        {
            const double x = g.x(i);
            s.u0[i] = bump(x, -0.6, 0.1) + 0.3 * bump(x, 0.2, 0.9);
            s.u1[i] = bump(x, -0.2, 0.5);
        }
        return s;
    }
}

TEST_CASE("transport variables from data")
{
    const LineGrid g{0.0, 1.0, 400};
    LineState s{g, Eigen::VectorXd::Zero(g.nodes()), Eigen::VectorXd::Zero(g.nodes())};
    for (int i = 1; i < g.cells; ++i)
        s.u1[i] = std::sin(3.0 * g.x(i));
    auto w = to_transport(s);
    CHECK(w.w_plus == s.u1);
    CHECK(w.w_minus == s.u1);

    for (int i = 0; i <= g.cells; ++i)
        s.u0[i] = std::sin(pi * g.x(i));
    s.u1.setZero();
    w = to_transport(s);
    double err_interior = 0.0;
    for (int i = 1; i < g.cells; ++i)
    {
        err_interior = std::max(err_interior, std::abs(w.w_plus[i] + pi * std::cos(pi * g.x(i))));
        CHECK(w.w_minus[i] == doctest::Approx(-w.w_plus[i]));
    }
    CHECK(err_interior < 1e-4);
    CHECK(std::abs(w.w_plus[0] + pi) < 1e-2);

    const auto r = to_transport(rightward(LineGrid{-1, 1, 200}, -0.4, -0.1));
    CHECK(r.w_minus.lpNorm<Eigen::Infinity>() <= 1e-12);

    LineState bad = s;
    bad.u1.resize(5);
    CHECK_THROWS_AS(to_transport(bad), Error);
}

TEST_CASE("exact transport steps, period and energy")
{
    const LineGrid g{-1.0, 1.0, 200};
    const auto w0 = to_transport(smooth_state(g));
    auto w = w0;
    step_exact(w);
    for (int i = 1; i < g.cells; ++i)
    {
        CHECK(w.w_plus[i + 1] == w0.w_plus[i]);
        CHECK(w.w_minus[i - 1] == w0.w_minus[i]);
    }
    CHECK(w.w_plus[0] + w.w_minus[0] == 0.0);
    CHECK(w.w_plus[g.cells] + w.w_minus[g.cells] == 0.0);

    const double e0 = w0.energy();
    w = w0;
    double drift = 0.0;
    for (int n = 0; n < 2 * g.cells; ++n)
    {
        step_exact(w);
        drift = std::max(drift, std::abs(w.energy() - e0) / e0);
    }
    CHECK(drift <= 1e-12);
    CHECK(w.t == doctest::Approx(4.0));
    CHECK((w.w_plus - w0.w_plus).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((w.w_minus - w0.w_minus).lpNorm<Eigen::Infinity>() <= 1e-12);

    const auto full = evolve_exact(w0, 4.0);
    CHECK((full.w_plus - w0.w_plus).norm() <= 1e-12);
    CHECK_THROWS_AS(evolve_exact(w0, 0.0033), Error);
}

TEST_CASE("time reversal")
{
    const LineGrid g{-1.0, 1.0, 300};
    const auto w0 = to_transport(smooth_state(g));
    const auto back = reversed(evolve_exact(reversed(evolve_exact(w0, 1.3)), 2.6));
    CHECK((back.w_plus - w0.w_plus).norm() <= 1e-12 * w0.w_plus.norm());
    CHECK((back.w_minus - w0.w_minus).norm() <= 1e-12 * w0.w_minus.norm());
}

TEST_CASE("leapfrog at Courant number 1 reproduces exact transport")
{
    const Domain d = Domain::interval(-1, 1);
    const LineGrid lg = LineGrid::on(d, 2000);
    const int steps = 10000;
    const Grid2 g = Grid2::make(d, lg.cells, 0, steps * lg.h(), 1.0, 1.0);
    REQUIRE(g.steps == steps);
    const WaveSolver solver(g);
    const LineState s = smooth_state(lg);

    Field prev = solver.backward_start({interior_of(s.u0), interior_of(s.u1)});
    Field cur = interior_of(s.u0);
    solver.step(prev, cur);
    auto exact = transport_from_leapfrog(lg, with_endpoints(prev), with_endpoints(cur), lg.h());
    const double scale = std::max(exact.w_plus.lpNorm<Eigen::Infinity>(), exact.w_minus.lpNorm<Eigen::Infinity>());
    const double e0 = exact.energy();
    double worst = 0.0, drift = 0.0;
    for (int n = 1; n < steps; ++n)
    {
        solver.step(prev, cur);
        step_exact(exact);
        const auto lf = transport_from_leapfrog(lg, with_endpoints(prev), with_endpoints(cur), exact.t);
        worst = std::max({worst, (lf.w_plus - exact.w_plus).lpNorm<Eigen::Infinity>(),
                          (lf.w_minus - exact.w_minus).lpNorm<Eigen::Infinity>()});
        drift = std::max(drift, std::abs(exact.energy() - e0) / e0);
    }
    CHECK(worst <= 1e-10 * scale);
    CHECK(drift <= 1e-12);
}

TEST_CASE("norms agree with the spectral realization")
{
    const Domain d = Domain::interval(-1, 1);
    const LineGrid lg = LineGrid::on(d, 300);
    const WaveSolver solver(Grid2::make(d, lg.cells, 0, 1.0));
    const LineState s = smooth_state(lg);
    const WaveState w{interior_of(s.u0), interior_of(s.u1)};
    CHECK(weak_norm_sq(s) == doctest::Approx(solver.weak_norm_sq(w)).epsilon(1e-10));
    CHECK(energy_norm_sq(s) == doctest::Approx(solver.energy_norm_sq(w)).epsilon(1e-10));
    // energy norm and transport energy share the 1/2 convention up to the centered difference
    CHECK(0.5 * energy_norm_sq(s) == doctest::Approx(to_transport(s).energy()).epsilon(2e-2));
}

TEST_CASE("packet observation before and after arrival")
{
    const Domain d = Domain::interval(-1, 1);
    const LineGrid g = LineGrid::on(d, 2000);
    const auto omega = Region::interval_union(d, {{0.75, 1.0}});
    const LineState s = rightward(g, -0.25, -0.15);
    const double energy = to_transport(s).energy();
    CHECK(observe(s, omega, 0.9, Quantity::DtU).norm_sq <= 1e-20 * energy);
    // a point x0 of the packet enters omega at 3/4 - x0, so by T = 1.2 it has spent 0.45 + x0
    // inside; averaged over the symmetric packet that is 0.25 time units of its energy density
    const double late = observe(s, omega, 1.2, Quantity::DtU).norm_sq;
    CHECK(late / energy == doctest::Approx(0.25).epsilon(0.02));
    // in and back out: 0.5 time units each
    CHECK(observe(s, omega, 1.8, Quantity::DtU).norm_sq / energy == doctest::Approx(0.5).epsilon(0.02));

    const auto rec = observe(s, omega, 1.2, Quantity::U);
    CHECK(rec.values.rows() == static_cast<Eigen::Index>(rec.times.size()));
    CHECK(rec.times.back() == doctest::Approx(1.2));
    CHECK(rec.positions.front() >= 0.75);
    CHECK_THROWS_AS(observe(s, omega, 1.2003, Quantity::U), Error);
}

TEST_CASE("equipartition over one period")
{
    const Domain d = Domain::interval(-1, 1);
    const LineGrid g = LineGrid::on(d, 1000);
    LineState s{g, Eigen::VectorXd::Zero(g.nodes()), Eigen::VectorXd::Zero(g.nodes())};
    for (int i = 0; i <= g.cells; ++i)
        s.u0[i] = bump(g.x(i), -0.5, 0.3);
    const double period = 4.0;
    const auto rec = observe(s, Region::whole(d), period, Quantity::DtU);
    CHECK(rec.norm_sq == doctest::Approx(period * to_transport(s).energy()).epsilon(1e-6));
}

TEST_CASE("displacement is reconstructed from the velocity")
{
    const Domain d = Domain::interval(-1, 1);
    const LineGrid g = LineGrid::on(d, 1000);
    const LineState s = rightward(g, -0.5, -0.2);
    const auto rec = observe(s, Region::whole(d), 0.4, Quantity::U);
    // the right-moving profile is u0 translated by t
    const int row = static_cast<int>(rec.times.size()) - 1;
    double err = 0.0;
    for (std::size_t j = 0; j < rec.positions.size(); ++j)
        err = std::max(err, std::abs(rec.values(row, static_cast<Eigen::Index>(j)) - bump(rec.positions[j] - 0.4, -0.5, -0.2)));
    CHECK(err < 1e-3);
}

TEST_CASE("boundary normal derivative")
{
    const Domain d = Domain::interval(-1, 1);
    const LineGrid g = LineGrid::on(d, 1000);
    const LineState s = rightward(g, 0.3, 0.5);
    const auto gamma = Region::boundary_segments(d, {{Vec2(1.0), Vec2(1.0)}});
    CHECK(observe(s, gamma, 0.45, Quantity::DnUBoundary).norm_sq == 0.0);
    const auto rec = observe(s, gamma, 0.8, Quantity::DnUBoundary);
    CHECK(rec.positions.size() == 1);
    CHECK(rec.norm_sq > 0.0);
    CHECK_THROWS_AS(observe(s, Region::whole(d), 0.8, Quantity::DnUBoundary), Error);
}

TEST_CASE("directional energy split")
{
    const Domain d = Domain::interval(-10, 10);
    const LineGrid g = LineGrid::on(d, 2000);
    const auto omega = Region::interval_union(d, {{-2.0, -1.0}, {1.0, 2.0}});

    const LineState zero{g, Eigen::VectorXd::Zero(g.nodes()), Eigen::VectorXd::Zero(g.nodes())};
    const auto z = directional_energy_split(zero, omega, 3.0);
    CHECK(z.e_plus_total == 0.0);
    CHECK(z.e_minus_in_rminus == 0.0);

    const auto in = directional_energy_split(rightward(g, -4.5, 1.5), omega, 3.0);
    CHECK(in.e_plus_total > 0.0);
    CHECK(in.e_plus_in_rplus == doctest::Approx(in.e_plus_total).epsilon(1e-12));
    CHECK(in.e_minus_total <= 1e-20);

    const auto out = directional_energy_split(rightward(g, 3.0, 6.0), omega, 3.0);
    CHECK(out.e_plus_total > 0.0);
    CHECK(out.e_plus_in_rplus <= 1e-12 * out.e_plus_total);

    CHECK_THROWS_AS(directional_energy_split(zero, Region::whole(d), 3.0), Error);
}
