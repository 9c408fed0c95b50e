#include "regobs/reachability.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

namespace regobs
{
    namespace
    {
        struct Candidate
        {
            double value;
            Vec2 x;
            double theta;
        };

        Vec2 direction_at(int dimension, double theta)
        {
            if (dimension == 1)
                return {std::cos(theta) > 0.0 ? 1.0 : -1.0, 0.0};
            return unit_from_angle(theta);
        }

        std::vector<Vec2> raster_nodes(const Domain& domain, double h, Vec2& origin, int& nx, int& ny, double& h_eff)
        {
            auto [lo, hi] = domain.bounding_box();
            const double w = hi.x - lo.x;
            nx = static_cast<int>(std::ceil(w / h - 1e-9)) + 1;
            h_eff = w / (nx - 1);
            ny = domain.dimension() == 1 ? 1 : static_cast<int>(std::ceil((hi.y - lo.y) / h_eff - 1e-9)) + 1;
            origin = lo;
            std::vector<Vec2> nodes;
            nodes.reserve(static_cast<std::size_t>(nx) * ny);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i)
                    nodes.push_back(lo + Vec2(i * h_eff, j * h_eff));
            return nodes;
        }

        void validate_regions(const Region& region_O, const Region& omega)
        {
            require(region_O.is_interior() && omega.is_interior(), ErrorCode::BoundaryRegion,
                    "critical times need interior regions");
            require(!region_O.is_empty() && !omega.is_empty(), ErrorCode::EmptyRegion,
                    "critical times need nonempty regions");
        }
    } // namespace

    std::vector<Vec2> DirectionSample::directions(int dimension) const
    {
        if (dimension == 1)
            return {Vec2(1.0, 0.0), Vec2(-1.0, 0.0)};
        require(count >= 4 && count % 2 == 0, ErrorCode::InvalidArgument, "direction count must be even and >= 4");
        std::vector<Vec2> out;
        out.reserve(count);
        for (int k = 0; k < count; ++k)
            out.push_back(unit_from_angle(2.0 * pi * k / count));
        return out;
    }

    CriticalTimeResult critical_time(const Domain& domain, const Region& region_O, const Region& omega,
                                     const DirectionSample& dirs, double t_cap, const ReachabilityOptions& opts)
    {
        validate_regions(region_O, omega);
        require(t_cap > 0.0, ErrorCode::InvalidArgument, "t_cap must be positive");
        const int dim = domain.dimension();
        const double diam = domain.diameter();
        const double h = opts.grid_h > 0.0 ? opts.grid_h : diam / 50.0;
        const double bh = opts.boundary_h > 0.0 ? opts.boundary_h : 0.5 * h;
        const double tol = domain.boundary_tolerance() * 1e3;

        std::vector<Vec2> points;
        for (auto q : domain.lattice_samples(h))
            if (region_O.contains(q))
                points.push_back(q);
        for (auto q : region_O.boundary_samples(bh))
            if (domain.contains(q, tol))
                points.push_back(domain.project(q));
        require(!points.empty(), ErrorCode::EmptyRegion, "no sample of O lies in the domain");

        CriticalTimeResult result;
        const std::size_t np = points.size();
        std::vector<double> best(np, -1.0), best_theta(np, 0.0);
        std::atomic<bool> unbounded{false};
        long total = 0, terminated = 0;

        auto sweep = [&](const std::vector<double>& thetas) {
            long tot = 0, term = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : tot, term)
            for (std::size_t p = 0; p < np; ++p)
            {
                if (unbounded.load(std::memory_order_relaxed))
                    continue;
                for (double th : thetas)
                {
                    const auto r = trace_to_region(domain, {points[p], direction_at(dim, th), 0.0}, omega, t_cap);
                    ++tot;
                    if (r.hit())
                    {
                        if (r.time > best[p])
                        {
                            best[p] = r.time;
                            best_theta[p] = th;
                        }
                    }
                    else if (r.reason == Termination::TimeBudget)
                    {
                        unbounded = true;
                        best[p] = infinity;
                        best_theta[p] = th;
                        break;
                    }
                    else
                        ++term;
                }
            }
            total += tot;
            terminated += term;
        };

        auto current_max = [&]() { return *std::max_element(best.begin(), best.end()); };
        auto finish_infinite = [&]() {
            const auto k = std::max_element(best.begin(), best.end()) - best.begin();
            result.infinite = true;
            result.value = infinity;
            result.argmax_x = points[k];
            result.argmax_dir = direction_at(dim, best_theta[k]);
            result.rays = total;
            result.undetermined_fraction = total ? static_cast<double>(terminated) / total : 0.0;
            return result;
        };

        int n = dim == 1 ? 2 : dirs.count;
        if (dim == 2)
            require(n >= 4 && n % 2 == 0, ErrorCode::InvalidArgument, "direction count must be even and >= 4");
        {
            std::vector<double> thetas(n);
            for (int k = 0; k < n; ++k)
                thetas[k] = 2.0 * pi * k / n;
            sweep(thetas);
        }
        if (unbounded)
            return finish_infinite();

        double estimate = current_max();
        while (dim == 2 && dirs.adaptive && 2 * n <= dirs.max_count)
        {
            std::vector<double> thetas(n);
            for (int k = 0; k < n; ++k)
                thetas[k] = pi * (2 * k + 1) / n;
            n *= 2;
            sweep(thetas);
            if (unbounded)
                return finish_infinite();
            const double next = current_max();
            const bool settled = std::abs(next - estimate) < opts.tol_time * std::max(1.0, estimate);
            estimate = next;
            if (settled)
                break;
        }
        result.direction_count = n;

        const double term_fraction = total ? static_cast<double>(terminated) / total : 0.0;
        require(term_fraction <= opts.max_terminated_fraction, ErrorCode::TerminationDominant,
                "too many sampled rays terminate before reaching omega");

        // compass refinement around the best distinct samples
        std::vector<std::size_t> order(np);
        std::iota(order.begin(), order.end(), 0);
        const std::size_t k_top = std::max<std::size_t>(1, std::min<std::size_t>(opts.refine_top, np));
        std::partial_sort(order.begin(), order.begin() + k_top, order.end(),
                          [&](std::size_t a, std::size_t b) { return best[a] > best[b]; });

        Candidate overall{best[order[0]], points[order[0]], best_theta[order[0]]};
        const double x_tol = 1e-7 * diam;
        const double th_tol = 1e-8;
        for (std::size_t r = 0; r < k_top; ++r)
        {
            Candidate c{best[order[r]], points[order[r]], best_theta[order[r]]};
            if (c.value < 0.0)
                continue;
            double sx = h, sth = dim == 2 ? 2.0 * pi / n : 0.0;
            while (sx > x_tol || sth > th_tol)
            {
                std::vector<std::pair<Vec2, double>> moves = {{Vec2(sx, 0), 0.0}, {Vec2(-sx, 0), 0.0}};
                if (dim == 2)
                {
                    const double dg = sx / std::sqrt(2.0);
                    moves.insert(moves.end(), {{Vec2(0, sx), 0.0}, {Vec2(0, -sx), 0.0}, {Vec2(dg, dg), 0.0},
                                               {Vec2(-dg, -dg), 0.0}, {Vec2(dg, -dg), 0.0}, {Vec2(-dg, dg), 0.0},
                                               {Vec2(0, 0), sth}, {Vec2(0, 0), -sth}});
                }
                bool improved = false;
                for (auto [dx, dth] : moves)
                {
                    if (dx == Vec2(0, 0) && dth == 0.0)
                        continue;
                    const Vec2 x = c.x + dx;
                    if (!domain.contains(x, tol) || !region_O.contains(x))
                        continue;
                    const double th = c.theta + dth;
                    const auto hr = trace_to_region(domain, {domain.project(x), direction_at(dim, th), 0.0}, omega, t_cap);
                    if (!hr.hit())
                    {
                        if (hr.reason == Termination::TimeBudget)
                        {
                            best[order[r]] = infinity;
                            points[order[r]] = domain.project(x);
                            best_theta[order[r]] = th;
                            return finish_infinite();
                        }
                        continue;
                    }
                    if (hr.time > c.value)
                    {
                        c = {hr.time, domain.project(x), th};
                        improved = true;
                    }
                }
                if (!improved)
                {
                    sx *= 0.5;
                    sth *= 0.5;
                }
            }
            if (c.value > overall.value)
                overall = c;
        }

        result.value = overall.value;
        result.argmax_x = overall.x;
        result.argmax_dir = direction_at(dim, overall.theta);
        result.rays = total;
        result.undetermined_fraction = term_fraction;
        return result;
    }

    CriticalTimeResult gcc_time(const Domain& domain, const Region& omega, const DirectionSample& dirs, double t_cap,
                                const ReachabilityOptions& opts)
    {
        return critical_time(domain, Region::whole(domain), omega, dirs, t_cap, opts);
    }

    ArcExampleTime arc_example_time(double alpha, double epsilon)
    {
        require(alpha > pi && alpha < 4.0 * pi / 3.0, ErrorCode::OutOfRange, "alpha must lie in (pi, 4 pi / 3)");
        require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
        const double chord_angle = alpha - pi / 3.0;
        const double gain = 2.0 * (pi - chord_angle);
        const double need = 5.0 * pi / 3.0 - alpha;
        int k = 1;
        while (k * gain <= need)
            ++k;
        return {k, 4.0 * k * std::sin(0.5 * chord_angle)};
    }

    const char * node_flag_name(NodeFlag f)
    {
        switch (f)
        {
        case NodeFlag::AllDirectionsHit: return "AllDirectionsHit";
        case NodeFlag::SomeDirectionMisses: return "SomeDirectionMisses";
        case NodeFlag::Undetermined: return "Undetermined";
        case NodeFlag::Outside: return "Outside";
        }
        return "?";
    }

    double ReachabilityRaster::undetermined_fraction() const
    {
        long inside = 0, undetermined = 0;
        for (auto f : flags)
        {
            inside += f != NodeFlag::Outside;
            undetermined += f == NodeFlag::Undetermined;
        }
        return inside ? static_cast<double>(undetermined) / inside : 0.0;
    }

    ReachabilityRaster reachable_set(const Domain& domain, const Region& omega, double T, double grid_h,
                                     const DirectionSample& dirs)
    {
        require(T > 0.0, ErrorCode::InvalidArgument, "T must be positive");
        require(grid_h > 0.0, ErrorCode::InvalidArgument, "grid_h must be positive");
        require(omega.is_interior(), ErrorCode::BoundaryRegion, "omega must be an interior region");
        ReachabilityRaster raster;
        const auto nodes = raster_nodes(domain, grid_h, raster.origin, raster.nx, raster.ny, raster.h);
        const auto ds = dirs.directions(domain.dimension());
        const double tol = domain.boundary_tolerance() * 1e3;
        raster.flags.assign(nodes.size(), NodeFlag::Outside);

#pragma omp parallel for schedule(dynamic, 16)
        for (std::size_t p = 0; p < nodes.size(); ++p)
        {
            if (!domain.contains(nodes[p], tol))
                continue;
            const Vec2 x = domain.project(nodes[p]);
            if (omega.contains(x))
            {
                raster.flags[p] = NodeFlag::AllDirectionsHit;
                continue;
            }
            bool undetermined = false, miss = false;
            for (auto d : ds)
            {
                const auto r = trace_to_region(domain, {x, d, 0.0}, omega, T);
                if (r.hit())
                    continue;
                if (r.reason == Termination::TimeBudget)
                {
                    miss = true;
                    break;
                }
                undetermined = true;
            }
            raster.flags[p] = miss ? NodeFlag::SomeDirectionMisses
                                   : (undetermined ? NodeFlag::Undetermined : NodeFlag::AllDirectionsHit);
        }
        return raster;
    }

    PhaseRaster phase_reachable(const Domain& domain, const Region& omega, double T, double grid_h,
                                const DirectionSample& dirs)
    {
        require(T > 0.0, ErrorCode::InvalidArgument, "T must be positive");
        require(grid_h > 0.0, ErrorCode::InvalidArgument, "grid_h must be positive");
        require(omega.is_interior(), ErrorCode::BoundaryRegion, "omega must be an interior region");
        PhaseRaster out;
        Vec2 origin;
        int nx, ny;
        double h;
        const double tol = domain.boundary_tolerance() * 1e3;
        for (auto q : raster_nodes(domain, grid_h, origin, nx, ny, h))
            if (domain.contains(q, tol))
                out.nodes.push_back(domain.project(q));
        out.directions = dirs.directions(domain.dimension());
        const std::size_t nd = out.directions.size();
        out.flags.assign(out.nodes.size() * nd, 0);

#pragma omp parallel for schedule(dynamic, 16)
        for (std::size_t p = 0; p < out.nodes.size(); ++p)
        {
            std::vector<char> hit(nd);
            for (std::size_t k = 0; k < nd; ++k)
                hit[k] = trace_to_region(domain, {out.nodes[p], out.directions[k], 0.0}, omega, T).hit();
            for (std::size_t k = 0; k < nd; ++k)
                out.flags[p * nd + k] = hit[k] && hit[(k + nd / 2) % nd];
        }
        return out;
    }
} // namespace regobs
