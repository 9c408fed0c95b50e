#include "regobs/wave2d.hpp"

#include <cmath>

#include "regobs/errors.hpp"

namespace regobs
{
    const char * quantity_name(Quantity q)
    {
        switch (q)
        {
        case Quantity::U: return "u";
        case Quantity::DtU: return "dt_u";
        case Quantity::DnUBoundary: return "dn_u_boundary";
        }
        return "?";
    }

    Quantity parse_quantity(const std::string& name)
    {
        if (name == "u")
            return Quantity::U;
        if (name == "dt_u")
            return Quantity::DtU;
        if (name == "dn_u_boundary")
            return Quantity::DnUBoundary;
        throw Error(ErrorCode::Config, "unknown quantity '" + name + "'");
    }

    Grid2 Grid2::make(const Domain& domain, int cells_x, int cells_y, double T, double courant, double cfl_safety)
    {
        require(T > 0.0, ErrorCode::InvalidArgument, "T must be positive");
        require(courant > 0.0, ErrorCode::InvalidArgument, "Courant number must be positive");
        require(courant <= cfl_safety, ErrorCode::CFLViolation, "Courant number exceeds the CFL safety factor");
        require(cells_x >= 2, ErrorCode::InvalidArgument, "need at least 2 cells");
        Grid2 g;
        g.cfl_safety = cfl_safety;
        if (auto iv = domain.as<Interval>())
        {
            g.origin = {iv->a, 0.0};
            g.nx = cells_x + 1;
            g.ny = 1;
            g.hx = (iv->b - iv->a) / cells_x;
        }
        else if (auto r = domain.as<Rectangle>())
        {
            require(cells_y >= 2, ErrorCode::InvalidArgument, "need at least 2 cells");
            g.origin = r->corner_min;
            g.nx = cells_x + 1;
            g.ny = cells_y + 1;
            g.hx = (r->corner_max.x - r->corner_min.x) / cells_x;
            g.hy = (r->corner_max.y - r->corner_min.y) / cells_y;
        }
        else
            throw Error(ErrorCode::ConfigUnsupported, "PDE grids exist only on intervals and rectangles");
        g.steps = std::max(1, static_cast<int>(std::ceil(T / (courant * g.dt_max()) - 1e-9)));
        g.dt = T / g.steps;
        return g;
    }

    Vec2 Grid2::node(int k) const
    {
        const int i = k % ix(), j = k / ix();
        return {origin.x + (i + 1) * hx, one_d() ? 0.0 : origin.y + (j + 1) * hy};
    }

    double Grid2::dt_max() const
    {
        return one_d() ? hx : 1.0 / std::sqrt(1.0 / (hx * hx) + 1.0 / (hy * hy));
    }

    void Grid2::check_cfl() const
    {
        require(dt > 0.0 && steps > 0, ErrorCode::InvalidArgument, "grid has no time steps");
        require(dt <= cfl_safety * dt_max() * (1.0 + 1e-12), ErrorCode::CFLViolation, "dt exceeds the CFL bound");
    }

    std::vector<int> region_mask(const Grid2& grid, const Region& region)
    {
        require(region.is_interior(), ErrorCode::BoundaryRegion, "observation masks need an interior region");
        std::vector<int> mask;
        for (int k = 0; k < grid.size(); ++k)
            if (region.contains(grid.node(k)))
                mask.push_back(k);
        return mask;
    }

    WaveSolver::WaveSolver(const Grid2& grid) : grid_(grid)
    {
        grid_.check_cfl();
        require(grid_.ix() >= 1 && grid_.iy() >= 1, ErrorCode::InvalidArgument, "grid has no interior nodes");
        basis_ = std::make_unique<SineBasis>(grid_.ix(), grid_.iy());
        lambda_.resize(grid_.size());
        const int ix = grid_.ix(), iy = grid_.iy();
        for (int l = 1; l <= iy; ++l)
            for (int k = 1; k <= ix; ++k)
            {
                const double sx = std::sin(k * pi / (2.0 * (ix + 1)));
                double value = 4.0 / (grid_.hx * grid_.hx) * sx * sx;
                if (!grid_.one_d())
                {
                    const double sy = std::sin(l * pi / (2.0 * (iy + 1)));
                    value += 4.0 / (grid_.hy * grid_.hy) * sy * sy;
                }
                lambda_[(k - 1) + ix * (l - 1)] = value;
            }
    }

    Field WaveSolver::apply_laplacian(const Field& u) const
    {
        require(u.size() == size(), ErrorCode::GridMismatch, "field size mismatch");
        const int ix = grid_.ix(), iy = grid_.iy();
        const double cx = 1.0 / (grid_.hx * grid_.hx);
        const double cy = grid_.one_d() ? 0.0 : 1.0 / (grid_.hy * grid_.hy);
        Field out(size());
        for (int j = 0; j < iy; ++j)
            for (int i = 0; i < ix; ++i)
            {
                const int k = i + ix * j;
                const double c = u[k];
                const double w = i > 0 ? u[k - 1] : 0.0;
                const double e = i + 1 < ix ? u[k + 1] : 0.0;
                double v = cx * (2.0 * c - w - e);
                if (cy != 0.0)
                {
                    const double s = j > 0 ? u[k - ix] : 0.0;
                    const double n = j + 1 < iy ? u[k + ix] : 0.0;
                    v += cy * (2.0 * c - s - n);
                }
                out[k] = v;
            }
        return out;
    }

    Field WaveSolver::apply_modified_laplacian(const Field& u) const
    {
        const Field ku = apply_laplacian(u);
        return ku - (0.25 * grid_.dt * grid_.dt) * apply_laplacian(ku);
    }

    Field WaveSolver::inverse_laplacian(const Field& u, int power) const
    {
        require(power >= 1, ErrorCode::InvalidArgument, "power must be positive");
        return basis_->apply_multiplier(u, lambda_.array().pow(-power).matrix());
    }

    Eigen::VectorXd WaveSolver::filter_multiplier(const FilterSpec& spec) const
    {
        const double c = spec.cutoff_fraction;
        require(c > 0.0 && c <= 1.0, ErrorCode::InvalidArgument, "cutoff_fraction must lie in (0, 1]");
        const int ix = grid_.ix(), iy = grid_.iy();
        Eigen::VectorXd m(size());
        for (int l = 1; l <= iy; ++l)
            for (int k = 1; k <= ix; ++k)
            {
                const double fx = static_cast<double>(k) / grid_.nx;
                const double fy = grid_.one_d() ? 0.0 : static_cast<double>(l) / grid_.ny;
                // a full cutoff keeps every mode, including the corner of the 2-d spectrum
                const bool keep = c >= 1.0 || std::sqrt(fx * fx + fy * fy) <= c;
                m[(k - 1) + ix * (l - 1)] = keep ? 1.0 : 0.0;
            }
        return m;
    }

    Field WaveSolver::filter(const Field& u, const FilterSpec& spec) const
    {
        if (spec.cutoff_fraction >= 1.0)
        {
            require(u.size() == size(), ErrorCode::GridMismatch, "field size mismatch");
            return u;
        }
        return basis_->apply_multiplier(u, filter_multiplier(spec));
    }

    WaveState WaveSolver::filter(const WaveState& s, const FilterSpec& spec) const
    {
        return {filter(s.u0, spec), filter(s.u1, spec)};
    }

    double WaveSolver::energy_norm_sq(const WaveState& s) const
    {
        return inner(s.u0, apply_laplacian(s.u0)) + inner(s.u1, s.u1);
    }

    double WaveSolver::weak_norm_sq(const WaveState& s) const
    {
        return inner(s.u0, s.u0) + inner(s.u1, inverse_laplacian(s.u1));
    }

    double WaveSolver::leapfrog_energy(const Field& prev, const Field& cur) const
    {
        const Field v = (cur - prev) / grid_.dt;
        return 0.5 * inner(v, v) + 0.5 * inner(apply_laplacian(cur), prev);
    }

    void WaveSolver::step(Field& prev, Field& cur, const Field * source) const
    {
        require(prev.size() == size() && cur.size() == size(), ErrorCode::GridMismatch, "field size mismatch");
        const int ix = grid_.ix(), iy = grid_.iy();
        const double dt2 = grid_.dt * grid_.dt;
        const double cx = dt2 / (grid_.hx * grid_.hx);
        const double cy = grid_.one_d() ? 0.0 : dt2 / (grid_.hy * grid_.hy);
        // the new level overwrites prev in place: prev[k] is read only at k
        for (int j = 0; j < iy; ++j)
            for (int i = 0; i < ix; ++i)
            {
                const int k = i + ix * j;
                const double c = cur[k];
                const double w = i > 0 ? cur[k - 1] : 0.0;
                const double e = i + 1 < ix ? cur[k + 1] : 0.0;
                double lap = cx * (2.0 * c - w - e);
                if (cy != 0.0)
                {
                    const double s = j > 0 ? cur[k - ix] : 0.0;
                    const double n = j + 1 < iy ? cur[k + ix] : 0.0;
                    lap += cy * (2.0 * c - s - n);
                }
                double next = 2.0 * c - prev[k] - lap;
                if (source)
                    next += dt2 * (*source)[k];
                prev[k] = next;
            }
        prev.swap(cur);
    }

    Field WaveSolver::backward_start(const WaveState& s) const
    {
        require(s.u0.size() == size() && s.u1.size() == size(), ErrorCode::GridMismatch, "state size mismatch");
        const double dt = grid_.dt;
        return s.u0 - dt * s.u1 - (0.5 * dt * dt) * apply_laplacian(s.u0);
    }

    double WaveSolver::spacetime_inner(const SpaceTime& a, const SpaceTime& b) const
    {
        require(a.rows() == grid_.steps + 1 && b.rows() == a.rows() && a.cols() == b.cols(), ErrorCode::GridMismatch,
                "space-time field shape mismatch");
        double sum = 0.0;
        for (int n = 0; n <= grid_.steps; ++n)
            sum += trapezoid_weight(n, grid_.steps) * a.row(n).dot(b.row(n));
        return grid_.dt * grid_.volume() * sum;
    }

    Observation WaveSolver::observe(const WaveState& s, const std::vector<int>& mask, Quantity q) const
    {
        require(q == Quantity::U || q == Quantity::DtU, ErrorCode::InvalidArgument,
                "interior observation supports u and dt_u only");
        const int M = grid_.steps;
        const double inv2dt = 0.5 / grid_.dt;
        Observation obs;
        obs.values.resize(M + 1, static_cast<Eigen::Index>(mask.size()));
        Field prev = backward_start(s);
        Field cur = s.u0;
        Field older(size());
        for (int n = 0; n <= M; ++n)
        {
            older = prev;
            step(prev, cur);
            // prev = u^n, cur = u^{n+1}, older = u^{n-1}
            for (std::size_t j = 0; j < mask.size(); ++j)
            {
                const int k = mask[j];
                obs.values(n, static_cast<Eigen::Index>(j)) = q == Quantity::U ? prev[k] : (cur[k] - older[k]) * inv2dt;
            }
        }
        obs.final_state = {prev, (cur - older) * inv2dt};
        obs.norm_sq = spacetime_inner(obs.values, obs.values);
        return obs;
    }

    Observation WaveSolver::observe(const WaveState& s, const Region& omega, Quantity q) const
    {
        return observe(s, region_mask(grid_, omega), q);
    }

    WaveState WaveSolver::solve_forward_with_source(const std::vector<int>& mask, const SpaceTime& v) const
    {
        const int M = grid_.steps;
        require(v.rows() == M + 1 && v.cols() == static_cast<Eigen::Index>(mask.size()), ErrorCode::GridMismatch,
                "source shape does not match the mask and time grid");
        Field prev = Field::Zero(size()), cur = Field::Zero(size()), older(size()), src = Field::Zero(size());
        for (int n = 0; n <= M; ++n)
        {
            const double w = trapezoid_weight(n, M);
            for (std::size_t j = 0; j < mask.size(); ++j)
                src[mask[j]] = w * v(n, static_cast<Eigen::Index>(j));
            older = prev;
            step(prev, cur, &src);
        }
        // the correction makes the terminal velocity the exact dual of observing u^0..u^M
        Field velocity = (cur - older) * (0.5 / grid_.dt) + (0.5 * grid_.dt) * src;
        return {prev, velocity};
    }

    WaveState WaveSolver::observe_adjoint(const std::vector<int>& mask, const SpaceTime& g, Quantity q) const
    {
        require(q == Quantity::U || q == Quantity::DtU, ErrorCode::InvalidArgument,
                "interior observation supports u and dt_u only");
        const SpaceTime reversed = g.colwise().reverse();
        const WaveState y = solve_forward_with_source(mask, reversed);
        if (q == Quantity::U)
            return {y.u1, y.u0};
        return {-apply_modified_laplacian(y.u0), y.u1};
    }
} // namespace regobs
