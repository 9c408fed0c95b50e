#include "regobs/wave1d.hpp"

#include <cmath>

#include "regobs/billiard.hpp"
#include "regobs/errors.hpp"

namespace regobs
{
    namespace
    {
        void require_state(const LineState& s)
        {
            require(s.grid.cells >= 2, ErrorCode::InvalidArgument, "line grid needs at least 2 cells");
            require(s.u0.size() == s.grid.nodes() && s.u1.size() == s.grid.nodes(), ErrorCode::GridMismatch,
                    "state does not match its grid");
        }

        /// Solves K x = f for the interior Dirichlet Laplacian (2, -1, -1) / h^2 by the Thomas algorithm.
        Eigen::VectorXd solve_laplacian(const Eigen::VectorXd& f, double h)
        {
            const int n = static_cast<int>(f.size());
            Eigen::VectorXd c(n), d(n), x(n);
            const double diag = 2.0 / (h * h), off = -1.0 / (h * h);
            c[0] = off / diag;
            d[0] = f[0] / diag;
            for (int i = 1; i < n; ++i)
            {
                const double m = diag - off * c[i - 1];
                c[i] = off / m;
                d[i] = (f[i] - off * d[i - 1]) / m;
            }
            x[n - 1] = d[n - 1];
            for (int i = n - 2; i >= 0; --i)
                x[i] = d[i] - c[i] * x[i + 1];
            return x;
        }

        int whole_steps(double span, double h)
        {
            const double m = std::round(span / h);
            require(span >= -1e-12 && std::abs(m * h - span) <= 1e-9 * std::max(1.0, std::abs(span)),
                    ErrorCode::NonCommensurateTime, "time span is not a whole number of grid steps");
            return static_cast<int>(m);
        }

        double trap(int i, int last) { return (i == 0 || i == last) ? 0.5 : 1.0; }
    } // namespace

    LineGrid LineGrid::on(const Domain& domain, int cells)
    {
        auto iv = domain.as<Interval>();
        require(iv != nullptr, ErrorCode::ConfigUnsupported, "line grids need an interval domain");
        require(cells >= 2, ErrorCode::InvalidArgument, "line grid needs at least 2 cells");
        return {iv->a, iv->b, cells};
    }

    double energy_norm_sq(const LineState& s)
    {
        require_state(s);
        const double h = s.grid.h();
        double grad = 0.0;
        for (int i = 0; i < s.grid.cells; ++i)
        {
            const double d = (s.u0[i + 1] - s.u0[i]) / h;
            grad += d * d;
        }
        return h * grad + h * s.u1.squaredNorm();
    }

    double weak_norm_sq(const LineState& s)
    {
        require_state(s);
        const double h = s.grid.h();
        const Eigen::VectorXd f = interior_of(s.u1);
        return h * s.u0.squaredNorm() + h * f.dot(solve_laplacian(f, h));
    }

    Eigen::VectorXd with_endpoints(const Eigen::VectorXd& interior)
    {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(interior.size() + 2);
        full.segment(1, interior.size()) = interior;
        return full;
    }

    Eigen::VectorXd interior_of(const Eigen::VectorXd& full)
    {
        require(full.size() >= 3, ErrorCode::GridMismatch, "vector too short for interior nodes");
        return full.segment(1, full.size() - 2);
    }

    double TransportState::energy() const
    {
        const int last = grid.cells;
        double sum = 0.0;
        for (int i = 0; i <= last; ++i)
            sum += trap(i, last) * (w_plus[i] * w_plus[i] + w_minus[i] * w_minus[i]);
        return 0.25 * grid.h() * sum;
    }

    TransportState to_transport(const LineState& s)
    {
        require_state(s);
        const int N = s.grid.cells;
        const double h = s.grid.h();
        TransportState w{s.grid, Eigen::VectorXd(N + 1), Eigen::VectorXd(N + 1), 0.0};
        for (int i = 0; i <= N; ++i)
        {
            double ux;
            if (i == 0)
                ux = (s.u0[1] - s.u0[0]) / h;
            else if (i == N)
                ux = (s.u0[N] - s.u0[N - 1]) / h;
            else
                ux = (s.u0[i + 1] - s.u0[i - 1]) / (2.0 * h);
            w.w_plus[i] = s.u1[i] - ux;
            w.w_minus[i] = s.u1[i] + ux;
        }
        return w;
    }

    void step_exact(TransportState& s)
    {
        const int N = s.grid.cells;
        auto& p = s.w_plus;
        auto& m = s.w_minus;
        const double p_exit = p[N - 1];
        const double m_exit = m[1];
        for (int i = N; i >= 1; --i)
            p[i] = p[i - 1];
        for (int i = 0; i < N; ++i)
            m[i] = m[i + 1];
        p[0] = -m_exit;
        m[N] = -p_exit;
        s.t += s.grid.h();
    }

    TransportState evolve_exact(TransportState s, double t_target)
    {
        const int steps = whole_steps(t_target - s.t, s.grid.h());
        const double t0 = s.t;
        for (int n = 0; n < steps; ++n)
            step_exact(s);
        s.t = t0 + steps * s.grid.h();
        return s;
    }

    TransportState reversed(const TransportState& s)
    {
        return {s.grid, -s.w_minus, -s.w_plus, s.t};
    }

    TransportState transport_from_leapfrog(const LineGrid& grid, const Eigen::VectorXd& prev, const Eigen::VectorXd& cur,
                                           double t)
    {
        const int N = grid.cells;
        require(prev.size() == N + 1 && cur.size() == N + 1, ErrorCode::GridMismatch, "leapfrog levels do not match grid");
        const double h = grid.h();
        TransportState w{grid, Eigen::VectorXd(N + 1), Eigen::VectorXd(N + 1), t};
        for (int i = 0; i < N; ++i)
            w.w_plus[i] = (cur[i] - prev[i + 1]) / h;
        for (int i = 1; i <= N; ++i)
            w.w_minus[i] = (cur[i] - prev[i - 1]) / h;
        w.w_minus[0] = -w.w_plus[0];
        w.w_plus[N] = -w.w_minus[N];
        return w;
    }

    LineRecord observe(const LineState& s, const Region& region, double T, Quantity q)
    {
        require_state(s);
        const LineGrid& g = s.grid;
        const int N = g.cells;
        const double h = g.h();
        const int M = whole_steps(T, h);

        std::vector<int> nodes;
        double space_weight = h;
        if (q == Quantity::DnUBoundary)
        {
            require(!region.is_interior(), ErrorCode::InteriorRegion, "normal derivatives are observed on the boundary");
            space_weight = 1.0;
            if (region.contains(Vec2(g.a)))
                nodes.push_back(0);
            if (region.contains(Vec2(g.b)))
                nodes.push_back(N);
        }
        else
        {
            require(region.is_interior(), ErrorCode::BoundaryRegion, "interior quantities need an interior region");
            for (int i = 0; i <= N; ++i)
                if (region.contains(Vec2(g.x(i))))
                    nodes.push_back(i);
        }

        LineRecord rec;
        rec.values.resize(M + 1, static_cast<Eigen::Index>(nodes.size()));
        for (int i : nodes)
            rec.positions.push_back(g.x(i));

        TransportState w = to_transport(s);
        Eigen::VectorXd u = s.u0;
        Eigen::VectorXd ut = 0.5 * (w.w_plus + w.w_minus);
        for (int n = 0; n <= M; ++n)
        {
            rec.times.push_back(n * h);
            for (std::size_t j = 0; j < nodes.size(); ++j)
            {
                const int i = nodes[j];
                double v;
                if (q == Quantity::U)
                    v = u[i];
                else if (q == Quantity::DtU)
                    v = ut[i];
                else
                {
                    const double ux = 0.5 * (w.w_minus[i] - w.w_plus[i]);
                    v = i == 0 ? -ux : ux;
                }
                rec.values(n, static_cast<Eigen::Index>(j)) = v;
            }
            if (n == M)
                break;
            step_exact(w);
            const Eigen::VectorXd ut_next = 0.5 * (w.w_plus + w.w_minus);
            u += (0.5 * h) * (ut + ut_next);
            ut = ut_next;
        }

        double sum = 0.0;
        for (int n = 0; n <= M; ++n)
            sum += trap(n, M) * rec.values.row(n).squaredNorm();
        rec.norm_sq = h * space_weight * sum;
        return rec;
    }

    DirectionalSplit directional_energy_split(const LineState& s, const Region& omega, double T)
    {
        return directional_energy_split(to_transport(s), omega, T);
    }

    DirectionalSplit directional_energy_split(const TransportState& w0, const Region& omega, double T)
    {
        require(omega.as<IntervalUnion>() != nullptr, ErrorCode::ConfigUnsupported,
                "directional wedges need an interval-union omega");
        const LineGrid& g = w0.grid;
        const int N = g.cells;
        const double h = g.h();
        const int M = whole_steps(T, h);
        const Domain domain = Domain::interval(g.a, g.b);

        // membership of the phase point (0, x_i, +-1) in the set of rays meeting omega before T;
        // membership is constant along rays, so the flags travel with the exact transport
        TransportState flags{g, Eigen::VectorXd(N + 1), Eigen::VectorXd(N + 1), 0.0};
        for (int i = 0; i <= N; ++i)
        {
            const Vec2 x(g.x(i));
            flags.w_plus[i] = trace_to_region(domain, {x, {1.0, 0.0}, 0.0}, omega, T).hit() ? 1.0 : 0.0;
            flags.w_minus[i] = trace_to_region(domain, {x, {-1.0, 0.0}, 0.0}, omega, T).hit() ? 1.0 : 0.0;
        }

        DirectionalSplit out;
        TransportState w = w0;
        for (int n = 0; n <= M; ++n)
        {
            const double wt = trap(n, M) * h * h * 0.25;
            for (int i = 0; i <= N; ++i)
            {
                const double p = wt * trap(i, N) * w.w_plus[i] * w.w_plus[i];
                const double m = wt * trap(i, N) * w.w_minus[i] * w.w_minus[i];
                out.e_plus_total += p;
                out.e_minus_total += m;
                if (flags.w_plus[i] != 0.0)
                    out.e_plus_in_rplus += p;
                if (flags.w_minus[i] != 0.0)
                    out.e_minus_in_rminus += m;
            }
            if (n == M)
                break;
            step_exact(w);
            // flags carry no sign
            const double p0 = flags.w_minus[1], mN = flags.w_plus[N - 1];
            step_exact(flags);
            flags.w_plus[0] = p0;
            flags.w_minus[N] = mN;
        }
        return out;
    }
} // namespace regobs
