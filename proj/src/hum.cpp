#include "regobs/hum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "regobs/billiard.hpp"
#include "regobs/errors.hpp"
#include "regobs/observability.hpp"
#include "regobs/reachability.hpp"

namespace regobs
{
    namespace
    {
        /// Smallest Ritz value of the Lanczos matrix built from the CG step lengths and ratios.
        double lanczos_min(const std::vector<double>& alpha, const std::vector<double>& beta)
        {
            const Eigen::Index k = static_cast<Eigen::Index>(alpha.size());
            if (k == 0)
                return 0.0;
            Eigen::VectorXd diag(k), sub(std::max<Eigen::Index>(k - 1, 0));
            for (Eigen::Index i = 0; i < k; ++i)
            {
                diag[i] = 1.0 / alpha[i] + (i > 0 ? beta[i - 1] / alpha[i - 1] : 0.0);
                if (i + 1 < k)
                    sub[i] = std::sqrt(beta[i]) / alpha[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff();
        }
    } // namespace

    const char * hum_variant_name(HumVariant v)
    {
        switch (v)
        {
        case HumVariant::Plain:
            return "J";
        case HumVariant::Eps:
            return "J_eps";
        case HumVariant::Chi:
            return "J_chi";
        }
        return "J";
    }

    HumVariant parse_hum_variant(const std::string& name)
    {
        if (name == "J")
            return HumVariant::Plain;
        if (name == "J_eps")
            return HumVariant::Eps;
        if (name == "J_chi")
            return HumVariant::Chi;
        throw Error(ErrorCode::Config, "unknown control variant '" + name + "'");
    }

    HumSolver::HumSolver(const ControlSetup& setup)
        : setup_(setup),
          solver_(observation_grid(setup.domain, setup.cells_x, setup.cells_y, setup.T, setup.courant))
    {
        require(setup.omega && setup.region, ErrorCode::Config, "control problems need omega and O");
        require(setup.margin_cells >= 1, ErrorCode::InvalidArgument, "chi margin must be at least one cell");
        const Grid2& g = solver_.grid();
        omega_mask_ = region_mask(g, *setup.omega);
        require(!omega_mask_.empty(), ErrorCode::EmptyRegion, "omega contains no grid node");
        require(setup.region->is_interior(), ErrorCode::BoundaryRegion, "O must be an interior region");

        const double margin = setup.margin_cells * (g.one_d() ? g.hx : std::max(g.hx, g.hy));
        chi_ = Field::Zero(g.size());
        for (int k = 0; k < g.size(); ++k)
        {
            const Vec2 x = g.node(k);
            if (setup.region->contains(x))
            {
                chi_[k] = 1.0;
                o_mask_.push_back(k);
                o1_mask_.push_back(k);
                continue;
            }
            const double d = setup.region->distance(x);
            if (d < margin)
            {
                chi_[k] = 0.5 * (1.0 + std::cos(pi * d / margin));
                o1_mask_.push_back(k);
            }
        }
        require(!o_mask_.empty(), ErrorCode::EmptyRegion, "O contains no grid node");

        if (setup.verify_geometry)
        {
            DirectionSample dirs;
            dirs.count = setup.chi_directions;
            const auto directions = dirs.directions(setup.domain.dimension());
            for (int k : o1_mask_)
                for (const Vec2& d : directions)
                    require(trace_to_region(setup.domain, {g.node(k), d, 0.0}, *setup.omega, setup.T).hit(),
                            ErrorCode::ChiSupportViolation,
                            "the support of chi leaves the set reached from omega before T");
        }

        q_local_ = prolate_basis(solver_, o1_mask_, setup.filter, setup.leakage);
        std::vector<int> all(static_cast<std::size_t>(g.size()));
        for (int k = 0; k < g.size(); ++k)
            all[static_cast<std::size_t>(k)] = k;
        q_global_ = prolate_basis(solver_, all, setup.filter, setup.leakage);
        require(q_local_.cols() > 0, ErrorCode::InvalidArgument, "adjoint-data space near O is trivial");
    }

    const Eigen::MatrixXd& HumSolver::basis(HumVariant v) const
    {
        return v == HumVariant::Plain ? q_local_ : q_global_;
    }

    WaveState HumSolver::embed(const Eigen::VectorXd& coords, HumVariant v) const
    {
        const Eigen::MatrixXd& Q = basis(v);
        const Eigen::Index m = Q.cols();
        require(coords.size() == 2 * m, ErrorCode::GridMismatch, "coordinate vector has the wrong size");
        return {Q * coords.head(m), Q * coords.tail(m)};
    }

    SpaceTime HumSolver::control_from_adjoint(const WaveState& z) const
    {
        // u(t) = w(T - t), where w starts from (z0, -z1)
        const SpaceTime w = solver_.observe({z.u0, -z.u1}, omega_mask_, Quantity::U).values;
        return w.colwise().reverse();
    }

    Eigen::VectorXd HumSolver::assemble_rhs(const WaveState& target, HumVariant v) const
    {
        require(target.u0.size() == solver_.size() && target.u1.size() == solver_.size(), ErrorCode::GridMismatch,
                "target does not match the grid");
        const Eigen::MatrixXd& Q = basis(v);
        const Eigen::Index m = Q.cols();
        const double vol = solver_.grid().volume();
        Eigen::VectorXd b(2 * m);
        if (v == HumVariant::Eps)
        {
            b.head(m) = vol * (Q.transpose() * target.u1);
            b.tail(m) = -vol * (Q.transpose() * target.u0);
        }
        else
        {
            b.head(m) = vol * (Q.transpose() * chi_.cwiseProduct(target.u1));
            b.tail(m) = -vol * (Q.transpose() * chi_.cwiseProduct(target.u0));
        }
        return b;
    }

    Eigen::VectorXd HumSolver::apply(const Eigen::VectorXd& coords, HumVariant v, double epsilon) const
    {
        const Eigen::MatrixXd& Q = basis(v);
        const Eigen::Index m = Q.cols();
        const double vol = solver_.grid().volume();
        const WaveState z = embed(coords, v);
        const WaveState y = solver_.solve_forward_with_source(omega_mask_, control_from_adjoint(z));
        Field p0 = y.u1, p1 = -y.u0;
        if (v != HumVariant::Plain)
        {
            const Field off = Field::Ones(solver_.size()) - chi_;
            const Field a0 = off.cwiseProduct(z.u0), a1 = off.cwiseProduct(z.u1);
            if (v == HumVariant::Eps)
            {
                p0 += (epsilon * epsilon) * off.cwiseProduct(a0);
                p1 += (epsilon * epsilon) * off.cwiseProduct(solver_.inverse_laplacian(a1, 1));
            }
            else
            {
                p0 += off.cwiseProduct(solver_.inverse_laplacian(a0, 1));
                p1 += off.cwiseProduct(solver_.inverse_laplacian(a1, 2));
            }
        }
        Eigen::VectorXd out(2 * m);
        out.head(m) = vol * (Q.transpose() * p0);
        out.tail(m) = vol * (Q.transpose() * p1);
        return out;
    }

    void HumSolver::check_time(HumVariant v) const
    {
        if (!setup_.verify_geometry)
            return;
        if (v == HumVariant::Eps)
        {
            const double uc = uc_time(setup_.domain, *setup_.omega);
            require(setup_.T > uc, ErrorCode::TimeTooShort, "T must exceed the unique-continuation time of omega");
            return;
        }
        DirectionSample dirs;
        dirs.count = setup_.chi_directions;
        dirs.adaptive = false;
        const auto ct = critical_time(setup_.domain, *setup_.region, *setup_.omega, dirs, 2.0 * setup_.T);
        require(!ct.infinite && ct.value < setup_.T, ErrorCode::TimeTooShort, "T must exceed the critical time of O");
    }

    double HumSolver::energy_on_o(const WaveState& s) const
    {
        const Grid2& g = solver_.grid();
        std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
        for (int k : o_mask_)
            in[static_cast<std::size_t>(k)] = 1;
        double sum = 0.0;
        for (int k : o_mask_)
        {
            sum += s.u1[k] * s.u1[k];
            const int i = k % g.ix(), j = k / g.ix();
            if (i + 1 < g.ix() && in[static_cast<std::size_t>(k + 1)])
            {
                const double d = (s.u0[k + 1] - s.u0[k]) / g.hx;
                sum += d * d;
            }
            if (!g.one_d() && j + 1 < g.iy() && in[static_cast<std::size_t>(k + g.ix())])
            {
                const double d = (s.u0[k + g.ix()] - s.u0[k]) / g.hy;
                sum += d * d;
            }
        }
        return std::sqrt(g.volume() * sum);
    }

    ControlSolution HumSolver::solve(const WaveState& target, HumVariant v, double epsilon, const CgOptions& cg) const
    {
        require(cg.tol > 0.0 && cg.max_iterations >= 1, ErrorCode::InvalidArgument, "invalid CG options");
        require(v != HumVariant::Eps || epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
        check_time(v);

        const Eigen::MatrixXd& Q = basis(v);
        const Eigen::Index m = Q.cols();
        const double vol = solver_.grid().volume();
        // diag(I, Q^T K Q) mirrors the L2 x H^-1 scaling of the operator
        auto precondition = [&](const Eigen::VectorXd& r) {
            Eigen::VectorXd z(2 * m);
            z.head(m) = r.head(m);
            z.tail(m) = Q.transpose() * solver_.apply_laplacian(Q * r.tail(m));
            return z;
        };

        const Eigen::VectorXd b = assemble_rhs(target, v);
        ControlSolution out;
        out.variant = v;
        out.epsilon = epsilon;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * m);
        const double b_norm = std::sqrt(std::max(b.dot(precondition(b)), 0.0));
        if (b_norm > 0.0)
        {
            Eigen::VectorXd r = b, z = precondition(r), p = z;
            double rz = r.dot(z);
            std::vector<double> alpha, beta;
            out.residual_history.push_back(1.0);
            out.functional_history.push_back(0.0);
            bool converged = false;
            for (int it = 1; it <= cg.max_iterations; ++it)
            {
                const Eigen::VectorXd Ap = apply(p, v, epsilon);
                const double a = rz / p.dot(Ap);
                x += a * p;
                r -= a * Ap;
                z = precondition(r);
                const double rz_next = r.dot(z);
                const double rel = std::sqrt(std::max(rz_next, 0.0)) / b_norm;
                out.residual_history.push_back(rel);
                out.functional_history.push_back(out.functional_history.back() - 0.5 * a * rz);
                alpha.push_back(a);
                out.iterations = it;
                if (rel <= cg.tol)
                {
                    converged = true;
                    break;
                }
                const double be = rz_next / rz;
                beta.push_back(be);
                p = z + be * p;
                rz = rz_next;
            }
            if (!converged)
                throw ConvergenceError("conjugate gradients did not reach the tolerance", cg.max_iterations,
                                       out.residual_history.back());
            out.lambda_estimate = lanczos_min(alpha, beta) / vol;
            out.coercivity_warning = out.lambda_estimate < 1e-8;
        }

        out.adjoint = embed(x, v);
        out.v = control_from_adjoint(out.adjoint);
        out.terminal = solver_.solve_forward_with_source(omega_mask_, out.v);
        out.control_norm = std::sqrt(solver_.spacetime_inner(out.v, out.v));
        const WaveState err{out.terminal.u0 - target.u0, out.terminal.u1 - target.u1};
        out.projection_error_on_O = energy_on_o(err);
        const double target_norm = std::sqrt(solver_.energy_norm_sq(target));
        out.relative_projection_error = target_norm > 0.0 ? out.projection_error_on_O / target_norm : 0.0;
        out.global_error = std::sqrt(solver_.energy_norm_sq(err));

        if (v == HumVariant::Chi)
        {
            const Field off = Field::Ones(solver_.size()) - chi_;
            const Field e0 = out.terminal.u0 - chi_.cwiseProduct(target.u0) -
                             off.cwiseProduct(solver_.inverse_laplacian(off.cwiseProduct(out.adjoint.u1), 2));
            const Field e1 = out.terminal.u1 - chi_.cwiseProduct(target.u1) +
                             off.cwiseProduct(solver_.inverse_laplacian(off.cwiseProduct(out.adjoint.u0), 1));
            const double scale = std::sqrt(target.u0.squaredNorm() + target.u1.squaredNorm());
            const double res = std::sqrt((Q.transpose() * e0).squaredNorm() + (Q.transpose() * e1).squaredNorm());
            out.identity_residual = scale > 0.0 ? res / scale : res;
        }
        return out;
    }

    ControlSolution solve_control(const HumSolver& s, const WaveState& target, const CgOptions& cg)
    {
        return s.solve(target, HumVariant::Plain, 0.0, cg);
    }

    ControlSolution solve_control_eps(const HumSolver& s, const WaveState& target, double epsilon, const CgOptions& cg)
    {
        return s.solve(target, HumVariant::Eps, epsilon, cg);
    }

    ControlSolution solve_control_chi(const HumSolver& s, const WaveState& target, const CgOptions& cg)
    {
        return s.solve(target, HumVariant::Chi, 0.0, cg);
    }
} // namespace regobs
