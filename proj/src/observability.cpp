#include "regobs/observability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "regobs/errors.hpp"

namespace regobs
{
    namespace
    {
        Grid2 checked_grid(const GramianSpec& spec)
        {
            require(spec.omega && spec.support, ErrorCode::Config, "Gramian needs omega and a support region");
            return observation_grid(spec.domain, spec.cells_x, spec.cells_y, spec.T, spec.courant);
        }

        /// M-orthonormal basis of span(S) with rank-revealing truncation.
        Eigen::MatrixXd orthonormal_coefficients(const Eigen::MatrixXd& gram)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()));
            const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
            std::vector<int> keep;
            for (int k = 0; k < gram.rows(); ++k)
                if (es.eigenvalues()[k] > 1e-12 * top)
                    keep.push_back(k);
            Eigen::MatrixXd Z(gram.rows(), static_cast<Eigen::Index>(keep.size()));
            for (std::size_t c = 0; c < keep.size(); ++c)
                Z.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) / std::sqrt(es.eigenvalues()[keep[c]]);
            return Z;
        }
    } // namespace

    Grid2 observation_grid(const Domain& domain, int cells_x, int cells_y, double T, double courant)
    {
        // leapfrog at Courant number 1 is exact in 1-d, so the 1-d safety factor may reach 1
        const double safety = domain.dimension() == 1 ? std::max(0.95, std::min(courant, 1.0)) : 0.95;
        return Grid2::make(domain, cells_x, cells_y, T, courant, safety);
    }

    Eigen::MatrixXd prolate_basis(const WaveSolver& solver, const std::vector<int>& support, const FilterSpec& filter,
                                  double leakage)
    {
        const int n = solver.size();
        const int m = static_cast<int>(support.size());
        if (filter.cutoff_fraction >= 1.0)
        {
            Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, m);
            for (int j = 0; j < m; ++j)
                Q(support[j], j) = 1.0;
            return Q;
        }
        const Eigen::VectorXd mult = solver.filter_multiplier(filter);
        Eigen::MatrixXd B(m, m);
        Field e = Field::Zero(n);
        for (int j = 0; j < m; ++j)
        {
            e[support[j]] = 1.0;
            const Field f = solver.basis().apply_multiplier(e, mult);
            e[support[j]] = 0.0;
            for (int i = 0; i < m; ++i)
                B(i, j) = f[support[i]];
        }
        B = 0.5 * (B + B.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
        std::vector<int> keep;
        for (int k = m - 1; k >= 0; --k)
            if (es.eigenvalues()[k] >= 1.0 - leakage)
                keep.push_back(k);
        Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c)
        {
            Eigen::VectorXd v = es.eigenvectors().col(keep[c]);
            Eigen::Index arg;
            v.cwiseAbs().maxCoeff(&arg);
            if (v[arg] < 0.0)
                v = -v;
            for (int i = 0; i < m; ++i)
                Q(support[i], static_cast<Eigen::Index>(c)) = v[i];
        }
        return Q;
    }

    const char * data_norm_name(DataNorm n)
    {
        return n == DataNorm::Energy ? "energy" : "weak";
    }

    DataNorm parse_data_norm(const std::string& name)
    {
        if (name == "energy")
            return DataNorm::Energy;
        if (name == "weak")
            return DataNorm::Weak;
        throw Error(ErrorCode::Config, "unknown data norm '" + name + "'");
    }

    Gramian::Gramian(const GramianSpec& spec) : spec_(spec), solver_(checked_grid(spec))
    {
        require(spec.quantity == Quantity::U || spec.quantity == Quantity::DtU, ErrorCode::InvalidArgument,
                "the Gramian observes u or dt_u");
        require(spec.leakage > 0.0 && spec.leakage < 1.0, ErrorCode::InvalidArgument, "leakage must lie in (0, 1)");
        omega_mask_ = region_mask(solver_.grid(), *spec.omega);
        support_mask_ = region_mask(solver_.grid(), *spec.support);
        require(!support_mask_.empty(), ErrorCode::EmptyRegion, "support region contains no grid node");
        Q_ = prolate_basis(solver_, support_mask_, spec.filter, spec.leakage);
        require(Q_.cols() > 0, ErrorCode::InvalidArgument, "admissible subspace is trivial");

        const int m = static_cast<int>(Q_.cols());
        const double vol = solver_.grid().volume();
        Eigen::MatrixXd KQ(Q_.rows(), m);
        for (int c = 0; c < m; ++c)
            KQ.col(c) = spec.norm == DataNorm::Energy ? solver_.apply_laplacian(Q_.col(c))
                                                      : solver_.inverse_laplacian(Q_.col(c));
        Eigen::MatrixXd QKQ = Q_.transpose() * KQ;
        QKQ = 0.5 * (QKQ + QKQ.transpose()).eval();
        metric_ = Eigen::MatrixXd::Zero(2 * m, 2 * m);
        if (spec.norm == DataNorm::Energy)
        {
            metric_.topLeftCorner(m, m) = vol * QKQ;
            metric_.bottomRightCorner(m, m) = vol * Eigen::MatrixXd::Identity(m, m);
        }
        else
        {
            metric_.topLeftCorner(m, m) = vol * Eigen::MatrixXd::Identity(m, m);
            metric_.bottomRightCorner(m, m) = vol * QKQ;
        }
    }

    WaveState Gramian::embed(const Eigen::VectorXd& coords) const
    {
        const Eigen::Index m = Q_.cols();
        require(coords.size() == 2 * m, ErrorCode::GridMismatch, "coordinate vector has the wrong size");
        return {Q_ * coords.head(m), Q_ * coords.tail(m)};
    }

    Eigen::VectorXd Gramian::coordinates(const WaveState& s) const
    {
        const Eigen::Index m = Q_.cols();
        Eigen::VectorXd c(2 * m);
        c.head(m) = Q_.transpose() * s.u0;
        c.tail(m) = Q_.transpose() * s.u1;
        return c;
    }

    WaveState Gramian::apply(const WaveState& x) const
    {
        const auto obs = solver_.observe(x, omega_mask_, spec_.quantity);
        return embed(coordinates(solver_.observe_adjoint(omega_mask_, obs.values, spec_.quantity)));
    }

    Eigen::VectorXd Gramian::apply_reduced(const Eigen::VectorXd& coords) const
    {
        const auto obs = solver_.observe(embed(coords), omega_mask_, spec_.quantity);
        return solver_.grid().volume() * coordinates(solver_.observe_adjoint(omega_mask_, obs.values, spec_.quantity));
    }

    Eigen::MatrixXd Gramian::assemble() const
    {
        const int n = dimension();
        Eigen::MatrixXd A(n, n);
        for (int j = 0; j < n; ++j)
            A.col(j) = apply_reduced(Eigen::VectorXd::Unit(n, j));
        return 0.5 * (A + A.transpose());
    }

    double Gramian::observed_norm_sq(const WaveState& s) const
    {
        return solver_.observe(s, omega_mask_, spec_.quantity).norm_sq;
    }

    double Gramian::data_norm_sq(const WaveState& s) const
    {
        return spec_.norm == DataNorm::Energy ? solver_.energy_norm_sq(s) : solver_.weak_norm_sq(s);
    }

    RayleighResult dense_min_rayleigh(const Gramian& g)
    {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(g.assemble(), g.metric());
        require(es.info() == Eigen::Success, ErrorCode::NoConvergence, "dense generalized eigensolver failed");
        RayleighResult r;
        r.lambda_min = es.eigenvalues()[0];
        r.minimizer = g.embed(es.eigenvectors().col(0));
        return r;
    }

    RayleighResult min_rayleigh(const Gramian& g, const RayleighOptions& opt)
    {
        require(opt.max_iterations >= 1 && opt.tol > 0.0 && opt.block_size >= 1, ErrorCode::InvalidArgument,
                "invalid eigen-iteration options");
        const int n = g.dimension();
        const int b = std::min(opt.block_size, n);
        const Eigen::MatrixXd& M = g.metric();
        const Eigen::LLT<Eigen::MatrixXd> precond(M);
        require(precond.info() == Eigen::Success, ErrorCode::InvalidArgument, "data-norm metric is not positive definite");
        const double m_norm = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();

        auto apply_block = [&](const Eigen::MatrixXd& X) {
            Eigen::MatrixXd AX(n, X.cols());
            for (Eigen::Index c = 0; c < X.cols(); ++c)
                AX.col(c) = g.apply_reduced(X.col(c));
            return AX;
        };

        std::mt19937_64 rng(opt.seed);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd X(n, b);
        for (int c = 0; c < b; ++c)
            for (int i = 0; i < n; ++i)
                X(i, c) = normal(rng);
        Eigen::MatrixXd AX = apply_block(X);

        // Rayleigh-Ritz on span(S); returns the b lowest Ritz pairs
        Eigen::VectorXd theta(b);
        double top = 0.0;
        auto ritz = [&](const Eigen::MatrixXd& S, const Eigen::MatrixXd& AS, Eigen::MatrixXd& Y) {
            const Eigen::MatrixXd Z = orthonormal_coefficients(S.transpose() * M * S);
            Eigen::MatrixXd H = Z.transpose() * (S.transpose() * AS) * Z;
            H = 0.5 * (H + H.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
            const int k = std::min<int>(b, static_cast<int>(H.rows()));
            Y = Z * es.eigenvectors().leftCols(k);
            theta.head(k) = es.eigenvalues().head(k);
            top = std::max(top, es.eigenvalues().maxCoeff());
            return k;
        };

        Eigen::MatrixXd Y;
        int k = ritz(X, AX, Y);
        X = X * Y;
        AX = AX * Y;
        Eigen::MatrixXd P(n, 0), AP(n, 0);
        double previous = theta[0];
        int stable = 0, stalled = 0;
        for (int it = 1; it <= opt.max_iterations; ++it)
        {
            const Eigen::MatrixXd R = AX - M * X * theta.head(k).asDiagonal();
            const double res = R.col(0).norm();
            const double scale = std::max(AX.col(0).norm(), std::abs(theta[0]) * (M * X.col(0)).norm());
            const double change = std::abs(theta[0] - previous);
            stable = (it > 1 && change <= opt.tol * std::abs(theta[0])) ? stable + 1 : 0;
            stalled = (it > 1 && change <= std::max(1e-2 * opt.tol, 1e-13) * std::abs(theta[0])) ? stalled + 1 : 0;
            // the last two clauses are the rounding floor for eigenvalues far below the top of the spectrum
            if (res == 0.0 || (stable >= 1 && res <= std::sqrt(opt.tol) * scale) ||
                res <= 1e-9 * top * m_norm * X.col(0).norm() || stalled >= 5)
            {
                RayleighResult r;
                r.lambda_min = theta[0];
                r.minimizer = g.embed(X.col(0));
                r.iterations = it;
                return r;
            }
            previous = theta[0];

            const Eigen::MatrixXd W = precond.solve(R);
            const Eigen::MatrixXd AW = apply_block(W);
            const Eigen::Index cols = X.cols() + W.cols() + P.cols();
            Eigen::MatrixXd S(n, cols), AS(n, cols);
            S << X, W, P;
            AS << AX, AW, AP;
            k = ritz(S, AS, Y);
            const Eigen::Index nx = X.cols();
            P = S.rightCols(cols - nx) * Y.bottomRows(cols - nx);
            AP = AS.rightCols(cols - nx) * Y.bottomRows(cols - nx);
            X = S * Y;
            AX = AS * Y;
        }
        throw ConvergenceError("eigen-iteration did not converge", opt.max_iterations, theta[0]);
    }

    double observability_constant(const GramianSpec& spec, const RayleighOptions& opt)
    {
        const double lambda = min_rayleigh(Gramian(spec), opt).lambda_min;
        return lambda > 0.0 ? 1.0 / std::sqrt(lambda) : infinity;
    }

    std::vector<RefinementRow> refinement_table(const GramianSpec& spec, const std::vector<int>& cells,
                                                const RayleighOptions& opt)
    {
        std::vector<RefinementRow> rows;
        const double ratio = static_cast<double>(spec.cells_y) / spec.cells_x;
        for (int c : cells)
        {
            GramianSpec s = spec;
            s.cells_x = c;
            s.cells_y = std::max(2, static_cast<int>(std::lround(c * ratio)));
            const Gramian g(s);
            const auto r = min_rayleigh(g, opt);
            rows.push_back({c, g.dimension(), r.lambda_min, r.lambda_min > 0.0 ? 1.0 / std::sqrt(r.lambda_min) : infinity,
                            r.iterations});
        }
        return rows;
    }
} // namespace regobs
