#ifndef REGOBS_WAVE1D_HPP
#define REGOBS_WAVE1D_HPP

#include <vector>

#include <Eigen/Dense>

#include "regobs/geometry.hpp"
#include "regobs/wave2d.hpp"

namespace regobs
{
    /// N + 1 uniform nodes on [a, b], endpoints included.
    struct LineGrid
    {
        double a = -1.0;
        double b = 1.0;
        int cells = 0;

        static LineGrid on(const Domain& domain, int cells);

        double h() const { return (b - a) / cells; }
        int nodes() const { return cells + 1; }
        double x(int i) const { return a + i * h(); }
        bool operator==(const LineGrid&) const = default;
    };

    /// Initial data on all nodes; u0 and u1 vanish at the endpoints.
    struct LineState
    {
        LineGrid grid;
        Eigen::VectorXd u0;
        Eigen::VectorXd u1;
    };

    /// H^1_0 x L^2 with forward differences.
    double energy_norm_sq(const LineState& s);
    /// L^2 x H^-1 through a tridiagonal Dirichlet Laplacian solve.
    double weak_norm_sq(const LineState& s);

    /// Full node vector from interior unknowns and back.
    Eigen::VectorXd with_endpoints(const Eigen::VectorXd& interior);
    Eigen::VectorXd interior_of(const Eigen::VectorXd& full);

    struct TransportState
    {
        LineGrid grid;
        /// u_t - u_x, moves right.
        Eigen::VectorXd w_plus;
        /// u_t + u_x, moves left.
        Eigen::VectorXd w_minus;
        double t = 0.0;

        /// (h / 4) times the trapezoid sum of w_plus^2 + w_minus^2.
        double energy() const;
    };

    TransportState to_transport(const LineState& s);

    /// One exact step of length h.
    void step_exact(TransportState& s);

    /// Throws NonCommensurateTime unless t_target - s.t is a whole number of steps.
    TransportState evolve_exact(TransportState s, double t_target);

    /// Negating the velocity: (w_plus, w_minus) -> (-w_minus, -w_plus).
    TransportState reversed(const TransportState& s);

    /// Transport variables read off two consecutive leapfrog levels at Courant number 1:
    /// W+_i = (u^n_i - u^{n-1}_{i+1}) / h and W-_i = (u^n_i - u^{n-1}_{i-1}) / h, closed at the
    /// endpoints by the boundary coupling. Both arguments are full node vectors.
    TransportState transport_from_leapfrog(const LineGrid& grid, const Eigen::VectorXd& prev, const Eigen::VectorXd& cur,
                                           double t);

    struct LineRecord
    {
        std::vector<double> times;
        std::vector<double> positions;
        /// Row n is time n * h, column j is the observed node j.
        Eigen::MatrixXd values;
        double norm_sq = 0.0;
    };

    /// Exact observation of u, u_t, or the outward normal derivative at observed endpoints.
    LineRecord observe(const LineState& s, const Region& region, double T, Quantity q);

    struct DirectionalSplit
    {
        double e_plus_in_rplus = 0.0;
        double e_plus_total = 0.0;
        double e_minus_in_rminus = 0.0;
        double e_minus_total = 0.0;
    };

    /// Space-time integrals of w_plus^2 / 4 and w_minus^2 / 4 over [0, T] x [a, b] and over the
    /// phase sets of rays that meet omega during (0, T). omega must be an interval union.
    DirectionalSplit directional_energy_split(const LineState& s, const Region& omega, double T);
    DirectionalSplit directional_energy_split(const TransportState& w, const Region& omega, double T);
} // namespace regobs

#endif
