#ifndef REGOBS_WAVE2D_HPP
#define REGOBS_WAVE2D_HPP

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regobs/geometry.hpp"
#include "regobs/sine_basis.hpp"

namespace regobs
{
    enum class Quantity
    {
        U,
        DtU,
        DnUBoundary
    };

    const char * quantity_name(Quantity q);
    Quantity parse_quantity(const std::string& name);

    struct FilterSpec
    {
        /// Fraction of the sine-spectrum radius retained, in (0, 1].
        double cutoff_fraction = 0.25;
    };

    /// Uniform grid on an interval (ny == 1) or a rectangle. Unknowns are the interior nodes,
    /// stored with index i + ix() * j; Dirichlet nodes are implicit zeros.
    struct Grid2
    {
        Vec2 origin;
        int nx = 0;
        int ny = 1;
        double hx = 0.0;
        double hy = 0.0;
        double dt = 0.0;
        int steps = 0;
        double cfl_safety = 0.95;

        /// Picks the number of steps so that dt = T / steps is the largest step with Courant
        /// number at most `courant`. `cells_y` is ignored on an interval.
        static Grid2 make(const Domain& domain, int cells_x, int cells_y, double T, double courant = 0.95,
                          double cfl_safety = 0.95);

        bool one_d() const { return ny == 1; }
        int ix() const { return nx - 2; }
        int iy() const { return ny == 1 ? 1 : ny - 2; }
        int size() const { return ix() * iy(); }
        Vec2 node(int k) const;
        /// Cell volume used by every discrete L2 inner product.
        double volume() const { return one_d() ? hx : hx * hy; }
        double dt_max() const;
        double final_time() const { return dt * steps; }
        /// Throws CFLViolation when dt exceeds cfl_safety * dt_max().
        void check_cfl() const;
    };

    using Field = Eigen::VectorXd;

    struct WaveState
    {
        Field u0;
        Field u1;
    };

    /// Space-time samples on a node mask: row n holds time n * dt, column j mask node j.
    using SpaceTime = Eigen::MatrixXd;

    /// Interior unknowns whose node lies in the closure of `region`.
    std::vector<int> region_mask(const Grid2& grid, const Region& region);

    /// Trapezoid weight of time level n out of 0..steps.
    inline double trapezoid_weight(int n, int steps) { return (n == 0 || n == steps) ? 0.5 : 1.0; }

    struct Observation
    {
        SpaceTime values;
        /// Squared discrete L2 norm over the mask and [0, T].
        double norm_sq = 0.0;
        /// (u(T), du/dt(T)) with the centered time derivative.
        WaveState final_state;
    };

    /// Leapfrog solver with the 5-point (or 3-point) Dirichlet Laplacian K = -Delta_h.
    /// Spectral helpers use the sine basis in which K is diagonal.
    class WaveSolver
    {
    public:
        explicit WaveSolver(const Grid2& grid);

        const Grid2& grid() const { return grid_; }
        int size() const { return grid_.size(); }
        const Eigen::VectorXd& eigenvalues() const { return lambda_; }
        const SineBasis& basis() const { return *basis_; }

        Field apply_laplacian(const Field& u) const;
        /// K - (dt^2 / 4) K^2, the operator that links displacement and centered velocity.
        Field apply_modified_laplacian(const Field& u) const;
        /// K^(-power) through the sine basis.
        Field inverse_laplacian(const Field& u, int power = 1) const;
        Eigen::VectorXd filter_multiplier(const FilterSpec& spec) const;
        Field filter(const Field& u, const FilterSpec& spec) const;
        WaveState filter(const WaveState& s, const FilterSpec& spec) const;

        double inner(const Field& a, const Field& b) const { return grid_.volume() * a.dot(b); }
        double inner(const WaveState& a, const WaveState& b) const { return inner(a.u0, b.u0) + inner(a.u1, b.u1); }
        /// H^1_0 x L^2.
        double energy_norm_sq(const WaveState& s) const;
        /// L^2 x H^-1.
        double weak_norm_sq(const WaveState& s) const;

        /// Staggered energy 1/2 |(cur - prev)/dt|^2 + 1/2 <K cur, prev>, conserved by step().
        double leapfrog_energy(const Field& prev, const Field& cur) const;

        /// One leapfrog step: next = 2 cur - prev - dt^2 K cur (+ dt^2 source); prev <- cur, cur <- next.
        void step(Field& prev, Field& cur, const Field * source = nullptr) const;

        /// u at time -dt consistent with the leapfrog start from (u0, u1).
        Field backward_start(const WaveState& s) const;

        double spacetime_inner(const SpaceTime& a, const SpaceTime& b) const;

        /// Forward solve from s, sampling the quantity (U or DtU) on the mask at every time level.
        Observation observe(const WaveState& s, const std::vector<int>& mask, Quantity q) const;
        Observation observe(const WaveState& s, const Region& omega, Quantity q) const;

        /// Zero initial data, source v on the mask; returns (y(T), dy/dt(T)).
        WaveState solve_forward_with_source(const std::vector<int>& mask, const SpaceTime& v) const;

        /// Exact adjoint of observe() with respect to inner(WaveState) and spacetime_inner.
        WaveState observe_adjoint(const std::vector<int>& mask, const SpaceTime& g, Quantity q) const;

    private:
        Grid2 grid_;
        std::unique_ptr<SineBasis> basis_;
        Eigen::VectorXd lambda_;
    };
} // namespace regobs

#endif
