#ifndef REGOBS_HUM_HPP
#define REGOBS_HUM_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regobs/geometry.hpp"
#include "regobs/wave2d.hpp"

namespace regobs
{
    enum class HumVariant
    {
        /// Adjoint data supported near O, terminal state matched on {chi = 1}.
        Plain,
        /// Whole-space adjoint data with the smooth eps^2 penalty on the (1 - chi) part.
        Eps,
        /// Whole-space adjoint data with the H^-1 x H^-2 penalty on the (1 - chi) part.
        Chi
    };

    const char * hum_variant_name(HumVariant v);
    HumVariant parse_hum_variant(const std::string& name);

    struct ControlSetup
    {
        Domain domain = Domain::interval(-1.0, 1.0);
        std::optional<Region> omega;
        /// The set O on which the terminal state is prescribed.
        std::optional<Region> region;
        double T = 1.2;
        int cells_x = 1000;
        /// Ignored on an interval.
        int cells_y = 1000;
        double courant = 1.0;
        /// Cutoff 1 leaves the adjoint data unfiltered.
        FilterSpec filter{1.0};
        double leakage = 1e-4;
        /// Width of the ramp of chi, and of the dilation O_1 of O, in grid cells.
        int margin_cells = 2;
        /// Check the time conditions and the chi support against ray tracing before solving.
        bool verify_geometry = true;
        /// Directions traced from every node of O_1 (2-d only).
        int chi_directions = 72;
    };

    struct CgOptions
    {
        /// Relative residual in the preconditioned norm.
        double tol = 1e-8;
        int max_iterations = 2000;
    };

    struct ControlSolution
    {
        HumVariant variant = HumVariant::Plain;
        double epsilon = 0.0;
        /// Adjoint data at time T that generate the control.
        WaveState adjoint;
        /// Rows are time levels 0..M, columns the omega mask.
        SpaceTime v;
        /// Achieved (y(T), dt y(T)).
        WaveState terminal;
        /// Relative preconditioned residuals, starting with 1.
        std::vector<double> residual_history;
        /// Values of the quadratic functional along the iterates, starting with 0; strictly decreasing.
        std::vector<double> functional_history;
        int iterations = 0;
        /// Energy norm of terminal - target over the nodes with chi = 1, and that norm relative to the target.
        double projection_error_on_O = 0.0;
        double relative_projection_error = 0.0;
        /// Energy norm of terminal - target over the whole domain.
        double global_error = 0.0;
        double control_norm = 0.0;
        /// Smallest Ritz value of the preconditioned system from the CG coefficients.
        double lambda_estimate = 0.0;
        bool coercivity_warning = false;
        /// Residual of the terminal identities of the H^-1 x H^-2 variant (0 otherwise).
        double identity_residual = 0.0;
    };

    /// Projection controls y(T) = target on O by conjugate gradients on the adjoint-data space.
    /// Adjoint data z = (z0, z1) at time T generate u with u(T) = z0, dt u(T) = z1, and the
    /// control v = u on omega drives y from rest to (y(T), dt y(T)) with
    /// <v, u'> = <dt y(T), z0'> - <y(T), z1'> for every adjoint solution u'.
    class HumSolver
    {
    public:
        explicit HumSolver(const ControlSetup& setup);

        const ControlSetup& setup() const { return setup_; }
        const WaveSolver& solver() const { return solver_; }
        const std::vector<int>& omega_mask() const { return omega_mask_; }
        /// Nodes within the margin of O (support of chi).
        const std::vector<int>& o1_mask() const { return o1_mask_; }
        /// Nodes with chi = 1.
        const std::vector<int>& o_mask() const { return o_mask_; }
        const Field& chi() const { return chi_; }

        /// Orthonormal basis of the adjoint-data components for a variant.
        const Eigen::MatrixXd& basis(HumVariant v) const;
        int dimension(HumVariant v) const { return 2 * static_cast<int>(basis(v).cols()); }

        /// Control generated by adjoint data.
        SpaceTime control_from_adjoint(const WaveState& z) const;
        /// Linear part of the functional in basis coordinates.
        Eigen::VectorXd assemble_rhs(const WaveState& target, HumVariant v) const;
        /// Quadratic part (Gramian plus penalty) applied to basis coordinates.
        Eigen::VectorXd apply(const Eigen::VectorXd& coords, HumVariant v, double epsilon = 0.0) const;
        WaveState embed(const Eigen::VectorXd& coords, HumVariant v) const;

        ControlSolution solve(const WaveState& target, HumVariant v, double epsilon = 0.0, const CgOptions& cg = {}) const;

        /// Energy norm of the part of s on the nodes with chi = 1 (gradients over edges inside).
        double energy_on_o(const WaveState& s) const;

    private:
        void check_time(HumVariant v) const;

        ControlSetup setup_;
        WaveSolver solver_;
        std::vector<int> omega_mask_;
        std::vector<int> o1_mask_;
        std::vector<int> o_mask_;
        Field chi_;
        Eigen::MatrixXd q_local_;
        Eigen::MatrixXd q_global_;
    };

    /// Convenience wrappers for the three functionals.
    ControlSolution solve_control(const HumSolver& s, const WaveState& target, const CgOptions& cg = {});
    ControlSolution solve_control_eps(const HumSolver& s, const WaveState& target, double epsilon, const CgOptions& cg = {});
    ControlSolution solve_control_chi(const HumSolver& s, const WaveState& target, const CgOptions& cg = {});
} // namespace regobs

#endif
