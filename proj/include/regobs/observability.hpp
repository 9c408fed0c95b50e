#ifndef REGOBS_OBSERVABILITY_HPP
#define REGOBS_OBSERVABILITY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regobs/geometry.hpp"
#include "regobs/wave2d.hpp"

namespace regobs
{
    enum class DataNorm
    {
        /// H^1_0 x L^2
        Energy,
        /// L^2 x H^-1
        Weak
    };

    const char * data_norm_name(DataNorm n);
    DataNorm parse_data_norm(const std::string& name);

    /// Time grid for Gramian and control runs: on an interval the CFL safety factor follows the
    /// Courant number up to 1, where leapfrog is exact.
    Grid2 observation_grid(const Domain& domain, int cells_x, int cells_y, double T, double courant);

    /// Orthonormal columns spanning the data supported on `support` that keep at least
    /// 1 - leakage of their L2 mass under the spectral filter (unit vectors when the cutoff is 1).
    Eigen::MatrixXd prolate_basis(const WaveSolver& solver, const std::vector<int>& support, const FilterSpec& filter,
                                  double leakage);

    struct GramianSpec
    {
        Domain domain = Domain::interval(-1.0, 1.0);
        std::optional<Region> omega;
        std::optional<Region> support;
        double T = 1.0;
        Quantity quantity = Quantity::DtU;
        DataNorm norm = DataNorm::Energy;
        FilterSpec filter;
        int cells_x = 200;
        /// Ignored on an interval.
        int cells_y = 200;
        double courant = 0.95;
        /// Basis functions of V keep at least 1 - leakage of their L2 mass after filtering.
        double leakage = 1e-4;
    };

    /// Observation Gramian G = Obs* Obs restricted to the admissible subspace V.
    /// V = Q x Q, where the columns of Q are the discrete prolate vectors of the support mask:
    /// eigenvectors of (mask F mask) with eigenvalue >= 1 - leakage, F the spectral filter.
    /// With cutoff 1 they are the unit vectors of the support nodes.
    class Gramian
    {
    public:
        explicit Gramian(const GramianSpec& spec);

        const GramianSpec& spec() const { return spec_; }
        const WaveSolver& solver() const { return solver_; }
        const std::vector<int>& omega_mask() const { return omega_mask_; }
        const std::vector<int>& support_mask() const { return support_mask_; }
        const Eigen::MatrixXd& basis() const { return Q_; }
        /// Dimension of V (twice the number of basis functions).
        int dimension() const { return 2 * static_cast<int>(Q_.cols()); }

        WaveState embed(const Eigen::VectorXd& coords) const;
        /// Coordinates of the L2-orthogonal projection onto V.
        Eigen::VectorXd coordinates(const WaveState& s) const;

        /// Forward solve, mask, adjoint solve, projection onto V.
        WaveState apply(const WaveState& x) const;
        /// Reduced matrix-free action: A c with A_ij = <E e_i, G E e_j>.
        Eigen::VectorXd apply_reduced(const Eigen::VectorXd& coords) const;
        /// Gram matrix of the data norm on V.
        const Eigen::MatrixXd& metric() const { return metric_; }
        /// Dense reduced Gramian assembled column by column.
        Eigen::MatrixXd assemble() const;

        double observed_norm_sq(const WaveState& s) const;
        double data_norm_sq(const WaveState& s) const;

    private:
        GramianSpec spec_;
        WaveSolver solver_;
        std::vector<int> omega_mask_;
        std::vector<int> support_mask_;
        Eigen::MatrixXd Q_;
        Eigen::MatrixXd metric_;
    };

    struct RayleighOptions
    {
        int max_iterations = 500;
        /// Relative eigenvalue change that counts as converged.
        double tol = 1e-4;
        int block_size = 2;
        std::uint64_t seed = 12345;
    };

    struct RayleighResult
    {
        double lambda_min = 0.0;
        WaveState minimizer;
        int iterations = 0;
    };

    /// Smallest eigenvalue of the pencil (reduced Gramian, data-norm metric) by LOBPCG.
    /// Throws ConvergenceError carrying the best estimate after max_iterations.
    RayleighResult min_rayleigh(const Gramian& g, const RayleighOptions& opt = {});

    /// Same eigenvalue from a full dense eigendecomposition of the assembled pencil.
    RayleighResult dense_min_rayleigh(const Gramian& g);

    struct RefinementRow
    {
        int cells = 0;
        int dimension = 0;
        double lambda_min = 0.0;
        double constant = 0.0;
        int iterations = 0;
    };

    /// lambda_min^(-1/2); infinite when lambda_min <= 0.
    double observability_constant(const GramianSpec& spec, const RayleighOptions& opt = {});

    /// One row per entry of `cells` (cells_y scaled with the same ratio as in `spec`).
    std::vector<RefinementRow> refinement_table(const GramianSpec& spec, const std::vector<int>& cells,
                                                const RayleighOptions& opt = {});
} // namespace regobs

#endif
