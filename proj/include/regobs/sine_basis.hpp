#ifndef REGOBS_SINE_BASIS_HPP
#define REGOBS_SINE_BASIS_HPP

#include <memory>

#include <Eigen/Dense>

namespace regobs
{
    /// Orthonormal DST-I on an (n_fast x n_slow) array of interior nodes, index i + n_fast * j.
    /// The transform is symmetric and its own inverse; transform() may be called concurrently.
    class SineBasis
    {
    public:
        SineBasis(int n_fast, int n_slow);
        ~SineBasis();
        SineBasis(const SineBasis&) = delete;
        SineBasis& operator=(const SineBasis&) = delete;

        int n_fast() const { return n_fast_; }
        int n_slow() const { return n_slow_; }
        int size() const { return n_fast_ * n_slow_; }

        Eigen::VectorXd transform(const Eigen::VectorXd& v) const;

        /// S diag(multiplier) S v.
        Eigen::VectorXd apply_multiplier(const Eigen::VectorXd& v, const Eigen::VectorXd& multiplier) const;

    private:
        int n_fast_;
        int n_slow_;
        double scale_;
        struct Plan;
        std::unique_ptr<Plan> plan_;
    };
} // namespace regobs

#endif
