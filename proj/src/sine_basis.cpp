#include "regobs/sine_basis.hpp"

#include <cmath>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "regobs/errors.hpp"

namespace regobs
{
    namespace
    {
        // planner calls are not thread safe in FFTW
        std::mutex planner_mutex;
    }

    struct SineBasis::Plan
    {
        fftw_plan plan = nullptr;
    };

    SineBasis::SineBasis(int n_fast, int n_slow) : n_fast_(n_fast), n_slow_(n_slow), plan_(std::make_unique<Plan>())
    {
        require(n_fast >= 1 && n_slow >= 1, ErrorCode::InvalidArgument, "sine basis needs positive sizes");
        std::lock_guard<std::mutex> lock(planner_mutex);
        double * buffer = fftw_alloc_real(static_cast<std::size_t>(size()));
        if (n_slow == 1)
        {
            plan_->plan = fftw_plan_r2r_1d(n_fast, buffer, buffer, FFTW_RODFT00, FFTW_ESTIMATE);
            scale_ = 1.0 / std::sqrt(2.0 * (n_fast + 1));
        }
        else
        {
            plan_->plan = fftw_plan_r2r_2d(n_slow, n_fast, buffer, buffer, FFTW_RODFT00, FFTW_RODFT00,
                                           FFTW_ESTIMATE);
            scale_ = 1.0 / std::sqrt(4.0 * (n_fast + 1) * (n_slow + 1));
        }
        fftw_free(buffer);
    }

    SineBasis::~SineBasis()
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan_->plan);
    }

    Eigen::VectorXd SineBasis::transform(const Eigen::VectorXd& v) const
    {
        require(v.size() == size(), ErrorCode::GridMismatch, "sine transform size mismatch");
        // new-array execution on a fresh aligned buffer keeps concurrent calls independent
        double * buffer = fftw_alloc_real(static_cast<std::size_t>(size()));
        std::memcpy(buffer, v.data(), sizeof(double) * static_cast<std::size_t>(size()));
        fftw_execute_r2r(plan_->plan, buffer, buffer);
        Eigen::VectorXd out(size());
        for (int k = 0; k < size(); ++k)
            out[k] = scale_ * buffer[k];
        fftw_free(buffer);
        return out;
    }

    Eigen::VectorXd SineBasis::apply_multiplier(const Eigen::VectorXd& v, const Eigen::VectorXd& multiplier) const
    {
        require(multiplier.size() == size(), ErrorCode::GridMismatch, "multiplier size mismatch");
        Eigen::VectorXd c = transform(v);
        c.array() *= multiplier.array();
        return transform(c);
    }
} // namespace regobs
