#ifndef REGOBS_REACHABILITY_HPP
#define REGOBS_REACHABILITY_HPP

#include <vector>

#include "billiard.hpp"

namespace regobs
{
    /// Uniformly spaced travel directions. In 1-d the sample is always {+1, -1}.
    struct DirectionSample
    {
        int count = 720;
        /// Double `count` until the critical-time estimate moves less than tol_time.
        bool adaptive = true;
        int max_count = 720 * 8;

        std::vector<Vec2> directions(int dimension) const;
    };

    struct ReachabilityOptions
    {
        /// Lattice spacing for interior samples; 0 selects diameter / 50.
        double grid_h = 0.0;
        /// Spacing of samples along region boundaries; 0 selects grid_h / 2.
        double boundary_h = 0.0;
        double tol_time = 1e-3;
        /// Number of best samples refined by compass search.
        int refine_top = 6;
        /// Fraction of terminated rays above which the estimate is refused.
        double max_terminated_fraction = 0.01;
    };

    struct CriticalTimeResult
    {
        double value = 0.0;
        bool infinite = false;
        double undetermined_fraction = 0.0;
        int direction_count = 0;
        long rays = 0;
        Vec2 argmax_x;
        Vec2 argmax_dir;
    };

    /// Sup over sampled (x in closure of O, direction) of the first time the ray enters omega,
    /// refined by compass search around the best samples. `infinite` is set when some ray
    /// travels t_cap without entering omega.
    CriticalTimeResult critical_time(const Domain& domain, const Region& region_O, const Region& omega,
                                     const DirectionSample& dirs, double t_cap, const ReachabilityOptions& opts = {});

    /// critical_time with O the whole domain.
    CriticalTimeResult gcc_time(const Domain& domain, const Region& omega, const DirectionSample& dirs, double t_cap,
                                const ReachabilityOptions& opts = {});

    struct ArcExampleTime
    {
        int k_c;
        double length;
    };

    /// Closed-form length of the longest ray from the strip {x1 < cos alpha} that avoids the
    /// boundary sector of angles (-pi/3, pi/3) of the unit disk.
    ArcExampleTime arc_example_time(double alpha, double epsilon);

    enum class NodeFlag : unsigned char
    {
        AllDirectionsHit,
        SomeDirectionMisses,
        Undetermined,
        Outside
    };

    const char * node_flag_name(NodeFlag f);

    struct ReachabilityRaster
    {
        Vec2 origin;
        double h = 0.0;
        int nx = 0;
        int ny = 0;
        std::vector<NodeFlag> flags;

        Vec2 node(int i, int j) const { return origin + Vec2(i * h, j * h); }
        NodeFlag at(int i, int j) const { return flags[static_cast<std::size_t>(i + nx * j)]; }
        double undetermined_fraction() const;
    };

    /// Lattice over the bounding box; a node is AllDirectionsHit iff every sampled direction
    /// enters omega strictly before T.
    ReachabilityRaster reachable_set(const Domain& domain, const Region& omega, double T, double grid_h,
                                     const DirectionSample& dirs);

    struct PhaseRaster
    {
        std::vector<Vec2> nodes;
        std::vector<Vec2> directions;
        /// flags[node * directions.size() + k]: both rays (+d_k, -d_k) enter omega before T.
        std::vector<char> flags;

        bool flagged(std::size_t node, std::size_t k) const { return flags[node * directions.size() + k] != 0; }
    };

    PhaseRaster phase_reachable(const Domain& domain, const Region& omega, double T, double grid_h,
                                const DirectionSample& dirs);
} // namespace regobs

#endif
