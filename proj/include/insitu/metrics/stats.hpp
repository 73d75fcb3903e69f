#pragma once

#include <array>
#include <string>
#include <vector>

#include "insitu/sim/scene.hpp"
#include "insitu/task/task.hpp"

namespace insitu::metrics {

struct AxisStats {
    double delta = 0.0; ///< extent of the box enclosing every bound entity, m
    double sigma = 0.0; ///< population std of bound entity centres, m
};

struct SpatialStats {
    double v_all = 0.0;                 ///< m^3
    std::array<AxisStats, 3> axes{};    ///< x, y, z
    double v_inst_mean = 0.0;           ///< m^3
    double v_inst_sigma = 0.0;          ///< m^3
    std::size_t n_obj = 0;
};

/**
 * Spatial coverage of a task set. V_all is the volume of the box enclosing
 * every bound entity's box, and delta its per-axis extent. Centre spread is
 * taken over every (instance, bound entity) occurrence. Per-instance
 * volumes use the box enclosing that instance's entities. Throws
 * Errc::no_spatial_binding when an instance binds no scene entity, and
 * Errc::precondition on an empty list.
 */
SpatialStats spatial_stats(const std::vector<task::TaskInstance>& instances, const sim::Scene& scene);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    int df = 0;
    double mean_diff = 0.0;
    std::vector<std::string> notes;
};

/// Regularized incomplete beta I_x(a, b) by continued fraction (modified Lentz).
double incomplete_beta(double a, double b, double x);
/// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

/**
 * Two-sided paired t-test on a - b. Needs equal lengths >= 3. When all
 * differences are equal the statistic is undefined: a ZeroVariance note is
 * added and (t, p) is (0, 1) for a zero shift, (+-inf, 0) otherwise.
 */
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

} // namespace insitu::metrics
