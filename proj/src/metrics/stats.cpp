#include "insitu/metrics/stats.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "insitu/core/error.hpp"
#include "insitu/gen/grounding.hpp"

namespace insitu::metrics {

namespace {

double axis(Vec3 v, int a) { return a == 0 ? v.x : a == 1 ? v.y : v.z; }

} // namespace

SpatialStats spatial_stats(const std::vector<task::TaskInstance>& instances, const sim::Scene& scene)
{
    require(!instances.empty(), "spatial statistics need at least one instance");
    SpatialStats st;
    std::set<std::string> distinct;
    std::optional<Aabb> all;
    std::array<double, 3> sum{}, sum2{};
    std::size_t occ = 0;
    std::vector<double> vols;
    for (const auto& inst : instances) {
        const auto ids = gen::bound_entities(inst, scene);
        if (ids.empty()) throw Error(Errc::no_spatial_binding, inst.id + " binds no scene entity");
        std::optional<Aabb> own;
        for (const auto& id : ids) {
            const sim::SceneEntity& e = *scene.find(id);
            distinct.insert(id);
            own = own ? own->merged(e.bbox3d) : e.bbox3d;
            all = all ? all->merged(e.bbox3d) : e.bbox3d;
            const Vec3 c = e.bbox3d.center();
            for (int a = 0; a < 3; ++a) {
                sum[a] += axis(c, a);
                sum2[a] += axis(c, a) * axis(c, a);
            }
            ++occ;
        }
        vols.push_back(own->volume());
    }
    st.v_all = all->volume();
    const Vec3 ext = all->extent();
    for (int a = 0; a < 3; ++a) {
        const double m = sum[a] / static_cast<double>(occ);
        st.axes[a].delta = axis(ext, a);
        st.axes[a].sigma = std::sqrt(std::max(0.0, sum2[a] / static_cast<double>(occ) - m * m));
    }
    double vm = 0.0;
    for (double v : vols) vm += v;
    vm /= static_cast<double>(vols.size());
    double vv = 0.0;
    for (double v : vols) vv += (v - vm) * (v - vm);
    st.v_inst_mean = vm;
    st.v_inst_sigma = std::sqrt(vv / static_cast<double>(vols.size()));
    st.n_obj = distinct.size();
    return st;
}

namespace {

double beta_cf(double a, double b, double x)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double incomplete_beta(double a, double b, double x)
{
    require(a > 0.0 && b > 0.0, "incomplete beta needs a, b > 0");
    require(x >= 0.0 && x <= 1.0, "incomplete beta needs x in [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double lnfront = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    // The continued fraction converges fast only on one side of the mean.
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(lnfront) * beta_cf(a, b, x) / a;
    return 1.0 - std::exp(lnfront) * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df)
{
    require(df > 0.0, "t distribution needs df > 0");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b)
{
    require(a.size() == b.size(), "paired t-test needs equal lengths");
    require(a.size() >= 3, "paired t-test needs at least 3 pairs");
    const std::size_t n = a.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    bool identical = true;
    const double d0 = a[0] - b[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        ss += (d - mean) * (d - mean);
        identical = identical && d == d0;
    }
    TTestResult r;
    r.df = static_cast<int>(n) - 1;
    r.mean_diff = mean;
    if (identical || ss == 0.0) {
        r.notes.push_back("ZeroVariance: all paired differences are equal");
        if (d0 == 0.0) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = d0 > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
        }
        return r;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = student_t_two_sided(r.t, r.df);
    return r;
}

} // namespace insitu::metrics
