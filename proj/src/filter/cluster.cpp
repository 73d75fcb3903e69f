#include "insitu/filter/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "insitu/core/error.hpp"
#include "insitu/core/rng.hpp"

namespace insitu::filter {

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) noexcept
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

std::vector<int> canonical(const std::vector<int>& labels)
{
    std::map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, fresh] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    return out;
}

std::vector<int> kmeans_once(const std::vector<std::vector<double>>& pts, int k, Rng rng, int max_iterations, double& inertia)
{
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> centres;
    centres.push_back(pts[rng.index(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centres.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centres) best = std::min(best, dist2(pts[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total <= 0.0) {
            pick = rng.index(n);
        } else {
            double r = rng.uniform() * total;
            for (pick = 0; pick + 1 < n; ++pick) {
                r -= d2[pick];
                if (r < 0.0) break;
            }
        }
        centres.push_back(pts[pick]);
    }

    std::vector<int> lab(n, -1);
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = dist2(pts[i], centres[static_cast<std::size_t>(c)]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (lab[i] != best) {
                lab[i] = best;
                changed = true;
            }
        }
        // Empty clusters take the point farthest from its centre.
        for (int c = 0; c < k; ++c) {
            if (std::find(lab.begin(), lab.end(), c) != lab.end()) continue;
            std::size_t far = 0;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = dist2(pts[i], centres[static_cast<std::size_t>(lab[i])]);
                const bool shared = std::count(lab.begin(), lab.end(), lab[i]) > 1;
                if (shared && d > fd) {
                    fd = d;
                    far = i;
                }
            }
            lab[far] = c;
            changed = true;
        }
        const std::size_t dim = pts.front().size();
        std::vector<std::vector<double>> sum(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
        std::vector<int> cnt(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sum[static_cast<std::size_t>(lab[i])];
            for (std::size_t d = 0; d < dim; ++d) s[d] += pts[i][d];
            ++cnt[static_cast<std::size_t>(lab[i])];
        }
        for (int c = 0; c < k; ++c) {
            const auto cu = static_cast<std::size_t>(c);
            if (cnt[cu] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) centres[cu][d] = sum[cu][d] / cnt[cu];
        }
        if (!changed) break;
    }
    inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += dist2(pts[i], centres[static_cast<std::size_t>(lab[i])]);
    return lab;
}

} // namespace

std::vector<int> kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed, int restarts,
                        int max_iterations, double* inertia)
{
    require(k >= 1 && static_cast<std::size_t>(k) <= points.size(), "k-means needs 1 <= k <= n");
    require(restarts >= 1 && max_iterations >= 1, "k-means needs restarts and iterations >= 1");
    const Rng root = Rng(seed).substream("kmeans");
    std::vector<int> best;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        double in = 0.0;
        auto lab = kmeans_once(points, k, root.substream(static_cast<std::uint64_t>(r)), max_iterations, in);
        if (in < best_inertia - 1e-12) {
            best_inertia = in;
            best = std::move(lab);
        }
    }
    if (inertia) *inertia = best_inertia;
    return canonical(best);
}

ClusterResult spectral_cluster(const SimilarityMatrix& s, int k, const ClusterConfig& config)
{
    const std::size_t n = s.n;
    require(k >= 1 && static_cast<std::size_t>(k) <= n, "spectral clustering needs 1 <= k <= n");
    ClusterResult res;
    res.k = k;
    if (k == 1) {
        res.labels.assign(n, 0);
        return res;
    }
    if (static_cast<std::size_t>(k) == n) {
        for (std::size_t i = 0; i < n; ++i) res.labels.push_back(static_cast<int>(i));
        return res;
    }

    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < n && !any; ++j) any = j != i && s(i, j) > 0.0;
        if (any) rest.push_back(i);
        else res.degenerate.push_back(i);
    }
    std::vector<int> labels(n, -1);
    int next = 0;
    std::size_t iso_taken = 0;
    if (!res.degenerate.empty()) {
        res.notes.push_back("DegenerateAffinity: " + std::to_string(res.degenerate.size()) +
                            " task(s) with no positive affinity");
        // One own cluster each while at least one cluster is left for the rest.
        const std::size_t cap = rest.empty() ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k - 1);
        iso_taken = std::min(res.degenerate.size(), cap);
        for (std::size_t t = 0; t < iso_taken; ++t) labels[res.degenerate[t]] = next++;
        for (std::size_t t = iso_taken; t < res.degenerate.size(); ++t) rest.push_back(res.degenerate[t]);
        std::sort(rest.begin(), rest.end());
    }
    const int kr = k - next;
    if (kr >= 1 && !rest.empty()) {
        const std::size_t m = rest.size();
        if (kr == 1) {
            for (std::size_t i : rest) labels[i] = next;
        } else if (static_cast<std::size_t>(kr) == m) {
            for (std::size_t t = 0; t < m; ++t) labels[rest[t]] = next + static_cast<int>(t);
        } else {
            Eigen::MatrixXd a(m, m);
            for (std::size_t p = 0; p < m; ++p) {
                for (std::size_t q = 0; q < m; ++q) a(p, q) = std::clamp(s(rest[p], rest[q]), 0.0, 1.0);
            }
            const Eigen::VectorXd deg = a.rowwise().sum();
            Eigen::VectorXd inv = deg;
            for (Eigen::Index i = 0; i < inv.size(); ++i) inv(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
            Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(m, m) - inv.asDiagonal() * a * inv.asDiagonal();
            lap = 0.5 * (lap + lap.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
            require(es.info() == Eigen::Success, "Laplacian eigen-decomposition failed");
            const Eigen::MatrixXd u = es.eigenvectors().leftCols(kr);
            std::vector<std::vector<double>> pts(m, std::vector<double>(static_cast<std::size_t>(kr)));
            for (std::size_t p = 0; p < m; ++p) {
                const double len = u.row(static_cast<Eigen::Index>(p)).norm();
                for (int c = 0; c < kr; ++c) {
                    pts[p][static_cast<std::size_t>(c)] = len > 0.0 ? u(static_cast<Eigen::Index>(p), c) / len : 0.0;
                }
            }
            const auto lab = kmeans(pts, kr, config.seed, config.restarts, config.max_iterations);
            for (std::size_t p = 0; p < m; ++p) labels[rest[p]] = next + lab[p];
        }
    }
    res.labels = canonical(labels);
    return res;
}

std::vector<std::size_t> select_representatives(const std::vector<std::string>& ids, const std::vector<int>& labels,
                                                 const SimilarityMatrix& s)
{
    require(ids.size() == labels.size() && labels.size() == s.n, "ids, labels and matrix must agree in size");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    std::vector<std::size_t> reps;
    for (const auto& [c, ms] : members) {
        std::size_t best = ms.front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i : ms) {
            double score = 0.0;
            if (ms.size() > 1) {
                for (std::size_t j : ms) score += j == i ? 0.0 : s(i, j);
                score /= static_cast<double>(ms.size() - 1);
            }
            if (score > best_score || (score == best_score && ids[i] < ids[best])) {
                best_score = score;
                best = i;
            }
        }
        reps.push_back(best);
    }
    return reps;
}

} // namespace insitu::filter
