#include "insitu/metrics/mis.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>

#include "insitu/core/error.hpp"

namespace insitu::metrics {

namespace {

/// Fixed-size bitset sized at run time.
class Bits {
public:
    explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
    void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    bool none() const
    {
        for (auto x : w_) {
            if (x) return false;
        }
        return true;
    }
    /// Index of the lowest set bit; call only when !none().
    std::size_t lowest() const
    {
        for (std::size_t k = 0;; ++k) {
            if (w_[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(w_[k]));
        }
    }
    Bits& operator&=(const Bits& o)
    {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
        return *this;
    }
    Bits and_not(const Bits& o) const
    {
        Bits r = *this;
        for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] &= ~o.w_[k];
        return r;
    }
    friend Bits operator&(Bits a, const Bits& b) { return a &= b; }

private:
    std::vector<std::uint64_t> w_;
};

/// Maximum clique search on the compatibility graph, which is a maximum
/// independent set of the conflict graph. Greedy coloring of candidates
/// into conflict cliques bounds how many more vertices can be added.
class Search {
public:
    explicit Search(const std::vector<std::vector<bool>>& conflicts, std::uint64_t budget = 0)
        : n_(conflicts.size()), budget_(budget)
    {
        compat_.assign(n_, Bits(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                if (i != j && !conflicts[i][j]) compat_[i].set(j);
            }
        }
    }

    Bits all() const
    {
        Bits b(n_);
        for (std::size_t i = 0; i < n_; ++i) b.set(i);
        return b;
    }
    const Bits& compat(std::size_t v) const { return compat_[v]; }

    std::size_t max_size(const Bits& p)
    {
        std::size_t best = 0;
        expand(p, 0, best, std::numeric_limits<std::size_t>::max());
        return best;
    }

    /// Whether `p` holds an independent set of at least `target` vertices.
    bool reaches(const Bits& p, std::size_t target)
    {
        if (target == 0) return true;
        std::size_t best = target - 1;
        return expand(p, 0, best, target);
    }

private:
    bool expand(Bits p, std::size_t depth, std::size_t& best, std::size_t stop_at)
    {
        if (budget_ && ++nodes_ > budget_) {
            aborted_ = true;
            return true;
        }
        std::vector<std::size_t> order, colors;
        Bits uncolored = p;
        std::size_t color = 0;
        while (!uncolored.none()) {
            ++color;
            Bits q = uncolored;
            while (!q.none()) {
                const std::size_t v = q.lowest();
                uncolored.reset(v);
                q.reset(v);
                q = q.and_not(compat_[v]);
                order.push_back(v);
                colors.push_back(color);
            }
        }
        for (std::size_t i = order.size(); i-- > 0;) {
            if (depth + colors[i] <= best) return false;
            const std::size_t v = order[i];
            const Bits np = p & compat_[v];
            if (np.none()) {
                if (depth + 1 > best) {
                    best = depth + 1;
                    if (best >= stop_at) return true;
                }
            } else if (expand(np, depth + 1, best, stop_at)) {
                return true;
            }
            p.reset(v);
        }
        return false;
    }

    std::size_t n_;
    std::vector<Bits> compat_;
    std::uint64_t budget_ = 0;
    std::uint64_t nodes_ = 0;

public:
    bool aborted() const noexcept { return aborted_; }

private:
    bool aborted_ = false;
};

void check_alpha(double alpha) { require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)"); }

/// Empty optional when the node budget ran out.
std::optional<MISResult> exact_mis(const std::vector<std::vector<bool>>& c, double alpha, std::uint64_t budget)
{
    Search s(c, budget);
    MISResult r;
    r.alpha = alpha;
    r.exact = true;
    const std::size_t n = c.size();
    if (n == 0) return r;
    const std::size_t omega = s.max_size(s.all());
    if (s.aborted()) return std::nullopt;
    Bits pool = s.all();
    for (std::size_t v = 0; v < n && r.subset.size() < omega; ++v) {
        if (!pool.test(v)) continue;
        pool.reset(v);
        const Bits with_v = pool & s.compat(v);
        if (s.reaches(with_v, omega - r.subset.size() - 1)) {
            r.subset.push_back(v);
            pool = with_v;
        }
        if (s.aborted()) return std::nullopt;
    }
    r.size = r.subset.size();
    return r;
}

} // namespace

std::vector<std::vector<bool>> conflict_graph(const filter::SimilarityMatrix& s, double alpha)
{
    std::vector<std::vector<bool>> c(s.n, std::vector<bool>(s.n, false));
    for (std::size_t i = 0; i < s.n; ++i) {
        for (std::size_t j = 0; j < s.n; ++j) c[i][j] = i != j && (s(i, j) > alpha || s(j, i) > alpha);
    }
    return c;
}

std::size_t max_independent_set_size(const std::vector<std::vector<bool>>& conflicts)
{
    Search s(conflicts);
    return conflicts.empty() ? 0 : s.max_size(s.all());
}

MISResult mis_greedy(const filter::SimilarityMatrix& s, double alpha)
{
    check_alpha(alpha);
    const auto c = conflict_graph(s, alpha);
    std::vector<bool> alive(s.n, true);
    MISResult r;
    r.alpha = alpha;
    for (;;) {
        std::size_t pick = s.n, best_deg = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < s.n; ++i) {
            if (!alive[i]) continue;
            std::size_t deg = 0;
            for (std::size_t j = 0; j < s.n; ++j) deg += alive[j] && c[i][j] ? 1 : 0;
            if (deg < best_deg) {
                best_deg = deg;
                pick = i;
            }
        }
        if (pick == s.n) break;
        r.subset.push_back(pick);
        alive[pick] = false;
        for (std::size_t j = 0; j < s.n; ++j) {
            if (c[pick][j]) alive[j] = false;
        }
    }
    std::sort(r.subset.begin(), r.subset.end());
    r.size = r.subset.size();
    return r;
}

MISResult mis(const filter::SimilarityMatrix& s, double alpha, const MisOptions& options)
{
    check_alpha(alpha);
    if (s.n <= options.exact_limit || options.force_exact) {
        if (auto r = exact_mis(conflict_graph(s, alpha), alpha, options.node_budget)) return *r;
    }
    return mis_greedy(s, alpha);
}

filter::SimilarityMatrix submatrix(const filter::SimilarityMatrix& s, const std::vector<std::size_t>& idx)
{
    filter::SimilarityMatrix r;
    r.n = idx.size();
    r.modality_count = s.modality_count;
    r.values.resize(r.n * r.n);
    for (std::size_t a = 0; a < r.n; ++a) {
        require(idx[a] < s.n, "index outside the matrix");
        for (std::size_t b = 0; b < r.n; ++b) r(a, b) = s(idx[a], idx[b]);
    }
    return r;
}

std::string MirResult::display(int decimals) const
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f (%zu/%zu)", decimals, value(), mis_size, total);
    return buf;
}

MirResult mir_from_counts(std::size_t mis_size, std::size_t total)
{
    if (total == 0) throw Error(Errc::empty_task_set, "MIR of an empty task set");
    require(mis_size >= 1 && mis_size <= total, "MIS size must lie in [1, n]");
    return {mis_size, total, true};
}

MirResult mir(const filter::SimilarityMatrix& s, double alpha, const MisOptions& options)
{
    if (s.n == 0) throw Error(Errc::empty_task_set, "MIR of an empty task set");
    const MISResult m = mis(s, alpha, options);
    MirResult r = mir_from_counts(m.size, s.n);
    r.exact = m.exact;
    return r;
}

MirEResult mir_e(const filter::SimilarityMatrix& joint, const std::vector<std::size_t>& initial,
                 const std::vector<std::size_t>& evolve, double alpha, const MisOptions& options)
{
    std::vector<bool> used(joint.n, false);
    for (const auto* set : {&initial, &evolve}) {
        for (std::size_t i : *set) {
            require(i < joint.n, "index outside the joint matrix");
            require(!used[i], "initial and evolve index sets must be disjoint");
            used[i] = true;
        }
    }
    std::vector<std::size_t> both = initial;
    both.insert(both.end(), evolve.begin(), evolve.end());
    const MISResult u = mis(submatrix(joint, both), alpha, options);
    const MISResult e = mis(submatrix(joint, evolve), alpha, options);
    const MISResult i = initial.empty() ? MISResult{{}, 0, true, alpha} : mis(submatrix(joint, initial), alpha, options);
    if (e.size == 0) throw Error(Errc::empty_evolved_set, "MIR-e with an empty evolved set");

    MirEResult r;
    r.mis_union = u.size;
    r.mis_initial = i.size;
    r.mis_evolve = e.size;
    r.exact = u.exact && e.exact && i.exact;
    long num = static_cast<long>(u.size) - static_cast<long>(i.size);
    if (num < 0) {
        r.clamped = true;
        r.notes.push_back("numerator " + std::to_string(num) + " clamped to 0");
        num = 0;
    }
    r.value = static_cast<double>(num) / static_cast<double>(e.size);
    return r;
}

} // namespace insitu::metrics
