#include "pdag/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pdag/parallel.hpp"

namespace pdag {

namespace {

// Observations grouped by their values on the conditioning set.
struct Patterns {
    std::vector<int> id;     // observation -> pattern
    std::vector<int> count;  // pattern -> n(x)
};

Patterns group_patterns(const CountMatrix& x, const std::vector<int>& cols)
{
    const int n = static_cast<int>(x.rows());
    Patterns out;
    out.id.assign(static_cast<std::size_t>(n), 0);
    if (cols.empty()) {
        out.count = {n};
        return out;
    }
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto cmp = [&](int a, int b) {
        for (int c : cols) {
            if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
        }
        return false;
    };
    std::stable_sort(idx.begin(), idx.end(), cmp);
    int current = -1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k == 0 || cmp(idx[k - 1], idx[k])) {
            ++current;
            out.count.push_back(0);
        }
        out.id[static_cast<std::size_t>(idx[k])] = current;
        ++out.count[static_cast<std::size_t>(current)];
    }
    return out;
}

struct PreparedCandidate {
    Eigen::ArrayXd target;
    Patterns patterns;
    std::vector<double> factor; // n(x) / n_C for retained patterns, 0 otherwise
    bool any = false;
};

} // namespace

double overdispersion(double mean, double variance, int trials)
{
    const double t = trials;
    const double e = std::min(mean, t * kMeanClamp);
    const double omega = 1.0 / (1.0 - e / t);
    return omega * omega * variance - omega * e;
}

std::vector<std::optional<ConditionalMoments>> conditional_moments(const Dataset& dataset,
                                                                   const SmoothingWeights& weights, int j,
                                                                   const std::vector<int>& s,
                                                                   const std::vector<int>& x_s)
{
    const int n = dataset.n();
    if (weights.n() != n) throw InputError("weights and dataset differ in n");
    if (j < 0 || j >= dataset.dx()) throw InputError("node out of range");
    if (s.size() != x_s.size()) throw InputError("pattern length does not match conditioning set");
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] < 0 || s[k] >= dataset.dx() || s[k] == j) throw InputError("invalid conditioning node");
        if (x_s[k] < 0 || x_s[k] > dataset.trials()) throw InputError("pattern value outside 0..T");
    }
    const CountMatrix& x = dataset.counts();
    std::vector<char> match(static_cast<std::size_t>(n), 1);
    int support = 0;
    for (int l = 0; l < n; ++l) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (x(l, s[k]) != x_s[k]) {
                match[static_cast<std::size_t>(l)] = 0;
                break;
            }
        }
        support += match[static_cast<std::size_t>(l)];
    }

    std::vector<std::optional<ConditionalMoments>> out(static_cast<std::size_t>(n));
    if (support == 0) return out;
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        weights.row(i, w);
        double s0 = 0.0;
        double s1 = 0.0;
        for (int l = 0; l < n; ++l) {
            if (!match[static_cast<std::size_t>(l)]) continue;
            s0 += w(l);
            s1 += w(l) * x(l, j);
        }
        if (!(s0 > 0.0)) continue;
        const double mean = s1 / s0;
        double var = 0.0;
        for (int l = 0; l < n; ++l) {
            if (!match[static_cast<std::size_t>(l)]) continue;
            const double dev = x(l, j) - mean;
            var += w(l) * dev * dev;
        }
        out[static_cast<std::size_t>(i)] = ConditionalMoments{mean, var / s0, support};
    }
    return out;
}

std::vector<double> score_candidates(const Dataset& dataset, const SmoothingWeights& weights,
                                     const std::vector<ScoreCandidate>& candidates, int n0, int threads)
{
    const int n = dataset.n();
    if (weights.n() != n) throw InputError("weights and dataset differ in n");
    if (n0 < 1) throw InputError("n0 must be at least 1");
    const int t = dataset.trials();
    const std::size_t nc = candidates.size();

    std::vector<PreparedCandidate> prep(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const auto& cand = candidates[c];
        if (cand.node < 0 || cand.node >= dataset.dx()) throw InputError("candidate node out of range");
        for (int s : cand.conditioning) {
            if (s < 0 || s >= dataset.dx() || s == cand.node) throw InputError("invalid conditioning node");
        }
        auto& pc = prep[c];
        pc.target = dataset.column(cand.node).array();
        pc.patterns = group_patterns(dataset.counts(), cand.conditioning);
        long kept = 0;
        for (int cnt : pc.patterns.count) {
            if (cnt >= n0) kept += cnt;
        }
        pc.factor.assign(pc.patterns.count.size(), 0.0);
        if (kept > 0) {
            pc.any = true;
            for (std::size_t p = 0; p < pc.factor.size(); ++p) {
                const int cnt = pc.patterns.count[p];
                if (cnt >= n0) pc.factor[p] = static_cast<double>(cnt) / static_cast<double>(kept);
            }
        }
    }

    // All rows coincide in homogeneous mode, so one observation stands for every i.
    const int rows = weights.rows_identical() ? 1 : n;
    std::vector<std::vector<double>> terms(nc, std::vector<double>(static_cast<std::size_t>(rows), 0.0));

    constexpr int kChunk = 64;
    const int chunks = (rows + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](int chunk) {
        Eigen::VectorXd w(n);
        std::vector<double> s0, s1, s2;
        const int begin = chunk * kChunk;
        const int end = std::min(rows, begin + kChunk);
        for (int i = begin; i < end; ++i) {
            weights.row(i, w);
            for (std::size_t c = 0; c < nc; ++c) {
                const auto& pc = prep[c];
                if (!pc.any) continue;
                const std::size_t np = pc.patterns.count.size();
                s0.assign(np, 0.0);
                s1.assign(np, 0.0);
                s2.assign(np, 0.0);
                for (int l = 0; l < n; ++l) {
                    const auto p = static_cast<std::size_t>(pc.patterns.id[static_cast<std::size_t>(l)]);
                    const double wl = w(l);
                    const double xl = pc.target(l);
                    s0[p] += wl;
                    s1[p] += wl * xl;
                    s2[p] += wl * xl * xl;
                }
                double term = 0.0;
                for (std::size_t p = 0; p < np; ++p) {
                    if (pc.factor[p] == 0.0 || !(s0[p] > 0.0)) continue;
                    const double mean = s1[p] / s0[p];
                    const double var = std::max(0.0, s2[p] / s0[p] - mean * mean);
                    term += pc.factor[p] * overdispersion(mean, var, t);
                }
                terms[c][static_cast<std::size_t>(i)] = term;
            }
        }
    });

    std::vector<double> scores(nc, std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < nc; ++c) {
        if (!prep[c].any) continue;
        double sum = 0.0;
        for (double v : terms[c]) sum += v;
        scores[c] = sum / static_cast<double>(rows);
    }
    return scores;
}

double root_score(const Dataset& dataset, const SmoothingWeights& weights, int j, int threads)
{
    return score_candidates(dataset, weights, {ScoreCandidate{j, {}}}, 1, threads).front();
}

double conditional_score(const Dataset& dataset, const SmoothingWeights& weights, int j, const std::vector<int>& c,
                         int n0, int threads)
{
    return score_candidates(dataset, weights, {ScoreCandidate{j, c}}, n0, threads).front();
}

OrderingResult estimate_ordering(const Dataset& dataset, const SmoothingWeights& weights,
                                 const NeighborhoodSets& neighborhoods, int n0, int threads)
{
    const int d = dataset.dx();
    if (d < 1) throw InputError("ordering needs at least one node");
    if (neighborhoods.size() != d) throw InputError("neighbourhoods do not match d_X");

    std::vector<std::vector<double>> table(static_cast<std::size_t>(d),
                                           std::vector<double>(static_cast<std::size_t>(d), std::nan("")));
    std::vector<int> order;
    std::vector<char> placed(static_cast<std::size_t>(d), 0);

    for (int v = 0; v + 1 < d; ++v) {
        std::vector<ScoreCandidate> cands;
        for (int j = 0; j < d; ++j) {
            if (placed[static_cast<std::size_t>(j)]) continue;
            std::vector<int> c;
            for (int l : neighborhoods[j]) {
                if (placed[static_cast<std::size_t>(l)]) c.push_back(l);
            }
            cands.push_back(ScoreCandidate{j, std::move(c)});
        }
        const std::vector<double> scores = score_candidates(dataset, weights, cands, v == 0 ? 1 : n0, threads);
        int best = -1;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cands.size(); ++k) {
            table[static_cast<std::size_t>(v)][static_cast<std::size_t>(cands[k].node)] = scores[k];
            if (scores[k] < best_score) {
                best_score = scores[k];
                best = cands[k].node;
            }
        }
        if (best < 0) {
            throw OrderingError("no candidate has a conditioning pattern with at least n0 = " + std::to_string(n0) +
                                " samples at step " + std::to_string(v));
        }
        order.push_back(best);
        placed[static_cast<std::size_t>(best)] = 1;
    }
    for (int j = 0; j < d; ++j) {
        if (!placed[static_cast<std::size_t>(j)]) order.push_back(j);
    }
    return OrderingResult{Ordering(std::move(order)), std::move(table)};
}

} // namespace pdag
