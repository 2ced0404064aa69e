#include "sfpkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "sfpkit/rng.hpp"

namespace sfpkit::analysis {

TailFit hill_fit(std::vector<double> values, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5))
        throw std::invalid_argument("tail fraction must lie in (0, 0.5]");
    if (values.size() < 100) throw std::invalid_argument("need at least 100 values");
    std::sort(values.begin(), values.end(), std::greater<double>());
    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(tail_fraction * values.size())));
    const double pivot = values[k];  // (k+1)-th order statistic
    if (!(pivot > 0.0)) throw std::invalid_argument("degenerate tail: pivot is zero");
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(values[i] / pivot);
    if (!(s > 0.0)) throw std::invalid_argument("degenerate tail: constant top order statistics");

    TailFit fit;
    fit.exponent = static_cast<double>(k) / s;
    const double se = fit.exponent / std::sqrt(static_cast<double>(k));
    fit.ci_low = fit.exponent - 1.959963984540054 * se;
    fit.ci_high = fit.exponent + 1.959963984540054 * se;
    fit.tail_fraction = tail_fraction;
    fit.k_used = k;
    return fit;
}

TailFit degree_tail_fit(const SfpGraph& g, double tail_fraction) {
    if (g.num_vertices() < 100)
        throw std::invalid_argument("need at least 100 vertices for a tail fit");
    std::vector<double> degrees(g.num_vertices());
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        degrees[v] = static_cast<double>(g.degree(v));
    return hill_fit(std::move(degrees), tail_fraction);
}

namespace {

SlopeFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate regression: constant predictor");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssres = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ssres += r * r;
    }
    fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ssres / syy;
    fit.points = n;
    return fit;
}

}  // namespace

SlopeFit degree_weight_scaling(const SfpGraph& g, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("need at least 2 bins");
    if (g.num_vertices() == 0) throw std::invalid_argument("empty graph");
    double wmin = g.weight(0), wmax = g.weight(0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        wmin = std::min(wmin, g.weight(v));
        wmax = std::max(wmax, g.weight(v));
    }
    if (!(wmax > wmin))
        throw std::invalid_argument("insufficient occupied weight bins: all weights equal");
    const double lmin = std::log(wmin), lmax = std::log(wmax);
    std::vector<double> sum_deg(n_bins, 0.0), sum_logw(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        const double t = (std::log(g.weight(v)) - lmin) / (lmax - lmin);
        int b = static_cast<int>(t * n_bins);
        b = std::clamp(b, 0, n_bins - 1);
        sum_deg[b] += static_cast<double>(g.degree(v));
        sum_logw[b] += std::log(g.weight(v));
        ++count[b];
    }
    std::vector<double> x, y;
    for (int b = 0; b < n_bins; ++b) {
        if (count[b] == 0) continue;
        const double mean_deg = sum_deg[b] / count[b];
        if (mean_deg <= 0.0) continue;
        x.push_back(sum_logw[b] / count[b]);
        y.push_back(std::log(mean_deg));
    }
    if (x.size() < 10)
        throw std::invalid_argument("insufficient occupied weight bins: " +
                                    std::to_string(x.size()) + " < 10");
    return least_squares(x, y);
}

std::optional<int> graph_distance(const SfpGraph& g, VertexId u, VertexId v) {
    if (u >= g.num_vertices() || v >= g.num_vertices())
        throw std::invalid_argument("vertex out of range");
    if (u == v) return 0;
    std::vector<int> dist(g.num_vertices(), -1);
    std::deque<VertexId> queue{u};
    dist[u] = 0;
    while (!queue.empty()) {
        const VertexId w = queue.front();
        queue.pop_front();
        for (VertexId nb : g.neighbors(w)) {
            if (dist[nb] >= 0) continue;
            dist[nb] = dist[w] + 1;
            if (nb == v) return dist[nb];
            queue.push_back(nb);
        }
    }
    return std::nullopt;
}

std::vector<std::vector<VertexId>> connected_components(const SfpGraph& g) {
    // Union-find with union by size and path halving.
    const std::size_t n = g.num_vertices();
    std::vector<VertexId> parent(n);
    std::vector<std::uint32_t> size(n, 1);
    for (VertexId v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](VertexId v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (VertexId u = 0; u < n; ++u) {
        for (VertexId v : g.neighbors(u)) {
            if (v <= u) continue;
            VertexId a = find(u), b = find(v);
            if (a == b) continue;
            if (size[a] < size[b]) std::swap(a, b);
            parent[b] = a;
            size[a] += size[b];
        }
    }
    std::vector<std::vector<VertexId>> comps;
    std::vector<int> index(n, -1);
    for (VertexId v = 0; v < n; ++v) {
        const VertexId r = find(v);
        if (index[r] < 0) {
            index[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[index[r]].push_back(v);
    }
    return comps;
}

double largest_component_fraction(const SfpGraph& g) {
    if (g.num_vertices() == 0) throw std::invalid_argument("empty graph");
    std::size_t best = 0;
    for (const auto& c : connected_components(g)) best = std::max(best, c.size());
    return static_cast<double>(best) / static_cast<double>(g.num_vertices());
}

std::vector<DistanceSample> chemical_distance_sample(const SfpGraph& g,
                                                     std::size_t n_pairs,
                                                     std::uint64_t seed) {
    std::vector<DistanceSample> out;
    const auto comps = connected_components(g);
    const std::vector<VertexId>* largest = nullptr;
    for (const auto& c : comps)
        if (largest == nullptr || c.size() > largest->size()) largest = &c;
    if (largest == nullptr || largest->size() < 2) return out;

    Stream st(derive_key(seed, StreamTag::pairs));
    out.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const VertexId u = (*largest)[st.below(largest->size())];
        VertexId v = u;
        while (v == u) v = (*largest)[st.below(largest->size())];
        DistanceSample s;
        s.u = u;
        s.v = v;
        s.euclidean = distance(g.position(u), g.position(v), g.params());
        const auto hops = graph_distance(g, u, v);
        s.reachable = hops.has_value();
        s.hops = hops.value_or(-1);
        out.push_back(s);
    }
    return out;
}

ScalingFit extinction_scaling_fit(const std::vector<ScalingPoint>& pts, Predictor pred,
                                  double A) {
    if (pts.size() < 4) throw std::invalid_argument("need at least 4 points for a scaling fit");
    std::vector<double> x, y;
    ScalingFit fit;
    fit.predictor = pred;
    fit.A = A;
    for (const auto& pt : pts) {
        if (!(pt.median_tau > 0.0))
            throw std::invalid_argument("median extinction time must be positive");
        double predictor = pt.n;
        if (pred == Predictor::n_over_logA)
            predictor = pt.n / std::pow(std::log(pt.n), A);
        x.push_back(predictor);
        y.push_back(std::log(pt.median_tau));
        if (pt.lower_bound) fit.lower_bound_only = true;
    }
    const SlopeFit ls = least_squares(x, y);
    fit.slope = ls.slope;
    fit.intercept = ls.intercept;
    fit.r2 = ls.r2;
    fit.points = ls.points;
    return fit;
}

}  // namespace sfpkit::analysis
