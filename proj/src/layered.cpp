#include "sfpkit/layered.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "sfpkit/partition.hpp"  // snake_order

namespace sfpkit::constellation {

long long LayeredBoxes::boxes_in_layer(int k) const {
    long long r = 1;
    for (int j = 0; j < d; ++j) r *= per_axis(k);
    return r;
}

double LayeredBoxes::expected_occupancy(int k) const {
    return std::pow(2.0, d) * (1.0 - std::exp(-d * L)) *
           std::pow(2.0 * std::exp(-L), static_cast<double>(k) * d);
}

int LayeredBoxes::band_of(double w) const {
    if (!(w > 1.0)) return -1;
    const int k = static_cast<int>(std::ceil(std::log(w) / weight_exp)) - 1;
    if (k < 0 || k > top()) return -1;
    return k;
}

long long LayeredBoxes::cell_of(int k, std::span<const double> x) const {
    const double side = spatial_side(k);
    const long long n = per_axis(k);
    long long flat = 0;
    for (int j = 0; j < d; ++j) {
        const double q = x[j] / side;
        if (q < 0.0) return -1;
        const long long c = static_cast<long long>(q);
        if (c >= n) return -1;
        flat = flat * n + c;
    }
    return flat;
}

long long LayeredBoxes::parent_of(int k, long long v) const {
    const auto coords = decode(k, v);
    std::vector<long long> parent(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j) parent[j] = coords[j] / 2;
    const long long np = per_axis(k + 1);
    long long flat = 0;
    for (long long c : parent) flat = flat * np + c;
    return flat;
}

std::vector<long long> LayeredBoxes::decode(int k, long long flat) const {
    const long long n = per_axis(k);
    std::vector<long long> coords(d);
    for (int j = d - 1; j >= 0; --j) {
        coords[j] = flat % n;
        flat /= n;
    }
    return coords;
}

long long LayeredBoxes::encode(int k, const std::vector<long long>& coords) const {
    const long long n = per_axis(k);
    long long flat = 0;
    for (long long c : coords) flat = flat * n + c;
    return flat;
}

LayeredBoxes build_layered_boxes(const SfpParams& params, const LayeredSpec& spec) {
    params.validate();
    const double gamma = params.gamma();
    const double log2 = std::log(2.0);
    if (!(spec.a > 0.0 && spec.a < 1.0 / log2))
        throw std::invalid_argument("a must lie in (0, 1/log 2)");
    if (!(spec.L > gamma / 2.0 * log2 && spec.L < log2))
        throw std::invalid_argument("L must lie in ((gamma/2) log 2, log 2)");
    if (!(spec.S >= 2.0)) throw std::invalid_argument("S must be >= 2");

    LayeredBoxes b;
    b.d = params.d;
    b.L = spec.L;
    b.k_n = static_cast<int>(std::floor(spec.a * std::log(params.volume) / params.d));
    if (b.k_n < 1)
        throw std::invalid_argument("n too small for layered construction (k_n < 1)");
    b.axis_top = static_cast<long long>(
        std::floor(std::pow(params.volume, (1.0 - spec.a * log2) / params.d)));
    if (b.axis_top < 1)
        throw std::invalid_argument("n too small for layered construction (m_n < 1)");
    b.m_n = 1;
    for (int j = 0; j < params.d; ++j) b.m_n *= b.axis_top;
    b.weight_exp = spec.L * params.alpha / gamma;
    b.eps1 = log2 - spec.L;
    b.eps2 = params.alpha * (2.0 * spec.L / gamma - log2);
    return b;
}

namespace {

struct BoxKey {
    int k;
    long long v;
    bool operator<(const BoxKey& o) const { return k != o.k ? k < o.k : v < o.v; }
};

}  // namespace

LayeredExtractResult extract_constellation_gamma_in_1_2(const SfpGraph& g,
                                                        const LayeredSpec& spec) {
    LayeredExtractResult out;
    const double gamma = g.params().gamma();
    if (gamma <= 1.0 || gamma >= 2.0)
        out.warnings.push_back("gamma = " + std::to_string(gamma) +
                               " outside (1,2): the layered construction targets the "
                               "heavy-tail regime");

    LayeredBoxes boxes;
    try {
        boxes = build_layered_boxes(g.params(), spec);
    } catch (const std::exception& e) {
        out.failure = StageFailure{"layered_boxes", "", e.what()};
        return out;
    }

    out.report.boxes_per_layer.resize(boxes.k_n);
    out.report.good_per_layer.assign(boxes.k_n, 0);
    for (int k = 0; k < boxes.k_n; ++k)
        out.report.boxes_per_layer[k] = boxes.boxes_in_layer(k);

    // Box membership.
    std::map<BoxKey, std::vector<VertexId>> members;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        const int k = boxes.band_of(g.weight(v));
        if (k < 0) continue;
        const long long cell = boxes.cell_of(k, g.position(v));
        if (cell < 0) continue;
        members[{k, cell}].push_back(v);
    }

    auto star_of = [&](const std::vector<VertexId>& verts) {
        VertexId best = verts.front();
        for (VertexId v : verts)
            if (g.weight(v) > g.weight(best) ||
                (g.weight(v) == g.weight(best) && v < best))
                best = v;
        return best;
    };

    auto in_box_star_degree = [&](VertexId star, const std::vector<VertexId>& verts) {
        std::size_t count = 0;
        for (VertexId v : verts)
            if (v != star && g.has_edge(star, v)) ++count;
        return count;
    };

    const double occupancy_min = spec.S + 1.0;

    struct GoodBox {
        long long cell;
        VertexId star;
        std::vector<VertexId> vertices;
    };
    std::map<BoxKey, GoodBox> good;

    // Top layer: snake chain anchored at the origin box. A box is good only
    // if its predecessor is, so the good set is a prefix of the chain.
    const int kt = boxes.top();
    const auto order = snake_order(boxes.axis_top, boxes.d);
    VertexId prev_star = 0;
    std::vector<VertexId> chain_stars;
    std::optional<StageFailure> first_failure;
    for (long long i = 0; i < boxes.m_n; ++i) {
        std::vector<long long> coords(order[i].begin(), order[i].end());
        const long long cell = boxes.encode(kt, coords);
        const auto it = members.find({kt, cell});
        const std::string witness =
            "layer " + std::to_string(kt) + " box sigma(" + std::to_string(i) + ")";
        if (it == members.end() ||
            static_cast<double>(it->second.size()) < occupancy_min) {
            first_failure = StageFailure{
                "top_chain", witness,
                "occupancy " + std::to_string(it == members.end() ? 0 : it->second.size()) +
                    " < S+1 = " + std::to_string(occupancy_min)};
            break;
        }
        const VertexId star = star_of(it->second);
        if (static_cast<double>(in_box_star_degree(star, it->second)) < spec.S) {
            first_failure = StageFailure{"top_chain", witness,
                                         "star has fewer than S in-box neighbors"};
            break;
        }
        if (i > 0 && !g.has_edge(star, prev_star)) {
            first_failure = StageFailure{"top_chain", witness,
                                         "star not connected to the previous chain star"};
            break;
        }
        good.emplace(BoxKey{kt, cell}, GoodBox{cell, star, it->second});
        chain_stars.push_back(star);
        prev_star = star;
        ++out.report.good_per_layer[kt];
    }

    if (chain_stars.empty()) {
        out.failure = first_failure;
        return out;
    }

    // Lower layers, top-down: good requires a good parent, occupancy,
    // in-box star degree and an edge to the parent star.
    for (int k = kt - 1; k >= 0; --k) {
        std::vector<BoxKey> parents;
        for (const auto& [key, gb] : good)
            if (key.k == k + 1) parents.push_back(key);
        for (const BoxKey& pkey : parents) {
            const GoodBox& gb = good.at(pkey);
            const auto pcoords = boxes.decode(k + 1, gb.cell);
            const long long combos = 1ll << boxes.d;
            for (long long e = 0; e < combos; ++e) {
                std::vector<long long> child(pcoords.size());
                for (int j = 0; j < boxes.d; ++j)
                    child[j] = 2 * pcoords[j] + ((e >> j) & 1);
                const long long cell = boxes.encode(k, child);
                const auto it = members.find({k, cell});
                if (it == members.end() ||
                    static_cast<double>(it->second.size()) < occupancy_min)
                    continue;
                const VertexId star = star_of(it->second);
                if (static_cast<double>(in_box_star_degree(star, it->second)) < spec.S)
                    continue;
                if (!g.has_edge(star, gb.star)) continue;
                good.emplace(BoxKey{k, cell}, GoodBox{cell, star, it->second});
                ++out.report.good_per_layer[k];
            }
        }
    }

    // Assemble the star tree: chain edges along the top layer, parent-child
    // edges below, and up to S highest-weight in-box neighbors per star as
    // leaves.
    Constellation c;
    c.params.S = spec.S;
    c.params.D = 1;
    c.params.Delta = (1 << boxes.d) + 2;

    std::set<VertexId> in_tree;
    std::set<Edge> tree_edges;
    for (std::size_t i = 0; i < chain_stars.size(); ++i) {
        in_tree.insert(chain_stars[i]);
        c.distinguished.push_back(chain_stars[i]);
        if (i > 0) {
            tree_edges.insert({std::min(chain_stars[i - 1], chain_stars[i]),
                               std::max(chain_stars[i - 1], chain_stars[i])});
            c.paths.push_back({chain_stars[i - 1], chain_stars[i]});
        }
    }
    for (int k = kt - 1; k >= 0; --k) {
        for (const auto& [key, gb] : good) {
            if (key.k != k) continue;
            const long long pcell = boxes.parent_of(k, gb.cell);
            const auto pit = good.find({k + 1, pcell});
            if (pit == good.end()) continue;  // cannot happen by construction
            in_tree.insert(gb.star);
            c.distinguished.push_back(gb.star);
            tree_edges.insert({std::min(gb.star, pit->second.star),
                               std::max(gb.star, pit->second.star)});
            c.paths.push_back({pit->second.star, gb.star});
        }
    }

    const std::size_t take = static_cast<std::size_t>(std::ceil(spec.S));
    for (const auto& [key, gb] : good) {
        std::vector<VertexId> candidates;
        for (VertexId v : gb.vertices)
            if (v != gb.star && g.has_edge(gb.star, v)) candidates.push_back(v);
        std::sort(candidates.begin(), candidates.end(), [&](VertexId l, VertexId r) {
            if (g.weight(l) != g.weight(r)) return g.weight(l) > g.weight(r);
            return l < r;
        });
        std::size_t added = 0;
        for (VertexId v : candidates) {
            if (added >= take) break;
            if (in_tree.count(v)) continue;
            in_tree.insert(v);
            tree_edges.insert({std::min(gb.star, v), std::max(gb.star, v)});
            ++added;
        }
    }

    c.vertices.assign(in_tree.begin(), in_tree.end());
    c.tree_edges.assign(tree_edges.begin(), tree_edges.end());

    if (const auto verdict = verify(c); !verdict.ok) {
        out.failure = StageFailure{"final_verify", verdict.property, verdict.detail};
        return out;
    }
    out.constellation = std::move(c);
    return out;
}

}  // namespace sfpkit::constellation
