#include "sfpkit/pipeline_gt2.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace sfpkit::constellation {

VertexAssignment assign_vertices(const SfpGraph& g, const BoxPartition& p) {
    VertexAssignment a;
    const std::size_t n = g.num_vertices();
    a.coarse_of.resize(n);
    a.fine_of.resize(n);
    for (VertexId v = 0; v < n; ++v) {
        const auto x = g.position(v);
        a.coarse_of[v] = p.coarse_cell_of(x);
        a.fine_of[v] = a.coarse_of[v] < 0 ? -1 : p.fine_cell_of(x);
        if (a.coarse_of[v] < 0)
            ++a.outside_count;
        else if (a.fine_of[v] < 0)
            ++a.margin_count;
    }
    return a;
}

std::vector<std::vector<VertexId>> component_per_fine_cell(const SfpGraph& g,
                                                           const BoxPartition& p,
                                                           const VertexAssignment& a) {
    std::vector<std::vector<VertexId>> members(p.m_f);
    for (VertexId v = 0; v < g.num_vertices(); ++v)
        if (a.fine_of[v] >= 0) members[a.fine_of[v]].push_back(v);

    std::vector<std::vector<VertexId>> largest(p.m_f);
    std::vector<std::uint8_t> visited(g.num_vertices(), 0);
    std::vector<VertexId> component;
    for (long long cell = 0; cell < p.m_f; ++cell) {
        const auto& verts = members[cell];
        for (VertexId v : verts) {
            if (visited[v]) continue;
            component.clear();
            std::deque<VertexId> queue{v};
            visited[v] = 1;
            while (!queue.empty()) {
                const VertexId u = queue.front();
                queue.pop_front();
                component.push_back(u);
                for (VertexId w : g.neighbors(u)) {
                    if (visited[w] || a.fine_of[w] != cell) continue;
                    visited[w] = 1;
                    queue.push_back(w);
                }
            }
            std::sort(component.begin(), component.end());
            auto& best = largest[cell];
            if (component.size() > best.size() ||
                (component.size() == best.size() && !best.empty() &&
                 component.front() < best.front()))
                best = component;
        }
    }
    return largest;
}

EventCheck check_E1(const std::vector<std::vector<VertexId>>& components,
                    const BoxPartition& p) {
    for (std::size_t j = 0; j < components.size(); ++j) {
        const double size = static_cast<double>(components[j].size());
        if (!(size > p.comp_lower))
            return {false, "fine_cell " + std::to_string(j),
                    "largest component size " + std::to_string(components[j].size()) +
                        " not above lower bound " + std::to_string(p.comp_lower)};
        if (!(size < p.comp_upper))
            return {false, "fine_cell " + std::to_string(j),
                    "largest component size " + std::to_string(components[j].size()) +
                        " not below upper bound " + std::to_string(p.comp_upper)};
    }
    return {};
}

std::vector<VertexId> find_stars(const SfpGraph& g, const BoxPartition& p,
                                 const VertexAssignment& a) {
    std::vector<VertexId> stars(p.m_c, 0);
    std::vector<std::uint8_t> seen(p.m_c, 0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        const long long i = a.coarse_of[v];
        if (i < 0) continue;
        if (!seen[i] || g.weight(v) > g.weight(stars[i]) ||
            (g.weight(v) == g.weight(stars[i]) && v < stars[i])) {
            stars[i] = v;
            seen[i] = 1;
        }
    }
    std::string empties;
    for (long long i = 0; i < p.m_c; ++i)
        if (!seen[i]) empties += (empties.empty() ? "" : ", ") + std::to_string(i);
    if (!empties.empty())
        throw std::runtime_error("empty coarse cells: " + empties);
    return stars;
}

EventCheck check_E2(const SfpGraph& g, const BoxPartition& p, const VertexAssignment& a,
                    const std::vector<std::vector<VertexId>>& components,
                    const std::vector<VertexId>& stars) {
    for (long long i = 0; i < p.m_c; ++i) {
        const VertexId x = stars[i];
        if (!(g.weight(x) > p.weight_threshold))
            return {false, "coarse_cell " + std::to_string(i),
                    "star weight " + std::to_string(g.weight(x)) + " not above threshold " +
                        std::to_string(p.weight_threshold)};
        const long long f = a.fine_of[x];
        if (f < 0)
            return {false, "coarse_cell " + std::to_string(i),
                    "star lies in the subdivision margin (no fine cell)"};
        const auto& comp = components[f];
        if (!std::binary_search(comp.begin(), comp.end(), x))
            return {false, "coarse_cell " + std::to_string(i),
                    "star not in the largest component of its fine cell " +
                        std::to_string(f)};
    }
    return {};
}

EventCheck check_E_star(const SfpGraph& g, const BoxPartition& p,
                        const VertexAssignment& a, const std::vector<VertexId>& stars) {
    for (long long i = 0; i < p.m_c; ++i) {
        const VertexId x = stars[i];
        std::size_t in_cell = 0;
        for (VertexId y : g.neighbors(x))
            if (a.coarse_of[y] == i) ++in_cell;
        if (static_cast<double>(in_cell) < p.star_degree_min)
            return {false, "coarse_cell " + std::to_string(i),
                    "star " + std::to_string(x) + " has " + std::to_string(in_cell) +
                        " in-cell neighbors < " + std::to_string(p.star_degree_min)};
    }
    return {};
}

PathsResult build_star_paths(const SfpGraph& g, const BoxPartition& p,
                             const VertexAssignment& a,
                             const std::vector<VertexId>& stars) {
    PathsResult res;
    const std::size_t n = g.num_vertices();
    std::vector<int> parent(n, -2);  // -2 unseen, else predecessor (or self for source)
    std::vector<VertexId> touched;

    for (long long i = 0; i + 1 < p.m_c; ++i) {
        const VertexId from = stars[i];
        const VertexId to = stars[i + 1];
        const bool want_red = (i % 2) == 0;  // alternate color classes

        auto allowed = [&](VertexId v) {
            if (v == from || v == to) return true;
            const long long c = a.coarse_of[v];
            if (c != i && c != i + 1) return false;
            const long long f = a.fine_of[v];
            if (f < 0) return false;  // margin vertices carry no color
            return static_cast<bool>(p.fine_red[f]) == want_red;
        };

        touched.clear();
        std::deque<VertexId> queue{from};
        parent[from] = static_cast<int>(from);
        touched.push_back(from);
        bool found = false;
        int best_unreached = -1;
        while (!queue.empty() && !found) {
            const VertexId u = queue.front();
            queue.pop_front();
            for (VertexId v : g.neighbors(u)) {
                if (parent[v] != -2 || !allowed(v)) continue;
                parent[v] = static_cast<int>(u);
                touched.push_back(v);
                if (v == to) {
                    found = true;
                    break;
                }
                queue.push_back(v);
            }
        }
        if (!found) {
            res.ok = false;
            res.witness = "pair (" + std::to_string(i) + ", " + std::to_string(i + 1) + ")";
            res.detail = "no path in the color-restricted subgraph";
            for (VertexId v : touched) parent[v] = -2;
            return res;
        }
        std::vector<VertexId> path;
        for (VertexId v = to;; v = static_cast<VertexId>(parent[v])) {
            path.push_back(v);
            if (v == from) break;
        }
        std::reverse(path.begin(), path.end());
        const double len = static_cast<double>(path.size() - 1);
        for (VertexId v : touched) parent[v] = -2;
        if (len > p.path_length_max) {
            res.ok = false;
            res.witness = "pair (" + std::to_string(i) + ", " + std::to_string(i + 1) + ")";
            res.detail = "shortest restricted path has length " +
                         std::to_string(static_cast<long long>(len)) + " > bound " +
                         std::to_string(p.path_length_max);
            return res;
        }
        res.paths.push_back(std::move(path));
    }
    return res;
}

PathCheck validate_star_paths(const SfpGraph& g, const std::vector<VertexId>& stars,
                              const std::vector<std::vector<VertexId>>& paths,
                              double max_len) {
    if (paths.size() + 1 != stars.size() && !(stars.size() <= 1 && paths.empty()))
        return {false, "path count does not match star count"};
    std::set<VertexId> interior_seen;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& path = paths[i];
        if (path.size() < 2) return {false, "path " + std::to_string(i) + " too short"};
        if (path.front() != stars[i] || path.back() != stars[i + 1])
            return {false, "path " + std::to_string(i) + " has wrong endpoints"};
        if (static_cast<double>(path.size() - 1) > max_len)
            return {false, "path " + std::to_string(i) + " exceeds length bound"};
        std::set<VertexId> unique(path.begin(), path.end());
        if (unique.size() != path.size())
            return {false, "path " + std::to_string(i) + " is not simple"};
        for (std::size_t k = 0; k + 1 < path.size(); ++k)
            if (!g.has_edge(path[k], path[k + 1]))
                return {false, "path " + std::to_string(i) + " uses a non-edge"};
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            if (!interior_seen.insert(path[k]).second)
                return {false, "interior vertex " + std::to_string(path[k]) +
                                   " shared between paths"};
        }
    }
    // Interiors must avoid every endpoint as well.
    for (VertexId s : stars)
        if (interior_seen.count(s))
            return {false, "star " + std::to_string(s) + " appears as a path interior"};
    return {};
}

ExtractResult extract_constellation_gamma_gt2(const SfpGraph& g, const PartitionSpec& spec) {
    ExtractResult out;
    if (g.params().gamma() <= 2.0)
        out.warnings.push_back("gamma = " + std::to_string(g.params().gamma()) +
                               " <= 2: the small-world construction is designed for gamma > 2");

    BoxPartition p;
    try {
        p = build_partition(g.params(), spec);
    } catch (const std::exception& e) {
        out.failure = StageFailure{"partition", "", e.what()};
        return out;
    }

    const VertexAssignment a = assign_vertices(g, p);
    const auto components = component_per_fine_cell(g, p, a);

    if (const auto e1 = check_E1(components, p); !e1.ok) {
        out.failure = StageFailure{"E1", e1.witness, e1.detail};
        return out;
    }

    std::vector<VertexId> stars;
    try {
        stars = find_stars(g, p, a);
    } catch (const std::exception& e) {
        out.failure = StageFailure{"stars", "", e.what()};
        return out;
    }

    if (const auto e2 = check_E2(g, p, a, components, stars); !e2.ok) {
        out.failure = StageFailure{"E2", e2.witness, e2.detail};
        return out;
    }
    if (const auto es = check_E_star(g, p, a, stars); !es.ok) {
        out.failure = StageFailure{"E_star", es.witness, es.detail};
        return out;
    }

    auto paths = build_star_paths(g, p, a, stars);
    if (!paths.ok) {
        out.failure = StageFailure{"E_paths", paths.witness, paths.detail};
        return out;
    }
    if (const auto pc = validate_star_paths(g, stars, paths.paths, p.path_length_max); !pc.ok) {
        out.failure = StageFailure{"E_paths", "validator", pc.detail};
        return out;
    }

    // Assembly: the union of the inter-star paths is a tree (paths are
    // disjoint except at shared star endpoints); attach to each star its
    // highest-weight in-cell neighbors as leaves, up to S of them.
    Constellation c;
    c.params.S = 2.0 * p.star_degree_min;
    c.params.S = std::max(c.params.S, 2.0);
    c.params.D = std::max(1, static_cast<int>(std::floor(p.path_length_max)));
    c.params.Delta = 2;
    c.distinguished = stars;
    c.paths = paths.paths;

    std::set<VertexId> in_tree;
    std::set<Edge> tree_edges;
    for (const auto& path : paths.paths) {
        for (std::size_t k = 0; k < path.size(); ++k) {
            in_tree.insert(path[k]);
            if (k + 1 < path.size())
                tree_edges.insert({std::min(path[k], path[k + 1]),
                                   std::max(path[k], path[k + 1])});
        }
    }
    for (VertexId s : stars) in_tree.insert(s);  // m_c == 1 has no paths

    const std::size_t take = static_cast<std::size_t>(std::ceil(c.params.S));
    for (long long i = 0; i < p.m_c; ++i) {
        const VertexId x = stars[i];
        std::vector<VertexId> candidates;
        for (VertexId y : g.neighbors(x))
            if (a.coarse_of[y] == i) candidates.push_back(y);
        std::sort(candidates.begin(), candidates.end(), [&](VertexId l, VertexId r) {
            if (g.weight(l) != g.weight(r)) return g.weight(l) > g.weight(r);
            return l < r;
        });
        std::size_t added = 0;
        for (VertexId y : candidates) {
            if (added >= take) break;
            if (in_tree.count(y)) continue;  // already a path vertex: keep the tree acyclic
            in_tree.insert(y);
            tree_edges.insert({std::min(x, y), std::max(x, y)});
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
