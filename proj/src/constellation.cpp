#include "sfpkit/constellation.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

namespace sfpkit::constellation {

void ConstellationParams::validate() const {
    if (!(S >= 2.0)) throw std::invalid_argument("constellation S must be >= 2");
    if (D < 1) throw std::invalid_argument("constellation D must be >= 1");
    if (Delta < 2) throw std::invalid_argument("constellation Delta must be >= 2");
}

AdjacencyList adjacency_from_edges(std::size_t n, const std::vector<Edge>& edges) {
    AdjacencyList g(n);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        g[u].push_back(v);
        g[v].push_back(u);
    }
    return g;
}

namespace {

Verdict fail(const std::string& property, const std::string& detail) {
    return Verdict{false, property, detail};
}

std::size_t count_edges(const AdjacencyList& g) {
    std::size_t twice = 0;
    for (const auto& nb : g) twice += nb.size();
    return twice / 2;
}

bool connected(const AdjacencyList& g) {
    if (g.empty()) return false;
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::deque<VertexId> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const VertexId u = queue.front();
        queue.pop_front();
        for (VertexId v : g[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                queue.push_back(v);
            }
    }
    return reached == g.size();
}

}  // namespace

Verdict is_constellation(const AdjacencyList& g, const std::vector<VertexId>& J,
                         const ConstellationParams& params) {
    params.validate();
    if (J.empty()) return fail("pre", "distinguished set J is empty");
    std::vector<std::uint8_t> in_j(g.size(), 0);
    for (VertexId x : J) {
        if (x >= g.size()) return fail("pre", "J vertex " + std::to_string(x) + " out of range");
        if (in_j[x]) return fail("pre", "duplicate J vertex " + std::to_string(x));
        in_j[x] = 1;
    }

    // P1: connected tree.
    const std::size_t m = count_edges(g);
    if (m != g.size() - 1)
        return fail("P1", "not a tree: |E| = " + std::to_string(m) + ", |V|-1 = " +
                              std::to_string(g.size() - 1));
    if (!connected(g)) return fail("P1", "not connected");

    // P2: star degrees.
    for (VertexId x : J)
        if (static_cast<double>(g[x].size()) < params.S / 2.0)
            return fail("P2", "vertex " + std::to_string(x) + " has degree " +
                                  std::to_string(g[x].size()) + " < S/2 = " +
                                  std::to_string(params.S / 2.0));

    // Star adjacency: explore tree regions around each x in J, stopping at
    // other J vertices. In a tree each reachable J vertex is hit once, at
    // exactly the unique-path distance.
    std::map<Edge, int> reduced;  // (min,max) -> distance
    std::vector<std::size_t> reduced_degree(g.size(), 0);
    std::vector<int> dist(g.size(), -1);
    std::vector<VertexId> touched;
    for (VertexId x : J) {
        touched.clear();
        std::deque<VertexId> queue{x};
        dist[x] = 0;
        touched.push_back(x);
        while (!queue.empty()) {
            const VertexId u = queue.front();
            queue.pop_front();
            for (VertexId v : g[u]) {
                if (dist[v] >= 0) continue;
                dist[v] = dist[u] + 1;
                touched.push_back(v);
                if (in_j[v]) {
                    const Edge key{std::min(x, v), std::max(x, v)};
                    auto [it, inserted] = reduced.emplace(key, dist[v]);
                    if (inserted) {
                        ++reduced_degree[x];
                        ++reduced_degree[v];
                    }
                } else {
                    queue.push_back(v);
                }
            }
        }
        for (VertexId v : touched) dist[v] = -1;
    }

    // P3: star-adjacent pairs within distance D.
    for (const auto& [edge, d] : reduced)
        if (d > params.D)
            return fail("P3", "stars " + std::to_string(edge.first) + " and " +
                                  std::to_string(edge.second) + " at distance " +
                                  std::to_string(d) + " > D = " + std::to_string(params.D));

    // P4: reduced graph is a connected tree with bounded degree.
    if (reduced.size() != J.size() - 1)
        return fail("P4", "reduced graph has " + std::to_string(reduced.size()) +
                              " edges, expected |J|-1 = " + std::to_string(J.size() - 1));
    {
        std::map<VertexId, VertexId> root;
        for (VertexId x : J) root[x] = x;
        auto find = [&](VertexId v) {
            while (root[v] != v) v = root[v] = root[root[v]];
            return v;
        };
        std::size_t parts = J.size();
        for (const auto& [edge, d] : reduced) {
            const VertexId a = find(edge.first), b = find(edge.second);
            if (a != b) {
                root[a] = b;
                --parts;
            }
        }
        if (parts != 1) return fail("P4", "reduced graph is disconnected");
    }
    for (VertexId x : J)
        if (reduced_degree[x] > static_cast<std::size_t>(params.Delta))
            return fail("P4", "star " + std::to_string(x) + " has reduced degree " +
                                  std::to_string(reduced_degree[x]) + " > Delta = " +
                                  std::to_string(params.Delta));

    return Verdict{};
}

Verdict verify(const Constellation& c) {
    std::vector<VertexId> sorted = c.vertices;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    auto dense = [&](VertexId v) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
        if (it == sorted.end() || *it != v)
            throw std::invalid_argument("constellation references vertex outside its set");
        return static_cast<VertexId>(it - sorted.begin());
    };
    std::vector<Edge> edges;
    edges.reserve(c.tree_edges.size());
    for (const auto& [u, v] : c.tree_edges) edges.emplace_back(dense(u), dense(v));
    std::vector<VertexId> J;
    J.reserve(c.distinguished.size());
    for (VertexId x : c.distinguished) J.push_back(dense(x));
    return is_constellation(adjacency_from_edges(sorted.size(), edges), J, c.params);
}

namespace {

// Enumerates all simple paths between a and b by backtracking; used only by
// the reference checker on tiny graphs.
void all_simple_paths(const AdjacencyList& g, VertexId at, VertexId target,
                      std::vector<VertexId>& current, std::vector<std::uint8_t>& used,
                      std::vector<std::vector<VertexId>>& out) {
    if (at == target) {
        out.push_back(current);
        return;
    }
    for (VertexId v : g[at]) {
        if (used[v]) continue;
        used[v] = 1;
        current.push_back(v);
        all_simple_paths(g, v, target, current, used, out);
        current.pop_back();
        used[v] = 0;
    }
}

}  // namespace

Verdict is_constellation_bruteforce(const AdjacencyList& g, const std::vector<VertexId>& J,
                                    const ConstellationParams& params) {
    params.validate();
    if (J.empty()) return fail("pre", "distinguished set J is empty");
    std::set<VertexId> jset(J.begin(), J.end());
    if (jset.size() != J.size()) return fail("pre", "duplicate J vertex");
    for (VertexId x : J)
        if (x >= g.size()) return fail("pre", "J vertex out of range");

    if (count_edges(g) != g.size() - 1) return fail("P1", "edge count != |V|-1");
    if (!connected(g)) return fail("P1", "not connected");

    for (VertexId x : J)
        if (static_cast<double>(g[x].size()) < params.S / 2.0)
            return fail("P2", "vertex " + std::to_string(x) + " below S/2");

    // Exhaustive star adjacency via full path enumeration.
    std::map<Edge, int> reduced;
    for (std::size_t i = 0; i < J.size(); ++i) {
        for (std::size_t j = i + 1; j < J.size(); ++j) {
            std::vector<std::vector<VertexId>> paths;
            std::vector<VertexId> current{J[i]};
            std::vector<std::uint8_t> used(g.size(), 0);
            used[J[i]] = 1;
            all_simple_paths(g, J[i], J[j], current, used, paths);
            if (paths.size() != 1)
                return fail("P1", "path count between two vertices is not 1");
            const auto& path = paths.front();
            bool interior_star = false;
            for (std::size_t k = 1; k + 1 < path.size(); ++k)
                if (jset.count(path[k])) interior_star = true;
            if (!interior_star)
                reduced[{std::min(J[i], J[j]), std::max(J[i], J[j])}] =
                    static_cast<int>(path.size() - 1);
        }
    }

    for (const auto& [edge, d] : reduced)
        if (d > params.D)
            return fail("P3", "star pair exceeds D");

    if (reduced.size() != J.size() - 1) return fail("P4", "reduced graph is not a tree");
    {
        std::map<VertexId, VertexId> root;
        for (VertexId x : J) root[x] = x;
        auto find = [&](VertexId v) {
            while (root[v] != v) v = root[v] = root[root[v]];
            return v;
        };
        std::size_t parts = J.size();
        for (const auto& [edge, d] : reduced) {
            const VertexId a = find(edge.first), b = find(edge.second);
            if (a != b) {
                root[a] = b;
                --parts;
            }
        }
        if (parts != 1) return fail("P4", "reduced graph is disconnected");
    }
    std::map<VertexId, std::size_t> deg;
    for (const auto& [edge, d] : reduced) {
        ++deg[edge.first];
        ++deg[edge.second];
    }
    for (const auto& [v, k] : deg)
        if (k > static_cast<std::size_t>(params.Delta)) return fail("P4", "degree > Delta");
    return Verdict{};
}

}  // namespace sfpkit::constellation
