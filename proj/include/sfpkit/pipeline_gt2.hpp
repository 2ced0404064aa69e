#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfpkit/constellation.hpp"
#include "sfpkit/graph.hpp"
#include "sfpkit/partition.hpp"

namespace sfpkit::constellation {

// Vertex -> cell maps for a partition. Vertices in a coarse cell but not in
// any fine cell sit in the subdivision margin and are excluded from the
// fine-cell machinery (but still count for coarse-cell quantities).
struct VertexAssignment {
    std::vector<long long> coarse_of;  // snake rank or -1
    std::vector<long long> fine_of;    // fine cell id or -1
    std::size_t margin_count = 0;      // coarse >= 0 but fine < 0
    std::size_t outside_count = 0;     // coarse < 0
};

VertexAssignment assign_vertices(const SfpGraph& g, const BoxPartition& p);

// Largest connected component of the graph restricted to each fine cell;
// size ties broken by the smallest minimum vertex id. Empty cell -> empty
// component.
std::vector<std::vector<VertexId>> component_per_fine_cell(const SfpGraph& g,
                                                           const BoxPartition& p,
                                                           const VertexAssignment& a);

struct EventCheck {
    bool ok = true;
    std::string witness;  // first failing cell / star
    std::string detail;
};

// E1: comp_lower < |C_j^f| < comp_upper for every fine cell.
EventCheck check_E1(const std::vector<std::vector<VertexId>>& components,
                    const BoxPartition& p);

// Max-weight vertex of every coarse cell (ties: smallest id). Throws
// std::runtime_error listing empty coarse cells.
std::vector<VertexId> find_stars(const SfpGraph& g, const BoxPartition& p,
                                 const VertexAssignment& a);

// E2: every star has weight > weight_threshold and lies in the largest
// component of its fine cell.
EventCheck check_E2(const SfpGraph& g, const BoxPartition& p, const VertexAssignment& a,
                    const std::vector<std::vector<VertexId>>& components,
                    const std::vector<VertexId>& stars);

// E_star: every star has at least star_degree_min neighbors inside its own
// coarse cell.
EventCheck check_E_star(const SfpGraph& g, const BoxPartition& p,
                        const VertexAssignment& a, const std::vector<VertexId>& stars);

struct PathsResult {
    bool ok = true;
    std::vector<std::vector<VertexId>> paths;  // full vertex sequences
    std::string witness;
    std::string detail;
};

// Paths between consecutive stars: BFS inside B_i u B_{i+1} restricted to
// one chessboard color class (alternating with the pair index), length
// bounded by path_length_max. Disjointness across pairs comes from the
// color alternation and the coarse-cell locality.
PathsResult build_star_paths(const SfpGraph& g, const BoxPartition& p,
                             const VertexAssignment& a,
                             const std::vector<VertexId>& stars);

struct PathCheck {
    bool ok = true;
    std::string detail;
};

// Independent validator: simple paths, correct endpoints, edges exist,
// lengths within bound, pairwise vertex-disjoint except shared endpoints.
PathCheck validate_star_paths(const SfpGraph& g, const std::vector<VertexId>& stars,
                              const std::vector<std::vector<VertexId>>& paths,
                              double max_len);

struct StageFailure {
    std::string stage;  // partition|components|E1|stars|E2|E_star|E_paths|assembly|final_verify
    std::string witness;
    std::string detail;
};

struct ExtractResult {
    std::optional<Constellation> constellation;
    std::optional<StageFailure> failure;
    std::vector<std::string> warnings;
    bool ok() const { return constellation.has_value(); }
};

// Full pipeline: partition -> components -> E1 -> stars -> E2 -> E_star ->
// paths -> tree assembly -> final verification with
// S = 2 * star_degree_min, D = path_length_max, Delta = 2.
ExtractResult extract_constellation_gamma_gt2(const SfpGraph& g, const PartitionSpec& spec);

}  // namespace sfpkit::constellation
