#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sfpkit/params.hpp"

namespace sfpkit::constellation {

enum class PartitionMode { paper_faithful, explicit_sides };

// Coarse/fine subdivision parameters. In paper_faithful mode the geometry is
// driven by (A, theta) and the box volume; sides, depths and thresholds all
// come from the asymptotic formulas. explicit_sides decouples the geometric
// machinery from the asymptotics so that it can run at any scale: cell sides
// and the star/weight scales are supplied directly.
struct PartitionSpec {
    PartitionMode mode = PartitionMode::paper_faithful;

    double A = 0.0;
    double theta = 0.0;
    double nu_s = -1.0;  // < 0: midpoint of (nu_p, (A-1)/gamma)
    double eta = -1.0;   // < 0: midpoint of (alpha*nu_s/d, (A-1)/(tau-1))

    // Threshold constants; artifact defaults, not paper values.
    double beta1 = 0.1;
    double beta2 = 3.0;
    double c2 = 1.0;
    double c3 = 1.0;

    // explicit_sides mode:
    double coarse_side = 0.0;
    std::vector<double> level_sides;  // strictly decreasing; last = fine side
    double star_scale = -1.0;         // stand-in for (log n)^{nu_s}; < 0: fine volume
    double weight_min = -1.0;         // stand-in for (log n)^{eta};  < 0: 1.0
};

// Snake (boustrophedon) order over a d-dimensional grid: rank 0 is the
// origin and consecutive cells share a face.
std::vector<std::vector<int>> snake_order(long long per_axis, int d);

class BoxPartition {
public:
    int d = 1;
    PartitionMode mode = PartitionMode::paper_faithful;
    double box_side = 0.0;
    double log_n = 0.0;

    double coarse_side = 0.0;
    std::vector<double> level_sides;
    long long coarse_per_axis = 0;
    std::vector<long long> level_per_axis;  // a_k, k = 1..s
    long long m_c = 0;
    std::vector<long long> m_levels;  // m_k = a_k^d
    long long m_f = 0;
    long long fines_per_coarse = 1;

    int s = 0;
    double nu_p = 0.0;        // paper mode only
    double fine_volume = 0.0; // (log n)^{nu_p} in paper mode, fine side^d otherwise

    // Resolved event thresholds.
    double comp_lower = 0.0;
    double comp_upper = 0.0;
    double star_degree_min = 0.0;
    double weight_threshold = 1.0;
    double path_length_max = 0.0;

    // Coarse cells in snake order (rank -> grid coords).
    std::vector<int> coarse_coords;        // m_c * d, row-major by rank
    std::vector<long long> rank_of_flat;   // row-major flat grid index -> rank

    // Fine cells, grouped contiguously by coarse rank: K_i is the range
    // [i * fines_per_coarse, (i+1) * fines_per_coarse).
    std::vector<double> fine_lower;        // m_f * d
    std::vector<std::int64_t> fine_lattice;  // m_f * d, global integer coords
    std::vector<std::uint8_t> fine_red;    // chessboard color

    std::span<const int> coarse_cell_coords(long long rank) const {
        return {coarse_coords.data() + rank * d, static_cast<std::size_t>(d)};
    }
    std::span<const double> fine_cell_lower(long long fid) const {
        return {fine_lower.data() + fid * d, static_cast<std::size_t>(d)};
    }
    std::span<const std::int64_t> fine_cell_lattice(long long fid) const {
        return {fine_lattice.data() + fid * d, static_cast<std::size_t>(d)};
    }
    double fine_side() const { return level_sides.empty() ? coarse_side : level_sides.back(); }
    long long coarse_of_fine(long long fid) const { return fid / fines_per_coarse; }

    // Snake rank of the coarse cell containing x, or -1 outside the covered
    // region.
    long long coarse_cell_of(std::span<const double> x) const;
    // Fine cell id containing x, or -1 for margin / outside.
    long long fine_cell_of(std::span<const double> x) const;
};

// Builds the nested subdivision. In paper_faithful mode throws
// std::invalid_argument with an "asymptotic regime unreachable" message when
// the coarse cell does not fit the box.
BoxPartition build_partition(const SfpParams& params, const PartitionSpec& spec);

}  // namespace sfpkit::constellation
