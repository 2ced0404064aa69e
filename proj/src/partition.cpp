#include "sfpkit/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace sfpkit::constellation {

std::vector<std::vector<int>> snake_order(long long per_axis, int d) {
    const long long n = per_axis;
    long long total = 1;
    for (int j = 0; j < d; ++j) total *= n;
    std::vector<std::vector<int>> order(total, std::vector<int>(d));
    for (long long r = 0; r < total; ++r) {
        long long rest = r;
        // digits, axis 0 fastest
        std::vector<long long> digit(d);
        for (int j = 0; j < d; ++j) {
            digit[j] = rest % n;
            rest /= n;
        }
        // reflect each axis by the parity of the higher digits' sum, so
        // consecutive ranks differ by one step along exactly one axis
        long long higher_sum = 0;
        for (int j = d - 1; j >= 0; --j) {
            const long long c = (higher_sum % 2 == 0) ? digit[j] : n - 1 - digit[j];
            order[r][j] = static_cast<int>(c);
            higher_sum += digit[j];
        }
    }
    return order;
}

namespace {

long long ipow(long long base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > (1ll << 62) / base)
            throw std::overflow_error("cell count overflow");
        r *= base;
    }
    return r;
}

double midpoint(double lo, double hi) { return 0.5 * (lo + hi); }

}  // namespace

BoxPartition build_partition(const SfpParams& params, const PartitionSpec& spec) {
    params.validate();
    BoxPartition p;
    p.d = params.d;
    p.mode = spec.mode;
    p.box_side = params.side();
    p.log_n = std::log(params.volume);
    const double gamma = params.gamma();

    if (spec.mode == PartitionMode::paper_faithful) {
        if (params.volume <= std::exp(1.0))
            throw std::invalid_argument("paper_faithful needs log n > 1");
        if (!(params.alpha < 2.0 * params.d))
            throw std::invalid_argument("paper_faithful needs alpha in (d, 2d)");
        const double a_min = 2.0 * gamma / (2.0 - params.alpha / params.d);
        if (!(spec.A > a_min))
            throw std::invalid_argument("A must exceed 2*gamma/(2 - alpha/d) = " +
                                        std::to_string(a_min));
        const double theta_min = std::max(2.0 / 3.0,
                                          params.alpha / (2.0 * params.d) + gamma / spec.A);
        if (!(spec.theta > theta_min && spec.theta < 1.0))
            throw std::invalid_argument("theta must lie in (max(2/3, alpha/2d + gamma/A), 1)");

        p.coarse_side = std::pow(p.log_n, spec.A / params.d);
        p.coarse_per_axis = static_cast<long long>(std::floor(p.box_side / p.coarse_side));
        if (p.coarse_per_axis < 1)
            throw std::invalid_argument(
                "asymptotic regime unreachable at this n: (log n)^{A/d} exceeds the box "
                "side; use explicit_sides mode");

        p.s = static_cast<int>(std::floor(std::log(1.0 / (2.0 * gamma)) / std::log(spec.theta)));
        if (p.s < 0) p.s = 0;
        p.nu_p = std::pow(spec.theta, p.s) * spec.A;
        for (int k = 1; k <= p.s; ++k) {
            const double expo =
                (std::pow(spec.theta, k - 1) - std::pow(spec.theta, k)) * spec.A / params.d;
            const long long a_k = static_cast<long long>(std::floor(std::pow(p.log_n, expo)));
            if (a_k < 1)
                throw std::invalid_argument("asymptotic regime unreachable: level " +
                                            std::to_string(k) + " has no cells");
            p.level_per_axis.push_back(a_k);
            p.level_sides.push_back(std::pow(p.log_n, std::pow(spec.theta, k) * spec.A / params.d));
        }
        p.fine_volume = std::pow(p.log_n, p.nu_p);

        const double nu_s_hi = (spec.A - 1.0) / gamma;
        double nu_s = spec.nu_s;
        if (nu_s < 0.0) nu_s = midpoint(p.nu_p, nu_s_hi);
        if (!(nu_s > p.nu_p && nu_s < nu_s_hi))
            throw std::invalid_argument("nu_s must lie in (nu_p, (A-1)/gamma)");
        const double eta_lo = params.alpha * nu_s / params.d;
        const double eta_hi = (spec.A - 1.0) / (params.tau - 1.0);
        double eta = spec.eta;
        if (eta < 0.0) eta = midpoint(eta_lo, eta_hi);
        if (!(eta > eta_lo && eta < eta_hi))
            throw std::invalid_argument("eta must lie in (alpha*nu_s/d, (A-1)/(tau-1))");

        p.star_degree_min = spec.c2 * std::pow(p.log_n, nu_s);
        p.weight_threshold = std::pow(p.log_n, eta);
    } else {
        if (!(spec.coarse_side > 0.0) || spec.coarse_side > p.box_side)
            throw std::invalid_argument("explicit coarse side must lie in (0, box side]");
        p.coarse_side = spec.coarse_side;
        p.coarse_per_axis = static_cast<long long>(std::floor(p.box_side / p.coarse_side));
        if (p.coarse_per_axis < 1) throw std::invalid_argument("no coarse cells fit the box");
        double prev = p.coarse_side;
        for (double side : spec.level_sides) {
            if (!(side > 0.0) || side >= prev)
                throw std::invalid_argument("explicit level sides must be strictly decreasing");
            const long long a_k = static_cast<long long>(std::floor(prev / side));
            p.level_per_axis.push_back(a_k);
            p.level_sides.push_back(side);
            prev = side;
        }
        p.s = static_cast<int>(p.level_sides.size());
        p.fine_volume = std::pow(p.fine_side(), params.d);
        p.star_degree_min = spec.c2 * (spec.star_scale < 0.0 ? p.fine_volume : spec.star_scale);
        p.weight_threshold = spec.weight_min < 0.0 ? 1.0 : spec.weight_min;
    }

    p.comp_lower = spec.beta1 * p.fine_volume;
    p.comp_upper = spec.beta2 * p.fine_volume;
    p.path_length_max = spec.c3 * p.fine_volume;

    p.m_c = ipow(p.coarse_per_axis, params.d);
    p.fines_per_coarse = 1;
    for (long long a_k : p.level_per_axis) {
        p.m_levels.push_back(ipow(a_k, params.d));
        p.fines_per_coarse *= p.m_levels.back();
    }
    p.m_f = p.m_c * p.fines_per_coarse;
    if (p.m_f > 50'000'000)
        throw std::invalid_argument("fine cell count too large to materialize: " +
                                    std::to_string(p.m_f));

    // Snake order over the coarse grid.
    const auto order = snake_order(p.coarse_per_axis, params.d);
    p.coarse_coords.resize(p.m_c * params.d);
    p.rank_of_flat.assign(p.m_c, -1);
    for (long long r = 0; r < p.m_c; ++r) {
        long long flat = 0;
        for (int j = 0; j < params.d; ++j) {
            p.coarse_coords[r * params.d + j] = order[r][j];
            flat = flat * p.coarse_per_axis + order[r][j];
        }
        p.rank_of_flat[flat] = r;
    }

    // Per-axis lattice stride at each level; the global lattice coordinate
    // of a fine cell is exact integer arithmetic, used for the chessboard
    // color and for adjacency reasoning.
    std::vector<long long> stride_after(p.s + 1, 1);
    for (int k = p.s; k >= 1; --k)
        stride_after[k - 1] = stride_after[k] * p.level_per_axis[k - 1];
    // stride_after[0] = product of all a_k = per-axis fines per coarse cell

    p.fine_lower.resize(p.m_f * params.d);
    p.fine_lattice.resize(p.m_f * params.d);
    p.fine_red.resize(p.m_f);

    std::vector<double> lower(params.d);
    std::vector<std::int64_t> lattice(params.d);
    long long fid = 0;
    std::function<void(int)> descend = [&](int level) {
        if (level == p.s) {
            std::int64_t parity = 0;
            for (int j = 0; j < params.d; ++j) {
                p.fine_lower[fid * params.d + j] = lower[j];
                p.fine_lattice[fid * params.d + j] = lattice[j];
                parity += lattice[j];
            }
            p.fine_red[fid] = static_cast<std::uint8_t>((parity & 1) == 0);
            ++fid;
            return;
        }
        const long long a_k = p.level_per_axis[level];
        const double side = p.level_sides[level];
        std::vector<long long> idx(params.d, 0);
        std::vector<double> saved_lower = lower;
        std::vector<std::int64_t> saved_lat = lattice;
        while (true) {
            for (int j = 0; j < params.d; ++j) {
                lower[j] = saved_lower[j] + static_cast<double>(idx[j]) * side;
                lattice[j] = saved_lat[j] + idx[j] * stride_after[level + 1];
            }
            descend(level + 1);
            int j = params.d - 1;
            while (j >= 0 && ++idx[j] == a_k) {
                idx[j] = 0;
                --j;
            }
            if (j < 0) break;
        }
        lower = saved_lower;
        lattice = saved_lat;
    };

    for (long long r = 0; r < p.m_c; ++r) {
        for (int j = 0; j < params.d; ++j) {
            const int g = p.coarse_coords[r * params.d + j];
            lower[j] = static_cast<double>(g) * p.coarse_side;
            lattice[j] = static_cast<std::int64_t>(g) * stride_after[0];
        }
        descend(0);
    }
    if (fid != p.m_f) throw std::logic_error("fine cell enumeration mismatch");
    return p;
}

long long BoxPartition::coarse_cell_of(std::span<const double> x) const {
    long long flat = 0;
    for (int j = 0; j < d; ++j) {
        const double q = x[j] / coarse_side;
        if (q < 0.0) return -1;
        const long long g = static_cast<long long>(q);
        if (g >= coarse_per_axis) return -1;
        flat = flat * coarse_per_axis + g;
    }
    return rank_of_flat[flat];
}

long long BoxPartition::fine_cell_of(std::span<const double> x) const {
    const long long rank = coarse_cell_of(x);
    if (rank < 0) return -1;
    std::vector<double> base(d);
    for (int j = 0; j < d; ++j)
        base[j] = static_cast<double>(coarse_coords[rank * d + j]) * coarse_side;
    long long offset = 0;
    for (int k = 0; k < s; ++k) {
        const double side = level_sides[k];
        const long long a_k = level_per_axis[k];
        long long flat = 0;
        for (int j = 0; j < d; ++j) {
            const double q = (x[j] - base[j]) / side;
            if (q < 0.0) return -1;
            const long long i = static_cast<long long>(q);
            if (i >= a_k) return -1;  // margin
            flat = flat * a_k + i;
            base[j] += static_cast<double>(i) * side;
        }
        offset = offset * m_levels[k] + flat;
    }
    return rank * fines_per_coarse + offset;
}

}  // namespace sfpkit::constellation
