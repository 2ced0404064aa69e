#include "sfpkit/contact.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <thread>

namespace sfpkit::contact {

namespace {

constexpr double kInfestedDenominator = 16.0 * 2.718281828459045235;

unsigned resolve_threads(unsigned threads) {
    if (threads != 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace

GraphicalConstruction::GraphicalConstruction(const SfpGraph& graph, double lambda_max,
                                             double t_max, std::uint64_t seed)
    : graph_(&graph), lambda_max_(lambda_max), t_max_(0.0), seed_(seed) {
    if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be > 0");
    if (t_max < 0.0) throw std::invalid_argument("t_max must be >= 0");

    const std::size_t n = graph.num_vertices();
    edge_src_.reserve(2 * graph.num_edges());
    for (VertexId u = 0; u < n; ++u)
        for (std::size_t k = 0; k < graph.degree(u); ++k) edge_src_.push_back(u);

    objects_.resize(n + edge_src_.size());
    for (std::size_t v = 0; v < n; ++v) {
        auto& o = objects_[v];
        o.stream = Stream(derive_key(seed, StreamTag::recovery, v));
        o.pending_t = o.stream.exponential(1.0);
    }
    for (std::size_t e = 0; e < edge_src_.size(); ++e) {
        auto& o = objects_[n + e];
        o.stream = Stream(derive_key(seed, StreamTag::arrows, e));
        o.pending_t = o.stream.exponential(lambda_max_);
        o.pending_mark = o.stream.uniform();
    }
    extend(t_max);
}

void GraphicalConstruction::generate(double from_exclusive, double to_inclusive) {
    const std::size_t n = graph_->num_vertices();
    const std::size_t first_new = timeline_.size();
    for (std::size_t v = 0; v < n; ++v) {
        auto& o = objects_[v];
        while (o.pending_t <= to_inclusive) {
            if (o.pending_t > from_exclusive) {
                timeline_.push_back({o.pending_t, static_cast<VertexId>(v),
                                     static_cast<VertexId>(v), -1.0});
                ++recovery_count_;
            }
            o.pending_t += o.stream.exponential(1.0);
        }
    }
    for (std::size_t e = 0; e < edge_src_.size(); ++e) {
        auto& o = objects_[n + e];
        const VertexId src = edge_src_[e];
        const VertexId dst = graph_->csr_target(e);
        while (o.pending_t <= to_inclusive) {
            if (o.pending_t > from_exclusive)
                timeline_.push_back({o.pending_t, src, dst, o.pending_mark});
            o.pending_t += o.stream.exponential(lambda_max_);
            o.pending_mark = o.stream.uniform();
        }
    }
    std::sort(timeline_.begin() + first_new, timeline_.end(),
              [](const Event& a, const Event& b) {
                  if (a.t != b.t) return a.t < b.t;
                  if (a.src != b.src) return a.src < b.src;
                  return a.dst < b.dst;
              });
}

void GraphicalConstruction::extend(double new_t_max) {
    if (new_t_max < t_max_) throw std::invalid_argument("cannot shrink the horizon");
    if (new_t_max == t_max_) return;
    generate(t_max_, new_t_max);
    t_max_ = new_t_max;
}

std::vector<double> GraphicalConstruction::recoveries_of(VertexId v) const {
    std::vector<double> out;
    for (const Event& ev : timeline_)
        if (ev.is_recovery() && ev.src == v) out.push_back(ev.t);
    return out;
}

std::vector<std::pair<double, double>> GraphicalConstruction::arrows_of(VertexId src,
                                                                        VertexId dst) const {
    std::vector<std::pair<double, double>> out;
    for (const Event& ev : timeline_)
        if (!ev.is_recovery() && ev.src == src && ev.dst == dst)
            out.emplace_back(ev.t, ev.mark);
    return out;
}

namespace {

struct State {
    std::vector<std::uint8_t> infected;
    std::size_t count = 0;

    void set(const std::vector<VertexId>& initial, std::size_t n) {
        infected.assign(n, 0);
        count = 0;
        for (VertexId v : initial) {
            if (v >= n) throw std::invalid_argument("initial vertex out of range");
            if (!infected[v]) {
                infected[v] = 1;
                ++count;
            }
        }
    }
};

std::vector<VertexId> collect(const State& s) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < s.infected.size(); ++v)
        if (s.infected[v]) out.push_back(v);
    return out;
}

}  // namespace

Trajectory run(const GraphicalConstruction& gc, double lambda,
               const std::vector<VertexId>& initial, const RunOptions& opts) {
    if (!(lambda > 0.0) || lambda > gc.lambda_max())
        throw std::invalid_argument("lambda must lie in (0, lambda_max]");

    Trajectory traj;
    traj.horizon = gc.t_max();
    State st;
    st.set(initial, gc.graph().num_vertices());
    if (st.count == 0) {
        traj.extinction_time = 0.0;
        return traj;
    }

    const double ratio = lambda / gc.lambda_max();
    for (const auto& ev : gc.timeline()) {
        if (ev.is_recovery()) {
            if (st.infected[ev.src]) {
                st.infected[ev.src] = 0;
                --st.count;
                if (opts.record_events) traj.events.push_back({ev.t, ev.src, false});
                if (st.count == 0) {
                    traj.extinction_time = ev.t;
                    return traj;
                }
            }
        } else if (ev.mark <= ratio && st.infected[ev.src] && !st.infected[ev.dst]) {
            assert(gc.graph().has_edge(ev.src, ev.dst));
            st.infected[ev.dst] = 1;
            ++st.count;
            if (opts.record_events) traj.events.push_back({ev.t, ev.dst, true});
        }
    }
    traj.final_infected = collect(st);
    return traj;
}

namespace {

CoupledRunResult coupled_replay(const GraphicalConstruction& gc,
                                const std::vector<double>& ratios,
                                const std::vector<std::vector<VertexId>>& initials,
                                const RunOptions& opts) {
    const std::size_t k = ratios.size();
    const std::size_t n = gc.graph().num_vertices();
    CoupledRunResult out;
    out.trajectories.resize(k);
    std::vector<State> st(k);
    for (std::size_t i = 0; i < k; ++i) {
        st[i].set(initials[i], n);
        out.trajectories[i].horizon = gc.t_max();
        if (st[i].count == 0) out.trajectories[i].extinction_time = 0.0;
    }

    auto check_nested = [&](double t) {
        for (std::size_t i = 0; i + 1 < k && out.certificate.ok; ++i) {
            for (std::size_t v = 0; v < n; ++v) {
                if (st[i].infected[v] && !st[i + 1].infected[v]) {
                    out.certificate.ok = false;
                    out.certificate.violation_time = t;
                    out.certificate.detail = "containment violated between runs " +
                                             std::to_string(i) + " and " +
                                             std::to_string(i + 1) + " at vertex " +
                                             std::to_string(v);
                    break;
                }
            }
        }
        ++out.certificate.events_checked;
    };

    check_nested(0.0);
    for (const auto& ev : gc.timeline()) {
        for (std::size_t i = 0; i < k; ++i) {
            auto& s = st[i];
            auto& traj = out.trajectories[i];
            if (traj.extinction_time.has_value()) continue;
            if (ev.is_recovery()) {
                if (s.infected[ev.src]) {
                    s.infected[ev.src] = 0;
                    --s.count;
                    if (opts.record_events) traj.events.push_back({ev.t, ev.src, false});
                    if (s.count == 0) traj.extinction_time = ev.t;
                }
            } else if (ev.mark <= ratios[i] && s.infected[ev.src] && !s.infected[ev.dst]) {
                s.infected[ev.dst] = 1;
                ++s.count;
                if (opts.record_events) traj.events.push_back({ev.t, ev.dst, true});
            }
        }
        check_nested(ev.t);
        if (!out.certificate.ok) break;
    }
    for (std::size_t i = 0; i < k; ++i)
        if (!out.trajectories[i].extinction_time.has_value())
            out.trajectories[i].final_infected = collect(st[i]);
    return out;
}

}  // namespace

CoupledRunResult coupled_run(const GraphicalConstruction& gc,
                             const std::vector<double>& lambdas,
                             const std::vector<VertexId>& initial, const RunOptions& opts) {
    if (lambdas.empty()) throw std::invalid_argument("lambda list empty");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw std::invalid_argument("lambda list must be sorted ascending");
    std::vector<double> ratios;
    for (double l : lambdas) {
        if (!(l > 0.0) || l > gc.lambda_max())
            throw std::invalid_argument("lambda must lie in (0, lambda_max]");
        ratios.push_back(l / gc.lambda_max());
    }
    std::vector<std::vector<VertexId>> initials(lambdas.size(), initial);
    return coupled_replay(gc, ratios, initials, opts);
}

CoupledRunResult coupled_run_initial_sets(const GraphicalConstruction& gc, double lambda,
                                          const std::vector<std::vector<VertexId>>& initials,
                                          const RunOptions& opts) {
    if (initials.empty()) throw std::invalid_argument("initial set list empty");
    if (!(lambda > 0.0) || lambda > gc.lambda_max())
        throw std::invalid_argument("lambda must lie in (0, lambda_max]");
    std::vector<double> ratios(initials.size(), lambda / gc.lambda_max());
    return coupled_replay(gc, ratios, initials, opts);
}

namespace {

// Lazy single-run engine. Consumes each per-object stream exactly like the
// materialized construction (gap, then mark for arrows), so for the same
// seed it reproduces bit-identical event times.
template <typename Observer>
ReplicaResult simulate_lean(const SfpGraph& g, double lambda, double t_cap,
                            std::uint64_t seed, const std::vector<VertexId>* initial,
                            Observer&& observe) {
    const std::size_t n = g.num_vertices();
    std::vector<VertexId> edge_src;
    edge_src.reserve(2 * g.num_edges());
    for (VertexId u = 0; u < n; ++u)
        for (std::size_t k = 0; k < g.degree(u); ++k) edge_src.push_back(u);
    const std::size_t n_obj = n + edge_src.size();

    std::vector<Stream> streams(n_obj);

    struct HeapItem {
        double t;
        std::uint32_t obj;
        bool operator>(const HeapItem& o) const {
            return t != o.t ? t > o.t : obj > o.obj;
        }
    };
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;

    for (std::size_t v = 0; v < n; ++v) {
        streams[v] = Stream(derive_key(seed, StreamTag::recovery, v));
        const double t = streams[v].exponential(1.0);
        if (t <= t_cap) heap.push({t, static_cast<std::uint32_t>(v)});
    }
    for (std::size_t e = 0; e < edge_src.size(); ++e) {
        streams[n + e] = Stream(derive_key(seed, StreamTag::arrows, e));
        const double t = streams[n + e].exponential(lambda);
        (void)streams[n + e].uniform();  // mark; keeps stream parity with build+run
        if (t <= t_cap) heap.push({t, static_cast<std::uint32_t>(n + e)});
    }

    std::vector<std::uint8_t> infected;
    std::size_t count = 0;
    if (initial == nullptr) {
        infected.assign(n, 1);
        count = n;
    } else {
        infected.assign(n, 0);
        for (VertexId v : *initial) {
            if (v >= n) throw std::invalid_argument("initial vertex out of range");
            if (!infected[v]) {
                infected[v] = 1;
                ++count;
            }
        }
    }

    ReplicaResult res;
    if (count == 0) {
        res.tau = 0.0;
        return res;
    }

    while (!heap.empty()) {
        const auto [t, obj] = heap.top();
        heap.pop();
        if (obj < n) {
            if (infected[obj]) {
                infected[obj] = 0;
                --count;
                if (!observe(t, static_cast<VertexId>(obj), false, infected, count)) {
                    res.tau = t;
                    res.censored = false;
                    res.final_infected = static_cast<std::uint32_t>(count);
                    return res;
                }
                if (count == 0) {
                    res.tau = t;
                    return res;
                }
            }
            const double next = t + streams[obj].exponential(1.0);
            if (next <= t_cap) heap.push({next, obj});
        } else {
            const std::size_t e = obj - n;
            const VertexId src = edge_src[e];
            const VertexId dst = g.csr_target(e);
            if (infected[src] && !infected[dst]) {
                infected[dst] = 1;
                ++count;
                if (!observe(t, dst, true, infected, count)) {
                    res.tau = t;
                    res.censored = false;
                    res.final_infected = static_cast<std::uint32_t>(count);
                    return res;
                }
            }
            const double next = t + streams[obj].exponential(lambda);
            (void)streams[obj].uniform();  // mark
            if (next <= t_cap) heap.push({next, obj});
        }
    }
    res.tau = t_cap;
    res.censored = true;
    res.final_infected = static_cast<std::uint32_t>(count);
    return res;
}

}  // namespace

ReplicaResult run_to_extinction(const SfpGraph& graph, double lambda, double t_cap,
                                std::uint64_t seed, const std::vector<VertexId>* initial) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    return simulate_lean(graph, lambda, t_cap, seed, initial,
                         [](double, VertexId, bool, const std::vector<std::uint8_t>&,
                            std::size_t) { return true; });
}

std::vector<ReplicaResult> extinction_time_replicas(const SfpGraph& graph, double lambda,
                                                    double t_max, std::size_t n_rep,
                                                    std::uint64_t seed, unsigned threads) {
    if (n_rep < 1) throw std::invalid_argument("n_rep must be >= 1");
    std::vector<ReplicaResult> results(n_rep);
    const unsigned nt = std::min<std::size_t>(resolve_threads(threads), n_rep);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= n_rep) break;
            results[r] = run_to_extinction(graph, lambda, t_max, replica_seed(seed, r));
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return results;
}

SurvivalEstimate survival_probability_estimate(const SfpGraph& graph, double lambda,
                                               VertexId seed_vertex, double t_max,
                                               std::size_t n_rep, std::uint64_t seed,
                                               unsigned threads) {
    if (seed_vertex >= graph.num_vertices())
        throw std::invalid_argument("seed vertex out of range");
    std::vector<std::uint8_t> survived(n_rep, 0);
    const unsigned nt = std::min<std::size_t>(resolve_threads(threads), n_rep);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        std::vector<VertexId> init{seed_vertex};
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= n_rep) break;
            const auto res =
                run_to_extinction(graph, lambda, t_max, replica_seed(seed, r), &init);
            survived[r] = res.censored ? 1 : 0;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    SurvivalEstimate est;
    est.n_rep = n_rep;
    est.t_max = t_max;
    for (auto s : survived) est.survivors += s;
    const double nhat = static_cast<double>(n_rep);
    const double p = static_cast<double>(est.survivors) / nhat;
    est.estimate = p;
    const double z = 1.959963984540054;  // 95%
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nhat;
    const double center = (p + z2 / (2.0 * nhat)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nhat + z2 / (4.0 * nhat * nhat)) / denom;
    est.wilson_low = std::max(0.0, center - half);
    est.wilson_high = std::min(1.0, center + half);
    return est;
}

bool infested_check(const std::vector<VertexId>& subset,
                    const std::vector<VertexId>& state, double lambda) {
    if (subset.empty()) throw std::invalid_argument("subset must be nonempty");
    std::vector<VertexId> sorted_state = state;
    std::sort(sorted_state.begin(), sorted_state.end());
    std::size_t hit = 0;
    for (VertexId v : subset)
        if (std::binary_search(sorted_state.begin(), sorted_state.end(), v)) ++hit;
    const double threshold =
        lambda / kInfestedDenominator * static_cast<double>(subset.size());
    return static_cast<double>(hit) >= threshold;
}

double star_retention_probe(const SfpGraph& graph, VertexId center, double lambda,
                            double duration, std::size_t n_rep, std::uint64_t seed,
                            unsigned threads) {
    if (center >= graph.num_vertices()) throw std::invalid_argument("center out of range");
    std::vector<VertexId> hood{center};
    for (VertexId v : graph.neighbors(center)) hood.push_back(v);
    std::vector<std::uint8_t> in_hood(graph.num_vertices(), 0);
    for (VertexId v : hood) in_hood[v] = 1;
    const double threshold =
        lambda / kInfestedDenominator * static_cast<double>(hood.size());

    std::vector<std::uint8_t> retained(n_rep, 0);
    const unsigned nt = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n_rep, 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= n_rep) break;
            // Track the infected count inside the neighborhood; stop the
            // replay as soon as it drops below the infested threshold.
            std::size_t hood_count = hood.size();
            bool ok = true;
            auto observer = [&](double, VertexId v, bool infect,
                                const std::vector<std::uint8_t>&, std::size_t) {
                if (in_hood[v]) {
                    if (infect)
                        ++hood_count;
                    else
                        --hood_count;
                    if (static_cast<double>(hood_count) < threshold) {
                        ok = false;
                        return false;  // abort replay
                    }
                }
                return true;
            };
            simulate_lean(graph, lambda, duration, replica_seed(seed, r), &hood, observer);
            retained[r] = ok ? 1 : 0;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::size_t hits = 0;
    for (auto v : retained) hits += v;
    return n_rep == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(n_rep);
}

}  // namespace sfpkit::contact
