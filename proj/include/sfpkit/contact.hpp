#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfpkit/graph.hpp"
#include "sfpkit/rng.hpp"

namespace sfpkit::contact {

// Shared randomness for the contact process on a fixed graph: rate-1
// recovery clocks per vertex and rate-lambda_max arrow clocks per directed
// edge, each arrow carrying an independent uniform mark. A run at rate
// lambda <= lambda_max uses exactly the arrows with mark <= lambda/lambda_max,
// which gives the monotone coupling across rates.
class GraphicalConstruction {
public:
    struct Event {
        double t;
        VertexId src;
        VertexId dst;   // == src for a recovery
        double mark;    // -1 for a recovery
        bool is_recovery() const { return src == dst; }
    };

    GraphicalConstruction(const SfpGraph& graph, double lambda_max, double t_max,
                          std::uint64_t seed);

    // Continues every per-object event stream to the new horizon; existing
    // events are unchanged.
    void extend(double new_t_max);

    const SfpGraph& graph() const { return *graph_; }
    double lambda_max() const { return lambda_max_; }
    double t_max() const { return t_max_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<Event>& timeline() const { return timeline_; }
    std::size_t recovery_count() const { return recovery_count_; }
    std::size_t arrow_count() const { return timeline_.size() - recovery_count_; }

    // Per-vertex recovery times / per-directed-edge arrows, for checks.
    std::vector<double> recoveries_of(VertexId v) const;
    std::vector<std::pair<double, double>> arrows_of(VertexId src, VertexId dst) const;

private:
    struct ObjectState {
        Stream stream;
        double pending_t = 0.0;
        double pending_mark = -1.0;
    };

    void generate(double from_exclusive, double to_inclusive);

    const SfpGraph* graph_;
    double lambda_max_;
    double t_max_;
    std::uint64_t seed_;
    std::vector<VertexId> edge_src_;  // CSR-parallel: source of each directed edge
    std::vector<ObjectState> objects_;  // vertices first, then directed edges
    std::vector<Event> timeline_;       // sorted by (t, src, dst)
    std::size_t recovery_count_ = 0;
};

struct Trajectory {
    struct Event {
        double t;
        VertexId v;
        bool infect;  // false = recovery
    };
    std::vector<Event> events;  // present when recording was requested
    std::vector<VertexId> final_infected;
    std::optional<double> extinction_time;  // empty => censored at horizon
    double horizon = 0.0;

    bool censored() const { return !extinction_time.has_value(); }
    double tau_or_horizon() const { return extinction_time.value_or(horizon); }
};

struct RunOptions {
    bool record_events = true;
};

// Deterministic replay of the construction at rate lambda from the given
// initially infected set. Pure function of its inputs.
Trajectory run(const GraphicalConstruction& gc, double lambda,
               const std::vector<VertexId>& initial, const RunOptions& opts = {});

struct CouplingCertificate {
    bool ok = true;
    std::size_t events_checked = 0;
    double violation_time = 0.0;
    std::string detail;
};

struct CoupledRunResult {
    std::vector<Trajectory> trajectories;
    CouplingCertificate certificate;
};

// Runs every rate on the shared construction in one pass and certifies the
// pathwise containment xi^{lambda_i} subseteq xi^{lambda_j} for i < j at
// every event time. lambdas must be sorted ascending.
CoupledRunResult coupled_run(const GraphicalConstruction& gc,
                             const std::vector<double>& lambdas,
                             const std::vector<VertexId>& initial,
                             const RunOptions& opts = {});

// Same certificate for nested initial sets at a fixed rate.
CoupledRunResult coupled_run_initial_sets(const GraphicalConstruction& gc, double lambda,
                                          const std::vector<std::vector<VertexId>>& initials,
                                          const RunOptions& opts = {});

struct ReplicaResult {
    double tau = 0.0;
    bool censored = false;
    std::uint32_t final_infected = 0;
};

// Independent constructions per replica (seed r = replica_seed(seed, r)),
// full occupancy start, run until extinction or t_max. Replicas are
// schedule-independent and parallelize over `threads`.
std::vector<ReplicaResult> extinction_time_replicas(const SfpGraph& graph, double lambda,
                                                    double t_max, std::size_t n_rep,
                                                    std::uint64_t seed,
                                                    unsigned threads = 0);

// Single-replica engine used above: lazy per-object event streams, identical
// in law (and realization, per seed) to build+run at lambda_max = lambda.
ReplicaResult run_to_extinction(const SfpGraph& graph, double lambda, double t_cap,
                                std::uint64_t seed,
                                const std::vector<VertexId>* initial = nullptr);

struct SurvivalEstimate {
    double estimate = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    std::size_t survivors = 0;
    std::size_t n_rep = 0;
    double t_max = 0.0;  // finite-horizon, finite-box proxy
};

SurvivalEstimate survival_probability_estimate(const SfpGraph& graph, double lambda,
                                               VertexId seed_vertex, double t_max,
                                               std::size_t n_rep, std::uint64_t seed,
                                               unsigned threads = 0);

// |subset ∩ state| >= (lambda / (16e)) * |subset|.
bool infested_check(const std::vector<VertexId>& subset,
                    const std::vector<VertexId>& state, double lambda);

// Fraction of replicas in which the closed neighborhood of `center`,
// started fully infected, stays infested throughout [0, duration].
double star_retention_probe(const SfpGraph& graph, VertexId center, double lambda,
                            double duration, std::size_t n_rep, std::uint64_t seed,
                            unsigned threads = 0);

}  // namespace sfpkit::contact
