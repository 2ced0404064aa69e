// sfpkit command-line front end: graph generation, contact-process
// simulation, constellation extraction, scaling experiments, the exact CTMC
// oracle and the estimator suite. Configs are JSON with strict key checking;
// rerunning any command with the same config and seed produces byte-identical
// data files (wall-clock metadata lives only in the manifest).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfpkit/analysis.hpp"
#include "sfpkit/contact.hpp"
#include "sfpkit/ctmc.hpp"
#include "sfpkit/graph_io.hpp"
#include "sfpkit/layered.hpp"
#include "sfpkit/partition.hpp"
#include "sfpkit/pipeline_gt2.hpp"
#include "sfpkit/sampler.hpp"

using nlohmann::json;
using namespace sfpkit;

namespace {

constexpr const char* kVersion = "sfpkit 0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStaged = 3;
constexpr int kExitRuntime = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_keys(const json& obj, const std::string& where,
                  const std::vector<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double get_num(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
    return obj[key].get<double>();
}

double get_num_or(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    return obj[key].get<double>();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void check_echo(const std::string& name, double supplied, double computed) {
    const double tol = 1e-9 * std::max(1.0, std::fabs(computed));
    if (std::fabs(supplied - computed) > tol)
        throw ConfigError("config echoes " + name + " = " + std::to_string(supplied) +
                          " but the defining formula gives " + std::to_string(computed));
}

SfpParams parse_model(const json& cfg) {
    if (!cfg.contains("model")) throw ConfigError("config is missing 'model'");
    const json& m = cfg["model"];
    require_keys(m, "model", {"d", "alpha", "tau", "rho", "volume", "boundary", "gamma"});
    SfpParams p;
    p.d = static_cast<int>(get_num(m, "model", "d"));
    p.alpha = get_num(m, "model", "alpha");
    p.tau = get_num(m, "model", "tau");
    p.rho = get_num(m, "model", "rho");
    p.volume = get_num(m, "model", "volume");
    if (m.contains("boundary")) p.boundary = boundary_from_string(m["boundary"].get<std::string>());
    p.validate();
    if (m.contains("gamma")) check_echo("gamma", m["gamma"].get<double>(), p.gamma());
    return p;
}

struct Dynamics {
    std::vector<double> lambdas;
    double t_max = std::min(1e7, std::exp(20.0));
    std::size_t n_rep = 1;
    bool coupled = false;
    bool record_trajectories = false;
    std::optional<VertexId> seed_vertex;
};

Dynamics parse_dynamics(const json& cfg) {
    if (!cfg.contains("dynamics")) throw ConfigError("config is missing 'dynamics'");
    const json& d = cfg["dynamics"];
    require_keys(d, "dynamics",
                 {"lambdas", "t_max", "n_rep", "coupled", "record_trajectories",
                  "seed_vertex"});
    Dynamics dyn;
    if (!d.contains("lambdas") || !d["lambdas"].is_array() || d["lambdas"].empty())
        throw ConfigError("dynamics.lambdas must be a nonempty array");
    for (const auto& l : d["lambdas"]) dyn.lambdas.push_back(l.get<double>());
    if (!std::is_sorted(dyn.lambdas.begin(), dyn.lambdas.end()))
        throw ConfigError("dynamics.lambdas must be sorted ascending");
    for (double l : dyn.lambdas)
        if (!(l > 0.0)) throw ConfigError("dynamics.lambdas entries must be > 0");
    dyn.t_max = get_num_or(d, "t_max", dyn.t_max);
    if (!(dyn.t_max > 0.0)) throw ConfigError("dynamics.t_max must be > 0");
    dyn.n_rep = static_cast<std::size_t>(get_num_or(d, "n_rep", 1.0));
    if (dyn.n_rep < 1) throw ConfigError("dynamics.n_rep must be >= 1");
    if (d.contains("coupled")) dyn.coupled = d["coupled"].get<bool>();
    if (d.contains("record_trajectories"))
        dyn.record_trajectories = d["record_trajectories"].get<bool>();
    if (d.contains("seed_vertex"))
        dyn.seed_vertex = static_cast<VertexId>(d["seed_vertex"].get<std::uint64_t>());
    return dyn;
}

constellation::PartitionSpec parse_partition(const json& cfg, const SfpParams& params) {
    if (!cfg.contains("partition")) throw ConfigError("config is missing 'partition'");
    const json& s = cfg["partition"];
    require_keys(s, "partition",
                 {"mode", "A", "theta", "nu_s", "eta", "beta1", "beta2", "c2", "c3",
                  "coarse_side", "level_sides", "star_scale", "weight_min", "s", "nu_p"});
    constellation::PartitionSpec spec;
    const std::string mode = s.value("mode", "paper_faithful");
    if (mode == "paper_faithful")
        spec.mode = constellation::PartitionMode::paper_faithful;
    else if (mode == "explicit_sides")
        spec.mode = constellation::PartitionMode::explicit_sides;
    else
        throw ConfigError("partition.mode must be paper_faithful or explicit_sides");
    spec.A = get_num_or(s, "A", 0.0);
    spec.theta = get_num_or(s, "theta", 0.0);
    spec.nu_s = get_num_or(s, "nu_s", -1.0);
    spec.eta = get_num_or(s, "eta", -1.0);
    spec.beta1 = get_num_or(s, "beta1", spec.beta1);
    spec.beta2 = get_num_or(s, "beta2", spec.beta2);
    spec.c2 = get_num_or(s, "c2", spec.c2);
    spec.c3 = get_num_or(s, "c3", spec.c3);
    spec.coarse_side = get_num_or(s, "coarse_side", 0.0);
    if (s.contains("level_sides"))
        for (const auto& v : s["level_sides"]) spec.level_sides.push_back(v.get<double>());
    spec.star_scale = get_num_or(s, "star_scale", -1.0);
    spec.weight_min = get_num_or(s, "weight_min", -1.0);

    // Echo validation happens against the built partition.
    if (s.contains("s") || s.contains("nu_p")) {
        const auto part = constellation::build_partition(params, spec);
        if (s.contains("s")) check_echo("partition.s", get_num(s, "partition", "s"),
                                        static_cast<double>(part.s));
        if (s.contains("nu_p")) check_echo("partition.nu_p", get_num(s, "partition", "nu_p"),
                                           part.nu_p);
    }
    return spec;
}

constellation::LayeredSpec parse_layered(const json& cfg, const SfpParams& params) {
    if (!cfg.contains("layered")) throw ConfigError("config is missing 'layered'");
    const json& s = cfg["layered"];
    require_keys(s, "layered", {"a", "L", "S", "k_n", "m_n"});
    constellation::LayeredSpec spec;
    spec.a = get_num(s, "layered", "a");
    spec.L = get_num(s, "layered", "L");
    spec.S = get_num_or(s, "S", 2.0);
    if (s.contains("k_n") || s.contains("m_n")) {
        const auto boxes = constellation::build_layered_boxes(params, spec);
        if (s.contains("k_n"))
            check_echo("layered.k_n", get_num(s, "layered", "k_n"),
                       static_cast<double>(boxes.k_n));
        if (s.contains("m_n"))
            check_echo("layered.m_n", get_num(s, "layered", "m_n"),
                       static_cast<double>(boxes.m_n));
    }
    return spec;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    require_keys(cfg, "config",
                 {"model", "dynamics", "pipeline", "partition", "layered", "seed", "out",
                  "threads", "sampler", "graph_file", "experiment", "analysis"});
    return cfg;
}

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::string> out_flag;
    unsigned threads = 0;
    std::string format = "json";
};

struct Run {
    json cfg;
    std::uint64_t seed = 0;
    std::filesystem::path out;
    unsigned threads = 0;
    std::string format;
};

Run prepare(const CommonArgs& args) {
    Run run;
    run.cfg = load_config(args.config_path);
    if (args.seed_flag)
        run.seed = *args.seed_flag;
    else if (run.cfg.contains("seed"))
        run.seed = run.cfg["seed"].get<std::uint64_t>();
    else
        throw ConfigError("no seed: pass --seed or set 'seed' in the config");
    std::string out = args.out_flag.value_or(run.cfg.value("out", ""));
    if (out.empty()) throw ConfigError("no output directory: pass --out or set 'out'");
    run.out = out;
    std::filesystem::create_directories(run.out);
    run.threads = args.threads != 0
                      ? args.threads
                      : static_cast<unsigned>(run.cfg.value("threads", 0));
    run.format = args.format;
    return run;
}

void write_manifest(const Run& run, const std::string& command,
                    std::size_t n_replica_seeds = 0) {
    json manifest;
    manifest["command"] = command;
    manifest["config_hash"] = fnv1a64(run.cfg.dump());
    manifest["root_seed"] = run.seed;
    manifest["software"] = kVersion;
    manifest["replica_seed_rule"] = "replica r uses derive_key(root_seed, replica_tag, r)";
    if (n_replica_seeds > 0 && n_replica_seeds <= 4096) {
        json seeds = json::array();
        for (std::size_t r = 0; r < n_replica_seeds; ++r) seeds.push_back(replica_seed(run.seed, r));
        manifest["replica_seeds"] = seeds;
    }
    const auto now = std::chrono::system_clock::now();
    manifest["wall_clock_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    std::ofstream out(run.out / ("manifest_" + command + ".json"));
    out << manifest.dump(2) << "\n";
}

SfpGraph obtain_graph(const Run& run, const SfpParams* params_override = nullptr) {
    if (run.cfg.contains("graph_file"))
        return deserialize_graph(run.cfg["graph_file"].get<std::string>());
    const SfpParams params = params_override ? *params_override : parse_model(run.cfg);
    const std::string sampler = run.cfg.value("sampler", "accelerated");
    if (sampler == "reference") return sample_graph_reference(params, run.seed);
    if (sampler == "accelerated") return sample_graph_accelerated(params, run.seed);
    throw ConfigError("sampler must be reference or accelerated");
}

std::string json_number(double v) {
    json j = v;
    return j.dump();
}

struct Summary {
    double median = 0.0;
    bool median_lower_bound = false;
    double mean = 0.0;
    bool mean_lower_bound = false;
    double censor_fraction = 0.0;
    double mean_ci_low = 0.0;
    double mean_ci_high = 0.0;
};

Summary summarize(const std::vector<contact::ReplicaResult>& results) {
    Summary s;
    std::vector<double> taus;
    double sum = 0.0, sum2 = 0.0;
    std::size_t censored = 0;
    for (const auto& r : results) {
        taus.push_back(r.tau);
        sum += r.tau;
        sum2 += r.tau * r.tau;
        if (r.censored) ++censored;
    }
    const std::size_t n = results.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return taus[a] < taus[b]; });
    if (n % 2 == 1) {
        s.median = taus[idx[n / 2]];
        s.median_lower_bound = results[idx[n / 2]].censored;
    } else {
        s.median = 0.5 * (taus[idx[n / 2 - 1]] + taus[idx[n / 2]]);
        s.median_lower_bound =
            results[idx[n / 2 - 1]].censored || results[idx[n / 2]].censored;
    }
    s.mean = sum / static_cast<double>(n);
    s.mean_lower_bound = censored > 0;
    s.censor_fraction = static_cast<double>(censored) / static_cast<double>(n);
    const double var = sum2 / static_cast<double>(n) - s.mean * s.mean;
    const double se = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
    s.mean_ci_low = s.mean - 1.959963984540054 * se;
    s.mean_ci_high = s.mean + 1.959963984540054 * se;
    return s;
}

json summary_to_json(double lambda, const Dynamics& dyn, const Summary& s,
                     std::size_t n_rep) {
    json j;
    j["lambda"] = lambda;
    j["n_rep"] = n_rep;
    j["t_max"] = dyn.t_max;
    j["median_tau"] = s.median;
    j["median_is_lower_bound"] = s.median_lower_bound;
    j["mean_tau"] = s.mean;
    j["mean_is_lower_bound"] = s.mean_lower_bound;
    j["censor_fraction"] = s.censor_fraction;
    j["mean_ci95"] = json::array({s.mean_ci_low, s.mean_ci_high});
    return j;
}

void write_replica_jsonl(const std::filesystem::path& path, double lambda,
                         const std::vector<contact::ReplicaResult>& results) {
    std::ofstream out(path);
    for (std::size_t r = 0; r < results.size(); ++r) {
        out << "{\"replica\":" << r << ",\"lambda\":" << json_number(lambda)
            << ",\"tau\":" << json_number(results[r].tau)
            << ",\"censored\":" << (results[r].censored ? "true" : "false")
            << ",\"final_infected\":" << results[r].final_infected << "}\n";
    }
}

int cmd_generate(const CommonArgs& args) {
    const Run run = prepare(args);
    const SfpParams params = parse_model(run.cfg);
    const SfpGraph g = obtain_graph(run, &params);
    serialize_graph(g, (run.out / "graph.txt").string());
    write_manifest(run, "generate");
    std::cout << "generated graph: " << g.num_vertices() << " vertices, " << g.num_edges()
              << " edges\n"
              << "derived gamma = " << params.gamma() << "\n"
              << "wrote " << (run.out / "graph.txt") << "\n";
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args) {
    const Run run = prepare(args);
    const Dynamics dyn = parse_dynamics(run.cfg);
    const SfpGraph g = obtain_graph(run);

    std::vector<VertexId> initial(g.num_vertices());
    std::iota(initial.begin(), initial.end(), 0);
    if (dyn.seed_vertex) {
        if (*dyn.seed_vertex >= g.num_vertices())
            throw ConfigError("dynamics.seed_vertex out of range");
        initial = {*dyn.seed_vertex};
    }

    json summaries = json::array();
    std::ofstream traj_csv;
    if (dyn.record_trajectories) {
        traj_csv.open(run.out / "trajectories.csv");
        traj_csv << "replica,lambda,time,vertex,event\n";
    }

    if (dyn.coupled) {
        const double lambda_max = dyn.lambdas.back();
        std::vector<std::vector<contact::ReplicaResult>> per_lambda(dyn.lambdas.size());
        for (std::size_t r = 0; r < dyn.n_rep; ++r) {
            contact::GraphicalConstruction gc(g, lambda_max, dyn.t_max,
                                              replica_seed(run.seed, r));
            const auto res =
                coupled_run(gc, dyn.lambdas, initial, {dyn.record_trajectories});
            if (!res.certificate.ok)
                throw std::runtime_error("coupling containment violated (internal error): " +
                                         res.certificate.detail);
            for (std::size_t i = 0; i < dyn.lambdas.size(); ++i) {
                const auto& traj = res.trajectories[i];
                contact::ReplicaResult rr;
                rr.tau = traj.tau_or_horizon();
                rr.censored = traj.censored();
                rr.final_infected = static_cast<std::uint32_t>(traj.final_infected.size());
                per_lambda[i].push_back(rr);
                if (dyn.record_trajectories)
                    for (const auto& ev : traj.events)
                        traj_csv << r << ',' << json_number(dyn.lambdas[i]) << ','
                                 << json_number(ev.t) << ',' << ev.v << ','
                                 << (ev.infect ? "infect" : "recover") << "\n";
            }
        }
        for (std::size_t i = 0; i < dyn.lambdas.size(); ++i) {
            write_replica_jsonl(run.out / ("replicas_lambda" + std::to_string(i) + ".jsonl"),
                                dyn.lambdas[i], per_lambda[i]);
            summaries.push_back(summary_to_json(dyn.lambdas[i], dyn,
                                                summarize(per_lambda[i]), dyn.n_rep));
        }
    } else {
        for (std::size_t i = 0; i < dyn.lambdas.size(); ++i) {
            const double lambda = dyn.lambdas[i];
            std::vector<contact::ReplicaResult> results;
            if (dyn.seed_vertex || dyn.record_trajectories) {
                // materialized constructions (needed for event recording and
                // arbitrary initial sets)
                for (std::size_t r = 0; r < dyn.n_rep; ++r) {
                    contact::GraphicalConstruction gc(g, lambda, dyn.t_max,
                                                      replica_seed(run.seed, r));
                    const auto traj =
                        contact::run(gc, lambda, initial, {dyn.record_trajectories});
                    contact::ReplicaResult rr;
                    rr.tau = traj.tau_or_horizon();
                    rr.censored = traj.censored();
                    rr.final_infected = static_cast<std::uint32_t>(traj.final_infected.size());
                    results.push_back(rr);
                    if (dyn.record_trajectories)
                        for (const auto& ev : traj.events)
                            traj_csv << r << ',' << json_number(lambda) << ','
                                     << json_number(ev.t) << ',' << ev.v << ','
                                     << (ev.infect ? "infect" : "recover") << "\n";
                }
            } else {
                results = contact::extinction_time_replicas(g, lambda, dyn.t_max,
                                                            dyn.n_rep, run.seed,
                                                            run.threads);
            }
            write_replica_jsonl(run.out / ("replicas_lambda" + std::to_string(i) + ".jsonl"),
                                lambda, results);
            summaries.push_back(summary_to_json(lambda, dyn, summarize(results), dyn.n_rep));
        }
    }

    std::ofstream sum_out(run.out / "summary.json");
    sum_out << summaries.dump(2) << "\n";
    write_manifest(run, "simulate", dyn.n_rep);
    std::cout << summaries.dump(2) << "\n";
    return kExitOk;
}

json constellation_to_json(const constellation::Constellation& c) {
    json j;
    j["params"] = {{"S", c.params.S}, {"D", c.params.D}, {"Delta", c.params.Delta}};
    j["J"] = c.distinguished;
    j["paths"] = c.paths;
    json edges = json::array();
    for (const auto& [u, v] : c.tree_edges) edges.push_back(json::array({u, v}));
    j["tree_edges"] = edges;
    return j;
}

int cmd_constellation(const CommonArgs& args) {
    const Run run = prepare(args);
    const std::string pipeline = run.cfg.value("pipeline", "");
    if (pipeline != "constellation_gt2" && pipeline != "constellation_12")
        throw ConfigError("pipeline must be constellation_gt2 or constellation_12");
    const SfpParams params = parse_model(run.cfg);
    const SfpGraph g = obtain_graph(run, &params);

    json out_json;
    std::optional<constellation::StageFailure> failure;
    std::vector<std::string> warnings;

    if (pipeline == "constellation_gt2") {
        const auto spec = parse_partition(run.cfg, params);
        const auto res = constellation::extract_constellation_gamma_gt2(g, spec);
        warnings = res.warnings;
        if (res.ok())
            out_json = constellation_to_json(*res.constellation);
        else
            failure = res.failure;
    } else {
        const auto spec = parse_layered(run.cfg, params);
        const auto res = constellation::extract_constellation_gamma_in_1_2(g, spec);
        warnings = res.warnings;
        if (res.ok()) {
            out_json = constellation_to_json(*res.constellation);
            out_json["good_per_layer"] = res.report.good_per_layer;
            out_json["boxes_per_layer"] = res.report.boxes_per_layer;
        } else {
            failure = res.failure;
        }
    }

    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    write_manifest(run, "constellation");
    if (failure) {
        json f;
        f["stage"] = failure->stage;
        f["witness"] = failure->witness;
        f["detail"] = failure->detail;
        std::ofstream out(run.out / "failure.json");
        out << f.dump(2) << "\n";
        std::cout << f.dump(2) << "\n";
        return kExitStaged;
    }
    std::ofstream out(run.out / "constellation.json");
    out << out_json.dump(2) << "\n";
    std::cout << "constellation with " << out_json["J"].size() << " stars written to "
              << (run.out / "constellation.json") << "\n";
    return kExitOk;
}

int cmd_experiment(const CommonArgs& args) {
    const Run run = prepare(args);
    if (!run.cfg.contains("experiment")) throw ConfigError("config is missing 'experiment'");
    const json& ex = run.cfg["experiment"];
    require_keys(ex, "experiment",
                 {"volumes", "lambda", "lambdas", "t_max", "n_rep", "predictor", "A",
                  "seed_vertex"});
    const std::string pipeline = run.cfg.value("pipeline", "extinction");

    if (pipeline == "extinction") {
        if (!ex.contains("volumes") || !ex["volumes"].is_array() || ex["volumes"].size() < 2)
            throw ConfigError("experiment.volumes must list at least 2 volumes");
        const double lambda = get_num(ex, "experiment", "lambda");
        const double t_max = get_num(ex, "experiment", "t_max");
        const std::size_t n_rep = static_cast<std::size_t>(get_num(ex, "experiment", "n_rep"));
        SfpParams base = parse_model(run.cfg);

        std::ofstream csv(run.out / "scaling.csv");
        csv << "volume,vertices,edges,lambda,n_rep,t_max,median_tau,median_is_lower_bound,"
               "mean_tau,censor_fraction\n";
        std::vector<analysis::ScalingPoint> pts;
        bool excessive_censoring = false;
        std::string censor_detail;
        for (std::size_t vi = 0; vi < ex["volumes"].size(); ++vi) {
            SfpParams params = base;
            params.volume = ex["volumes"][vi].get<double>();
            const std::uint64_t gseed = derive_key(run.seed, StreamTag::pairs, vi);
            const SfpGraph g = sample_graph_accelerated(params, gseed);
            const auto results =
                contact::extinction_time_replicas(g, lambda, t_max, n_rep,
                                                  derive_key(run.seed, StreamTag::replica, vi),
                                                  run.threads);
            const Summary s = summarize(results);
            csv << json_number(params.volume) << ',' << g.num_vertices() << ','
                << g.num_edges() << ',' << json_number(lambda) << ',' << n_rep << ','
                << json_number(t_max) << ',' << json_number(s.median) << ','
                << (s.median_lower_bound ? "true" : "false") << ','
                << json_number(s.mean) << ',' << json_number(s.censor_fraction) << "\n";
            if (s.censor_fraction >= 0.5) {
                excessive_censoring = true;
                censor_detail = "volume " + json_number(params.volume) +
                                " censors " + json_number(s.censor_fraction);
            }
            pts.push_back({params.volume, s.median, s.median_lower_bound});
        }
        csv.close();

        json fits;
        if (excessive_censoring) {
            write_manifest(run, "experiment", 0);
            throw std::runtime_error("excessive censoring (>= 50%): " + censor_detail +
                                     "; raise t_max or reduce lambda");
        }
        const std::string pred_name = ex.value("predictor", "n");
        const auto pred = pred_name == "n_over_logA" ? analysis::Predictor::n_over_logA
                                                     : analysis::Predictor::n;
        const double A = get_num_or(ex, "A", 0.0);
        const auto fit = analysis::extinction_scaling_fit(pts, pred, A);
        fits["predictor"] = pred_name;
        fits["A"] = A;
        fits["slope"] = fit.slope;
        fits["intercept"] = fit.intercept;
        fits["r2"] = fit.r2;
        fits["lower_bound_only"] = fit.lower_bound_only;
        fits["points"] = fit.points;
        std::ofstream fout(run.out / "fits.json");
        fout << fits.dump(2) << "\n";
        write_manifest(run, "experiment", 0);
        std::cout << fits.dump(2) << "\n";
        return kExitOk;
    }

    if (pipeline == "survival") {
        if (!ex.contains("lambdas") || !ex["lambdas"].is_array() || ex["lambdas"].empty())
            throw ConfigError("experiment.lambdas must be a nonempty sorted array");
        std::vector<double> lambdas;
        for (const auto& l : ex["lambdas"]) lambdas.push_back(l.get<double>());
        if (!std::is_sorted(lambdas.begin(), lambdas.end()))
            throw ConfigError("experiment.lambdas must be sorted ascending");
        const double t_max = get_num(ex, "experiment", "t_max");
        const std::size_t n_rep = static_cast<std::size_t>(get_num(ex, "experiment", "n_rep"));
        const SfpGraph g = obtain_graph(run);
        const VertexId seed_vertex =
            static_cast<VertexId>(get_num_or(ex, "seed_vertex", 0.0));
        if (seed_vertex >= g.num_vertices()) throw ConfigError("experiment.seed_vertex out of range");

        std::vector<std::size_t> survivors(lambdas.size(), 0);
        std::size_t violations = 0;
        for (std::size_t r = 0; r < n_rep; ++r) {
            contact::GraphicalConstruction gc(g, lambdas.back(), t_max,
                                              replica_seed(run.seed, r));
            const auto res = coupled_run(gc, lambdas, {seed_vertex}, {false});
            if (!res.certificate.ok) ++violations;
            bool prev_survived = false;
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                const bool survived = res.trajectories[i].censored();
                if (survived) ++survivors[i];
                if (prev_survived && !survived) ++violations;  // ordering break
                prev_survived = survived;
            }
        }
        std::ofstream csv(run.out / "survival.csv");
        csv << "lambda,survivors,n_rep,estimate\n";
        json out_json;
        out_json["violations"] = violations;
        json rows = json::array();
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const double est = static_cast<double>(survivors[i]) / static_cast<double>(n_rep);
            csv << json_number(lambdas[i]) << ',' << survivors[i] << ',' << n_rep << ','
                << json_number(est) << "\n";
            rows.push_back({{"lambda", lambdas[i]},
                            {"survivors", survivors[i]},
                            {"estimate", est}});
        }
        out_json["rows"] = rows;
        std::ofstream jout(run.out / "survival.json");
        jout << out_json.dump(2) << "\n";
        write_manifest(run, "experiment", n_rep);
        std::cout << out_json.dump(2) << "\n";
        return violations == 0 ? kExitOk : kExitRuntime;
    }

    throw ConfigError("pipeline must be extinction or survival for the experiment command");
}

int cmd_oracle(const CommonArgs& args) {
    const Run run = prepare(args);
    const Dynamics dyn = parse_dynamics(run.cfg);
    const SfpGraph g = obtain_graph(run);
    json rows = json::array();
    for (double lambda : dyn.lambdas) {
        const double mean = contact::exact_mean_extinction(g, lambda);
        rows.push_back({{"lambda", lambda}, {"mean_extinction", mean}});
    }
    std::ofstream out(run.out / "oracle.json");
    out << rows.dump(2) << "\n";
    write_manifest(run, "oracle");
    std::cout << rows.dump(2) << "\n";
    return kExitOk;
}

int cmd_analyze(const CommonArgs& args) {
    const Run run = prepare(args);
    json acfg = run.cfg.value("analysis", json::object());
    require_keys(acfg, "analysis", {"tail_fraction", "tail_sweep", "n_bins", "n_pairs"});
    const double tail_fraction = acfg.value("tail_fraction", 0.01);
    const int n_bins = acfg.value("n_bins", 24);
    const std::size_t n_pairs = acfg.value("n_pairs", std::size_t{200});
    std::vector<double> sweep{0.005, 0.01, 0.05};
    if (acfg.contains("tail_sweep")) {
        sweep.clear();
        for (const auto& t : acfg["tail_sweep"]) sweep.push_back(t.get<double>());
    }

    const SfpGraph g = obtain_graph(run);
    json out_json;
    out_json["vertices"] = g.num_vertices();
    out_json["edges"] = g.num_edges();
    out_json["gamma_model"] = g.params().gamma();

    try {
        const auto fit = analysis::degree_tail_fit(g, tail_fraction);
        out_json["degree_tail"] = {{"estimator", fit.estimator},
                                   {"exponent", fit.exponent},
                                   {"ci", json::array({fit.ci_low, fit.ci_high})},
                                   {"tail_fraction", fit.tail_fraction},
                                   {"k_used", fit.k_used}};
    } catch (const std::exception& e) {
        out_json["degree_tail"] = {{"error", e.what()}};
    }
    json sweep_json = json::array();
    for (double t : sweep) {
        try {
            const auto fit = analysis::degree_tail_fit(g, t);
            sweep_json.push_back({{"tail_fraction", t}, {"exponent", fit.exponent}});
        } catch (const std::exception& e) {
            sweep_json.push_back({{"tail_fraction", t}, {"error", e.what()}});
        }
    }
    out_json["degree_tail_sensitivity"] = sweep_json;

    try {
        const auto fit = analysis::degree_weight_scaling(g, n_bins);
        out_json["degree_weight"] = {{"slope", fit.slope},
                                     {"intercept", fit.intercept},
                                     {"r2", fit.r2},
                                     {"points", fit.points},
                                     {"d_over_alpha", g.params().d / g.params().alpha}};
    } catch (const std::exception& e) {
        out_json["degree_weight"] = {{"error", e.what()}};
    }

    out_json["largest_component_fraction"] = analysis::largest_component_fraction(g);

    const auto samples = analysis::chemical_distance_sample(g, n_pairs, run.seed);
    std::ofstream csv(run.out / "distances.csv");
    csv << "u,v,euclidean,hops,reachable\n";
    for (const auto& s : samples)
        csv << s.u << ',' << s.v << ',' << json_number(s.euclidean) << ',' << s.hops << ','
            << (s.reachable ? "true" : "false") << "\n";
    out_json["distance_pairs"] = samples.size();

    std::ofstream jout(run.out / "analysis.json");
    jout << out_json.dump(2) << "\n";
    write_manifest(run, "analyze");
    std::cout << out_json.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " - scale-free percolation and contact-process toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON config file")->required();
        sub->add_option("--seed", args.seed_flag, "root seed (overrides config)");
        sub->add_option("--out", args.out_flag, "output directory (overrides config)");
        sub->add_option("--threads", args.threads, "worker threads (0 = hardware)");
        sub->add_option("--format", args.format, "json|csv, where applicable");
    };

    auto* generate = app.add_subcommand("generate", "sample an SFP graph and write it");
    auto* simulate = app.add_subcommand("simulate", "run contact-process replicas");
    auto* constellation_cmd =
        app.add_subcommand("constellation", "extract and verify a constellation");
    auto* experiment =
        app.add_subcommand("experiment", "extinction scaling / survival experiments");
    auto* oracle = app.add_subcommand("oracle", "exact CTMC mean extinction (|V| <= 12)");
    auto* analyze = app.add_subcommand("analyze", "degree/distance/component estimators");
    for (auto* sub : {generate, simulate, constellation_cmd, experiment, oracle, analyze})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(args);
        if (simulate->parsed()) return cmd_simulate(args);
        if (constellation_cmd->parsed()) return cmd_constellation(args);
        if (experiment->parsed()) return cmd_experiment(args);
        if (oracle->parsed()) return cmd_oracle(args);
        if (analyze->parsed()) return cmd_analyze(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
