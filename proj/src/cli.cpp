#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rc/dynamics.hpp"
#include "rc/errors.hpp"
#include "rc/exact.hpp"
#include "rc/lab.hpp"
#include "rc/multigraph.hpp"
#include "rc/shattering.hpp"
#include "rc/tree.hpp"

namespace rc {

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("RCMC_OUTDIR");
    return env ? env : "";
}

void add_common(CLI::App* cmd, ExperimentConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "flat key = value config file");
    cmd->add_option("--p", cfg.p, "edge probability p");
    cmd->add_option("--p-rel", cfg.p_rel, "p as a fraction of p_u(q,delta)");
    cmd->add_option("--q", cfg.q, "cluster weight q");
    cmd->add_option("--delta", cfg.delta, "degree");
    cmd->add_option("--seed", cfg.seed, "base seed");
    cmd->add_option("--reps", cfg.reps, "repetitions");
    cmd->add_option("--out", cfg.out_dir, "output directory (default $RCMC_OUTDIR)");
    cmd->add_flag("--force", cfg.force, "run even when p >= p_u");
}

// file config first, then CLI flags win
void merge_config(const CLI::App* cmd, ExperimentConfig& cfg, const std::string& config_path) {
    if (config_path.empty()) return;
    ExperimentConfig file_cfg = load_config_file(config_path);
    auto on_cli = [&](const std::string& flag) {
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    if (!on_cli("--p")) cfg.p = file_cfg.p;
    if (!on_cli("--p-rel")) cfg.p_rel = file_cfg.p_rel;
    if (!on_cli("--q")) cfg.q = file_cfg.q;
    if (!on_cli("--delta")) cfg.delta = file_cfg.delta;
    if (!on_cli("--seed")) cfg.seed = file_cfg.seed;
    if (!on_cli("--reps")) cfg.reps = file_cfg.reps;
    if (!on_cli("--out") && !file_cfg.out_dir.empty()) cfg.out_dir = file_cfg.out_dir;
    if (!file_cfg.sizes.empty()) cfg.sizes = file_cfg.sizes;
    if (!file_cfg.radii.empty()) cfg.radii = file_cfg.radii;
    if (!on_cli("--cap-mult")) cfg.cap_mult = file_cfg.cap_mult;
    cfg.burn_mult = file_cfg.burn_mult;
    if (!on_cli("--samples-base")) cfg.mc_samples_base = file_cfg.mc_samples_base;
    if (!on_cli("--eps")) cfg.eps = file_cfg.eps;
    if (!on_cli("--c")) cfg.c_small = file_cfg.c_small;
    if (!on_cli("--force")) cfg.force = file_cfg.force;
}

std::vector<uint32_t> split_u32(const std::string& s) {
    std::vector<uint32_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(static_cast<uint32_t>(std::stoul(item)));
    return out;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"random-cluster dynamics on random regular graphs"};
    app.require_subcommand(0, 1);

    ExperimentConfig cfg;
    cfg.out_dir = default_out_dir();
    std::string config_path;

    // gen-graph
    auto* gen = app.add_subcommand("gen-graph", "sample a random regular (multi)graph");
    uint32_t gen_n = 100;
    bool gen_multigraph = false;
    int gen_tries = 1000;
    std::string gen_out;
    gen->add_option("--n", gen_n, "vertex count")->required();
    gen->add_flag("--multigraph", gen_multigraph, "keep the raw configuration-model sample");
    gen->add_option("--max-tries", gen_tries, "resampling budget for a simple graph");
    gen->add_option("--out-file", gen_out, "write the graph to this file");
    add_common(gen, cfg, config_path);

    // exact-check
    auto* exact = app.add_subcommand("exact-check", "exact table of a named small graph");
    std::string exact_graph = "triangle", exact_export, exact_wire;
    exact->add_option("--graph", exact_graph, "triangle|path4|k4me|edge|multi");
    exact->add_option("--wire", exact_wire, "wired class, comma separated vertex ids");
    exact->add_option("--export", exact_export, "write bitmask,probability rows to this file");
    add_common(exact, cfg, config_path);

    // glauber-run
    auto* glauber = app.add_subcommand("glauber-run", "run the single-edge dynamics");
    uint32_t gl_n = 256;
    uint64_t gl_steps = 100000;
    std::string gl_init = "wired", gl_graph_file, gl_traj;
    glauber->add_option("--n", gl_n, "vertex count (fresh simple graph)");
    glauber->add_option("--graph-file", gl_graph_file, "run on a saved graph instead");
    glauber->add_option("--steps", gl_steps, "number of updates");
    glauber->add_option("--init", gl_init, "wired|free");
    glauber->add_option("--traj", gl_traj, "write step,edge_index,new_state events");
    add_common(glauber, cfg, config_path);

    // sw-run
    auto* sw = app.add_subcommand("sw-run", "run Swendsen-Wang on a sampled graph");
    uint32_t sw_n = 256;
    uint64_t sw_steps = 10000;
    sw->add_option("--n", sw_n, "vertex count");
    sw->add_option("--steps", sw_steps, "number of sweeps");
    add_common(sw, cfg, config_path);

    // coupling-time
    auto* ct = app.add_subcommand("coupling-time", "wired/free grand-coupling times");
    uint32_t ct_n = 256;
    ct->add_option("--n", ct_n, "vertex count");
    ct->add_option("--cap-mult", cfg.cap_mult, "cap in multiples of n ln n");
    add_common(ct, cfg, config_path);

    // tree-recursion
    auto* tr = app.add_subcommand("tree-recursion", "wired-tree connectivity recursion");
    uint32_t tr_h = 60;
    std::string tr_table, tr_qs = "1,1.5,2,3,10";
    tr->add_option("--height", tr_h, "depth");
    tr->add_option("--table", tr_table, "write q,delta,p_u,hat_p_at_p_u,d_hat_p rows");
    tr->add_option("--qs", tr_qs, "q list for --table");
    add_common(tr, cfg, config_path);

    // p-u
    auto* pu = app.add_subcommand("p-u", "uniqueness threshold p_u(q,delta)");
    double pu_tol = 1e-7;
    pu->add_option("--tol", pu_tol, "bisection tolerance");
    add_common(pu, cfg, config_path);

    // shatter-probe
    auto* sh = app.add_subcommand("shatter-probe", "cluster tails, sparsity, joint revealing");
    uint32_t sh_n = 1024, sh_r = 3, sh_R = 0, sh_K = 10;
    double sh_tmult = 20.0;
    std::string sh_mode = "all";
    std::string sh_trace;
    sh->add_option("--n", sh_n, "vertex count");
    sh->add_option("--t-mult", sh_tmult, "chain length in multiples of n ln n");
    sh->add_option("--mode", sh_mode, "tail|sparsity|reveal|all");
    sh->add_option("--r", sh_r, "revealing ball radius");
    sh->add_option("--R", sh_R, "sparsity ball radius (0 = 0.4 log2 n)");
    sh->add_option("--K", sh_K, "sparsity threshold");
    sh->add_option("--trace", sh_trace, "write reveal trace rows m,v_m,|A_m|,|V_k|,k");
    add_common(sh, cfg, config_path);

    // spatial-mixing
    auto* sm = app.add_subcommand("spatial-mixing", "influence decay on complete trees");
    std::string sm_rs;
    sm->add_option("--rs", sm_rs, "comma separated depths (default 2,3,4,5)");
    sm->add_option("--samples-base", cfg.mc_samples_base, "MCMC samples at R=3");
    add_common(sm, cfg, config_path);

    // lower-bound
    auto* lb = app.add_subcommand("lower-bound", "product-chain lower bound probe");
    uint32_t lb_n = 4096;
    lb->add_option("--n", lb_n, "vertex count");
    lb->add_option("--eps", cfg.eps, "representative-edge exponent");
    lb->add_option("--c", cfg.c_small, "short-horizon constant");
    add_common(lb, cfg, config_path);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "coupling-time scaling across sizes");
    std::string sweep_sizes;
    sweep->add_option("--sizes", sweep_sizes, "comma separated size list");
    sweep->add_option("--cap-mult", cfg.cap_mult, "cap in multiples of n ln n");
    add_common(sweep, cfg, config_path);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (app.get_subcommands().empty()) {
        std::cout << app.help() << std::endl;
        return 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        merge_config(sub, cfg, config_path);

        if (sub == gen) {
            const MultiGraph g = gen_multigraph ? sample_cm(gen_n, cfg.delta, cfg.seed)
                                                : sample_simple(gen_n, cfg.delta, cfg.seed, gen_tries);
            std::cout << "n=" << g.n() << " delta=" << g.delta() << " edges=" << g.edge_count()
                      << " simple=" << (g.is_simple() ? 1 : 0) << "\n";
            if (!gen_out.empty()) {
                g.save_file(gen_out);
                std::cout << "written to " << gen_out << "\n";
            }
        } else if (sub == exact) {
            const Graph g = named_graph(exact_graph);
            BoundaryCondition bc;
            if (!exact_wire.empty()) bc = BoundaryCondition::wired(split_u32(exact_wire));
            const ExactTable t = enumerate_rc(g, cfg.p, cfg.q, bc);
            std::cout.precision(10);
            std::cout << "graph=" << exact_graph << " p=" << cfg.p << " q=" << cfg.q
                      << " Z=" << t.Z << " logZ=" << t.log_Z << "\n";
            for (uint32_t e = 0; e < g.edge_count(); ++e)
                std::cout << "edge " << e << " marginal " << edge_marginal(t, e) << "\n";
            if (!exact_export.empty()) {
                std::ofstream os(exact_export);
                export_table(t, os);
            }
        } else if (sub == glauber) {
            MultiGraph mg = gl_graph_file.empty()
                                ? sample_simple(gl_n, cfg.delta, mix_seed(cfg.seed, 3))
                                : MultiGraph::load_file(gl_graph_file);
            ChainState chain(mg.graph(), cfg.p, cfg.q, BoundaryCondition::free(),
                             gl_init == "wired");
            std::vector<TrajectoryEvent> events;
            if (!gl_traj.empty()) chain.set_event_log(&events);
            UpdateStream stream(mix_seed(cfg.seed, 4), mg.edge_count());
            chain.run(gl_steps, stream);
            std::cout << "steps=" << chain.steps_taken() << " open_fraction="
                      << double(chain.open_count()) / mg.edge_count()
                      << " components=" << chain.connectivity().component_count() << "\n";
            if (!gl_traj.empty()) {
                std::ofstream os(gl_traj);
                os << "step,edge_index,new_state\n";
                for (const auto& ev : events)
                    os << ev.step << ',' << ev.edge << ',' << int(ev.new_state) << '\n';
            }
        } else if (sub == sw) {
            if (cfg.q < 2 || cfg.q != std::floor(cfg.q))
                throw parameter_error("sw-run needs integer q >= 2");
            const MultiGraph mg = sample_simple(sw_n, cfg.delta, mix_seed(cfg.seed, 5));
            RandomSource rng(mix_seed(cfg.seed, 6));
            SpinConfig spins;
            spins.spins.assign(mg.n(), 0);
            for (auto& s : spins.spins) s = rng.below32(static_cast<uint32_t>(cfg.q));
            uint64_t agree = 0;
            for (uint64_t i = 0; i < sw_steps; ++i) {
                sw_step(spins, mg.graph(), cfg.p, static_cast<uint32_t>(cfg.q), rng);
                for (const Edge& e : mg.graph().edges())
                    agree += spins.spins[e.u] == spins.spins[e.v];
            }
            std::cout << "sweeps=" << sw_steps << " adjacent_agreement="
                      << double(agree) / (double(sw_steps) * mg.edge_count()) << "\n";
        } else if (sub == ct) {
            cfg.validate_uniqueness();
            const MultiGraph mg = sample_simple(ct_n, cfg.delta, mix_seed(cfg.seed, 7));
            const uint64_t cap = static_cast<uint64_t>(
                std::ceil(cfg.cap_mult * ct_n * std::log(std::max(2.0, double(ct_n)))));
            const CouplingTimeSummary s =
                coupling_time_estimate(mg.graph(), cfg.resolved_p(), cfg.q, cfg.reps, cfg.seed, cap);
            std::cout << "median=" << s.median_time << " mean=" << s.mean_time
                      << " max=" << s.max_time << " censored=" << s.censored_count << "/"
                      << cfg.reps << " cap=" << cap << "\n";
            if (s.censored_count == static_cast<size_t>(cfg.reps))
                throw cap_exceeded("all repetitions hit the cap");
        } else if (sub == tr) {
            const TreeParams tp = TreeParams::make(cfg.p, cfg.q, cfg.delta);
            std::cout.precision(10);
            std::cout << "hat_p=" << hat_p(cfg.p, cfg.q) << " d_hat_p="
                      << (cfg.delta - 1) * hat_p(cfg.p, cfg.q) << "\n";
            std::cout << "phi(" << tr_h << ")=" << phi(tr_h, tp) << " ratio="
                      << decay_rate(tp, tr_h) << "\n";
            if (!tr_table.empty()) {
                std::ofstream os(tr_table);
                std::vector<double> qs;
                for (uint32_t v : split_u32(tr_qs)) qs.push_back(v);
                {
                    // allow fractional q in the list
                    qs.clear();
                    std::stringstream ss(tr_qs);
                    std::string item;
                    while (std::getline(ss, item, ','))
                        if (!item.empty()) qs.push_back(std::stod(item));
                }
                export_threshold_table(os, qs, cfg.delta);
                std::cout << "threshold table written to " << tr_table << "\n";
            }
        } else if (sub == pu) {
            const double v = p_u(cfg.q, cfg.delta, pu_tol);
            std::cout.precision(7);
            std::cout << std::fixed << v << "\n";
        } else if (sub == sh) {
            cfg.validate_uniqueness();
            const double p = cfg.resolved_p();
            const uint64_t t = static_cast<uint64_t>(
                std::ceil(sh_tmult * sh_n * std::log(std::max(2.0, double(sh_n)))));
            if (sh_mode == "tail" || sh_mode == "all") {
                const MultiGraph mg = sample_simple(sh_n, cfg.delta, mix_seed(cfg.seed, 8));
                const ClusterTailResult ct_res =
                    cluster_tail(mg.graph(), p, cfg.q, t, cfg.reps, mix_seed(cfg.seed, 9));
                std::cout << "cluster tail: slope=" << ct_res.log_tail_fit.slope
                          << " r2=" << ct_res.log_tail_fit.r2 << " max_cluster="
                          << ct_res.max_cluster << "\n";
            }
            if (sh_mode == "sparsity" || sh_mode == "all") {
                const uint32_t R = sh_R ? sh_R
                                        : static_cast<uint32_t>(0.4 * std::log2(double(sh_n)));
                const MultiGraph mg = sample_simple(sh_n, cfg.delta, mix_seed(cfg.seed, 10));
                ChainState chain(mg.graph(), p, cfg.q, BoundaryCondition::free(), true);
                UpdateStream stream(mix_seed(cfg.seed, 11), mg.edge_count());
                chain.run(t, stream);
                const SparsityResult sp = sparsity(mg.graph(), chain.config(), R, sh_K);
                std::cout << "sparsity: R=" << R << " K=" << sh_K << " max_count="
                          << sp.max_count << " is_KR_sparse=" << (sp.is_kr_sparse ? 1 : 0) << "\n";
            }
            if (sh_mode == "reveal" || sh_mode == "all") {
                const uint64_t tb = t_burn(1.0, sh_r, sh_n, cfg.delta);
                const JointRevealResult rr =
                    joint_reveal(sh_n, cfg.delta, p, cfg.q, {}, {0}, sh_r, tb, cfg.seed);
                const ContainmentAudit audit = containment_audit(rr);
                std::cout << "joint reveal: t_burn=" << tb << " generations=" << rr.k_empty
                          << " revealed=" << rr.revealed_pairs.size() << " contained="
                          << (audit.contained ? 1 : 0) << " cluster=" << audit.full_cluster_vertices
                          << "/" << audit.tilde_cluster_vertices << "\n";
                if (!sh_trace.empty()) {
                    std::ofstream os(sh_trace);
                    os << "m,v_m,a_size,frontier,k\n";
                    for (const auto& row : rr.trace)
                        os << row.m << ',' << row.v_m << ',' << row.a_size << ','
                           << row.frontier_size << ',' << row.k << '\n';
                }
            }
        } else if (sub == sm) {
            cfg.experiment = "spatial_mixing";
            if (!sm_rs.empty()) cfg.radii = split_u32(sm_rs);
            const Report r = exp_spatial_mixing(cfg);
            r.write(cfg.out_dir);
            std::cout << r.summary << "\n";
        } else if (sub == lb) {
            cfg.experiment = "lower_bound";
            cfg.sizes = {lb_n};
            if (cfg.reps == 20) cfg.reps = 50;
            const Report r = exp_lower_bound(cfg);
            r.write(cfg.out_dir);
            std::cout << r.summary << "\n";
        } else if (sub == sweep) {
            cfg.experiment = "mixing_sweep";
            if (!sweep_sizes.empty()) cfg.sizes = split_u32(sweep_sizes);
            const Report r = exp_mixing_sweep(cfg);
            r.write(cfg.out_dir);
            std::cout << r.summary << "\n";
        }
    } catch (const parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const size_error& e) {
        std::cerr << "size error: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const bracket_error& e) {
        std::cerr << "bracket error: " << e.what() << "\n";
        return 2;
    } catch (const retry_exhausted& e) {
        std::cerr << "retry budget exhausted: " << e.what() << "\n";
        return 3;
    } catch (const cap_exceeded& e) {
        std::cerr << "runtime cap: " << e.what() << "\n";
        return 3;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace rc
