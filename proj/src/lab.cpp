#include "rc/lab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rc/dynamics.hpp"
#include "rc/errors.hpp"
#include "rc/exact.hpp"
#include "rc/multigraph.hpp"
#include "rc/shattering.hpp"
#include "rc/tree.hpp"

namespace rc {

using nlohmann::json;

double ExperimentConfig::resolved_p() const {
    if (p_rel > 0.0) {
        if (p_rel >= 1.0 && !force)
            throw parameter_error("p_rel must lie in (0,1); use --force to override");
        return p_rel * p_u(q, delta);
    }
    return p;
}

void ExperimentConfig::validate_uniqueness() const {
    if (force) return;
    const double pu = p_u(q, delta);
    if (resolved_p() >= pu) {
        std::ostringstream os;
        os << "p = " << resolved_p() << " is not below p_u(" << q << "," << delta << ") = " << pu
           << "; pass --force to run anyway";
        throw parameter_error(os.str());
    }
}

namespace {

std::vector<uint32_t> parse_u32_list(const std::string& s) {
    std::vector<uint32_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(static_cast<uint32_t>(std::stoul(item)));
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "experiment") cfg.experiment = value;
    else if (key == "p") cfg.p = std::stod(value);
    else if (key == "p_rel") cfg.p_rel = std::stod(value);
    else if (key == "q") cfg.q = std::stod(value);
    else if (key == "delta") cfg.delta = static_cast<uint32_t>(std::stoul(value));
    else if (key == "sizes") cfg.sizes = parse_u32_list(value);
    else if (key == "reps") cfg.reps = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "cap_mult") cfg.cap_mult = std::stod(value);
    else if (key == "burn_mult") cfg.burn_mult = std::stod(value);
    else if (key == "radii") cfg.radii = parse_u32_list(value);
    else if (key == "mc_samples_base") cfg.mc_samples_base = std::stoull(value);
    else if (key == "eps") cfg.eps = std::stod(value);
    else if (key == "c_small") cfg.c_small = std::stod(value);
    else if (key == "force") cfg.force = (value == "1" || value == "true");
    else if (key == "out_dir") cfg.out_dir = value;
    else throw parameter_error("unknown config key: " + key);
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw usage_error("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw parameter_error("config line without '=': " + line);
        apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void Report::add_row(const std::string& experiment, uint64_t n, uint32_t delta, double q, double p,
                     uint64_t seed, int64_t rep, const std::string& metric, double value) {
    std::ostringstream os;
    os << experiment << ',' << n << ',' << delta << ',' << fmt(q) << ',' << fmt(p) << ',' << seed
       << ',' << rep << ',' << metric << ',' << fmt(value);
    rows.push_back(os.str());
}

void Report::write(const std::string& dir) const {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(std::filesystem::path(dir) / (name + ".csv"));
        os << "experiment,n,delta,q,p,seed,rep,metric,value\n";
        for (const auto& r : rows) os << r << '\n';
    }
    {
        std::ofstream os(std::filesystem::path(dir) / (name + ".manifest.json"));
        os << manifest_json << '\n';
    }
}

namespace {

json base_manifest(const ExperimentConfig& cfg, double p_resolved) {
    json j;
    j["version"] = kVersion;
    j["experiment"] = cfg.experiment;
    j["p"] = p_resolved;
    j["p_rel"] = cfg.p_rel;
    j["q"] = cfg.q;
    j["delta"] = cfg.delta;
    j["sizes"] = cfg.sizes;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    j["cap_mult"] = cfg.cap_mult;
    j["burn_mult"] = cfg.burn_mult;
    j["radii"] = cfg.radii;
    j["mc_samples_base"] = cfg.mc_samples_base;
    j["eps"] = cfg.eps;
    j["c_small"] = cfg.c_small;
    j["force"] = cfg.force;
    j["p_u"] = p_u(cfg.q, cfg.delta);
    j["hat_p"] = hat_p(p_resolved, cfg.q);
    return j;
}

} // namespace

// --- mixing sweep -------------------------------------------------------------

Report exp_mixing_sweep(const ExperimentConfig& cfg) {
    if (cfg.q < 1.0) throw parameter_error("mixing sweep requires q >= 1");
    const double p = cfg.resolved_p();
    cfg.validate_uniqueness();

    Report rep;
    rep.name = cfg.experiment.empty() ? "mixing_sweep" : cfg.experiment;
    json manifest = base_manifest(cfg, p);

    std::vector<double> log_nlogn, log_median;
    json per_n = json::array();
    for (uint32_t n : cfg.sizes) {
        const MultiGraph mg = sample_simple(n, cfg.delta, mix_seed(cfg.seed, n));
        const uint64_t cap =
            static_cast<uint64_t>(std::ceil(cfg.cap_mult * n * std::log(std::max(2.0, double(n)))));
        const CouplingTimeSummary s = coupling_time_estimate(
            mg.graph(), p, cfg.q, cfg.reps, mix_seed(cfg.seed, uint64_t(n) * 31 + 7), cap);
        for (int r = 0; r < cfg.reps; ++r) {
            rep.add_row("mixing_sweep", n, cfg.delta, cfg.q, p, cfg.seed, r, "coupling_time",
                        s.times[r]);
            if (s.censored[r])
                rep.add_row("mixing_sweep", n, cfg.delta, cfg.q, p, cfg.seed, r, "censored", 1.0);
        }
        rep.add_row("mixing_sweep", n, cfg.delta, cfg.q, p, cfg.seed, -1, "median_coupling_time",
                    s.median_time);
        json jn;
        jn["n"] = n;
        jn["median"] = s.median_time;
        jn["mean"] = s.mean_time;
        jn["max"] = s.max_time;
        jn["censored"] = s.censored_count;
        jn["cap"] = cap;
        per_n.push_back(jn);
        log_nlogn.push_back(std::log(n * std::log(double(n))));
        log_median.push_back(std::log(std::max(1.0, s.median_time)));
    }
    std::ostringstream sum;
    if (cfg.sizes.size() >= 2) {
        const LinFit fit = linear_fit(log_nlogn, log_median);
        rep.add_row("mixing_sweep", 0, cfg.delta, cfg.q, p, cfg.seed, -1, "loglog_slope",
                    fit.slope);
        manifest["loglog_slope"] = fit.slope;
        manifest["loglog_r2"] = fit.r2;
        sum << "mixing sweep: slope(log median vs log n ln n) = " << fit.slope
            << " (r2 = " << fit.r2 << ")";
    } else {
        sum << "mixing sweep: single size, slope undefined (need >= 2 sizes); medians only";
    }
    manifest["per_n"] = per_n;
    rep.manifest_json = manifest.dump(2);
    rep.summary = sum.str();
    return rep;
}

// --- spatial mixing -------------------------------------------------------------

namespace {

struct SpatialPoint {
    uint32_t R;
    double tv_exact = -1.0;
    double tv_mcmc = -1.0;
    double tv_mcmc_sigma = 0.0;
    double upsilon_hat = 0.0;
};

// Two leaves on distinct root subtrees of the complete tree.
std::pair<uint32_t, uint32_t> two_leaves_distinct_subtrees(const CompleteTree& t) {
    const uint64_t per_subtree = t.leaves.size() / t.delta;
    return {t.leaves[0], t.leaves[per_subtree]};
}

std::vector<uint32_t> root_edges(const CompleteTree& t) {
    std::vector<uint32_t> out;
    for (uint32_t e : t.graph.incident(t.root)) out.push_back(e);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Influence event: at every depth 1..R at least two vertices of that depth
// are joined to the wired pair inside {u : depth(u) >= depth}.
bool upsilon_event(const CompleteTree& t, const std::vector<uint8_t>& omega, uint32_t w1,
                   uint32_t w2) {
    const uint32_t R = t.height;
    const Graph& g = t.graph;
    for (uint32_t level = 1; level <= R; ++level) {
        // component of {w1,w2} within vertices of depth >= level
        std::vector<uint8_t> seen(g.n(), 0);
        std::vector<uint32_t> queue{w1, w2};
        seen[w1] = seen[w2] = 1;
        uint32_t hits = 0;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            const uint32_t v = queue[qi];
            if (t.depth[v] == level) ++hits;
            for (uint32_t e : g.incident(v)) {
                if (!omega[e]) continue;
                const uint32_t w = g.other_endpoint(e, v);
                if (t.depth[w] < level || seen[w]) continue;
                seen[w] = 1;
                queue.push_back(w);
            }
        }
        if (hits < 2) return false;
    }
    return true;
}

// Paired-stream estimate of the TV distance on the root edges between the
// two-leaf-wired and free measures, plus the Upsilon frequency under the
// wired one. Common random numbers keep the difference variance at the scale
// of the signal.
SpatialPoint spatial_mcmc(const CompleteTree& tree, uint32_t w1, uint32_t w2, double p, double q,
                          uint64_t samples, uint64_t seed) {
    SpatialPoint pt;
    pt.R = tree.height;
    const Graph& g = tree.graph;
    const uint32_t m = g.edge_count();
    const std::vector<uint32_t> nroot = root_edges(tree);
    const BoundaryCondition bc_wired = BoundaryCondition::wired({w1, w2});

    ChainState upper(g, p, q, bc_wired, /*wired_start=*/false, DynConnState::Backend::naive);
    ChainState lower(g, p, q, BoundaryCondition::free(), false, DynConnState::Backend::naive);

    const uint64_t burn =
        static_cast<uint64_t>(std::ceil(50.0 * m * std::log(std::max(2.0, double(m)))));
    UpdateStream stream(seed, m);
    for (uint64_t i = 0; i < burn; ++i) {
        const auto [e, u] = stream.next();
        upper.fk_step(e, u);
        lower.fk_step(e, u);
    }

    const uint32_t stride = std::max<uint32_t>(1, m / 2);
    const size_t patterns = size_t{1} << nroot.size();
    std::vector<double> diff_sum(patterns, 0.0);
    const int batches = 16;
    std::vector<std::vector<double>> batch_sum(batches, std::vector<double>(patterns, 0.0));
    uint64_t upsilon_hits = 0, upsilon_checks = 0;

    for (uint64_t sidx = 0; sidx < samples; ++sidx) {
        for (uint32_t i = 0; i < stride; ++i) {
            const auto [e, u] = stream.next();
            upper.fk_step(e, u);
            lower.fk_step(e, u);
        }
        size_t pat_u = 0, pat_l = 0;
        for (size_t j = 0; j < nroot.size(); ++j) {
            if (upper.open(nroot[j])) pat_u |= size_t{1} << j;
            if (lower.open(nroot[j])) pat_l |= size_t{1} << j;
        }
        if (pat_u != pat_l) {
            diff_sum[pat_u] += 1.0;
            diff_sum[pat_l] -= 1.0;
            const int b = static_cast<int>(sidx % batches);
            batch_sum[b][pat_u] += 1.0;
            batch_sum[b][pat_l] -= 1.0;
        }
        if (sidx % 8 == 0) {
            ++upsilon_checks;
            if (upsilon_event(tree, upper.config(), w1, w2)) ++upsilon_hits;
        }
    }

    double tv = 0.0;
    for (double d : diff_sum) tv += std::fabs(d);
    pt.tv_mcmc = 0.5 * tv / samples;

    // batch-mean spread as the error scale
    std::vector<double> batch_tv;
    for (int b = 0; b < batches; ++b) {
        double s = 0.0;
        for (double d : batch_sum[b]) s += std::fabs(d);
        batch_tv.push_back(0.5 * s / (double(samples) / batches));
    }
    pt.tv_mcmc_sigma = std::sqrt(std::max(0.0, variance(batch_tv) / batches));
    pt.upsilon_hat = upsilon_checks ? double(upsilon_hits) / upsilon_checks : 0.0;
    return pt;
}

} // namespace

Report exp_spatial_mixing(const ExperimentConfig& cfg) {
    const double p = cfg.resolved_p();
    cfg.validate_uniqueness();
    const double hp = hat_p(p, cfg.q);

    Report rep;
    rep.name = cfg.experiment.empty() ? "spatial_mixing" : cfg.experiment;
    json manifest = base_manifest(cfg, p);
    json per_r = json::array();

    std::vector<double> xs, ys;
    double overlap_exact = -1, overlap_mcmc = -1, overlap_sigma = 0;
    for (uint32_t R : cfg.radii) {
        SpatialPoint pt;
        pt.R = R;
        const CompleteTree tree = build_complete_tree(cfg.delta, R, TreeBc::free_bc);
        const auto [w1, w2] = two_leaves_distinct_subtrees(tree);
        const std::vector<uint32_t> nroot = root_edges(tree);

        if (R <= 3) {
            const BoundaryCondition bc_wired = BoundaryCondition::wired({w1, w2});
            const ExactTable t_wired = enumerate_rc(tree.graph, p, cfg.q, bc_wired);
            const ExactTable t_free = enumerate_rc(tree.graph, p, cfg.q, BoundaryCondition::free());
            pt.tv_exact = tv_distance(t_wired, t_free, nroot);
            rep.add_row("spatial_mixing", R, cfg.delta, cfg.q, p, cfg.seed, -1, "tv_exact",
                        pt.tv_exact);
        }
        if (R >= 3) {
            const uint64_t samples =
                cfg.mc_samples_base << (2 * (R > 3 ? (R - 3) : 0)); // 4x per extra level
            const SpatialPoint mc =
                spatial_mcmc(tree, w1, w2, p, cfg.q, samples, mix_seed(cfg.seed, 1000 + R));
            pt.tv_mcmc = mc.tv_mcmc;
            pt.tv_mcmc_sigma = mc.tv_mcmc_sigma;
            pt.upsilon_hat = mc.upsilon_hat;
            rep.add_row("spatial_mixing", R, cfg.delta, cfg.q, p, cfg.seed, -1, "tv_mcmc",
                        pt.tv_mcmc);
            rep.add_row("spatial_mixing", R, cfg.delta, cfg.q, p, cfg.seed, -1, "tv_mcmc_sigma",
                        pt.tv_mcmc_sigma);
            rep.add_row("spatial_mixing", R, cfg.delta, cfg.q, p, cfg.seed, -1, "upsilon_hat",
                        pt.upsilon_hat);
        }
        const double tv_for_fit = pt.tv_exact >= 0 ? pt.tv_exact : pt.tv_mcmc;
        if (tv_for_fit > 0) {
            xs.push_back(R);
            ys.push_back(std::log(tv_for_fit));
        }
        if (R == 3) {
            overlap_exact = pt.tv_exact;
            overlap_mcmc = pt.tv_mcmc;
            overlap_sigma = pt.tv_mcmc_sigma;
        }
        json jr;
        jr["R"] = R;
        jr["tv_exact"] = pt.tv_exact;
        jr["tv_mcmc"] = pt.tv_mcmc;
        jr["tv_mcmc_sigma"] = pt.tv_mcmc_sigma;
        jr["upsilon_hat"] = pt.upsilon_hat;
        per_r.push_back(jr);
    }

    const LinFit fit = linear_fit(xs, ys);
    const double rate = -fit.slope;
    const double target = 2.0 * std::log(1.0 / hp);
    rep.add_row("spatial_mixing", 0, cfg.delta, cfg.q, p, cfg.seed, -1, "decay_rate", rate);
    rep.add_row("spatial_mixing", 0, cfg.delta, cfg.q, p, cfg.seed, -1, "decay_rate_target",
                target);
    manifest["per_R"] = per_r;
    manifest["decay_rate"] = rate;
    manifest["decay_rate_target"] = target;
    manifest["overlap_exact"] = overlap_exact;
    manifest["overlap_mcmc"] = overlap_mcmc;
    manifest["overlap_sigma"] = overlap_sigma;
    rep.manifest_json = manifest.dump(2);

    std::ostringstream sum;
    sum << "spatial mixing: fitted decay rate " << rate << " vs 2 ln(1/hat_p) = " << target;
    if (overlap_exact >= 0 && overlap_mcmc >= 0)
        sum << "; overlap at R=3: exact " << overlap_exact << " vs mcmc " << overlap_mcmc << " ("
            << overlap_sigma << " sigma unit)";
    rep.summary = sum.str();
    return rep;
}

// --- lower bound probe ----------------------------------------------------------

Report exp_lower_bound(const ExperimentConfig& cfg) {
    if (cfg.q < 1.0) throw parameter_error("lower-bound probe requires q >= 1");
    const double p = cfg.resolved_p();
    cfg.validate_uniqueness();
    const double hp = hat_p(p, cfg.q);
    const uint32_t n = cfg.sizes.empty() ? 4096 : cfg.sizes.front();

    Report rep;
    rep.name = cfg.experiment.empty() ? "lower_bound" : cfg.experiment;
    json manifest = base_manifest(cfg, p);
    manifest["n"] = n;

    const MultiGraph mg = sample_simple(n, cfg.delta, mix_seed(cfg.seed, 17));
    const Graph& g = mg.graph();
    const uint32_t d = cfg.delta - 1;
    const uint32_t radius =
        std::max<uint32_t>(1, static_cast<uint32_t>(std::log(double(n)) / std::log(double(d)) / 5.0));

    double eps = cfg.eps;
    uint64_t want = static_cast<uint64_t>(std::ceil(std::pow(double(n), eps)));

    // greedy disjoint tree balls; representative edge per selected vertex
    std::vector<uint8_t> used(g.n(), 0);
    std::vector<uint32_t> centers;
    for (uint32_t v = 0; v < g.n() && centers.size() < want; ++v) {
        const Ball b = ball(g, v, radius);
        bool clean = tree_excess(g, b) == 0;
        for (uint32_t w : b.vertices)
            if (used[w]) {
                clean = false;
                break;
            }
        if (!clean) continue;
        for (uint32_t w : b.vertices) used[w] = 1;
        centers.push_back(v);
    }
    if (centers.size() < want) {
        eps = std::log(double(std::max<size_t>(2, centers.size()))) / std::log(double(n));
        manifest["eps_reduced_to"] = eps;
        rep.summary += "warning: insufficient disjoint balls, eps reduced to " +
                       std::to_string(eps) + "; ";
    }
    std::vector<uint32_t> cset;
    for (uint32_t v : centers) cset.push_back(g.incident(v)[0]);
    const double msize = static_cast<double>(cset.size());
    // desk-scale floor keeps the statistic meaningful when hat_p*m - m^(2/3) < 1
    const uint64_t theta = static_cast<uint64_t>(
        std::max(1.0, std::ceil(hp * msize - std::pow(msize, 2.0 / 3.0))));
    const uint64_t T = static_cast<uint64_t>(
        std::ceil(cfg.c_small * cfg.c_small * n * eps * std::log(double(n))));
    const uint64_t t_stat = static_cast<uint64_t>(
        std::ceil(cfg.burn_mult * n * std::log(double(n))));

    manifest["radius"] = radius;
    manifest["edges_selected"] = cset.size();
    manifest["theta"] = theta;
    manifest["T"] = T;
    manifest["t_stationary"] = t_stat;

    uint64_t aplus_at_T = 0, aplus_stat = 0;
    double never_updated_acc = 0.0;
    std::vector<uint8_t> in_c(g.edge_count(), 0);
    for (uint32_t e : cset) in_c[e] = 1;

    for (int r = 0; r < cfg.reps; ++r) {
        // short horizon from the free start
        ChainState chain(g, p, cfg.q, BoundaryCondition::free(), false);
        UpdateStream stream(mix_seed(cfg.seed, 100 + r), g.edge_count());
        std::vector<uint8_t> touched(g.edge_count(), 0);
        for (uint64_t i = 0; i < T; ++i) {
            const auto [e, u] = stream.next();
            chain.fk_step(e, u);
            touched[e] = 1;
        }
        uint64_t open_c = 0, untouched = 0;
        for (uint32_t e : cset) {
            if (chain.open(e)) ++open_c;
            if (!touched[e]) ++untouched;
        }
        const bool aplus = open_c >= theta;
        aplus_at_T += aplus;
        never_updated_acc += static_cast<double>(untouched);
        rep.add_row("lower_bound", n, cfg.delta, cfg.q, p, cfg.seed, r, "aplus_at_T", aplus);
        rep.add_row("lower_bound", n, cfg.delta, cfg.q, p, cfg.seed, r, "never_updated",
                    static_cast<double>(untouched));

        // independent long run as the stationary reference
        ChainState ref(g, p, cfg.q, BoundaryCondition::free(), false);
        UpdateStream rstream(mix_seed(cfg.seed, 5000 + r), g.edge_count());
        ref.run(t_stat, rstream);
        uint64_t open_ref = 0;
        for (uint32_t e : cset)
            if (ref.open(e)) ++open_ref;
        const bool aplus_ref = open_ref >= theta;
        aplus_stat += aplus_ref;
        rep.add_row("lower_bound", n, cfg.delta, cfg.q, p, cfg.seed, r, "aplus_stationary",
                    aplus_ref);
    }

    const double freq_T = double(aplus_at_T) / cfg.reps;
    const double freq_stat = double(aplus_stat) / cfg.reps;
    rep.add_row("lower_bound", n, cfg.delta, cfg.q, p, cfg.seed, -1, "aplus_freq_at_T", freq_T);
    rep.add_row("lower_bound", n, cfg.delta, cfg.q, p, cfg.seed, -1, "aplus_freq_stationary",
                freq_stat);
    rep.add_row("lower_bound", n, cfg.delta, cfg.q, p, cfg.seed, -1, "mean_never_updated",
                never_updated_acc / cfg.reps);
    manifest["aplus_freq_at_T"] = freq_T;
    manifest["aplus_freq_stationary"] = freq_stat;
    rep.manifest_json = manifest.dump(2);
    std::ostringstream sum;
    sum << "lower bound probe: A+ frequency " << freq_T << " at T=" << T << " vs stationary "
        << freq_stat << " (theta=" << theta << ", |C|=" << cset.size() << ")";
    rep.summary += sum.str();
    return rep;
}

} // namespace rc
