#include "cli.hpp"

#include "ivreg/analysis.hpp"
#include "ivreg/baselines.hpp"
#include "ivreg/debias.hpp"
#include "ivreg/errors.hpp"
#include "ivreg/experiment.hpp"
#include "ivreg/io.hpp"
#include "ivreg/metrics.hpp"
#include "ivreg/variational.hpp"
#include "ivreg/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>

namespace ivreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double solve_tol = 1e-7;

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> gamma;
    unsigned threads = 1;
    std::string instance;
};

struct Job {
    Instance inst;
    fs::path dir;
};

/// Outcome of one command on one instance.
struct Outcome {
    bool ok = true;
    std::string summary;
    json row;  ///< report-command summary fields
};

json base_report(const ExperimentConfig& cfg, const char* command, std::uint64_t seed) {
    return {{"command", command},
            {"version", std::string(version)},
            {"config_hash", cfg.hash()},
            {"seed", seed}};
}

double finite_or_sentinel(double v) { return std::isfinite(v) ? v : 1e308; }

/// x, ground_truth, observed, reconstruction[, lower, upper]
std::string plot_csv(const Instance& inst, const Signal& rec, const Eigen::VectorXd* lower = nullptr,
                     const Eigen::VectorXd* upper = nullptr) {
    std::string s = "x,ground_truth,observed,reconstruction";
    if (lower) s += ",lower,upper";
    s += '\n';
    const Grid& g = inst.u_exact.grid();
    const bool same = inst.f_noisy.size() == g.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
        s += io::format_double(g.coordinate(i)) + ',' + io::format_double(inst.u_exact[i]) + ',' +
             (same ? io::format_double(inst.f_noisy[i]) : std::string()) + ',' + io::format_double(rec[i]);
        if (lower) {
            const auto k = static_cast<Eigen::Index>(i);
            s += ',' + io::format_double((*lower)[k]) + ',' + io::format_double((*upper)[k]);
        }
        s += '\n';
    }
    return s;
}

void write_json(const fs::path& p, const json& j) { io::write_file(p, j.dump(2) + "\n"); }

json solve_summary(const PrimalSolveReport& rep) {
    return {{"status", std::string(lp::to_string(rep.status))},
            {"objective", rep.objective},
            {"dual_objective", rep.dual_objective},
            {"duality_gap", rep.duality_gap},
            {"complementarity_mu", rep.complementarity_mu},
            {"complementarity_lambda", rep.complementarity_lambda},
            {"max_violation", rep.max_violation},
            {"iterations", rep.iterations},
            {"mu_norm", rep.optimal() ? rep.certificate.mu_norm() : 0.0}};
}

json quality(const Signal& u, const Signal& ref) {
    return {{"psnr", finite_or_sentinel(psnr(u, ref))},
            {"ssim", ssim_1d(u, ref)},
            {"tv", tv(u)},
            {"max", u.values().maxCoeff()}};
}

Outcome cmd_solve(const ExperimentConfig& cfg, const Job& job) {
    const Instance& inst = job.inst;
    const Regularizer j(cfg.gamma);
    const auto rep = solve_primal(j, inst.op, inst.data);
    json r = base_report(cfg, "solve", inst.seed);
    r["solve"] = solve_summary(rep);
    bool ok = rep.optimal();
    if (ok) {
        const auto member = in_subdiff_zero(j, rep.certificate.p);
        const bool at = in_subdiff_at(j, rep.certificate.p, rep.u);
        r["certificate"] = {{"in_subdiff_zero", member.member},
                            {"membership_residual", member.residual},
                            {"in_subdiff_at", at}};
        r["quality"] = quality(rep.u, inst.u_exact);
        r["observed_psnr"] = finite_or_sentinel(psnr(inst.f_noisy, inst.u_exact));
        ok = rep.duality_gap <= solve_tol && rep.complementarity_mu <= solve_tol &&
             rep.complementarity_lambda <= solve_tol && member.member && at;
        io::write_file(job.dir / "u.csv", io::signal_to_csv(rep.u));
        io::write_file(job.dir / "p.csv", io::signal_to_csv(rep.certificate.p));
        io::write_file(job.dir / "plot_solve.csv", plot_csv(inst, rep.u));
    }
    r["invariants_ok"] = ok;
    write_json(job.dir / "solve.json", r);
    return {ok,
            "solve " + std::string(lp::to_string(rep.status)) + " objective=" + io::format_double(rep.objective) +
                " gap=" + io::format_double(rep.duality_gap),
            {}};
}

DebiasResult run_debias(const ExperimentConfig& cfg, const Instance& inst, const ModelManifoldSpec& m) {
    if (cfg.debias_operator == DebiasOperator::noisy) return debias(m, inst.a_noisy, inst.f_noisy);
    return debias(m);
}

Outcome cmd_debias(const ExperimentConfig& cfg, const Job& job) {
    const Instance& inst = job.inst;
    const Regularizer j(cfg.gamma);
    const auto rep = solve_primal(j, inst.op, inst.data);
    json r = base_report(cfg, "debias", inst.seed);
    r["solve"] = solve_summary(rep);
    if (!rep.optimal()) {
        r["invariants_ok"] = false;
        write_json(job.dir / "debias.json", r);
        return {false, "debias: interval solve " + std::string(lp::to_string(rep.status)), {}};
    }
    const auto m = manifold_from_solve(rep, j, inst.op, inst.data, cfg.eps, cfg.c_cap);
    const auto res = run_debias(cfg, inst, m);
    const auto member = check_membership(m, res.u, 1e-7);
    r["debias"] = {{"operator", cfg.debias_operator == DebiasOperator::midpoint ? "midpoint" : "noisy"},
                   {"objective", res.objective},
                   {"gap", res.gap},
                   {"iterations", res.iterations},
                   {"converged", res.converged},
                   {"in_manifold", member.member()},
                   {"gap_history", res.gap_history}};
    r["quality_interval"] = quality(rep.u, inst.u_exact);
    r["quality_debiased"] = quality(res.u, inst.u_exact);
    const bool ok = res.converged && member.member();
    r["invariants_ok"] = ok;
    write_json(job.dir / "debias.json", r);
    io::write_file(job.dir / "u_debiased.csv", io::signal_to_csv(res.u));
    io::write_file(job.dir / "plot_debias.csv", plot_csv(inst, res.u));
    return {ok,
            "debias gap=" + io::format_double(res.gap) + " iterations=" + std::to_string(res.iterations) +
                " psnr=" + io::format_double(psnr(res.u, inst.u_exact)),
            {}};
}

Outcome cmd_errorbars(const ExperimentConfig& cfg, const Job& job) {
    const Instance& inst = job.inst;
    const Regularizer j(cfg.gamma);
    const auto rep = solve_primal(j, inst.op, inst.data);
    json r = base_report(cfg, "errorbars", inst.seed);
    r["solve"] = solve_summary(rep);
    if (!rep.optimal()) {
        r["invariants_ok"] = false;
        write_json(job.dir / "errorbars.json", r);
        return {false, "errorbars: interval solve " + std::string(lp::to_string(rep.status)), {}};
    }
    const auto m = manifold_from_solve(rep, j, inst.op, inst.data, cfg.eps, cfg.c_cap);
    const auto det = detect_jumps(rep.u, rep.certificate.p, cfg.gamma, cfg.nu);
    if (det.status != lp::Status::optimal) {
        r["jumps"] = {{"status", std::string(lp::to_string(det.status))}};
        r["invariants_ok"] = false;
        write_json(job.dir / "errorbars.json", r);
        return {false, "errorbars: jump detection " + std::string(lp::to_string(det.status)), {}};
    }
    const auto regions = regions_from_jumps(det.jumps, rep.u.size());
    const auto bars = error_bars(m, regions);
    bool all_ok = true;
    std::size_t contained = 0;
    json rows = json::array();
    for (const auto& b : bars.bars) {
        const double exact = region_mean(inst.u_exact, b.region);
        const bool in = b.lower <= exact + 1e-9 && exact <= b.upper + 1e-9;
        contained += in ? 1 : 0;
        all_ok = all_ok && b.ok();
        rows.push_back({{"begin", b.region.begin},
                        {"end", b.region.end},
                        {"lower", b.lower},
                        {"upper", b.upper},
                        {"ref_mean", b.ref_mean},
                        {"exact_mean", exact},
                        {"contains_exact", in},
                        {"status", b.ok() ? "optimal" : "failed"}});
    }
    r["jumps"] = {{"status", "optimal"}, {"slots", det.jumps.indices()}};
    r["regions"] = rows;
    r["regions_containing_exact"] = contained;
    r["invariants_ok"] = all_ok;
    write_json(job.dir / "errorbars.json", r);
    io::write_file(job.dir / "errorbars.csv", bars.to_csv(inst.u_exact));
    const auto [lo, hi] = bars.envelopes(rep.u.size());
    io::write_file(job.dir / "plot_errorbars.csv", plot_csv(inst, rep.u, &lo, &hi));
    return {all_ok,
            "errorbars regions=" + std::to_string(bars.bars.size()) + " containing_exact=" + std::to_string(contained),
            {}};
}

Outcome cmd_rate(const ExperimentConfig& cfg, const Job& job) {
    const Instance& inst = job.inst;
    const Regularizer j(cfg.gamma);
    const auto exp = rate_experiment(j, cfg.schedule, inst.f_exact, inst.a_exact, inst.u_exact, inst.seed);
    json r = base_report(cfg, "rate", inst.seed);
    r["source_condition"] = exp.source_condition();
    bool ok = exp.source_condition();
    if (ok) {
        r["certificate_norm"] = exp.reference.norm;
        r["slope"] = exp.table.slope ? json(*exp.table.slope) : json(nullptr);
        json rows = json::array();
        for (std::size_t k = 0; k < exp.table.rows.size(); ++k) {
            const auto& row = exp.table.rows[k];
            ok = ok && (k == 0 || row.eps < exp.table.rows[k - 1].eps);
            json h = json::array();
            for (double v : row.hausdorff) h.push_back(std::isfinite(v) ? json(v) : json(nullptr));
            rows.push_back({{"n", row.step},
                            {"eps", row.eps},
                            {"bregman", row.bregman},
                            {"objective", row.objective},
                            {"hausdorff", h}});
        }
        r["thresholds"] = exp.table.thresholds;
        r["rows"] = rows;
        io::write_file(job.dir / "rate.csv", exp.table.to_csv());
    }
    r["invariants_ok"] = ok;
    write_json(job.dir / "rate.json", r);
    std::string slope = exp.table.slope ? io::format_double(*exp.table.slope) : std::string("undefined");
    return {ok, ok ? "rate slope=" + slope : std::string("rate: source condition fails"), {}};
}

Outcome cmd_baseline(const ExperimentConfig& cfg, const Job& job) {
    const Instance& inst = job.inst;
    const Regularizer j(cfg.gamma);
    json r = base_report(cfg, "baseline", inst.seed);
    const auto naive = naive_solve(j, inst.a_noisy, inst.data);
    r["naive"] = solve_summary(naive);
    if (naive.optimal()) {
        r["naive"]["quality"] = quality(naive.u, inst.u_exact);
        io::write_file(job.dir / "plot_naive.csv", plot_csv(inst, naive.u));
    }
    MorozovConfig mc;
    mc.c_factor = cfg.c_factor;
    mc.delta = inst.delta;
    mc.h_op = inst.d;
    bool ok = true;
    for (bool modified : {false, true}) {
        const char* key = modified ? "morozov_modified" : "morozov";
        try {
            const auto res = morozov(j, inst.a_noisy, inst.f_noisy, mc, modified);
            r[key] = {{"alpha", res.alpha},
                      {"target", res.target},
                      {"discrepancy", res.discrepancy},
                      {"evaluations", res.evaluations},
                      {"used_scan", res.used_scan},
                      {"quality", quality(res.solution.u, inst.u_exact)}};
            io::write_file(job.dir / (std::string("plot_") + key + ".csv"), plot_csv(inst, res.solution.u));
        } catch (const SolveError& e) {
            r[key] = {{"error", e.what()}};
            ok = false;
        }
    }
    r["invariants_ok"] = ok;
    write_json(job.dir / "baseline.json", r);
    return {ok, std::string("baseline naive ") + std::string(lp::to_string(naive.status)) +
                    (ok ? ", morozov ok" : ", morozov failed"),
            {}};
}

Outcome cmd_report(const ExperimentConfig& cfg, const Job& job) {
    const Instance& inst = job.inst;
    const Regularizer j(cfg.gamma);
    json row{{"seed", inst.seed}, {"psnr_observed", finite_or_sentinel(psnr(inst.f_noisy, inst.u_exact))}};
    const auto rep = solve_primal(j, inst.op, inst.data);
    bool ok = rep.optimal();
    if (ok) {
        row["psnr_interval"] = psnr(rep.u, inst.u_exact);
        row["ssim_interval"] = ssim_1d(rep.u, inst.u_exact);
        row["duality_gap"] = rep.duality_gap;
        const auto m = manifold_from_solve(rep, j, inst.op, inst.data, cfg.eps, cfg.c_cap);
        const auto db = run_debias(cfg, inst, m);
        row["psnr_debiased"] = psnr(db.u, inst.u_exact);
        row["debias_gap"] = db.gap;
        ok = db.converged;
    }
    const auto naive = naive_solve(j, inst.a_noisy, inst.data);
    if (naive.optimal()) {
        row["psnr_naive"] = psnr(naive.u, inst.u_exact);
        row["tv_ratio_naive"] = tv(naive.u) / tv(inst.u_exact);
    }
    MorozovConfig mc;
    mc.c_factor = cfg.c_factor;
    mc.delta = inst.delta;
    mc.h_op = inst.d;
    try {
        const auto mm = morozov(j, inst.a_noisy, inst.f_noisy, mc, true);
        row["psnr_morozov_modified"] = psnr(mm.solution.u, inst.u_exact);
        row["max_morozov_modified"] = mm.solution.u.values().maxCoeff();
    } catch (const SolveError&) {
    }
    return {ok, "report row complete", row};
}

std::string summary_csv(const std::vector<json>& rows) {
    static const std::vector<std::string> cols{"seed",          "psnr_observed",  "psnr_interval",
                                               "ssim_interval", "duality_gap",    "psnr_debiased",
                                               "debias_gap",    "psnr_naive",     "tv_ratio_naive",
                                               "psnr_morozov_modified", "max_morozov_modified"};
    std::string s;
    for (std::size_t k = 0; k < cols.size(); ++k) s += (k ? "," : "") + cols[k];
    s += '\n';
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (k) s += ',';
            if (!r.contains(cols[k])) continue;
            const auto& v = r.at(cols[k]);
            s += v.is_number_unsigned() ? std::to_string(v.get<std::uint64_t>()) : io::format_double(v.get<double>());
        }
        s += '\n';
    }
    return s;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
/// exception in index order is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < k; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

ExperimentConfig load_config(const Options& o) {
    ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::from_json(io::read_file(o.config));
    if (!o.out.empty()) cfg.output_dir = o.out;
    if (o.seed) cfg.seeds = {*o.seed};
    if (o.gamma) cfg.gamma = *o.gamma;
    cfg.validate();
    return cfg;
}

std::vector<Job> make_jobs(const ExperimentConfig& cfg, const Options& o) {
    std::vector<Job> jobs;
    if (!o.instance.empty()) {
        const fs::path dir = o.out.empty() ? fs::path(o.instance) : fs::path(o.out);
        jobs.push_back({load_instance(o.instance), dir});
        return jobs;
    }
    for (auto seed : cfg.seeds)
        jobs.push_back({synthesize(cfg, seed), fs::path(cfg.output_dir) / ("seed_" + std::to_string(seed))});
    return jobs;
}

int run_command(const std::string& name, const Options& o, std::ostream& out) {
    const ExperimentConfig cfg = load_config(o);
    if (name == "synth") {
        if (!o.instance.empty()) throw InputError("synth does not take --instance");
        for (auto seed : cfg.seeds) {
            const fs::path dir = fs::path(cfg.output_dir) / ("seed_" + std::to_string(seed));
            const Instance inst = synthesize(cfg, seed);
            save_instance(inst, dir);
            out << "seed " << seed << ": wrote " << dir.string()
                << (instance_consistent(inst) ? "" : " (enclosure check failed)") << '\n';
            if (!instance_consistent(inst)) return invariant_failure;
        }
        io::write_file(fs::path(cfg.output_dir) / "config.json", cfg.to_json() + "\n");
        return ok;
    }

    using Command = Outcome (*)(const ExperimentConfig&, const Job&);
    Command cmd = name == "solve"       ? cmd_solve
                  : name == "debias"    ? cmd_debias
                  : name == "errorbars" ? cmd_errorbars
                  : name == "rate"      ? cmd_rate
                  : name == "baseline"  ? cmd_baseline
                                        : cmd_report;
    const auto jobs = make_jobs(cfg, o);
    std::vector<Outcome> results(jobs.size());
    parallel_for(jobs.size(), o.threads, [&](std::size_t i) { results[i] = cmd(cfg, jobs[i]); });

    bool all_ok = true;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        out << "seed " << jobs[i].inst.seed << ": " << results[i].summary << (results[i].ok ? "" : " [FAILED]")
            << '\n';
        all_ok = all_ok && results[i].ok;
    }
    if (name == "report") {
        std::vector<json> rows;
        for (const auto& r : results) rows.push_back(r.row);
        const fs::path root = o.instance.empty() ? fs::path(cfg.output_dir) : jobs.front().dir;
        io::write_file(root / "summary.csv", summary_csv(rows));
        json s{{"command", "report"},
               {"version", std::string(version)},
               {"config_hash", cfg.hash()},
               {"config", json::parse(cfg.to_json())},
               {"rows", rows},
               {"invariants_ok", all_ok}};
        write_json(root / "summary.json", s);
    }
    return all_ok ? ok : invariant_failure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interval-constrained variational regularisation"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Options o;
    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--seed", o.seed, "Run a single seed");
        sub->add_option("--gamma", o.gamma, "Override the l1 weight")->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--instance", o.instance, "Instance directory written by synth")->check(CLI::ExistingDirectory);
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"synth", "Synthesise instances"},
        {"solve", "Solve the interval problem and check the certificate"},
        {"debias", "Debias over the model manifold"},
        {"errorbars", "Region-wise error bars"},
        {"rate", "Convergence-rate study along the bounds schedule"},
        {"baseline", "Naive solve and Tikhonov with discrepancy rules"},
        {"report", "Summary table over all seeds"}};
    for (const auto& [name, help] : commands) common(app.add_subcommand(name, help));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return run_command(name, o, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const EmptySetError& e) {
        err << "input error: " << e.what() << '\n';
        return input_error;
    } catch (const SolveError& e) {
        err << "solver failure: " << e.what() << '\n';
        return invariant_failure;
    }
}

}  // namespace ivreg::cli
