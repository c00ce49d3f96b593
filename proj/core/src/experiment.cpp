#include "ivreg/experiment.hpp"

#include "ivreg/errors.hpp"
#include "ivreg/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ivreg {

using nlohmann::json;

namespace {

void check(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw InputError("config field '" + field + "': " + what);
}

bool is_fraction(double v) { return v >= 0.0 && v < 1.0; }

const char* name(ForwardKind k) { return k == ForwardKind::blur ? "blur" : "identity"; }
const char* name(DebiasOperator k) { return k == DebiasOperator::midpoint ? "midpoint" : "noisy"; }

template <class T>
T field(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("config field '") + key + "': wrong type");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    check(n >= 8, "n", "must be at least 8");
    check(domain_length > 0.0 && std::isfinite(domain_length), "domain_length", "must be positive");
    check(sigma > 0.0 && std::isfinite(sigma), "sigma", "must be positive");
    check(levels.size() == breakpoints.size() + 1, "levels", "needs one more entry than breakpoints");
    for (double v : levels) check(std::isfinite(v) && v >= 0.0, "levels", "entries must be finite and nonnegative");
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        check(std::isfinite(breakpoints[k]), "breakpoints", "entries must be finite");
        check(k == 0 || breakpoints[k] > breakpoints[k - 1], "breakpoints", "must be strictly increasing");
    }
    check(is_fraction(data_noise), "data_noise", "must lie in [0, 1)");
    check(is_fraction(operator_noise), "operator_noise", "must lie in [0, 1)");
    check(gamma >= 0.0 && std::isfinite(gamma), "gamma", "must be nonnegative");
    check(eps >= 0.0 && std::isfinite(eps), "eps", "must be nonnegative");
    check(nu >= 0.0 && nu < 1.0, "nu", "must lie in [0, 1)");
    check(c_factor >= 1.0 && std::isfinite(c_factor), "c_factor", "must be >= 1");
    check(c_cap > 0.0, "c_cap", "must be positive (inf drops the cap)");
    check(!seeds.empty(), "seeds", "must not be empty");
    try {
        schedule.validate();
    } catch (const InputError& e) {
        throw InputError(std::string("config field 'schedule': ") + e.what());
    }
}

std::string ExperimentConfig::to_json() const {
    json j{{"n", n},
           {"domain_length", domain_length},
           {"forward", name(forward)},
           {"sigma", sigma},
           {"breakpoints", breakpoints},
           {"levels", levels},
           {"data_noise", data_noise},
           {"operator_noise", operator_noise},
           {"gamma", gamma},
           {"eps", eps},
           {"nu", nu},
           {"c_factor", c_factor},
           {"c_cap", std::isfinite(c_cap) ? json(c_cap) : json(nullptr)},
           {"debias_operator", name(debias_operator)},
           {"schedule",
            {{"eps0", schedule.eps0},
             {"decay", schedule.decay},
             {"c0", schedule.c0},
             {"d0", schedule.d0},
             {"steps", schedule.steps}}},
           {"seeds", seeds},
           {"output_dir", output_dir}};
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("config: expected a JSON object");
    static const std::vector<std::string> known{
        "n",     "domain_length", "forward", "sigma",    "breakpoints", "levels",          "data_noise",
        "operator_noise", "gamma", "eps",   "nu",       "c_factor",    "c_cap",           "debias_operator",
        "schedule", "seeds", "output_dir"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InputError("config field '" + key + "': unknown");

    ExperimentConfig c;
    if (j.contains("n")) {
        const auto& v = j.at("n");
        check(v.is_number_integer() && v.get<long long>() >= 0, "n", "must be a nonnegative integer");
        c.n = v.get<std::size_t>();
    }
    c.domain_length = field(j, "domain_length", c.domain_length);
    const auto fwd = field<std::string>(j, "forward", name(c.forward));
    check(fwd == "blur" || fwd == "identity", "forward", "must be 'blur' or 'identity'");
    c.forward = fwd == "blur" ? ForwardKind::blur : ForwardKind::identity;
    c.sigma = field(j, "sigma", c.sigma);
    c.breakpoints = field(j, "breakpoints", c.breakpoints);
    c.levels = field(j, "levels", c.levels);
    c.data_noise = field(j, "data_noise", c.data_noise);
    c.operator_noise = field(j, "operator_noise", c.operator_noise);
    c.gamma = field(j, "gamma", c.gamma);
    c.eps = field(j, "eps", c.eps);
    c.nu = field(j, "nu", c.nu);
    c.c_factor = field(j, "c_factor", c.c_factor);
    if (j.contains("c_cap") && j.at("c_cap").is_null())
        c.c_cap = std::numeric_limits<double>::infinity();
    else
        c.c_cap = field(j, "c_cap", c.c_cap);
    const auto dop = field<std::string>(j, "debias_operator", name(c.debias_operator));
    check(dop == "midpoint" || dop == "noisy", "debias_operator", "must be 'midpoint' or 'noisy'");
    c.debias_operator = dop == "midpoint" ? DebiasOperator::midpoint : DebiasOperator::noisy;
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        check(s.is_object(), "schedule", "must be an object");
        for (const auto& [key, _] : s.items())
            check(key == "eps0" || key == "decay" || key == "c0" || key == "d0" || key == "steps",
                  "schedule." + key, "unknown");
        c.schedule.eps0 = field(s, "eps0", c.schedule.eps0);
        c.schedule.decay = field(s, "decay", c.schedule.decay);
        c.schedule.c0 = field(s, "c0", c.schedule.c0);
        c.schedule.d0 = field(s, "d0", c.schedule.d0);
        c.schedule.steps = field(s, "steps", c.schedule.steps);
    }
    c.seeds = field(j, "seeds", c.seeds);
    c.output_dir = field(j, "output_dir", c.output_dir);
    c.validate();
    return c;
}

std::string ExperimentConfig::hash() const {
    const std::string canonical = json::parse(to_json()).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Signal ground_truth(const ExperimentConfig& cfg) {
    cfg.validate();
    const Grid g(cfg.n, cfg.spacing());
    Eigen::VectorXd u(static_cast<Eigen::Index>(cfg.n));
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double x = g.coordinate(i);
        std::size_t k = 0;
        while (k < cfg.breakpoints.size() && x >= cfg.breakpoints[k]) ++k;
        u[static_cast<Eigen::Index>(i)] = cfg.levels[k];
    }
    return Signal(g, std::move(u));
}

DenseOperator forward_operator(const ExperimentConfig& cfg) {
    const Grid g(cfg.n, cfg.spacing());
    return cfg.forward == ForwardKind::blur ? gaussian_convolution(g, cfg.sigma) : DenseOperator::identity(cfg.n);
}

Instance synthesize(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Signal u = ground_truth(cfg);
    DenseOperator a = forward_operator(cfg);
    Signal f = apply(a, u);

    Rng root(seed);
    Rng data_rng = root.split(1);
    Rng op_rng = root.split(2);

    const double delta = cfg.data_noise * f.values().maxCoeff();
    Eigen::VectorXd fn = f.values();
    for (Eigen::Index i = 0; i < fn.size(); ++i) fn[i] += data_rng.uniform(-delta, delta);
    Signal f_noisy = f.with_values(std::move(fn));

    DenseOperator a_noisy = cfg.operator_noise > 0.0 ? perturb_operator(a, cfg.operator_noise, op_rng) : a;
    const double d = cfg.operator_noise > 0.0 ? perturbation_amplitude(a, cfg.operator_noise) : 0.0;
    IntervalOperator op = interval_from_noisy(a_noisy, d);
    IntervalData data = data_bounds(f_noisy, delta);
    return Instance{seed, std::move(u), std::move(a), std::move(f), std::move(a_noisy), std::move(f_noisy),
                    delta, d, std::move(op), std::move(data)};
}

void save_instance(const Instance& inst, const std::filesystem::path& dir) {
    io::write_file(dir / "ground_truth.csv", io::signal_to_csv(inst.u_exact));
    io::write_file(dir / "operator_exact.csv", io::operator_to_csv(inst.a_exact));
    io::write_file(dir / "operator_noisy.csv", io::operator_to_csv(inst.a_noisy));
    io::write_file(dir / "operator_lower.csv", io::operator_to_csv(inst.op.lower()));
    io::write_file(dir / "operator_upper.csv", io::operator_to_csv(inst.op.upper()));
    io::write_file(dir / "data_exact.csv", io::signal_to_csv(inst.f_exact));
    io::write_file(dir / "data.csv", io::signal_to_csv(inst.f_noisy));
    io::write_file(dir / "data_lower.csv", io::signal_to_csv(inst.data.lower()));
    io::write_file(dir / "data_upper.csv", io::signal_to_csv(inst.data.upper()));
    json meta{{"seed", inst.seed},
              {"n", inst.u_exact.size()},
              {"h", inst.u_exact.grid().spacing()},
              {"delta", inst.delta},
              {"d", inst.d}};
    io::write_file(dir / "instance.json", meta.dump(2) + "\n");
}

Instance load_instance(const std::filesystem::path& dir) {
    json meta;
    try {
        meta = json::parse(io::read_file(dir / "instance.json"));
    } catch (const json::exception& e) {
        throw InputError(std::string("instance.json: ") + e.what());
    }
    const double h = meta.value("h", 1.0);
    auto sig = [&](const char* file) { return io::signal_from_csv(io::read_file(dir / file), h); };
    auto mat = [&](const char* file) { return io::operator_from_csv(io::read_file(dir / file)); };
    Instance inst{meta.value("seed", std::uint64_t{0}),
                  sig("ground_truth.csv"),
                  mat("operator_exact.csv"),
                  sig("data_exact.csv"),
                  mat("operator_noisy.csv"),
                  sig("data.csv"),
                  meta.value("delta", 0.0),
                  meta.value("d", 0.0),
                  IntervalOperator(mat("operator_lower.csv"), mat("operator_upper.csv")),
                  IntervalData(sig("data_lower.csv"), sig("data_upper.csv"))};
    if (inst.a_exact.cols() != inst.u_exact.size() || inst.a_exact.rows() != inst.f_exact.size() ||
        inst.op.rows() != inst.data.size() || inst.op.cols() != inst.u_exact.size())
        throw InputError("instance files have inconsistent sizes");
    return inst;
}

bool instance_consistent(const Instance& inst, double tol) {
    return inst.op.contains(inst.a_exact, tol) && inst.data.contains(inst.f_exact, tol) &&
           inst.op.lower().matrix().minCoeff() >= 0.0;
}

}  // namespace ivreg
