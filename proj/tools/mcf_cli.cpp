#include "mcf/entropy.hpp"
#include "mcf/io.hpp"
#include "mcf/limits.hpp"
#include "mcf/mollifier.hpp"
#include "mcf/quantities.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

using namespace mcf;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    json flow_spec; // name string or {name, parameters}
    std::vector<Real> rs, ts, eps_list;
    std::string out = ".";
    std::uint64_t seed = 0;
    int threads = 1;
    QuadConfig quad;
    std::vector<Real> center_x;
    Real center_t = 0;
    bool has_center = false;
};

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where)
{
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::vector<Real> parse_list(const std::string& text)
{
    std::vector<Real> out;
    std::string token;
    for (char c : text + ",") {
        if (c == ',') {
            if (!token.empty()) {
                out.push_back(std::stod(token));
                token.clear();
            }
        } else {
            token += c;
        }
    }
    return out;
}

RunConfig load_config(const std::string& path)
{
    RunConfig cfg;
    if (path.empty())
        return cfg;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    reject_unknown_keys(
        j, {"flow", "r", "t", "eps", "out", "seed", "threads", "quad", "center"}, "config");
    if (j.contains("flow"))
        cfg.flow_spec = j["flow"];
    if (j.contains("r"))
        cfg.rs = j["r"].get<std::vector<Real>>();
    if (j.contains("t"))
        cfg.ts = j["t"].get<std::vector<Real>>();
    if (j.contains("eps"))
        cfg.eps_list = j["eps"].get<std::vector<Real>>();
    if (j.contains("out"))
        cfg.out = j["out"].get<std::string>();
    if (j.contains("seed"))
        cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads"))
        cfg.threads = j["threads"].get<int>();
    if (j.contains("quad")) {
        const json& q = j["quad"];
        reject_unknown_keys(q, {"rel_tol", "abs_tol", "max_depth", "trunc_delta"}, "quad");
        if (q.contains("rel_tol"))
            cfg.quad.rel_tol = q["rel_tol"].get<Real>();
        if (q.contains("abs_tol"))
            cfg.quad.abs_tol = q["abs_tol"].get<Real>();
        if (q.contains("max_depth"))
            cfg.quad.max_depth = q["max_depth"].get<int>();
        if (q.contains("trunc_delta"))
            cfg.quad.trunc_delta = q["trunc_delta"].get<Real>();
    }
    if (j.contains("center")) {
        const json& c = j["center"];
        reject_unknown_keys(c, {"x", "t"}, "center");
        cfg.center_x = c.at("x").get<std::vector<Real>>();
        cfg.center_t = c.value("t", 0.0);
        cfg.has_center = true;
    }
    return cfg;
}

FlowPtr flow_from_spec(const json& spec)
{
    if (spec.is_null())
        throw ConfigError("no flow given (use --flow or the config file)");
    if (spec.is_string())
        return find_flow(spec.get<std::string>());
    if (!spec.is_object())
        throw ConfigError("flow spec must be a name or an object");
    reject_unknown_keys(spec, {"name", "parameters"}, "flow");
    FlowPtr flow = find_flow(spec.at("name").get<std::string>());
    if (!spec.contains("parameters"))
        return flow;
    const json& p = spec["parameters"];
    reject_unknown_keys(p, {"offset", "rescale", "recenter_x", "recenter_t"},
                        "flow.parameters");
    if (p.contains("offset")) {
        const auto off = p["offset"].get<std::vector<Real>>();
        if (static_cast<int>(off.size()) != flow->ambient_dim())
            throw ConfigError("offset dimension mismatch");
        AmbientVec v(off.size());
        for (size_t i = 0; i < off.size(); ++i)
            v[i] = off[i];
        flow = translate(flow, v);
    }
    if (p.contains("rescale"))
        flow = parabolic_rescale(flow, p["rescale"].get<Real>());
    if (p.contains("recenter_x") || p.contains("recenter_t")) {
        AmbientVec x0 = zero_vec(flow->ambient_dim());
        if (p.contains("recenter_x")) {
            const auto xs = p["recenter_x"].get<std::vector<Real>>();
            if (static_cast<int>(xs.size()) != flow->ambient_dim())
                throw ConfigError("recenter_x dimension mismatch");
            for (size_t i = 0; i < xs.size(); ++i)
                x0[i] = xs[i];
        }
        flow = recenter(flow, x0, p.value("recenter_t", 0.0));
    }
    return flow;
}

Center config_center(const RunConfig& cfg, const AncientFlow& flow)
{
    if (!cfg.has_center)
        return origin_center(flow.ambient_dim());
    if (static_cast<int>(cfg.center_x.size()) != flow.ambient_dim())
        throw ConfigError("center dimension mismatch");
    AmbientVec x0(cfg.center_x.size());
    for (size_t i = 0; i < cfg.center_x.size(); ++i)
        x0[i] = cfg.center_x[i];
    return Center{x0, cfg.center_t};
}

std::string config_echo(const RunConfig& cfg, const std::string& command)
{
    json j;
    j["command"] = command;
    j["flow"] = cfg.flow_spec;
    j["r"] = cfg.rs;
    j["t"] = cfg.ts;
    j["eps"] = cfg.eps_list;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["quad"] = {{"rel_tol", cfg.quad.rel_tol},
                 {"abs_tol", cfg.quad.abs_tol},
                 {"max_depth", cfg.quad.max_depth},
                 {"trunc_delta", cfg.quad.trunc_delta}};
    return j.dump();
}

struct OutputWriter {
    std::filesystem::path dir;
    Manifest manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    OutputWriter(const std::string& out, const std::string& command)
        : dir(out), manifest(command)
    {
        std::filesystem::create_directories(dir);
    }
    void emit(const std::string& name, const std::string& content)
    {
        const std::string path = (dir / name).string();
        write_file(path, content);
        manifest.add_output(name, content);
    }
    void finish()
    {
        manifest.add_timing(
            "total_seconds",
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        write_file((dir / "manifest.json").string(), manifest.dump());
    }
};

int cmd_huisken(const RunConfig& cfg)
{
    FlowPtr flow = flow_from_spec(cfg.flow_spec);
    if (cfg.ts.empty())
        throw ConfigError("huisken needs --t");
    const Center center = config_center(cfg, *flow);
    OutputWriter out(cfg.out, "huisken");
    out.manifest.set_config(config_echo(cfg, "huisken"));
    std::string csv = csv_header_quantity() + "\n";
    bool ok = true;
    for (Real t : cfg.ts) {
        const QuantityReport rep = huisken_integral(*flow, t, center, cfg.quad);
        ok = ok && rep.converged;
        csv += csv_row(rep) + "\n";
    }
    out.emit("huisken_" + flow->name() + ".csv", csv);
    out.finish();
    return ok ? 0 : 3;
}

int cmd_ecker(const RunConfig& cfg)
{
    FlowPtr flow = flow_from_spec(cfg.flow_spec);
    if (cfg.rs.empty())
        throw ConfigError("ecker needs --r");
    const Center center = config_center(cfg, *flow);
    OutputWriter out(cfg.out, "ecker");
    out.manifest.set_config(config_echo(cfg, "ecker"));
    std::string csv = csv_header_quantity() + "\n";
    bool ok = true;
    const int n = flow->intrinsic_dim();
    for (Real r : cfg.rs) {
        HeatBall hb;
        hb.center = center.x0;
        hb.t0 = center.t0;
        hb.r = r;
        hb.n = n;
        QuantityReport rep = ecker_integral(*flow, hb, cfg.quad);
        ok = ok && rep.converged;
        // report the monotone normalized quantity A / r^n
        rep.value /= std::pow(r, n);
        rep.error_estimate /= std::pow(r, n);
        csv += csv_row(rep) + "\n";
    }
    out.emit("ecker_" + flow->name() + ".csv", csv);
    out.finish();
    return ok ? 0 : 3;
}

int cmd_density(const RunConfig& cfg)
{
    FlowPtr flow = flow_from_spec(cfg.flow_spec);
    const Center center = config_center(cfg, *flow);
    OutputWriter out(cfg.out, "density");
    out.manifest.set_config(config_echo(cfg, "density"));
    const DensityResult d = gaussian_density(*flow, center, cfg.quad);
    std::string csv = csv_header_quantity() + "\n";
    for (size_t i = 0; i < d.schedule_times.size(); ++i) {
        QuantityReport rep;
        rep.kind = QuantityKind::huisken;
        rep.parameter = d.schedule_times[i];
        rep.center = center;
        rep.value = d.schedule_values[i];
        csv += csv_row(rep) + "\n";
    }
    QuantityReport final_row;
    final_row.kind = QuantityKind::residual;
    final_row.parameter = 0;
    final_row.center = center;
    final_row.value = d.value;
    final_row.error_estimate = d.error_bar;
    csv += csv_row(final_row) + "\n";
    out.emit("density_" + flow->name() + ".csv", csv);
    out.finish();
    std::printf("density %s = %.10g (+- %.3g)\n", flow->name().c_str(), d.value, d.error_bar);
    return d.converged ? 0 : 3;
}

int cmd_entropy(const RunConfig& cfg)
{
    FlowPtr flow = flow_from_spec(cfg.flow_spec);
    if (cfg.ts.empty())
        throw ConfigError("entropy needs --t");
    OptimizerConfig opt;
    opt.seed = cfg.seed;
    opt.quad = cfg.quad;
    OutputWriter out(cfg.out, "entropy");
    out.manifest.set_config(config_echo(cfg, "entropy"));
    const EntropySchedule sched = entropy_schedule(*flow, cfg.ts, opt);
    std::string csv = csv_header_entropy(flow->ambient_dim()) + "\n";
    bool ok = true;
    for (const auto& r : sched.results) {
        csv += csv_row(r) + "\n";
        ok = ok && r.converged;
    }
    out.emit("entropy_" + flow->name() + ".csv", csv);
    out.finish();
    std::printf("sup lambda %s = %.10g (+- %.3g)\n", flow->name().c_str(), sched.sup_estimate,
                sched.error_bar);
    return ok ? 0 : 3;
}

int cmd_verify(const RunConfig& cfg)
{
    FlowPtr flow = flow_from_spec(cfg.flow_spec);
    const std::vector<Real> rs = cfg.rs.empty() ? default_r_schedule() : cfg.rs;
    const std::vector<Real> ts = cfg.ts.empty() ? default_t_schedule() : cfg.ts;
    std::vector<Real> entropy_ts;
    for (size_t i = 0; i < ts.size(); i += 2)
        entropy_ts.push_back(ts[i]);
    OptimizerConfig opt;
    opt.seed = cfg.seed;
    opt.quad = cfg.quad;

    OutputWriter out(cfg.out, "verify");
    out.manifest.set_config(config_echo(cfg, "verify"));
    const EntropyComparisonReport rep =
        verify_entropy_agreement(*flow, rs, ts, entropy_ts, cfg.quad, opt, cfg.threads);
    out.emit("limits_" + flow->name() + ".json", entropy_report_json(rep));
    out.emit("limits_" + flow->name() + "_series.csv", series_csv(rep));
    out.finish();

    const auto& t1 = rep.limits;
    std::printf("%s: verdict=%s ecker_limit=%.8g (+-%.2g) huisken_limit=%.8g (+-%.2g) "
                "sup_lambda=%.8g (+-%.2g) three_way=%s\n",
                flow->name().c_str(), to_string(t1.verdict).c_str(), t1.ecker_limit,
                t1.ecker_bar, t1.huisken_limit, t1.huisken_bar, rep.sup_lambda, rep.lambda_bar,
                rep.three_way_pass ? "yes" : "no");
    const bool pass = (t1.verdict == Verdict::pass && rep.three_way_pass) ||
                      t1.verdict == Verdict::pass_both_diverge;
    return pass ? 0 : 1;
}

int cmd_mollifier(const RunConfig& cfg)
{
    std::vector<Real> eps_list = cfg.eps_list;
    if (eps_list.empty())
        eps_list = {0.5, 0.1, 0.02};
    FlowPtr circle = find_flow("circle");
    FlowPtr reaper = find_flow("grim_reaper");
    OutputWriter out(cfg.out, "mollifier");
    out.manifest.set_config(config_echo(cfg, "mollifier"));

    std::string csv =
        "eps,alpha,kernel_identity_residual,sandwich_violations,smoothed_sandwich_ok,error_decay_ok\n";
    bool ok = true;
    for (Real eps : eps_list) {
        const MollifierFamily fam = make_mollifier(eps);

        std::vector<KernelPoint> grid;
        for (Real x : {0.0, 0.7, 1.5})
            for (Real t : {-0.2, -1.0, -3.0})
                grid.push_back({vec2(x, 0), t});
        const Real kernel_residual = radial_kernel_identity_residual(fam, grid, 1);

        std::mt19937 rng(12345);
        std::uniform_real_distribution<Real> ux(-1.0, 1.5);
        long violations = 0;
        for (int i = 0; i < 10000; ++i) {
            const Real x = ux(rng);
            const Real zeta = fam.zeta(x);
            if (!((x - eps > 0 ? 1.0 : 0.0) <= zeta && zeta <= (x > 0 ? 1.0 : 0.0)))
                ++violations;
            const Real Zv = fam.Z(x);
            if (!(positive_part(x - eps) <= Zv && Zv <= positive_part(x)))
                ++violations;
        }

        // sandwich e^{-eps} A(E_{e^{-eps/n} r})/r^n <= A_eps(r)/r^n <= A(E_r)/r^n
        const Real r = 2.0;
        HeatBall hb;
        hb.center = vec2(0, 0);
        hb.t0 = 0;
        hb.n = 1;
        hb.r = r;
        const Real upper = ecker_integral(*circle, hb, cfg.quad).value / r;
        hb.r = std::exp(-eps) * r;
        const Real lower = std::exp(-eps) * ecker_integral(*circle, hb, cfg.quad).value / r;
        const Real mid = smoothed_ecker_limit(*circle, r, fam, cfg.quad).value / r;
        const bool sandwich_ok = lower <= mid + 1e-6 && mid <= upper + 1e-6;

        Real prev = 1e300;
        bool decay_ok = true;
        for (Real s : {-1e-1, -1e-2, -1e-3}) {
            const Real e = error_term(*reaper, s, 3.0, 6.0, fam, cfg.quad).value;
            decay_ok = decay_ok && e < prev;
            prev = e;
        }

        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%ld,%d,%d\n", eps, fam.alpha(),
                      kernel_residual, violations, sandwich_ok ? 1 : 0, decay_ok ? 1 : 0);
        csv += buf;
        ok = ok && violations == 0 && kernel_residual < 1e-6 && sandwich_ok && decay_ok;
    }
    out.emit("mollifier.csv", csv);
    out.finish();
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monotone integral quantities of ancient mean curvature flows"};
    app.require_subcommand(1);

    std::string config_path, flow_name, r_list, t_list, eps_list, out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--flow", flow_name, "catalog flow name");
    app.add_option("--r", r_list, "comma-separated heat-ball radii");
    app.add_option("--t", t_list, "comma-separated slice times (negative)");
    app.add_option("--eps", eps_list, "comma-separated mollifier widths");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "optimizer seed");
    app.add_option("--threads", threads, "schedule-level parallelism");

    auto* huisken = app.add_subcommand("huisken", "Gaussian-weighted slice areas");
    auto* ecker = app.add_subcommand("ecker", "normalized heat-ball integrals A/r^n");
    auto* entropy = app.add_subcommand("entropy", "entropy along a time schedule");
    auto* density = app.add_subcommand("density", "Gaussian density at a space-time center");
    auto* verify = app.add_subcommand("verify", "two-limit comparison with entropy");
    auto* mollifier = app.add_subcommand("mollifier", "smoothing-family diagnostics");

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!flow_name.empty())
            cfg.flow_spec = flow_name;
        if (!r_list.empty())
            cfg.rs = parse_list(r_list);
        if (!t_list.empty())
            cfg.ts = parse_list(t_list);
        if (!eps_list.empty())
            cfg.eps_list = parse_list(eps_list);
        if (!out_dir.empty())
            cfg.out = out_dir;
        if (seed != 0)
            cfg.seed = seed;
        if (threads != 0)
            cfg.threads = threads;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        if (huisken->parsed())
            return cmd_huisken(cfg);
        if (ecker->parsed())
            return cmd_ecker(cfg);
        if (entropy->parsed())
            return cmd_entropy(cfg);
        if (density->parsed())
            return cmd_density(cfg);
        if (verify->parsed())
            return cmd_verify(cfg);
        if (mollifier->parsed())
            return cmd_mollifier(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
    return 2;
}
