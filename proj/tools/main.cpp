// relab: numerical laboratory for source-coding error exponents with side
// information. One subcommand per figure/bound family; JSON config in, CSV or
// JSON artifact out. Exit codes: 0 ok, 2 usage, 3 validation, 4 budget.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "relab/berasure.hpp"
#include "relab/gaussian.hpp"
#include "relab/json_io.hpp"
#include "relab/sccsi.hpp"
#include "relab/sim.hpp"
#include "relab/wz.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

uint64_t fnv64(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(relab::ExtReal v) { return fmt(v.v); }

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    json j;
    in >> j;
    return j;
}

std::string header(const json& cfg, const char* unit) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# relab %s config=%016" PRIx64 " unit=%s\n", kVersion,
                  fnv64(cfg.dump()), unit);
    return buf;
}

void write_artifact(const std::string& out_path, const std::string& body) {
    if (out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output: " + out_path);
    out << body;
}

relab::GridSpec grid_from(const json& cfg, const char* key = "grid") {
    relab::GridSpec g;
    if (!cfg.contains(key)) return g;
    const json& j = cfg.at(key);
    g.k = j.value("k", g.k);
    g.k_outer = j.value("k_outer", g.k_outer);
    g.refine_rounds = j.value("refine_rounds", g.refine_rounds);
    g.refine_shrink = j.value("refine_shrink", g.refine_shrink);
    g.strict_eps = j.value("strict_eps", g.strict_eps);
    return g;
}

relab::GaussGrids gauss_grids_from(const json& cfg) {
    relab::GaussGrids g;
    if (!cfg.contains("grids")) return g;
    const json& j = cfg.at("grids");
    g.s_min = j.value("s_min", g.s_min);
    g.s_max = j.value("s_max", g.s_max);
    g.s_step = j.value("s_step", g.s_step);
    g.rho_xz_max = j.value("rho_xz_max", g.rho_xz_max);
    g.rho_xz_step = j.value("rho_xz_step", g.rho_xz_step);
    g.corr_max = j.value("corr_max", g.corr_max);
    g.corr_step = j.value("corr_step", g.corr_step);
    g.lambda_max = j.value("lambda_max", g.lambda_max);
    g.lambda_step = j.value("lambda_step", g.lambda_step);
    g.sigma_refine_rounds = j.value("sigma_refine_rounds", g.sigma_refine_rounds);
    g.inner_refine_rounds = j.value("inner_refine_rounds", g.inner_refine_rounds);
    g.refine_shrink = j.value("refine_shrink", g.refine_shrink);
    return g;
}

relab::GaussUpperGrids gauss_upper_grids_from(const json& cfg) {
    relab::GaussUpperGrids g;
    if (!cfg.contains("upper_grids")) return g;
    const json& j = cfg.at("upper_grids");
    g.s_min = j.value("s_min", g.s_min);
    g.s_max = j.value("s_max", g.s_max);
    g.s_step = j.value("s_step", g.s_step);
    g.rho_max = j.value("rho_max", g.rho_max);
    g.rho_step = j.value("rho_step", g.rho_step);
    g.refine_rounds = j.value("refine_rounds", g.refine_rounds);
    g.refine_shrink = j.value("refine_shrink", g.refine_shrink);
    return g;
}

relab::DistortionTable dist_from(const json& j) {
    return relab::DistortionTable(j.at("x_size").get<int>(), j.at("xhat_size").get<int>(),
                                  j.at("d").get<std::vector<double>>());
}

relab::ReproductionFn fn_from(const json& j) {
    return relab::ReproductionFn(j.at("y_size").get<int>(), j.at("z_size").get<int>(),
                                 j.at("xhat_size").get<int>(), j.at("f").get<std::vector<int>>());
}

relab::BeConfig be_from(const json& cfg) {
    relab::BeConfig c;
    c.p = cfg.value("p", c.p);
    c.delta = cfg.value("delta", c.delta);
    c.kappa = cfg.value("kappa", c.kappa);
    c.rate = cfg.value("rate", c.rate);
    c.dgrid = cfg.value("dgrid", c.dgrid);
    c.grid = grid_from(cfg);
    return c;
}

// ---- subcommands

std::string run_sccsi(const json& cfg) {
    relab::SccsiProblem prob;
    prob.p_xy = relab::joint_from_json(cfg.at("p_xy"));
    prob.r1 = cfg.at("r1").get<double>();
    prob.r2 = cfg.at("r2").get<double>();
    prob.s_size = cfg.value("s_size", 1);
    const auto grid = grid_from(cfg);
    std::vector<std::string> bounds = cfg.value("bounds", std::vector<std::string>{"lower"});

    json out;
    for (const auto& b : bounds) {
        if (b == "lower")
            out["eta_lower"] = fmt(relab::eta_lower(prob, grid).value);
        else if (b == "upper")
            out["eta_upper"] = fmt(relab::eta_upper(prob, grid).value);
        else if (b == "sp")
            out["eta_sp"] = fmt(relab::eta_sp(prob, grid).value);
        else
            throw std::invalid_argument("unknown bound: " + b);
    }
    return header(cfg, "bits") + out.dump(2) + "\n";
}

std::string run_wz(const json& cfg) {
    relab::WzProblem prob;
    prob.p_xy = relab::joint_from_json(cfg.at("p_xy"));
    prob.rate = cfg.at("rate").get<double>();
    prob.delta = cfg.at("delta").get<double>();
    prob.dist = dist_from(cfg.at("dist"));
    prob.z_size = cfg.value("z_size", 0);
    prob.xhat_size = cfg.value("xhat_size", 0);
    const auto grid = grid_from(cfg);
    std::vector<std::string> bounds = cfg.value("bounds", std::vector<std::string>{"lower"});

    json out;
    for (const auto& b : bounds) {
        if (b == "lower")
            out["theta_lower"] = fmt(relab::theta_lower(prob, grid).value);
        else if (b == "upper")
            out["theta_upper"] = fmt(relab::theta_upper(prob, grid));
        else if (b == "rwz")
            out["rwz"] = fmt(relab::rwz(prob.p_xy, prob.delta, prob.dist, prob.z_size, grid));
        else
            throw std::invalid_argument("unknown bound: " + b);
    }
    return header(cfg, "bits") + out.dump(2) + "\n";
}

std::string run_functional(const json& cfg) {
    relab::FunctionalProblem prob;
    prob.p_xy = relab::joint_from_json(cfg.at("p_xy"));
    prob.g = cfg.at("g").get<std::vector<int>>();
    prob.rate = cfg.at("rate").get<double>();
    const auto rep =
        relab::xi_exponents(prob, grid_from(cfg), cfg.value("unconstrained", false));
    json out;
    out["xi_lower"] = fmt(rep.xi_lower);
    out["xi_upper"] = fmt(rep.xi_upper);
    return header(cfg, "bits") + out.dump(2) + "\n";
}

std::string run_be_fig2(const json& cfg) {
    const auto c = be_from(cfg);
    const auto curve = relab::be_exponent(c);
    std::string body = header(cfg, "bits") + "delta,g1_bits,g2_bits\n";
    for (const auto& pt : curve.points)
        body += fmt(pt.delta_z) + "," + fmt(pt.g1) + "," + fmt(pt.g2) + "\n";
    return body;
}

std::string run_be_fig3(const json& cfg) {
    auto c = be_from(cfg);
    const double lo = cfg.at("rate_min").get<double>();
    const double hi = cfg.at("rate_max").get<double>();
    const double step = cfg.at("rate_step").get<double>();
    std::string body = header(cfg, "bits") + "rate,exponent_bits,two_sided_bits\n";
    for (double r = lo; r <= hi + 1e-12; r += step) {
        c.rate = r;
        body += fmt(r) + "," + fmt(relab::be_exponent(c).value) + "," +
                fmt(relab::two_sided_exponent(c.p, r, c.delta)) + "\n";
    }
    return body;
}

std::string run_gauss_fig4(const json& cfg) {
    const auto grids = gauss_grids_from(cfg);
    const auto prof = relab::g3_profile(cfg.value("sigma_x2", 1.0), cfg.at("rate").get<double>(),
                                        cfg.at("delta").get<double>(),
                                        cfg.at("zeta").get<double>(), grids,
                                        cfg.value("rho_step", 0.01));
    std::string body = header(cfg, "nats") + "rho_xz,g3_nats\n";
    for (const auto& [rho, g3] : prof) body += fmt(rho) + "," + fmt(g3) + "\n";
    return body;
}

std::string run_gauss_fig5(const json& cfg) {
    const auto grids = gauss_grids_from(cfg);
    const auto ugrids = gauss_upper_grids_from(cfg);
    const double zeta = cfg.at("zeta").get<double>();
    const double delta = cfg.at("delta").get<double>();
    const double lo = cfg.at("rate_min").get<double>();
    const double hi = cfg.at("rate_max").get<double>();
    const double step = cfg.at("rate_step").get<double>();
    std::string body = header(cfg, "nats") + "rate_nats,lower_nats,upper_nats,no_si_nats\n";
    for (double r = lo; r <= hi + 1e-12; r += step) {
        const auto lower = relab::theta_gauss_lower(r, delta, zeta, grids);
        const auto upper = relab::theta_gauss_upper(r, delta, zeta, ugrids);
        body += fmt(r) + "," + fmt(lower.value) + "," + fmt(upper) + "," +
                fmt(relab::marton_gauss(r, delta)) + "\n";
    }
    return body;
}

std::string run_simulate(const json& cfg) {
    const std::string scheme = cfg.at("scheme").get<std::string>();
    const auto ns = cfg.at("ns").get<std::vector<int>>();
    const long long trials = cfg.at("trials").get<long long>();
    const uint64_t seed = cfg.at("seed").get<uint64_t>();

    std::vector<relab::TrialStats> stats;
    if (scheme == "sccsi") {
        relab::SccsiProblem prob;
        prob.p_xy = relab::joint_from_json(cfg.at("p_xy"));
        prob.r1 = cfg.at("r1").get<double>();
        prob.r2 = cfg.at("r2").get<double>();
        prob.s_size = cfg.value("s_size", 1);
        relab::STarget target;
        if (cfg.contains("s_target")) {
            const auto rows = cfg.at("s_target").get<std::vector<std::vector<double>>>();
            target = [rows](int y) { return rows[y]; };
        }
        stats = relab::run_sccsi_trials(prob, ns, trials, seed, target);
    } else if (scheme == "wz") {
        relab::WzProblem prob;
        prob.p_xy = relab::joint_from_json(cfg.at("p_xy"));
        prob.rate = cfg.at("rate").get<double>();
        prob.delta = cfg.at("delta").get<double>();
        prob.dist = dist_from(cfg.at("dist"));
        prob.z_size = cfg.value("z_size", 0);
        const auto f = fn_from(cfg.at("f"));
        const auto rows = cfg.at("z_target").get<std::vector<std::vector<double>>>();
        stats = relab::run_wz_trials(prob, f, ns, trials, seed,
                                     [rows](int x) { return rows[x]; });
    } else {
        throw std::invalid_argument("unknown scheme: " + scheme);
    }

    std::string body = header(cfg, "bits") + "n,trials,errors,p_hat,ci_lo,ci_hi\n";
    for (const auto& s : stats)
        body += std::to_string(s.n) + "," + std::to_string(s.trials) + "," +
                std::to_string(s.errors) + "," + fmt(s.p_hat) + "," + fmt(s.ci_lo) + "," +
                fmt(s.ci_hi) + "\n";
    const auto fit = relab::empirical_exponent(stats);
    body += "# empirical_exponent_nats=" + fmt(fit.slope_nats) +
            " floored=" + std::to_string(fit.floored ? 1 : 0) + "\n";
    return body;
}

std::string run_validate(const json& cfg) {
    if (cfg.contains("p_xy")) relab::joint_from_json(cfg.at("p_xy"));
    if (cfg.contains("dist")) dist_from(cfg.at("dist"));
    if (cfg.contains("f")) fn_from(cfg.at("f"));
    (void)grid_from(cfg);
    return header(cfg, "bits") + "ok\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"error-exponent laboratory for source coding with side information"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::string chosen;
    for (const char* name : {"sccsi", "wz", "functional", "be-fig2", "be-fig3", "gauss-fig4",
                             "gauss-fig5", "simulate", "validate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_path, "output artifact path (default stdout)");
        sub->callback([&chosen, name]() { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        const json cfg = load_config(config_path);
        std::string body;
        if (chosen == "sccsi")
            body = run_sccsi(cfg);
        else if (chosen == "wz")
            body = run_wz(cfg);
        else if (chosen == "functional")
            body = run_functional(cfg);
        else if (chosen == "be-fig2")
            body = run_be_fig2(cfg);
        else if (chosen == "be-fig3")
            body = run_be_fig3(cfg);
        else if (chosen == "gauss-fig4")
            body = run_gauss_fig4(cfg);
        else if (chosen == "gauss-fig5")
            body = run_gauss_fig5(cfg);
        else if (chosen == "simulate")
            body = run_simulate(cfg);
        else if (chosen == "validate")
            body = run_validate(cfg);
        write_artifact(out_path, body);
    } catch (const relab::BudgetError& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 4;
    } catch (const json::exception& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
