// Command-line front end: model eigenvalue bounds, shooting quantities,
// Rayleigh minimization, the sharpness experiment, and the self-check
// suites, with machine-readable JSON/CSV output.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pspectral/eigensolver.hpp"
#include "pspectral/geometry.hpp"
#include "pspectral/io.hpp"
#include "pspectral/prufer.hpp"
#include "pspectral/ptrig.hpp"
#include "pspectral/rayleigh.hpp"
#include "pspectral/selfcheck.hpp"

using json = nlohmann::ordered_json;
namespace ps = pspectral;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCurvature = 4;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    if (out.empty()) throw std::invalid_argument("empty list: '" + text + "'");
    return out;
}

int worker_count() {
    const char* env = std::getenv("PSPECTRAL_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return std::max(1, std::min(n, 64));
}

void emit(const json& doc, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream os(out_path);
        if (!os) throw std::invalid_argument("cannot open output file '" + out_path + "'");
        os << doc.dump(2) << "\n";
    }
}

/// Evaluate sweep rows with a bounded worker pool; results are assembled
/// in input order regardless of completion order.
template <typename Row, typename Fn>
std::vector<Row> run_sweep(std::size_t count, Fn&& fn) {
    std::vector<Row> rows(count);
    const int workers = worker_count();
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) rows[i] = fn(i);
        return rows;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&]() {
            for (std::size_t i = next++; i < count; i = next++) rows[i] = fn(i);
        }));
    }
    for (auto& f : futs) f.get();
    return rows;
}

json eigen_result_json(const ps::EigenResult& r) {
    return json{{"p", r.p},           {"kappa", r.kappa}, {"D", r.D},
                {"lambda", r.lambda}, {"a_bar", r.a_bar}, {"residual", r.residual},
                {"iterations", r.iterations}};
}

struct SweepRowOut {
    json params;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

void emit_sweep(const std::vector<SweepRowOut>& rows, const std::string& value_name,
                const std::string& format, const std::string& out_path, const json& meta) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            json row = r.params;
            row[value_name] = r.value;
            row["status"] = r.status;
            arr.push_back(row);
        }
        emit(json{{"rows", arr}, {"meta", meta}}, out_path);
        return;
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& r : rows) {
        if (first) {
            for (auto it = r.params.begin(); it != r.params.end(); ++it)
                os << it.key() << ",";
            os << value_name << ",status\n";
            first = false;
        }
        for (auto it = r.params.begin(); it != r.params.end(); ++it)
            os << ps::detail::format_double(it.value().get<double>()) << ",";
        os << ps::detail::format_double(r.value) << "," << r.status << "\n";
    }
    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::invalid_argument("cannot open output file '" + out_path + "'");
        f << os.str();
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharp first-eigenvalue bounds of the weighted p-Laplacian via "
                 "one-dimensional phase-plane models"};
    app.require_subcommand(1);

    // ---- mu ------------------------------------------------------------
    double mu_pv = 2.0, mu_kappa = 0.0, mu_D = 1.0, mu_tol = 1e-10;
    std::string mu_out;
    auto* cmd_mu = app.add_subcommand("mu", "first nonzero Neumann eigenvalue mu_p(kappa, D)");
    cmd_mu->add_option("--p", mu_pv, "exponent p")->required();
    cmd_mu->add_option("--kappa", mu_kappa, "curvature lower bound")->required();
    cmd_mu->add_option("--D", mu_D, "interval length / diameter")->required();
    cmd_mu->add_option("--tol", mu_tol, "relative bisection tolerance");
    cmd_mu->add_option("--out", mu_out, "write JSON here instead of stdout");

    // ---- lambda0 ---------------------------------------------------------
    double l0_pv = 2.0, l0_kappa = 1.0, l0_tol = 1e-6;
    std::string l0_out;
    auto* cmd_l0 = app.add_subcommand("lambda0", "first nonzero eigenvalue on the weighted line");
    cmd_l0->add_option("--p", l0_pv, "exponent p")->required();
    cmd_l0->add_option("--kappa", l0_kappa, "curvature lower bound")->required();
    cmd_l0->add_option("--tol", l0_tol, "limit tolerance");
    cmd_l0->add_option("--out", l0_out, "write JSON here instead of stdout");

    // ---- delta-bar -------------------------------------------------------
    double db_pv = 2.0, db_kappa = 1.0, db_lambda = 2.0, db_tol = 1e-12;
    std::string db_out;
    auto* cmd_db = app.add_subcommand("delta-bar", "symmetric model interval length 2 a_bar");
    cmd_db->add_option("--p", db_pv, "exponent p")->required();
    cmd_db->add_option("--kappa", db_kappa, "curvature lower bound")->required();
    cmd_db->add_option("--lambda", db_lambda, "candidate eigenvalue")->required();
    cmd_db->add_option("--tol", db_tol, "event location tolerance");
    cmd_db->add_option("--out", db_out, "write JSON here instead of stdout");

    // ---- model -----------------------------------------------------------
    double md_pv = 2.0, md_kappa = 1.0, md_lambda = 2.0, md_tol = 1e-8;
    double md_a = std::numeric_limits<double>::quiet_NaN();
    double md_umax = 1.0;
    int md_samples = 1024;
    std::string md_out, md_format = "json";
    auto* cmd_md = app.add_subcommand("model", "cap-start model solution and its shooting data");
    cmd_md->add_option("--p", md_pv, "exponent p")->required();
    cmd_md->add_option("--kappa", md_kappa, "curvature lower bound")->required();
    cmd_md->add_option("--lambda", md_lambda, "eigenvalue of the model equation")->required();
    cmd_md->add_option("--a", md_a, "left endpoint (otherwise matched via --u-max)");
    cmd_md->add_option("--u-max", md_umax, "target maximum m(a) in (0, 1]");
    cmd_md->add_option("--samples", md_samples, "minimum grid samples");
    cmd_md->add_option("--tol", md_tol, "matching tolerance on m(a)");
    cmd_md->add_option("--out", md_out, "write the trajectory CSV here");
    cmd_md->add_option("--format", md_format, "stdout payload: json metadata or csv dump")
        ->check(CLI::IsMember({"json", "csv"}));

    // ---- rayleigh ----------------------------------------------------------
    double ray_pv = 2.0, ray_tol = 1e-10;
    double cyl_kappa = 0.0, cyl_D = 2.0, cyl_r = 0.1;
    int cyl_n = 3, ray_mesh = 1024, ray_steps = 20000;
    unsigned ray_seed = 0;
    std::string ray_input, ray_init = "odd-linear", ray_phi_out, ray_out;
    bool ray_cylinder = false;
    auto* cmd_ray = app.add_subcommand("rayleigh", "minimize the weighted Rayleigh quotient");
    cmd_ray->add_option("--p", ray_pv, "exponent p")->required();
    cmd_ray->add_option("--input", ray_input, "weighted interval CSV (columns s, rho)");
    cmd_ray->add_flag("--cylinder", ray_cylinder, "use the cylinder weight instead of --input");
    cmd_ray->add_option("--kappa", cyl_kappa, "cylinder: curvature lower bound");
    cmd_ray->add_option("--D", cyl_D, "cylinder: length");
    cmd_ray->add_option("--n", cyl_n, "cylinder: manifold dimension");
    cmd_ray->add_option("--r", cyl_r, "cylinder: radius");
    cmd_ray->add_option("--mesh", ray_mesh, "cylinder: mesh cells");
    cmd_ray->add_option("--init", ray_init, "initialization: odd-linear or random")
        ->check(CLI::IsMember({"odd-linear", "random"}));
    cmd_ray->add_option("--steps", ray_steps, "iteration budget");
    cmd_ray->add_option("--tol", ray_tol, "relative decrease tolerance");
    cmd_ray->add_option("--seed", ray_seed, "seed for --init random");
    cmd_ray->add_option("--phi-out", ray_phi_out, "write the minimizer CSV here");
    cmd_ray->add_option("--out", ray_out, "write JSON here instead of stdout");

    // ---- sharpness ---------------------------------------------------------
    double sh_pv = 2.0, sh_kappa = 0.0, sh_D = 1.0, sh_delta_factor = 0.1, sh_tol = 1e-10;
    int sh_n = 3, sh_mesh = 4096, sh_steps = 40000;
    unsigned sh_seed = 0;
    std::string sh_rlist = "0.1,0.05,0.02", sh_format = "json", sh_out;
    auto* cmd_sh = app.add_subcommand("sharpness", "capped-surface eigenvalues vs mu_p");
    cmd_sh->add_option("--p", sh_pv, "exponent p")->required();
    cmd_sh->add_option("--kappa", sh_kappa, "curvature lower bound")->required();
    cmd_sh->add_option("--n", sh_n, "manifold dimension")->required();
    cmd_sh->add_option("--D", sh_D, "profile length")->required();
    cmd_sh->add_option("--r-list", sh_rlist, "comma-separated cap radii");
    cmd_sh->add_option("--delta-factor", sh_delta_factor, "delta = factor * r");
    cmd_sh->add_option("--mesh", sh_mesh, "minimum mesh cells");
    cmd_sh->add_option("--steps", sh_steps, "descent iteration budget");
    cmd_sh->add_option("--tol", sh_tol, "descent tolerance");
    cmd_sh->add_option("--seed", sh_seed, "seed (random init only)");
    cmd_sh->add_option("--format", sh_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd_sh->add_option("--out", sh_out, "write the table here instead of stdout");

    // ---- check ------------------------------------------------------------
    std::string chk_suite = "all";
    auto* cmd_chk = app.add_subcommand("check", "run the invariant verification suites");
    cmd_chk->add_option("--suite", chk_suite, "all|ptrig|ode|eigen|rayleigh|geometry")
        ->check(CLI::IsMember({"all", "ptrig", "ode", "eigen", "rayleigh", "geometry"}));

    // ---- sweep ------------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "Cartesian-product evaluation");
    cmd_sweep->require_subcommand(1);
    std::string sw_p = "2", sw_kappa = "0", sw_D = "1", sw_lambda = "2";
    double sw_tol = 1e-10;
    std::string sw_format = "csv", sw_out;
    auto* sw_mu = cmd_sweep->add_subcommand("mu", "sweep mu_p over p, kappa, D");
    sw_mu->add_option("--p", sw_p, "comma-separated p values")->required();
    sw_mu->add_option("--kappa", sw_kappa, "comma-separated kappa values")->required();
    sw_mu->add_option("--D", sw_D, "comma-separated D values")->required();
    sw_mu->add_option("--tol", sw_tol, "bisection tolerance");
    sw_mu->add_option("--format", sw_format)->check(CLI::IsMember({"json", "csv"}));
    sw_mu->add_option("--out", sw_out, "write the table here instead of stdout");
    auto* sw_db = cmd_sweep->add_subcommand("delta-bar", "sweep delta_bar over lambda");
    sw_db->add_option("--p", sw_p, "comma-separated p values")->required();
    sw_db->add_option("--kappa", sw_kappa, "comma-separated kappa values")->required();
    sw_db->add_option("--lambda", sw_lambda, "comma-separated lambda values")->required();
    sw_db->add_option("--tol", sw_tol, "event tolerance");
    sw_db->add_option("--format", sw_format)->check(CLI::IsMember({"json", "csv"}));
    sw_db->add_option("--out", sw_out, "write the table here instead of stdout");
    auto* sw_l0 = cmd_sweep->add_subcommand("lambda0", "sweep lambda0 over p, kappa");
    sw_l0->add_option("--p", sw_p, "comma-separated p values")->required();
    sw_l0->add_option("--kappa", sw_kappa, "comma-separated kappa values")->required();
    sw_l0->add_option("--tol", sw_tol, "limit tolerance");
    sw_l0->add_option("--format", sw_format)->check(CLI::IsMember({"json", "csv"}));
    sw_l0->add_option("--out", sw_out, "write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*cmd_mu) {
            const ps::EigenResult r = ps::mu_p(ps::PExponent(mu_pv), mu_kappa, mu_D, mu_tol);
            json doc{{"result", eigen_result_json(r)},
                     {"meta", {{"command", "mu"}, {"tol", mu_tol}}}};
            emit(doc, mu_out);
            return kExitOk;
        }

        if (*cmd_l0) {
            const double v = ps::lambda0(ps::PExponent(l0_pv), l0_kappa, l0_tol);
            json doc{{"result", {{"lambda0", v}, {"p", l0_pv}, {"kappa", l0_kappa}}},
                     {"meta", {{"command", "lambda0"}, {"tol", l0_tol}}}};
            emit(doc, l0_out);
            return kExitOk;
        }

        if (*cmd_db) {
            const double v = ps::delta_bar(ps::PExponent(db_pv), db_kappa, db_lambda, db_tol);
            json doc{{"result",
                      {{"delta_bar", v},
                       {"p", db_pv},
                       {"kappa", db_kappa},
                       {"lambda", db_lambda}}},
                     {"meta", {{"command", "delta-bar"}, {"tol", db_tol}}}};
            emit(doc, db_out);
            return kExitOk;
        }

        if (*cmd_md) {
            ps::PExponent p(md_pv);
            ps::ModelSolution sol =
                std::isnan(md_a)
                    ? ps::model_for_range(p, md_kappa, md_lambda, md_umax, md_tol,
                                          static_cast<std::size_t>(md_samples))
                    : ps::solve_ivp_cap(ps::ModelParams(p, md_kappa, md_lambda), md_a,
                                        std::numeric_limits<double>::quiet_NaN(), 1e-12,
                                        static_cast<std::size_t>(md_samples));
            if (!md_out.empty()) {
                std::ofstream os(md_out);
                if (!os) throw std::invalid_argument("cannot open '" + md_out + "'");
                ps::write_model_csv(os, sol);
            }
            if (md_format == "csv" && md_out.empty()) {
                ps::write_model_csv(std::cout, sol);
            } else {
                json doc{{"result",
                          {{"a", sol.a},
                           {"b", sol.b_of_a},
                           {"m", sol.m_of_a},
                           {"delta", sol.delta_of_a},
                           {"p", md_pv},
                           {"kappa", md_kappa},
                           {"lambda", md_lambda},
                           {"samples", sol.t.size()}}},
                         {"meta",
                          {{"command", "model"},
                           {"tol", md_tol},
                           {"csv", md_out.empty() ? json(nullptr) : json(md_out)}}}};
                std::cout << doc.dump(2) << "\n";
            }
            return kExitOk;
        }

        if (*cmd_ray) {
            ps::PExponent p(ray_pv);
            std::optional<ps::WeightedInterval> dom;
            if (ray_cylinder) {
                dom.emplace(ps::cylinder_interval(p, cyl_kappa, cyl_D, cyl_n, cyl_r, ray_mesh));
            } else if (!ray_input.empty()) {
                std::ifstream is(ray_input);
                if (!is) throw std::invalid_argument("cannot open '" + ray_input + "'");
                dom.emplace(ps::read_interval_csv(is, p));
            } else {
                throw std::invalid_argument("rayleigh needs --input or --cylinder");
            }
            const ps::DiscreteEigenpair ep =
                ps::minimize_rayleigh(*dom, ray_init, ray_steps, ray_tol, ray_seed);
            if (!ray_phi_out.empty()) {
                std::ofstream os(ray_phi_out);
                if (!os) throw std::invalid_argument("cannot open '" + ray_phi_out + "'");
                ps::write_csv(os, {"s", "phi"}, {&dom->mesh, &ep.phi});
            }
            json doc{{"result",
                      {{"lambda_hat", ep.lambda_hat},
                       {"constraint_residual", ep.constraint_residual},
                       {"iterations", ep.iterations},
                       {"nodes", dom->size()}}},
                     {"meta",
                      {{"command", "rayleigh"},
                       {"p", ray_pv},
                       {"init", ray_init},
                       {"steps", ray_steps},
                       {"tol", ray_tol},
                       {"seed", ray_seed}}}};
            emit(doc, ray_out);
            return kExitOk;
        }

        if (*cmd_sh) {
            ps::SharpnessOptions opt;
            opt.delta_factor = sh_delta_factor;
            opt.mesh_N = sh_mesh;
            opt.steps = sh_steps;
            opt.tol = sh_tol;
            opt.seed = sh_seed;
            const auto rows = ps::sharpness_experiment(ps::PExponent(sh_pv), sh_kappa, sh_n,
                                                       sh_D, parse_list(sh_rlist), opt);
            json meta{{"command", "sharpness"}, {"p", sh_pv},      {"kappa", sh_kappa},
                      {"n", sh_n},              {"D", sh_D},       {"mesh", sh_mesh},
                      {"tol", sh_tol},          {"seed", sh_seed}, {"steps", sh_steps},
                      {"delta_factor", sh_delta_factor}};
            if (sh_format == "json") {
                json arr = json::array();
                for (const auto& r : rows)
                    arr.push_back(json{{"r", r.r},
                                       {"delta", r.delta},
                                       {"lambda_hat", r.lambda_hat},
                                       {"mu_ref", r.mu_ref},
                                       {"gap", r.gap},
                                       {"min_slack", r.min_slack},
                                       {"status", r.status}});
                emit(json{{"rows", arr}, {"meta", meta}}, sh_out);
            } else {
                std::ostringstream os;
                os << "r,delta,lambda_hat,mu_ref,gap,min_slack,status\n";
                for (const auto& r : rows) {
                    os << ps::detail::format_double(r.r) << ","
                       << ps::detail::format_double(r.delta) << ","
                       << ps::detail::format_double(r.lambda_hat) << ","
                       << ps::detail::format_double(r.mu_ref) << ","
                       << ps::detail::format_double(r.gap) << ","
                       << ps::detail::format_double(r.min_slack) << "," << r.status << "\n";
                }
                if (sh_out.empty()) {
                    std::cout << os.str();
                } else {
                    std::ofstream f(sh_out);
                    if (!f) throw std::invalid_argument("cannot open '" + sh_out + "'");
                    f << os.str();
                }
            }
            bool any_ok = false, any_curvature = false;
            for (const auto& r : rows) {
                any_ok = any_ok || r.status == "ok";
                any_curvature = any_curvature || r.status == "curvature_violated";
            }
            if (any_ok) return kExitOk;
            return any_curvature ? kExitCurvature : kExitNumerical;
        }

        if (*cmd_chk) {
            const auto results = ps::run_check_suite(chk_suite);
            bool all_pass = true;
            for (const auto& r : results) {
                std::cout << (r.pass ? "PASS" : "FAIL") << " [" << r.suite << "] " << r.name
                          << " (" << r.detail << ")\n";
                all_pass = all_pass && r.pass;
            }
            std::cout << (all_pass ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
            return all_pass ? kExitOk : kExitNumerical;
        }

        if (*cmd_sweep) {
            if (*sw_mu) {
                const auto ps_list = parse_list(sw_p);
                const auto ks = parse_list(sw_kappa);
                const auto ds = parse_list(sw_D);
                struct Grid { double p, kappa, D; };
                std::vector<Grid> grid;
                for (double pv : ps_list)
                    for (double k : ks)
                        for (double d : ds) grid.push_back({pv, k, d});
                auto rows = run_sweep<SweepRowOut>(grid.size(), [&](std::size_t i) {
                    SweepRowOut row;
                    row.params = json{{"p", grid[i].p}, {"kappa", grid[i].kappa},
                                      {"D", grid[i].D}};
                    try {
                        row.value =
                            ps::mu_p(ps::PExponent(grid[i].p), grid[i].kappa, grid[i].D, sw_tol)
                                .lambda;
                    } catch (const std::exception& e) {
                        row.status = e.what();
                    }
                    return row;
                });
                emit_sweep(rows, "lambda", sw_format, sw_out,
                           json{{"command", "sweep mu"}, {"tol", sw_tol}});
                return kExitOk;
            }
            if (*sw_db) {
                const auto ps_list = parse_list(sw_p);
                const auto ks = parse_list(sw_kappa);
                const auto ls = parse_list(sw_lambda);
                struct Grid { double p, kappa, lambda; };
                std::vector<Grid> grid;
                for (double pv : ps_list)
                    for (double k : ks)
                        for (double l : ls) grid.push_back({pv, k, l});
                auto rows = run_sweep<SweepRowOut>(grid.size(), [&](std::size_t i) {
                    SweepRowOut row;
                    row.params = json{{"p", grid[i].p}, {"kappa", grid[i].kappa},
                                      {"lambda", grid[i].lambda}};
                    try {
                        row.value = ps::delta_bar(ps::PExponent(grid[i].p), grid[i].kappa,
                                                  grid[i].lambda, sw_tol);
                    } catch (const std::exception& e) {
                        row.status = e.what();
                    }
                    return row;
                });
                emit_sweep(rows, "delta_bar", sw_format, sw_out,
                           json{{"command", "sweep delta-bar"}, {"tol", sw_tol}});
                return kExitOk;
            }
            if (*sw_l0) {
                const auto ps_list = parse_list(sw_p);
                const auto ks = parse_list(sw_kappa);
                struct Grid { double p, kappa; };
                std::vector<Grid> grid;
                for (double pv : ps_list)
                    for (double k : ks) grid.push_back({pv, k});
                auto rows = run_sweep<SweepRowOut>(grid.size(), [&](std::size_t i) {
                    SweepRowOut row;
                    row.params = json{{"p", grid[i].p}, {"kappa", grid[i].kappa}};
                    try {
                        row.value =
                            ps::lambda0(ps::PExponent(grid[i].p), grid[i].kappa, sw_tol);
                    } catch (const std::exception& e) {
                        row.status = e.what();
                    }
                    return row;
                });
                emit_sweep(rows, "lambda0", sw_format, sw_out,
                           json{{"command", "sweep lambda0"}, {"tol", sw_tol}});
                return kExitOk;
            }
        }
    } catch (const ps::CurvatureViolated& e) {
        std::cerr << "curvature violation: " << e.what() << "\n";
        return kExitCurvature;
    } catch (const ps::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitValidation;
}
