// Command-line driver: build / verify / run / fit / threshold.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <random>

#include "lightcone/pipeline.hpp"

using namespace lightcone;

namespace {

ExperimentConfig load_or_default(const std::string& config_path) {
    return config_path.empty() ? default_run_config() : load_config(config_path);
}

struct CheckReporter {
    int failures = 0;
    void operator()(const std::string& name, double measured, double bound) {
        const bool ok = measured <= bound;
        if (!ok) ++failures;
        std::printf("[%s] %-42s measured=%.6g bound=%.6g\n", ok ? "ok" : "FAIL", name.c_str(),
                    measured, bound);
    }
};

Vector random_one_photon(const PhotonGrid& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Vector v(grid.one_photon_dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
    return v / v.norm();
}

void verify_grid(const ExperimentConfig& cfg, CheckReporter& rep, std::mt19937_64& rng) {
    PhotonGrid grid(cfg.model.dim, cfg.model.M, cfg.model.dk, cfg.model.mode);
    const Matrix U = grid.dft_matrix();
    rep("grid.dft_unitarity", (U * U.adjoint() - Matrix::Identity(U.rows(), U.cols())).norm(),
        1e-12);
    double min_omega = 1e300;
    for (int m = 0; m < grid.sites(); ++m) min_omega = std::min(min_omega, grid.omega(m));
    rep("grid.omega_infrared_gap", -min_omega, -0.4 * cfg.model.dk);
    // Hardy-type ratio stays finite on the half-offset lattice (no r = 0 site)
    const double s = grid.dim() == 3 ? 1.0 : 0.3;
    const Vector u = random_one_photon(grid, rng);
    rep("grid.hardy_ratio_finite", std::isfinite(hardy_ratio(grid, s, u)) ? 0.0 : 1.0, 0.5);
}

void verify_fock(const ExperimentConfig& cfg, CheckReporter& rep, std::mt19937_64& rng) {
    PhotonGrid grid(cfg.model.dim, cfg.model.M, cfg.model.dk, cfg.model.mode);
    FockBasis fock(grid, cfg.model.n_max);
    const Vector f = random_one_photon(grid, rng);
    const Vector g = random_one_photon(grid, rng);
    rep("fock.ccr_residual_below_top", ccr_residual(fock, f, g, false), 1e-12);
    const Matrix A = annihilator_matrix(fock, f);
    rep("fock.creator_is_adjoint", (creator_matrix(fock, f) - Matrix(A.adjoint())).norm(), 0.0);
    rep("fock.field_operator_hermiticity",
        field_operator(fock, f).hermiticity_residual(), 0.0);
    const Matrix N = number_operator(fock).matrix();
    const Matrix dG1 =
        second_quantize(fock, operator_function(grid, BasisRep::momentum, make_constant(1.0)))
            .matrix();
    rep("fock.number_equals_dgamma_identity", (N - dG1).norm(), 1e-12);
}

void verify_model(const ExperimentConfig& cfg, CheckReporter& rep, std::mt19937_64&) {
    ModelSpec sp = cfg.model;
    // verification runs at a reduced size so the dense transform stays cheap
    sp.M = std::min(sp.M, 6);
    sp.Nx = std::min(sp.Nx, 4);
    sp.n_max = std::min(sp.n_max, 3);
    sp.dx = ModelSpec::commensurate_dx(sp.Nx, sp.dk);
    auto m = build_model(sp);
    rep("model.envelope_q", m->couplings.c_q, kEnvelopeGuardQ);
    rep("model.envelope_gtilde", m->couplings.c_gtilde, kEnvelopeGuardGtilde);
    rep("model.envelope_e", m->couplings.c_e, kEnvelopeGuardE);
    rep("model.dressed_potential_dominates", (m->couplings.V - m->couplings.Vtilde).maxCoeff(),
        0.0);
    auto tr = assemble_transformed(*m);
    rep("model.hamiltonian_hermiticity", tr.h.hermiticity_residual(), 0.0);
    rep("model.dressed_hermiticity", tr.h_tilde.hermiticity_residual(), 0.0);
    rep("model.dressing_unitarity", tr.unitarity_residual, 1e-12);
    const int cap = std::max(0, sp.n_max - 2);
    rep("model.conjugation_leak_low_sectors", tr.leak(m->fock, m->particle.sites(), cap),
        2.0 + 4.0 * sp.coupling_scale * sp.coupling_scale);
}

int cmd_verify(const std::string& config_path, const std::string& suite) {
    ExperimentConfig cfg = load_or_default(config_path);
    CheckReporter rep;
    std::mt19937_64 rng(cfg.seed);
    if (suite == "grid" || suite == "all") verify_grid(cfg, rep, rng);
    if (suite == "fock" || suite == "all") verify_fock(cfg, rep, rng);
    if (suite == "model" || suite == "all") verify_model(cfg, rep, rng);
    std::printf("%s: %d failure(s)\n", suite.c_str(), rep.failures);
    return rep.failures == 0 ? 0 : 1;
}

int cmd_build(const std::string& config_path) {
    ExperimentConfig cfg = load_or_default(config_path);
    auto m = build_model(cfg.model);
    std::printf("config_hash      %s\n", cfg.hash().c_str());
    std::printf("photon modes     %d (dim %d, dk %g)\n", m->photon.one_photon_dim(),
                m->photon.dim(), m->photon.spacing_k());
    std::printf("fock dim         %zu (n_max %d)\n", m->fock.dim(), m->fock.n_max());
    std::printf("particle sites   %d (dx %g)\n", m->particle.sites(), m->particle.spacing_x());
    std::printf("full dim         %zu\n", m->dim());
    std::printf("uv cutoff radius %g\n", m->spec.cutoff_radius());
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int jobs) {
    ExperimentConfig cfg = load_or_default(config_path);
    RunResult res = run_experiment(cfg, jobs);
    auto files = write_run(res, cfg, out_dir);
    for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
    return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& probe_path,
            const std::string& out_dir) {
    TrajectoryTable tab = load_trajectory_csv(csv_path);
    std::ifstream in(probe_path);
    if (!in) throw std::runtime_error("fit: cannot open '" + probe_path + "'");
    json pj;
    in >> pj;
    ProbeSpec probe;
    if (pj.contains("probe") || pj.contains("grid"))
        probe = config_from_json(pj).probe;  // full experiment config
    else {
        json wrapped;
        wrapped["probe"] = pj;
        probe = config_from_json(wrapped).probe;
    }
    auto fits = fit_reports_from_table(tab, probe);
    if (fits.empty()) throw std::runtime_error("fit: no fit-eligible columns in the CSV");
    for (const auto& [stem, repj] : fits) {
        if (out_dir.empty()) {
            std::printf("%s %s\n", stem.c_str(), repj.dump().c_str());
        } else {
            auto path = std::filesystem::path(out_dir) / (stem + ".json");
            write_json_report(path, repj);
            std::printf("wrote %s\n", path.string().c_str());
        }
    }
    return 0;
}

int cmd_threshold(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg = load_or_default(config_path);
    auto m = build_model(cfg.model);
    auto H = assemble_hamiltonian(*m);
    ThresholdReport th = estimate_ionization_threshold(*m, H, default_threshold_radii(m->particle));
    for (std::size_t i = 0; i < th.radii.size(); ++i)
        std::printf("R=%-10.6g min_energy=%.12g\n", th.radii[i], th.values[i]);
    std::printf("sigma_hat=%.12g monotone=%s\n", th.sigma_hat, th.monotone ? "yes" : "no");
    if (!out_dir.empty()) {
        json j = {{"radii", th.radii},
                  {"values", th.values},
                  {"sigma_hat", th.sigma_hat},
                  {"monotone", th.monotone},
                  {"config_hash", cfg.hash()},
                  {"version", kVersion}};
        auto path = std::filesystem::path(out_dir) / "threshold.json";
        write_json_report(path, j);
        std::printf("wrote %s\n", path.string().c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"light-cone propagation experiments for a matter-radiation lattice model"};
    app.require_subcommand(1);

    std::string config_path, out_dir, suite = "all", csv_path, probe_path;
    int jobs = 1;

    auto* build = app.add_subcommand("build", "build the model and print its dimensions");
    build->add_option("--config", config_path, "experiment config (JSON)");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--config", config_path, "experiment config (JSON)");
    verify->add_option("--suite", suite, "fock | grid | model | all")
        ->check(CLI::IsMember({"fock", "grid", "model", "all"}));

    auto* run = app.add_subcommand("run", "run the full pipeline and persist artifacts");
    run->add_option("--config", config_path, "experiment config (JSON)");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--jobs", jobs, "parallel probe sweeps")->check(CLI::PositiveNumber);

    auto* fit = app.add_subcommand("fit", "replay decay/growth fits from a trajectory CSV");
    fit->add_option("csv", csv_path, "trajectory CSV")->required();
    fit->add_option("probe", probe_path, "probe-parameter JSON (or full config)")->required();
    fit->add_option("--out", out_dir, "output directory (default: print to stdout)");

    auto* threshold = app.add_subcommand("threshold", "estimate the ionization threshold");
    threshold->add_option("--config", config_path, "experiment config (JSON)");
    threshold->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(build)) return cmd_build(config_path);
        if (app.got_subcommand(verify)) return cmd_verify(config_path, suite);
        if (app.got_subcommand(run)) return cmd_run(config_path, out_dir, jobs);
        if (app.got_subcommand(fit)) return cmd_fit(csv_path, probe_path, out_dir);
        if (app.got_subcommand(threshold)) return cmd_threshold(config_path, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
