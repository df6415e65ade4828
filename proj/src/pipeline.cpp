#include "ccdf/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "ccdf/ccsolver.hpp"
#include "ccdf/ducc.hpp"
#include "ccdf/flow.hpp"
#include "ccdf/interactionfit.hpp"
#include "ccdf/multicomp.hpp"
#include "ccdf/ses.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ccdf {

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json energy_entry(double value, const std::string& operation) {
    return {{"value", value}, {"operation", operation}};
}

ActiveSpace parse_active(const json& spec, const SpinOrbitalBasis& basis) {
    const int n_occ_spatial = basis.n_occ() / 2;
    auto side = [&](const json& j, bool occupied) {
        std::set<int> out;
        const int lo = occupied ? 0 : n_occ_spatial;
        const int hi = occupied ? n_occ_spatial : basis.n_spatial();
        if (j.is_string() && j.get<std::string>() == "all") {
            for (int p = lo; p < hi; ++p) out.insert(p);
        } else if (j.is_array()) {
            for (const auto& v : j) out.insert(v.get<int>());
        } else if (j.is_object() && j.contains("lowest")) {
            const int k = j["lowest"].get<int>();
            for (int p = lo; p < std::min(lo + k, hi); ++p) out.insert(p);
        } else {
            throw std::runtime_error("config: active-space side must be \"all\", a list, or {\"lowest\": k}");
        }
        return out;
    };
    if (!spec.contains("occ") || !spec.contains("virt"))
        throw std::runtime_error("config: active space needs \"occ\" and \"virt\"");
    return ActiveSpace(basis, side(spec["occ"], true), side(spec["virt"], false));
}

LatticeSpeciesParams parse_species(const json& j) {
    LatticeSpeciesParams p;
    p.n_sites = j.value("n_sites", p.n_sites);
    p.n_particles = j.value("n_particles", p.n_particles);
    p.hopping = j.value("hopping", p.hopping);
    p.on_site_u = j.value("on_site_u", p.on_site_u);
    p.site_ramp = j.value("site_ramp", p.site_ramp);
    return p;
}

struct PipelineContext {
    json config;
    fs::path outdir;
    json report;
    std::vector<std::string> warnings;
    bool non_converged = false;

    double cc_tol() const { return config.value("tolerances", json::object()).value("cc_residual", 1e-10); }
    int cc_max_iter() const { return config.value("tolerances", json::object()).value("cc_max_iter", 300); }
};

void run_electronic(PipelineContext& ctx, bool force, bool oracle) {
    const std::string method = ctx.config.at("method").get<std::string>();
    const std::string path = ctx.config.at("fcidump").get<std::string>();
    if (!fs::exists(path)) throw std::runtime_error("fcidump file not found: " + path);
    ctx.report["inputs"]["fcidump"] = {{"path", path}, {"fnv64", file_hash(path)}};

    const IntegralSet ints = parse_fcidump_file(path);
    const BareHamiltonian h = to_spinorbital(ints);
    const FockOperator fock = build_fock(h);
    ctx.report["system"] = {{"n_spatial", ints.n_spatial}, {"n_elec", ints.n_elec}, {"ms2", ints.ms2}};
    if (fock.degenerate_frontier)
        ctx.warnings.push_back("degenerate frontier orbitals: amplitude denominators are hazardous");

    json& energies = ctx.report["energies"];
    energies["reference"] = energy_entry(fock.reference_energy, "build_fock.reference_energy");

    const DeterminantSpace full = enumerate_space(h.basis, h.basis.n_elec());
    if (oracle) {
        const auto [e_fci, v] = fci_ground(build_matrix(h, full));
        energies["fci"] = energy_entry(e_fci, "fci_ground(build_matrix)");
    }

    if (method == "flow") {
        FlowSpec spec;
        const json& fj = ctx.config.at("flow");
        for (const auto& as : fj.at("active_spaces")) spec.active_spaces.push_back(parse_active(as, h.basis));
        const json tols = ctx.config.value("tolerances", json::object());
        spec.sweep_tol = tols.value("flow_sweep", 1e-9);
        spec.max_sweeps = tols.value("flow_max_sweeps", 100);
        spec.cc_tol = ctx.cc_tol();
        spec.cc_max_iter = ctx.cc_max_iter();
        const FlowResult res = run_flow(h, spec);
        energies["flow"] = energy_entry(res.energy, "run_flow.pooled_cc_energy");
        ctx.report["flow"] = flow_report(res.state);
        if (!res.state.converged) {
            ctx.warnings.push_back("flow did not converge within the sweep limit");
            ctx.non_converged = true;
        }
        std::ofstream amps(ctx.outdir / "pooled_amplitudes.txt");
        write_amplitudes(res.state.pooled, amps);
        ctx.report["artifacts"].push_back("pooled_amplitudes.txt");
        return;
    }

    // ccsd / ses / ducc pipelines share the CCSD solve
    SolveOptions opts;
    opts.tol = ctx.cc_tol();
    opts.max_iter = ctx.cc_max_iter();
    const CCResult cc = solve_cc(h, full_mask(h.basis, 2), opts);
    energies["ccsd"] = energy_entry(cc.energy, "solve_cc.energy");
    energies["ccsd_correlation"] = energy_entry(cc.correlation_energy, "solve_cc.correlation_energy");
    ctx.report["residuals"]["cc_residual_max"] = cc.residual_norm;
    ctx.report["cc"] = {{"iterations", cc.iterations}, {"converged", cc.converged}};
    if (!cc.converged) {
        ctx.warnings.push_back("CC amplitude equations did not converge");
        ctx.non_converged = true;
    }
    {
        std::ofstream amps(ctx.outdir / "ccsd_amplitudes.txt");
        write_amplitudes(cc.t, amps);
        ctx.report["artifacts"].push_back("ccsd_amplitudes.txt");
    }
    if (method == "ccsd") return;

    const ActiveSpace active = parse_active(ctx.config.at("active"), h.basis);
    const SesCheck check = is_ses(active, h.basis, 2);
    ctx.report["active_space"] = {{"occ", json(active.occupied_spatial())},
                                  {"virt", json(active.virtual_spatial())},
                                  {"is_ses", check.is_ses},
                                  {"explanation", check.explanation}};
    if (!check.is_ses) {
        if (!force && method == "ses")
            throw std::runtime_error("active space is not a SES (" + check.explanation +
                                     "); rerun with --force to proceed without the equivalence guarantee");
        if (force) ctx.warnings.push_back("non-SES active space forced: equivalence guarantee void");
    }
    auto [t_int, t_ext] = partition(cc.t, active);

    if (method == "ses") {
        EffectiveHamiltonian heff = build_heff_ses(h, t_ext, active);
        const int ref_idx = heff.cas_space.index_of(h.basis.reference_mask());
        const NonHermitianEig eig = eig_nonhermitian(heff.matrix, ref_idx);
        energies["ses_eigenvalue"] = energy_entry(eig.energy, "eig_nonhermitian(build_heff_ses)");
        heff.tensor_form = extract_tensors(heff.matrix, active.spin_orbitals());
        ctx.report["residuals"]["extract_residual_norm"] = heff.tensor_form->residual_norm;
        save_effective(heff, (ctx.outdir / "heff_ses").string());
        for (const char* ext : {"heff_ses.bin", "heff_ses.json", "heff_ses.effdump"})
            ctx.report["artifacts"].push_back(ext);
        return;
    }

    if (method == "ducc-c1" || method == "ducc-c2") {
        const EffectiveHamiltonian cas_ci = bare_cas(h, active);
        energies["bare_cas"] = energy_entry(ducc_energy(cas_ci).first, "ducc_energy(bare_cas)");
        const AntiHermitianGenerator sigma = build_sigma_ext(t_ext);
        EffectiveHamiltonian c1 = ducc_c1(h, fock, sigma, active);
        energies["ducc_c1"] = energy_entry(ducc_energy(c1).first, "ducc_energy(ducc_c1)");
        if (method == "ducc-c2") {
            EffectiveHamiltonian c2 = ducc_c2(h, fock, sigma, active);
            energies["ducc_c2"] = energy_entry(ducc_energy(c2).first, "ducc_energy(ducc_c2)");
            c2.tensor_form = extract_tensors(c2.matrix, active.spin_orbitals());
            ctx.report["residuals"]["extract_residual_norm"] = c2.tensor_form->residual_norm;
            save_effective(c2, (ctx.outdir / "heff_ducc_c2").string());
            for (const char* ext : {"heff_ducc_c2.bin", "heff_ducc_c2.json", "heff_ducc_c2.effdump"})
                ctx.report["artifacts"].push_back(ext);
        } else {
            c1.tensor_form = extract_tensors(c1.matrix, active.spin_orbitals());
            ctx.report["residuals"]["extract_residual_norm"] = c1.tensor_form->residual_norm;
            save_effective(c1, (ctx.outdir / "heff_ducc_c1").string());
            for (const char* ext : {"heff_ducc_c1.bin", "heff_ducc_c1.json", "heff_ducc_c1.effdump"})
                ctx.report["artifacts"].push_back(ext);
        }
        return;
    }
    throw std::runtime_error("config: unknown method '" + method + "'");
}

void run_multicomp(PipelineContext& ctx, bool oracle) {
    const json& cj = ctx.config.at("composite");
    const LatticeSpeciesParams pa = parse_species(cj.at("a"));
    const LatticeSpeciesParams pb = parse_species(cj.at("b"));
    const double w = cj.value("coupling", 0.1);
    const CompositeHamiltonian ch = lattice_pair_model(pa, pb, w);
    ctx.report["system"] = {{"model", "lattice-pair"},
                            {"n_orb_a", ch.basis.basis_a.n_spinorb()},
                            {"n_part_a", ch.basis.basis_a.n_elec()},
                            {"n_orb_b", ch.basis.basis_b.n_spinorb()},
                            {"n_part_b", ch.basis.basis_b.n_elec()},
                            {"coupling", w}};
    json& energies = ctx.report["energies"];

    const CompositeSpace space(ch.basis);
    const Eigen::MatrixXd hmat = build_composite_matrix(ch, space);
    if (oracle) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hmat);
        energies["fci"] = energy_entry(es.eigenvalues()(0), "composite dense diagonalization");
    }

    const int rank_a = cj.value("rank_a", ch.basis.basis_a.n_elec());
    const int rank_b = cj.value("rank_b", ch.basis.basis_b.n_elec());
    const CompositeMask mask = full_composite_mask(ch.basis, rank_a, rank_b);
    const CompositeCCResult cc = solve_cc_composite(ch, mask, ctx.cc_tol(), ctx.cc_max_iter());
    energies["composite_cc"] = energy_entry(cc.energy, "solve_cc_composite.energy");
    ctx.report["residuals"]["cc_residual_max"] = cc.residual_norm;
    if (!cc.converged) {
        ctx.warnings.push_back("composite CC did not converge");
        ctx.non_converged = true;
    }

    const std::string mode = cj.value("mode", "nonhermitian");
    EffectiveHamiltonian heff =
        mode == "nonhermitian"
            ? downfold_B(ch, cc.t.t_b, cc.t.s_ab)
            : ducc_downfold_B(ch, cc.t.t_b, cc.t.s_ab,
                              mode == "ducc-exact" ? CompositeDuccMode::exact
                              : mode == "ducc-c1"  ? CompositeDuccMode::c1
                                                   : CompositeDuccMode::c2);
    if (heff.hermitian) {
        energies["downfolded_a"] = energy_entry(ducc_energy(heff).first, "ducc_energy(" + mode + ")");
    } else {
        const int ref_idx = heff.cas_space.index_of(ch.basis.basis_a.reference_mask());
        energies["downfolded_a"] =
            energy_entry(eig_nonhermitian(heff.matrix, ref_idx).energy, "eig_nonhermitian(downfold_B)");
    }
    save_dense(heff.matrix, (ctx.outdir / "heff_a").string(), heff.method);
    ctx.report["artifacts"].push_back("heff_a.bin");
    ctx.report["artifacts"].push_back("heff_a.json");
}

void run_fit(PipelineContext& ctx) {
    const json& fj = ctx.config.at("fit");
    OrbitalGrid grid;
    if (fj.contains("grid_file")) {
        std::ifstream in(fj["grid_file"].get<std::string>());
        if (!in) throw std::runtime_error("cannot open grid file");
        grid = read_grid(in);
        ctx.report["inputs"]["grid_file"] = {{"path", fj["grid_file"]},
                                             {"fnv64", file_hash(fj["grid_file"].get<std::string>())}};
    } else {
        const json gj = fj.value("grid", json::object());
        grid = harmonic_oscillator_grid(gj.value("n_orbitals", 4), gj.value("n_points", 301),
                                        gj.value("extent", 12.0));
    }
    const std::string fam_id = fj.at("family").get<std::string>();
    const InteractionFamily& fam = family(fam_id);

    ChiTensors chi;
    Eigen::VectorXd target_params;
    const json& tj = fj.at("target");
    if (tj.at("type") == "synthetic") {
        target_params.resize(fam.arity);
        for (int i = 0; i < fam.arity; ++i) target_params(i) = tj.at("params").at(i).get<double>();
        InteractionModel truth{fam_id, target_params};
        if (fam.two_body) {
            chi.chi2 = eval_g(truth, grid);
            chi.chi1 = Eigen::MatrixXd::Zero(grid.n_orbitals(), grid.n_orbitals());
        } else {
            chi.chi1 = eval_u(truth, grid);
            chi.chi2 = Tensor4(grid.n_orbitals());
        }
    } else {
        throw std::runtime_error("config: fit.target.type must be \"synthetic\" (downfolded chi "
                                 "sources are exercised through the library API)");
    }

    Eigen::VectorXd init(fam.arity);
    if (fj.contains("init")) {
        for (int i = 0; i < fam.arity; ++i) init(i) = fj["init"].at(i).get<double>();
    } else {
        const double rel = fj.value("init_perturbation", 0.1);
        std::mt19937_64 rng(ctx.config.value("seed", 0));
        std::uniform_real_distribution<double> u(-rel, rel);
        for (int i = 0; i < fam.arity; ++i) init(i) = target_params(i) * (1.0 + u(rng));
    }

    FitOptions opts;
    opts.budget = fj.value("budget", 10000);
    const FitReport rep = fit_interaction(chi, grid, fam_id, init, opts);
    ctx.report["fit"] = {{"family", fam_id},
                         {"objective", rep.objective},
                         {"evaluations", rep.evaluations},
                         {"converged", rep.converged},
                         {"degenerate", rep.degenerate},
                         {"parameters", std::vector<double>(rep.model.params.data(),
                                                            rep.model.params.data() + rep.model.params.size())}};
    if (!rep.converged) {
        ctx.warnings.push_back("fit budget exhausted before the step tolerance");
        ctx.non_converged = true;
    }
    if (rep.degenerate) ctx.warnings.push_back("degenerate family: objective flat around the start");
}

}  // namespace

RunOutcome cmd_run(const std::string& config_path, bool force, bool oracle) {
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    PipelineContext ctx;
    try {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config file: " + config_path);
        in >> ctx.config;

        ctx.outdir = ctx.config.value("output_dir", "ccdf_out");
        fs::create_directories(ctx.outdir);
        ctx.report["schema_version"] = 1;
        ctx.report["method"] = ctx.config.at("method");
        ctx.report["artifacts"] = json::array();
        ctx.report["inputs"]["config"] = {{"path", config_path}, {"fnv64", file_hash(config_path)}};
        oracle = oracle || ctx.config.value("oracle", false);
        force = force || ctx.config.value("force", false);

        const std::string method = ctx.config.at("method").get<std::string>();
        if (method == "multicomp")
            run_multicomp(ctx, oracle);
        else if (method == "fit")
            run_fit(ctx);
        else
            run_electronic(ctx, force, oracle);
    } catch (const std::exception& e) {
        out.exit_code = kExitInputError;
        out.report = {{"schema_version", 1}, {"errors", {e.what()}}};
        return out;
    }

    ctx.report["warnings"] = ctx.warnings;
    const auto t1 = std::chrono::steady_clock::now();
    ctx.report["timings"] = {
        {"total_ms", std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
    out.report = ctx.report;
    out.exit_code = ctx.non_converged ? kExitNotConverged : kExitOk;
    out.report_path = (ctx.outdir / "report.json").string();
    std::ofstream rep(out.report_path);
    rep << out.report.dump(2) << "\n";
    return out;
}

CompareOutcome cmd_compare(const std::vector<std::string>& report_paths,
                           const std::string& reference_label) {
    CompareOutcome out;
    if (report_paths.size() < 2) {
        out.exit_code = kExitInputError;
        out.table_text = "compare: need at least two reports\n";
        return out;
    }
    struct Row {
        std::string label;
        std::string hash;
        std::map<std::string, double> energies;
    };
    std::vector<Row> rows;
    std::map<std::string, std::string> path_hash;  // input path -> hash consistency
    try {
        for (const auto& rp : report_paths) {
            std::ifstream in(rp);
            if (!in) throw std::runtime_error("cannot open report: " + rp);
            json j;
            in >> j;
            Row row;
            if (j.contains("inputs") && j["inputs"].contains("fcidump")) {
                row.label = fs::path(j["inputs"]["fcidump"]["path"].get<std::string>()).stem().string();
                row.hash = j["inputs"]["fcidump"]["fnv64"].get<std::string>();
                const std::string path = j["inputs"]["fcidump"]["path"].get<std::string>();
                auto it = path_hash.find(path);
                if (it != path_hash.end() && it->second != row.hash)
                    throw std::runtime_error("mismatched systems: input " + path + " has hashes " +
                                             it->second + " and " + row.hash);
                path_hash[path] = row.hash;
            } else {
                row.label = fs::path(rp).stem().string();
                row.hash = "-";
            }
            const json energies = j.value("energies", json::object());
            for (const auto& [name, entry] : energies.items())
                row.energies[name] = entry.at("value").get<double>();
            if (row.energies.empty()) throw std::runtime_error("report has no energies: " + rp);

            // merge rows for the same system
            bool merged = false;
            for (auto& existing : rows)
                if (existing.hash == row.hash && existing.hash != "-") {
                    existing.energies.insert(row.energies.begin(), row.energies.end());
                    merged = true;
                    break;
                }
            if (!merged) rows.push_back(std::move(row));
        }

        std::set<std::string> labels;
        for (const auto& r : rows)
            for (const auto& [name, v] : r.energies) labels.insert(name);
        std::string ref = reference_label;
        if (ref.empty()) ref = labels.count("fci") ? "fci" : "reference";
        if (!labels.count(ref)) throw std::runtime_error("reference column '" + ref + "' not present");

        std::ostringstream table;
        table << "system";
        for (const auto& l : labels) table << "\t" << l;
        for (const auto& l : labels)
            if (l != ref) table << "\terr(" << l << ")";
        table << "\n";
        json jrows = json::array();
        for (const auto& r : rows) {
            table << r.label;
            json jr = {{"system", r.label}, {"hash", r.hash}};
            char buf[32];
            for (const auto& l : labels) {
                if (r.energies.count(l)) {
                    std::snprintf(buf, sizeof buf, "%.10f", r.energies.at(l));
                    table << "\t" << buf;
                    jr["energies"][l] = r.energies.at(l);
                } else {
                    table << "\t-";
                }
            }
            for (const auto& l : labels) {
                if (l == ref) continue;
                if (r.energies.count(l) && r.energies.count(ref)) {
                    std::snprintf(buf, sizeof buf, "%.10f", r.energies.at(l) - r.energies.at(ref));
                    table << "\t" << buf;
                    jr["errors"][l] = r.energies.at(l) - r.energies.at(ref);
                } else {
                    table << "\t-";
                }
            }
            table << "\n";
            jrows.push_back(std::move(jr));
        }
        out.table_text = table.str();
        out.table_json = {{"reference", ref}, {"rows", jrows}};
    } catch (const std::exception& e) {
        out.exit_code = kExitInputError;
        out.table_text = std::string("compare: ") + e.what() + "\n";
    }
    return out;
}

CheckOutcome cmd_fcidump_check(const std::string& path) {
    CheckOutcome out;
    try {
        const IntegralSet s = parse_fcidump_file(path);
        std::ostringstream os;
        os << path << ": ok\n"
           << "  NORB=" << s.n_spatial << " NELEC=" << s.n_elec << " MS2=" << s.ms2 << "\n"
           << "  core energy " << s.e_core << " Hartree\n"
           << "  h symmetric, ERI 8-fold symmetry verified (1e-12)\n"
           << "  hash " << file_hash(path) << "\n";
        out.summary = os.str();
    } catch (const std::exception& e) {
        out.exit_code = kExitInputError;
        out.summary = std::string(path) + ": " + e.what() + "\n";
    }
    return out;
}

}  // namespace ccdf
