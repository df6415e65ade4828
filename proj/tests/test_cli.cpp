#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ccdf/dense.hpp"
#include "ccdf/pipeline.hpp"
#include "support.hpp"

using namespace ccdf;
using namespace ccdf::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string write_config(const std::string& name, const json& j) {
    const std::string path = name;
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("cmd_run ccsd on H2 reaches the FCI correlation energy") {
    const json cfg = {{"method", "ccsd"},
                      {"fcidump", data_file("h2_sto3g_1.4011.fcidump")},
                      {"output_dir", "cli_ccsd_out"},
                      {"oracle", true}};
    const RunOutcome out = cmd_run(write_config("cli_ccsd.json", cfg));
    REQUIRE(out.exit_code == kExitOk);
    const json rep = load_json(out.report_path);
    const double e_cc = rep["energies"]["ccsd"]["value"].get<double>();
    const double e_fci = rep["energies"]["fci"]["value"].get<double>();
    CHECK(std::abs(e_cc - e_fci) < 1e-10);
    CHECK(rep["energies"]["ccsd"]["operation"] == "solve_cc.energy");
    CHECK(fs::exists("cli_ccsd_out/ccsd_amplitudes.txt"));
}

TEST_CASE("cmd_run ducc-c2 report carries bare-CAS, C1, C2 and FCI energies") {
    const json cfg = {{"method", "ducc-c2"},
                      {"fcidump", data_file("h4_631g_r20x25.fcidump")},
                      {"output_dir", "cli_ducc_out"},
                      {"active", {{"occ", "all"}, {"virt", {{"lowest", 2}}}}},
                      {"oracle", true}};
    const RunOutcome out = cmd_run(write_config("cli_ducc.json", cfg));
    REQUIRE(out.exit_code == kExitOk);
    const json rep = load_json(out.report_path);
    for (const char* key : {"bare_cas", "ducc_c1", "ducc_c2", "fci", "ccsd", "reference"})
        CHECK(rep["energies"].contains(key));
    // serialized effective Hamiltonian reloads bit-exactly
    const DenseOperator heff = load_dense("cli_ducc_out/heff_ducc_c2");
    CHECK(heff.dim() > 0);
    CHECK(fs::exists("cli_ducc_out/heff_ducc_c2.effdump"));
}

TEST_CASE("cmd_run missing input exits 1 without artifacts") {
    const json cfg = {{"method", "ccsd"},
                      {"fcidump", "no_such_file.fcidump"},
                      {"output_dir", "cli_missing_out"}};
    const RunOutcome out = cmd_run(write_config("cli_missing.json", cfg));
    CHECK(out.exit_code == kExitInputError);
    CHECK_FALSE(fs::exists("cli_missing_out/report.json"));
    CHECK(out.report.contains("errors"));
}

TEST_CASE("cmd_run report is deterministic modulo timings") {
    const json cfg = {{"method", "ses"},
                      {"fcidump", data_file("h4_sto3g_r20x25.fcidump")},
                      {"output_dir", "cli_det_out"},
                      {"active", {{"occ", json::array({0, 1})}, {"virt", json::array({2})}}}};
    const std::string cfg_path = write_config("cli_det.json", cfg);
    json a = load_json(cmd_run(cfg_path).report_path);
    json b = load_json(cmd_run(cfg_path).report_path);
    a.erase("timings");
    b.erase("timings");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("non-SES active space refused for ses method unless forced") {
    const json cfg = {{"method", "ses"},
                      {"fcidump", data_file("lih_sto3g_3.2.fcidump")},
                      {"output_dir", "cli_force_out"},
                      {"active", {{"occ", "all"}, {"virt", {{"lowest", 2}}}}}};
    const std::string path = write_config("cli_force.json", cfg);
    CHECK(cmd_run(path).exit_code == kExitInputError);
    const RunOutcome forced = cmd_run(path, /*force=*/true);
    CHECK(forced.exit_code == kExitOk);
    const json rep = load_json(forced.report_path);
    bool noted = false;
    for (const auto& w : rep["warnings"]) noted |= w.get<std::string>().find("void") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("cmd_run flow on H4") {
    const json cfg = {
        {"method", "flow"},
        {"fcidump", data_file("h4_sto3g_r20x25.fcidump")},
        {"output_dir", "cli_flow_out"},
        {"tolerances", {{"flow_sweep", 1e-9}, {"cc_residual", 1e-11}}},
        {"flow",
         {{"active_spaces",
           json::array({{{"occ", json::array({0, 1})}, {"virt", json::array({2})}},
                        {{"occ", json::array({0, 1})}, {"virt", json::array({3})}}})}}}};
    const RunOutcome out = cmd_run(write_config("cli_flow.json", cfg));
    REQUIRE(out.exit_code == kExitOk);
    const json rep = load_json(out.report_path);
    CHECK(rep["flow"]["converged"].get<bool>());
    CHECK(rep["energies"].contains("flow"));
}

TEST_CASE("cmd_run multicomp and fit methods") {
    SUBCASE("multicomp") {
        const json cfg = {{"method", "multicomp"},
                          {"output_dir", "cli_mc_out"},
                          {"oracle", true},
                          {"composite",
                           {{"a", {{"n_sites", 2}, {"n_particles", 2}}},
                            {"b", {{"n_sites", 2}, {"n_particles", 2}}},
                            {"coupling", 0.12},
                            {"mode", "nonhermitian"}}}};
        const RunOutcome out = cmd_run(write_config("cli_mc.json", cfg));
        REQUIRE(out.exit_code == kExitOk);
        const json rep = load_json(out.report_path);
        const double down = rep["energies"]["downfolded_a"]["value"].get<double>();
        const double fci = rep["energies"]["fci"]["value"].get<double>();
        CHECK(std::abs(down - fci) < 1e-9);
    }
    SUBCASE("fit round trip through the config surface") {
        const json cfg = {{"method", "fit"},
                          {"output_dir", "cli_fit_out"},
                          {"seed", 7},
                          {"fit",
                           {{"family", "coulomb_erf"},
                            {"grid", {{"n_orbitals", 3}}},
                            {"target", {{"type", "synthetic"}, {"params", {1.1, 0.8}}}},
                            {"init_perturbation", 0.1}}}};
        const RunOutcome out = cmd_run(write_config("cli_fit.json", cfg));
        REQUIRE(out.exit_code == kExitOk);
        const json rep = load_json(out.report_path);
        CHECK(rep["fit"]["objective"].get<double>() < 1e-8);
        const auto params = rep["fit"]["parameters"].get<std::vector<double>>();
        CHECK(std::abs(params[0] - 1.1) < 1e-6);
        CHECK(std::abs(params[1] - 0.8) < 1e-6);
    }
}

TEST_CASE("cmd_compare") {
    // build three reports across two systems
    for (const auto& [name, file] : std::vector<std::pair<std::string, std::string>>{
             {"cmp_a", "lih_sto3g_2.8.fcidump"}, {"cmp_b", "lih_sto3g_3.2.fcidump"}}) {
        const json cfg = {{"method", "ducc-c2"},
                          {"fcidump", data_file(file)},
                          {"output_dir", name},
                          {"active", {{"occ", "all"}, {"virt", {{"lowest", 2}}}}},
                          {"oracle", true}};
        REQUIRE(cmd_run(write_config(name + ".json", cfg)).exit_code == kExitOk);
    }
    SUBCASE("table against the FCI reference") {
        const CompareOutcome out =
            cmd_compare({"cmp_a/report.json", "cmp_b/report.json"});
        REQUIRE(out.exit_code == kExitOk);
        CHECK(out.table_text.find("err(ducc_c2)") != std::string::npos);
        CHECK(out.table_json["reference"] == "fci");
        CHECK(out.table_json["rows"].size() == 2);
        // C2 error column dominated by C1 error column, geometry-wise
        for (const auto& row : out.table_json["rows"]) {
            const double e1 = std::abs(row["errors"]["ducc_c1"].get<double>());
            const double e2 = std::abs(row["errors"]["ducc_c2"].get<double>());
            CHECK(e2 <= e1);
        }
    }
    SUBCASE("single report rejected") {
        CHECK(cmd_compare({"cmp_a/report.json"}).exit_code == kExitInputError);
    }
    SUBCASE("unknown reference column rejected") {
        CHECK(cmd_compare({"cmp_a/report.json", "cmp_b/report.json"}, "nope").exit_code ==
              kExitInputError);
    }
}

TEST_CASE("cmd_fcidump_check") {
    CHECK(cmd_fcidump_check(data_file("h2_sto3g_1.4011.fcidump")).exit_code == kExitOk);
    const CheckOutcome bad = cmd_fcidump_check("missing.fcidump");
    CHECK(bad.exit_code == kExitInputError);
}
