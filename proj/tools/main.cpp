#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ccdf/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ccdf: coupled-cluster downfolding toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    bool force = false, oracle = false;
    auto* run = app.add_subcommand("run", "execute the pipeline declared by a config file");
    run->add_option("config", config_path, "JSON run configuration")->required();
    run->add_flag("--force", force, "proceed with non-SES active spaces (equivalence guarantee void)");
    run->add_flag("--oracle", oracle, "attach the exact diagonalization column when dimension permits");

    std::vector<std::string> report_paths;
    std::string reference_label, compare_json_out;
    auto* compare = app.add_subcommand("compare", "tabulate energies across run reports");
    compare->add_option("reports", report_paths, "report.json files")->required()->expected(-1);
    compare->add_option("--reference", reference_label, "reference energy column (default: fci)");
    compare->add_option("--json", compare_json_out, "also write the table as JSON");

    std::string check_path;
    auto* check = app.add_subcommand("fcidump-check", "parse and validate an FCIDUMP file");
    check->add_option("file", check_path, "FCIDUMP file")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        const ccdf::RunOutcome out = ccdf::cmd_run(config_path, force, oracle);
        if (out.exit_code == ccdf::kExitInputError) {
            std::cerr << out.report.dump(2) << "\n";
        } else {
            std::cout << "report: " << out.report_path << "\n";
            if (out.report.contains("energies"))
                for (const auto& [name, e] : out.report["energies"].items())
                    std::cout << "  " << name << " = " << e["value"].get<double>() << " Hartree\n";
        }
        return out.exit_code;
    }
    if (*compare) {
        const ccdf::CompareOutcome out = ccdf::cmd_compare(report_paths, reference_label);
        std::cout << out.table_text;
        if (!compare_json_out.empty() && out.exit_code == 0) {
            std::ofstream js(compare_json_out);
            js << out.table_json.dump(2) << "\n";
        }
        return out.exit_code;
    }
    const ccdf::CheckOutcome out = ccdf::cmd_fcidump_check(check_path);
    std::cout << out.summary;
    return out.exit_code;
}
