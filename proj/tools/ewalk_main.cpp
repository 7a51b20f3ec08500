#include <iostream>

#include <CLI11.hpp>

#include "ewalk/scenario.hpp"

namespace {

int report(const ewalk::RunReport& r) {
    for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
    for (const auto& w : r.warnings) std::cout << "warning: " << w << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-ladder walks: classical and coherent collision-model thermalization"};
    app.require_subcommand(1);

    std::string config_path, preset_name;
    ewalk::RunOptions run_opts, preset_opts;
    bool no_svg = false;

    auto* run = app.add_subcommand("run", "Run a scenario from a JSON config");
    run->add_option("config", config_path, "Scenario config file")->required();
    run->add_option("--out", run_opts.out_dir, "Output directory");
    run->add_flag("--no-svg", no_svg, "Skip SVG plots");

    auto* preset = app.add_subcommand("preset", "Run a built-in preset");
    preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
    preset->add_option("--out", preset_opts.out_dir, "Output directory");

    auto* list = app.add_subcommand("list-presets", "List built-in presets");
    auto* selftest = app.add_subcommand("selftest", "Run the oracle and invariant battery");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            run_opts.svg = !no_svg;
            return report(ewalk::run_scenario(ewalk::load_config(config_path), run_opts));
        }
        if (*preset) return report(ewalk::run_scenario(ewalk::preset_config(preset_name), preset_opts));
        if (*list) {
            for (const auto& p : ewalk::list_presets()) std::cout << p.name << "  " << p.description << '\n';
            return 0;
        }
        if (*selftest) return ewalk::run_selftest(std::cout).failed == 0 ? 0 : 1;
    } catch (const ewalk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ewalk::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
