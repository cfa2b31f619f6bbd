#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "commands.hpp"
#include "fishmig/error.hpp"

using namespace fishmig;
using namespace fishmig::cli;

namespace {

std::map<std::string, std::string> parse_sets(const std::vector<std::string>& sets) {
    std::map<std::string, std::string> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--set expects key=value, got '" + s + "'");
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal-driven fish migration modelling toolkit"};
    app.set_version_flag("--version", FISHMIG_VERSION);
    app.require_subcommand(1);

    GlobalOptions globals;
    std::uint64_t seed = 0;
    std::vector<std::string> sets;
    app.add_option("--config", globals.config_path, "key=value settings file, applied before flags");
    auto* seed_opt = app.add_option("--seed", seed, "seed for every stochastic step");
    app.add_option("--out", globals.out_dir, "output directory")->capture_default_str();
    app.add_option("--set", sets, "extra key=value override (repeatable)");

    std::vector<Command> commands;
    for (auto group : {data_commands(), model_commands(), sim_commands()})
        for (auto& c : group) commands.push_back(std::move(c));

    std::map<std::string, std::string> overrides;
    const Command* chosen = nullptr;
    for (const auto& cmd : commands) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->fallthrough();
        for (const auto& key : cmd.keys) {
            if (key.name == "seed") continue;
            auto help = key.help;
            if (!key.fallback.empty()) help += " [" + key.fallback + "]";
            sub->add_option_function<std::string>(
                "--" + key.name, [&overrides, name = key.name](const std::string& v) { overrides[name] = v; }, help);
        }
        sub->callback([&chosen, &cmd] { chosen = &cmd; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*seed_opt) globals.seed = seed;
        for (const auto& [k, v] : parse_sets(sets)) overrides.emplace(k, v);
        KvConfig defaults;
        defaults.set("seed", "1");
        for (const auto& key : chosen->keys) defaults.set(key.name, key.fallback);
        Run run(chosen->name, defaults, globals, overrides);
        const int rc = chosen->run(run);
        run.write_manifest();
        return rc;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
