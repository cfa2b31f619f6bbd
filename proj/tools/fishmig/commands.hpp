#pragma once

#include <functional>
#include <string>
#include <vector>

#include "run_context.hpp"

namespace fishmig::cli {

/// A setting a command reads. Each one is also exposed as `--<name>`.
struct Key {
    std::string name;
    std::string fallback;
    std::string help;
};

struct Command {
    std::string name;
    std::string help;
    std::vector<Key> keys;
    std::function<int(Run&)> run;
};

std::vector<Command> data_commands();
std::vector<Command> model_commands();
std::vector<Command> sim_commands();

}  // namespace fishmig::cli
