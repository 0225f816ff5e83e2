#pragma once

#include <memory>
#include <vector>

#include <CLI11.hpp>

#include "settings.hpp"

namespace jjspd::cli {

using Store = std::vector<std::unique_ptr<Settings>>;

void add_model_commands(CLI::App& app, Store& store);
void add_simulate_commands(CLI::App& app, Store& store);
void add_analyze_commands(CLI::App& app, Store& store);
void add_fit_commands(CLI::App& app, Store& store);

}  // namespace jjspd::cli
