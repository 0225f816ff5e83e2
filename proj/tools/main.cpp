#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "jjspd/error.hpp"
#include "jjspd/parallel.hpp"
#include "jjspd/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Josephson-junction single-photon detector simulator and fitter", "jjspd"};
  app.set_version_flag("--version", std::string(jjspd::version()));
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");
  app.parse_complete_callback([&] { jjspd::set_thread_limit(threads); });

  jjspd::cli::Store store;
  jjspd::cli::add_model_commands(app, store);
  jjspd::cli::add_simulate_commands(app, store);
  jjspd::cli::add_analyze_commands(app, store);
  jjspd::cli::add_fit_commands(app, store);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(jjspd::ErrorCategory::config);
  } catch (const jjspd::Error& e) {
    std::cerr << "jjspd: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "jjspd: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
