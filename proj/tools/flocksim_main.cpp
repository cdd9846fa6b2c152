#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flocksim/config.hpp"
#include "flocksim/tasks.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("FLOCKSIM_JOBS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;  // auto
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flocksim: stochastic flocking dynamics experiment runner"};
  app.require_subcommand(1);

  struct TaskArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int jobs = default_jobs();
  };
  std::vector<std::pair<std::string, TaskArgs>> invocations;

  for (const std::string& task : flocksim::task_names()) {
    auto* sub = app.add_subcommand(task, "run the " + task + " task");
    auto args = std::make_shared<TaskArgs>();
    sub->add_option("--config", args->config_path, "experiment config file")
        ->required();
    sub->add_option("--set", args->overrides,
                    "override a config entry (key=value), repeatable");
    sub->add_option("--out", args->out_dir, "output run directory");
    sub->add_option("--jobs", args->jobs,
                    "worker threads (default: FLOCKSIM_JOBS or all cores)");
    sub->callback([task, args, &invocations] {
      invocations.push_back({task, *args});
    });
  }

  CLI11_PARSE(app, argc, argv);

  const auto& [task, args] = invocations.front();
  try {
    flocksim::Config cfg = flocksim::Config::parse_file(args.config_path);
    for (const std::string& ov : args.overrides) cfg.apply_override(ov);
    const std::string out =
        args.out_dir.empty() ? "flocksim-out/" + task : args.out_dir;
    flocksim::run_task(task, cfg, out, args.jobs);
    std::cout << "wrote " << out << "\n";
    return flocksim::kExitOk;
  } catch (const flocksim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return flocksim::kExitSchema;
  } catch (const flocksim::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return flocksim::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
