// Command-line entry point: runs one algorithm on one problem over a list of seeds.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "mobo/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective Bayesian optimization with orthogonal search directions"};
  app.set_config("--config", "", "flat key=value file mirroring the flags");
  app.get_config_formatter_base()->arrayDelimiter(',');

  mobo::RunConfig cfg;
  std::string algo = "mobo-osd";
  std::vector<std::uint64_t> seeds = {0};
  std::string out = "runs";
  int init = 0;
  bool no_pfe = false;

  app.add_option("--problem", cfg.problem, "problem name")->capture_default_str();
  app.add_option("--algo", algo, "mobo-osd | random | nbi")->capture_default_str();
  app.add_option("--budget", cfg.budget, "total evaluations T")->capture_default_str();
  app.add_option("--batch", cfg.batch, "batch size b")->capture_default_str();
  app.add_option("--n-beta", cfg.n_beta, "number of search directions")->capture_default_str();
  app.add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--delta", cfg.delta, "confidence multiplier")->capture_default_str();
  app.add_option("--n-s", cfg.n_s, "starts per subproblem")->capture_default_str();
  app.add_option("--n-e", cfg.n_e, "samples per exploration space")->capture_default_str();
  app.add_option("--pfe-scale", cfg.pfe_scale, "half-width of the exploration coefficients")->capture_default_str();
  app.add_option("--init", init, "initial design size (default 2(D+1))");
  app.add_flag("--no-pfe", no_pfe, "disable front expansion");
  app.add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
  app.add_flag("--record-wall-time", cfg.record_wall_time, "fill the wall_ms column (breaks byte-identical output)");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.algo = mobo::parse_algorithm(algo);
    cfg.seeds = seeds;
    cfg.out_dir = out;
    cfg.use_pfe = !no_pfe;
    if (init > 0) cfg.init_count = init;
    const auto results = mobo::run(cfg);
    int failed = 0;
    for (const auto& r : results) {
      if (r.failed) {
        ++failed;
        std::cerr << "seed " << r.seed << " failed after " << r.rows.size() << " evaluations: " << r.message << '\n';
      } else if (!r.rows.empty()) {
        std::cout << "seed " << r.seed << ": hv " << r.rows.back().hv_after << ", log hv diff "
                  << r.rows.back().log_hv_diff_after << '\n';
      }
    }
    return failed == static_cast<int>(results.size()) ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
