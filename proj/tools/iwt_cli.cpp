#include <iostream>

#include "CLI11.hpp"
#include "iwt/cli.hpp"

int main(int argc, char** argv) {
  using namespace iwt;
  CLI::App app{"Iwasawa theta-map verification tool"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string report_path;
  int p = 0;

  auto common = [&](CLI::App* s) {
    s->add_option("--group", cfg.group_path, "group spec file (JSON)");
    s->add_option("--unitriangular", cfg.unitriangular, "use B^N(F_p), the unitriangular group of this size");
    s->add_option("--p", p, "prime for --unitriangular (default 3)");
    s->add_option("--padic-prec", cfg.budget.M, "p-adic precision M")->check(CLI::PositiveNumber);
    s->add_option("--t-prec", cfg.budget.n, "T-adic truncation n")->check(CLI::PositiveNumber);
    s->add_option("--den-budget", cfg.budget.B, "allowed power of p in denominators B")->check(CLI::NonNegativeNumber);
    s->add_option("--seed", cfg.seed, "random seed");
    s->add_option("--trials", cfg.trials, "samples per randomized check")->check(CLI::NonNegativeNumber);
    s->add_option("--level", cfg.level, "finite level j")->check(CLI::NonNegativeNumber);
    s->add_option("--report", report_path, "write the JSON report here instead of stdout");
    s->add_flag("--timings", cfg.timings, "include per-check wall times (reports stop being byte-stable)");
  };

  auto* info = app.add_subcommand("group-info", "orders, classes, centre, commutator and families");
  common(info);
  auto* verify = app.add_subcommand("verify", "run property suites");
  common(verify);
  verify->add_option("suite", cfg.suite, "additive | log | congruence | localized | rw | all")
      ->check(CLI::IsMember({"additive", "log", "congruence", "localized", "rw", "all"}));
  auto* patch = app.add_subcommand("patch", "patch xi against f and check the result");
  common(patch);
  patch->add_option("--f", cfg.f_path, "characteristic element tuple")->required();
  patch->add_option("--xi", cfg.xi_path, "pseudomeasure tuple")->required();
  patch->add_option("--out", cfg.out_path, "write f*w here");
  patch->add_option("--oracle", cfg.oracle_path, "zeta oracle for the orbital-sum check");
  auto* orbital = app.add_subcommand("orbital", "orbital-sum checks, with or without a zeta oracle");
  common(orbital);
  orbital->add_option("--oracle", cfg.oracle_path, "zeta oracle file");
  auto* fixture = app.add_subcommand("fixture", "write a synthetic f, xi and oracle");
  common(fixture);
  fixture->add_option("--out-dir", cfg.out_dir, "directory for f.json, xi.json, oracle.txt")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  if (p != 0) cfg.p = p;

  Report r;
  if (info->parsed())
    r = cmd_group_info(cfg);
  else if (verify->parsed())
    r = cmd_verify(cfg);
  else if (patch->parsed())
    r = cmd_patch(cfg);
  else if (orbital->parsed())
    r = cmd_orbital(cfg);
  else
    r = cmd_fixture(cfg);

  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (report_path.empty()) {
    std::cout << r.text;
  } else {
    try {
      write_file(report_path, r.text);
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      return 3;
    }
  }
  return r.exit_code;
}
