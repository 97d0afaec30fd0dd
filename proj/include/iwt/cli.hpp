#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iwt/patching.hpp"

namespace iwt {

// {"kind":"unitriangular","N":..,"p":..} or {"kind":"table","p":..,"order":..,"mult":[[..]]}
GroupPtr parse_group_spec(const std::string& text);
GroupPtr load_group_spec(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// first abelian normal subgroup of index p, in enumeration order
std::optional<Subgroup> default_rw_subgroup(const GroupPtr& G);

struct SuiteOptions {
  Budget budget;
  int trials = 100;
  std::uint64_t seed = 1;
  int level = 2;
};

struct CheckRecord {
  std::string name;
  std::string anchor;
  CondReport rep;
  double seconds = 0;
};

// property suites; each randomized loop runs opt.trials times
CheckRecord check_theta_A(const GroupPtr& G, const SuiteOptions& opt);
// round trips plus `violations` constructed TCC / CCC+ failures that must be named
CheckRecord check_brauer(const GroupPtr& G, const SuiteOptions& opt, int violations);
CheckRecord check_descriptors(const GroupPtr& G);
CheckRecord check_char_p(const GroupPtr& G, const SuiteOptions& opt);
CheckRecord check_congruences(const GroupPtr& G, const SuiteOptions& opt);
CheckRecord check_log_norm(const GroupPtr& G, const SuiteOptions& opt);
CheckRecord check_integral_log(const GroupPtr& G, const SuiteOptions& opt);
// opt.trials integral tuples, `localized` genuinely localized ones
CheckRecord check_localized(const GroupPtr& G, const SuiteOptions& opt, int localized);
CheckRecord check_orbital(const GroupPtr& G, int level);
CheckRecord check_rw(const GroupPtr& G, const Subgroup& W, const SuiteOptions& opt);
CheckRecord check_pipeline(const GroupPtr& G, const SuiteOptions& opt);

// suite ∈ {additive, log, congruence, localized, rw, all}
std::vector<CheckRecord> run_suite(const std::string& suite, const GroupPtr& G, const SuiteOptions& opt,
                                   std::vector<std::string>& warnings);

struct RunConfig {
  std::string group_path;
  int unitriangular = 0;
  std::optional<int> p;
  Budget budget;
  std::uint64_t seed = 1;
  int trials = 100;
  int level = 2;
  bool timings = false;
  std::string suite = "all";
  std::string f_path, xi_path, out_path, oracle_path;
  std::string out_dir;  // fixture
};

struct Report {
  std::string text;  // JSON
  int exit_code = 0;
  std::vector<std::string> warnings;
};

Report cmd_group_info(const RunConfig& cfg);
Report cmd_verify(const RunConfig& cfg);
Report cmd_patch(const RunConfig& cfg);
Report cmd_orbital(const RunConfig& cfg);
// writes f.json, xi.json and oracle.txt for a synthetic unit
Report cmd_fixture(const RunConfig& cfg);

}  // namespace iwt
