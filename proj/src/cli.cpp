// Copyright 2026 The postedmech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "postedmech/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "postedmech/constructions.hpp"
#include "postedmech/engine.hpp"
#include "postedmech/json_io.hpp"
#include "postedmech/myerson.hpp"
#include "postedmech/scenarios.hpp"

namespace postedmech {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scenario_file;
  std::string id;
  std::optional<double> n, m, k, eps;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 1;
  bool exact_probs = false;
  std::string out;
  std::string construction = "spm";
  std::string mode = "exact";
  std::string spec_file;
  bool adversarial = false;
  std::string trace;
};

std::uint64_t effective_seed(const Options& o) {
  if (const char* env = std::getenv("POSTEDMECH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("POSTEDMECH_SEED must be an unsigned integer");
    }
  }
  return o.seed;
}

std::map<std::string, double> scenario_params(const Options& o) {
  std::map<std::string, double> p;
  if (o.n) p["n"] = *o.n;
  if (o.m) p["m"] = *o.m;
  if (o.k) p["k"] = *o.k;
  if (o.eps) p["eps"] = *o.eps;
  return p;
}

Scenario load_scenario(const Options& o) {
  if (!o.scenario_file.empty() && !o.id.empty())
    throw UsageError("give either --scenario or --id, not both");
  if (!o.scenario_file.empty()) return scenario_from_json(read_json_file(o.scenario_file));
  if (!o.id.empty()) return generate(o.id, scenario_params(o));
  throw UsageError("a scenario is required (--scenario FILE or --id NAME)");
}

Instance single_instance(const Scenario& s) {
  if (auto* i = std::get_if<Instance>(&s.instance)) return *i;
  return copies_instance(std::get<MultiInstance>(s.instance));
}

AllocationStats probabilities(const Instance& inst, const Options& o) {
  if (o.exact_probs) return exact_allocation_probabilities(inst);
  return estimate_allocation_probabilities(inst, o.samples, effective_seed(o));
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void csv_header(std::ostream& os) {
  os << "schema=1\n"
     << "scenario_id,mechanism,mode,mean_revenue,std_error,samples,seed,ratio\n";
}

void csv_row(std::ostream& os, const std::string& scenario, const std::string& mech,
             const std::string& mode, const Evaluation& e, std::optional<double> ratio) {
  os << std::setprecision(12) << scenario << ',' << mech << ',' << mode << ','
     << e.mean_revenue << ',' << e.std_error << ',' << e.num_samples << ',' << e.seed
     << ',';
  if (ratio) os << *ratio;
  os << '\n';
}

EvalMode eval_mode(const Options& o) {
  if (o.mode == "exact") return EvalMode::exact_mode();
  return EvalMode::monte_carlo(o.samples.value_or(100'000), effective_seed(o));
}

std::optional<OpmSpec> default_opm(const Instance& inst, const AllocationStats& stats) {
  const auto& kind = inst.feasibility.kind();
  if (std::holds_alternative<UniformMatroid>(kind) ||
      std::holds_alternative<PartitionMatroid>(kind))
    return build_opm_uniform(inst, stats).spec;
  if (std::holds_alternative<GraphicMatroid>(kind))
    return build_opm_graphical(inst, stats).spec;
  try {
    return build_opm_partition_intersection(inst, stats);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

// --- subcommands --------------------------------------------------------------

int run_build_spm(const Options& o) {
  Scenario s = load_scenario(o);
  Instance inst = single_instance(s);
  Output out(o.out);
  out.stream() << to_json(build_spm(inst, probabilities(inst, o))).dump(2) << '\n';
  return 0;
}

int run_build_opm(const Options& o) {
  Scenario s = load_scenario(o);
  Instance inst = single_instance(s);
  AllocationStats stats = probabilities(inst, o);
  Json j;
  const std::string& c = o.construction;
  if (c == "spm") {
    j = to_json(build_spm(inst, stats));
  } else if (c == "uniform") {
    auto u = build_opm_uniform(inst, stats);
    j = to_json(u.spec);
    Json thr = Json::array();
    for (const auto& t : u.thresholds)
      thr.push_back({{"a_star", t.a_star}, {"b_star", t.b_star}, {"c", t.c}, {"k", t.k}});
    j["parts"] = u.parts;
    j["thresholds"] = thr;
  } else if (c == "logk") {
    bool exact = o.exact_probs;
    auto est = exact ? exact_opm_estimator()
                     : monte_carlo_opm_estimator(o.samples.value_or(10'000), effective_seed(o));
    auto l = build_opm_log_k(inst, stats, est);
    Json groups = Json::array();
    for (const auto& g : l.groups) groups.push_back(to_json(g));
    j = {{"groups", groups}, {"members", l.members}, {"group_revenue", l.group_revenue},
         {"best", l.best}};
  } else if (c == "graphical") {
    auto g = build_opm_graphical(inst, stats);
    j = to_json(g.spec);
    j["parts"] = g.parts;
    j["thresholds"] = g.thresholds;
  } else if (c == "partition-intersection") {
    j = to_json(build_opm_partition_intersection(inst, stats));
  } else if (c == "vcg-reserves") {
    SpmSpec spm = build_spm(inst, stats);
    bool lotteries = false;
    for (const auto& r : spm.rules) lotteries |= !is_deterministic(r);
    std::vector<double> reserves =
        lotteries ? best_vcg_reserves(spm, inst).reserves : vcg_reserves_from_spm(spm);
    Json r = Json::array();
    for (double x : reserves) r.push_back(price_to_json(x));
    j = {{"reserves", r}};
  } else {
    throw UsageError("unknown construction \"" + c + "\"");
  }
  j["allocation_stats"] = to_json(stats);
  Output out(o.out);
  out.stream() << j.dump(2) << '\n';
  return 0;
}

int run_evaluate(const Options& o) {
  Scenario s = load_scenario(o);
  Instance inst = single_instance(s);
  EvalMode mode = eval_mode(o);
  Mechanism mech = MyersonMechanism{};
  std::string name = "myerson";
  if (!o.spec_file.empty()) {
    Json j = read_json_file(o.spec_file);
    std::string type = j.value("type", std::string("spm"));
    if (j.contains("reserves")) {
      VcgSpec v;
      for (const auto& x : j["reserves"]) v.reserves.push_back(price_from_json(x));
      mech = v;
      name = "vcg";
    } else if (type == "opm" || o.adversarial) {
      mech = opm_spec_from_json(j);
      name = "opm";
    } else {
      mech = spm_spec_from_json(j);
      name = "spm";
    }
  }
  Evaluation e = evaluate(mech, inst, mode);
  if (!mode.exact) e.seed = mode.seed;
  Output out(o.out);
  csv_header(out.stream());
  csv_row(out.stream(), s.id, name, o.mode, e, std::nullopt);
  if (!o.trace.empty()) {
    auto* spm = std::get_if<SpmSpec>(&mech);
    if (!spm) throw UsageError("--trace needs an SPM spec");
    std::ofstream trace(o.trace);
    if (!trace) throw UsageError("cannot write " + o.trace);
    Rng rng(effective_seed(o));
    for (std::size_t t = 0; t < mode.samples; ++t) {
      Profile p = sample_profile(inst, rng);
      trace << to_json(run_spm(*spm, p, rng)).dump() << '\n';
    }
  }
  return 0;
}

int run_compare(const Options& o) {
  Scenario s = load_scenario(o);
  Instance inst = single_instance(s);
  EvalMode mode = eval_mode(o);
  AllocationStats stats = probabilities(inst, o);
  Output out(o.out);
  csv_header(out.stream());
  auto run = [&](const Mechanism& m) {
    Evaluation e = evaluate(m, inst, mode);
    if (!mode.exact) e.seed = mode.seed;
    return e;
  };
  Evaluation myerson = run(MyersonMechanism{});
  csv_row(out.stream(), s.id, "myerson", o.mode, myerson, 1.0);
  auto row = [&](const std::string& name, const Mechanism& m) {
    try {
      Evaluation e = run(m);
      std::optional<double> ratio;
      if (e.mean_revenue > 0.0) ratio = myerson.mean_revenue / e.mean_revenue;
      csv_row(out.stream(), s.id, name, o.mode, e, ratio);
    } catch (const std::exception& ex) {
      std::cerr << "skipping " << name << ": " << ex.what() << '\n';
    }
  };
  SpmSpec spm = build_spm(inst, stats);
  row("spm", spm);
  try {
    if (auto opm = default_opm(inst, stats)) row("opm", *opm);
  } catch (const std::exception& ex) {
    std::cerr << "skipping opm: " << ex.what() << '\n';
  }
  if (inst.feasibility.is_matroid()) {
    try {
      bool lotteries = false;
      for (const auto& r : spm.rules) lotteries |= !is_deterministic(r);
      VcgSpec v{lotteries ? best_vcg_reserves(spm, inst).reserves : vcg_reserves_from_spm(spm)};
      row("vcg", v);
    } catch (const std::exception& ex) {
      std::cerr << "skipping vcg: " << ex.what() << '\n';
    }
  }
  return 0;
}

std::string format_bound(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

int run_reproduce(const Options& o) {
  if (o.id.empty()) throw UsageError("reproduce needs a scenario id");
  Scenario s = generate(o.id, scenario_params(o));
  ReproduceOptions ro;
  ro.samples = o.samples.value_or(1'000'000);
  ro.seed = effective_seed(o);
  ReproduceReport rep = reproduce(s, ro);
  Output out(o.out);
  auto& os = out.stream();
  for (const auto& c : rep.checks) {
    os << (c.informational ? "INFO" : c.pass() ? "PASS" : "FAIL") << ' ' << c.name
       << ": measured " << std::setprecision(10) << c.measured;
    if (!c.informational)
      os << " vs reference " << c.reference.value << " in [" << format_bound(c.reference.lo)
         << ", " << format_bound(c.reference.hi) << "]";
    os << " (" << c.reference.provenance << ")\n";
  }
  os << (rep.pass() ? "PASS " : "FAIL ") << rep.id << " in " << std::setprecision(3)
     << rep.seconds << " s\n";
  return rep.pass() ? 0 : 1;
}

void scenario_flags(CLI::App* app, Options& o) {
  app->add_option("--scenario", o.scenario_file, "Scenario JSON file");
  app->add_option("--id", o.id, "Generated scenario id");
  app->add_option("--n", o.n, "Scenario size parameter");
  app->add_option("--m", o.m, "Scenario m parameter");
  app->add_option("--k", o.k, "Scenario k parameter");
  app->add_option("--eps", o.eps, "Scenario epsilon parameter");
}

void run_flags(CLI::App* app, Options& o) {
  app->add_option("--samples", o.samples, "Sample count");
  app->add_option("--seed", o.seed, "Master seed (POSTEDMECH_SEED overrides)");
  app->add_option("--out", o.out, "Output path (default stdout)");
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Posted-price mechanism construction and evaluation"};
  app.require_subcommand(1);
  Options o;

  auto* build_spm_cmd = app.add_subcommand("build-spm", "Construct an SPM spec");
  scenario_flags(build_spm_cmd, o);
  run_flags(build_spm_cmd, o);
  build_spm_cmd->add_flag("--exact-probs", o.exact_probs, "Exact Myerson probabilities");

  auto* build_opm_cmd = app.add_subcommand("build-opm", "Construct an OPM spec");
  scenario_flags(build_opm_cmd, o);
  run_flags(build_opm_cmd, o);
  build_opm_cmd->add_flag("--exact-probs", o.exact_probs, "Exact Myerson probabilities");
  build_opm_cmd->add_option("--construction", o.construction, "Construction")
      ->check(CLI::IsMember({"spm", "uniform", "logk", "graphical",
                             "partition-intersection", "vcg-reserves"}));

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a spec or Myerson");
  scenario_flags(eval_cmd, o);
  run_flags(eval_cmd, o);
  eval_cmd->add_option("--spec", o.spec_file, "Spec JSON (default: Myerson)");
  eval_cmd->add_option("--mode", o.mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  eval_cmd->add_flag("--adversarial", o.adversarial, "Worst-order evaluation of the rules");
  eval_cmd->add_option("--trace", o.trace, "JSON-lines audit log of SPM runs");

  auto* compare_cmd = app.add_subcommand("compare", "Myerson, SPM, OPM and VCG side by side");
  scenario_flags(compare_cmd, o);
  run_flags(compare_cmd, o);
  compare_cmd->add_flag("--exact-probs", o.exact_probs, "Exact Myerson probabilities");
  compare_cmd->add_option("--mode", o.mode, "exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));

  auto* repro_cmd = app.add_subcommand("reproduce", "Check a scenario's reference values");
  repro_cmd->add_option("scenario_id", o.id, "Scenario id")->required();
  repro_cmd->add_option("--n", o.n, "Scenario size parameter");
  repro_cmd->add_option("--m", o.m, "Scenario m parameter");
  repro_cmd->add_option("--k", o.k, "Scenario k parameter");
  repro_cmd->add_option("--eps", o.eps, "Scenario epsilon parameter");
  run_flags(repro_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*build_spm_cmd) return run_build_spm(o);
    if (*build_opm_cmd) return run_build_opm(o);
    if (*eval_cmd) return run_evaluate(o);
    if (*compare_cmd) return run_compare(o);
    if (*repro_cmd) return run_reproduce(o);
  } catch (const JsonInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DeskScaleLimit& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace postedmech
