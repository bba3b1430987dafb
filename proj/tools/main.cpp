/* Copyright 2026 The hexsched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hexsched/cluster.hpp"
#include "hexsched/cost_model.hpp"
#include "hexsched/errors.hpp"
#include "hexsched/log.hpp"
#include "hexsched/oracle.hpp"
#include "hexsched/presets.hpp"
#include "hexsched/schedule.hpp"
#include "hexsched/scheduler.hpp"
#include "hexsched/simulator.hpp"
#include "hexsched/util.hpp"
#include "hexsched/version.hpp"

namespace {

namespace fs = std::filesystem;
using hexsched::format_double;
using hexsched::read_file;
using hexsched::write_file;
using json = nlohmann::json;

struct Options {
  std::string cluster_file;
  std::string workload_file;
  std::string schedule_file;
  std::string config_file;
  std::string out_dir;
  std::string preset;
  std::vector<int64_t> sweep;
  std::vector<int> sizes;
  int threads = 0;      // 0 = keep the config value
  long long seed = 0;   // reserved; the engine is deterministic
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// (path, content) pairs of every input document a command read.
using Inputs = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const std::string &out_dir, const std::string &command,
                    const Inputs &inputs, const json &config_snapshot,
                    const std::vector<std::string> &outputs, double wall_s) {
  json m;
  m["command"] = command;
  json in = json::object();
  for (const auto &[path, content] : inputs) {
    in[path] = "fnv1a:" + hexsched::fnv1a_hex(content);
  }
  m["inputs"] = std::move(in);
  m["config"] = config_snapshot;
  m["outputs"] = outputs;
  m["engine_version"] = hexsched::kVersion;
  m["wall_time_s"] = wall_s;
  write_file(out_dir + "/manifest.json", m.dump(2) + "\n");
}

hexsched::SchedulerConfig scheduler_config(const std::string &config_text,
                                           int threads_flag) {
  hexsched::SchedulerConfig cfg;
  if (!config_text.empty()) {
    cfg = hexsched::load_scheduler_config(config_text);
  }
  if (threads_flag > 0) {
    cfg.threads = threads_flag;
  }
  hexsched::validate_scheduler_config(cfg);
  return cfg;
}

int cmd_plan(const Options &o) {
  Timer timer;
  Inputs inputs;
  inputs.emplace_back(o.cluster_file, read_file(o.cluster_file));
  inputs.emplace_back(o.workload_file, read_file(o.workload_file));
  hexsched::ClusterSpec cluster = hexsched::load_cluster(inputs[0].second);
  hexsched::WorkloadSpec work = hexsched::load_workload(inputs[1].second);
  std::string config_text;
  if (!o.config_file.empty()) {
    config_text = read_file(o.config_file);
    inputs.emplace_back(o.config_file, config_text);
  }
  hexsched::SchedulerConfig cfg = scheduler_config(config_text, o.threads);

  hexsched::PlanResult pr = hexsched::plan_schedule(cluster, work, cfg);

  fs::create_directories(o.out_dir);
  write_file(o.out_dir + "/schedule.json",
             hexsched::save_schedule(pr.schedule, cluster));
  write_file(o.out_dir + "/report.json",
             hexsched::report_json(cluster, work, pr.schedule, pr.breakdown));
  write_file(o.out_dir + "/trace.csv", hexsched::plan_trace_csv(pr.trace));
  write_manifest(o.out_dir, "plan", inputs,
                 json::parse(hexsched::scheduler_config_json(cfg)),
                 {"schedule.json", "report.json", "trace.csv"}, timer.seconds());
  std::cout << "schedule " << hexsched::schedule_id(pr.schedule, cluster)
            << " block_s " << format_double(pr.breakdown.block_s) << " tps "
            << format_double(pr.breakdown.tps) << "\n";
  return 0;
}

int cmd_evaluate(const Options &o) {
  Timer timer;
  Inputs inputs;
  inputs.emplace_back(o.cluster_file, read_file(o.cluster_file));
  inputs.emplace_back(o.workload_file, read_file(o.workload_file));
  inputs.emplace_back(o.schedule_file, read_file(o.schedule_file));
  hexsched::ClusterSpec cluster = hexsched::load_cluster(inputs[0].second);
  hexsched::WorkloadSpec work = hexsched::load_workload(inputs[1].second);
  hexsched::Schedule sched = hexsched::load_schedule(inputs[2].second, cluster);

  std::vector<std::string> violations =
      hexsched::validate_schedule_report(cluster, work, sched, 1);
  if (!violations.empty()) {
    for (const std::string &v : violations) {
      std::cerr << "error: " << v << "\n";
    }
    return 2;
  }

  hexsched::CostBreakdown bd = hexsched::iteration_latency(cluster, work, sched);
  std::cout << hexsched::report_json(cluster, work, sched, bd);
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_file(o.out_dir + "/report.json",
               hexsched::report_json(cluster, work, sched, bd));
    write_manifest(o.out_dir, "evaluate", inputs, json::object(),
                   {"report.json"}, timer.seconds());
  }
  if (!bd.feasible) {
    for (int d = 0; d < cluster.num_devices(); ++d) {
      if (!bd.mem_ok[d]) {
        std::cerr << "error: infeasible: device '" << cluster.devices[d].id
                  << "' needs "
                  << format_double(bd.mem_total_B[d] -
                                   (double)cluster.devices[d].mem_cap_B)
                  << " B beyond its capacity\n";
        break;
      }
    }
    return 3;
  }
  return 0;
}

int cmd_baselines(const Options &o) {
  Timer timer;
  Inputs inputs;
  inputs.emplace_back(o.cluster_file, read_file(o.cluster_file));
  inputs.emplace_back(o.workload_file, read_file(o.workload_file));
  hexsched::ClusterSpec cluster = hexsched::load_cluster(inputs[0].second);
  hexsched::WorkloadSpec work = hexsched::load_workload(inputs[1].second);
  std::string config_text;
  if (!o.config_file.empty()) {
    config_text = read_file(o.config_file);
    inputs.emplace_back(o.config_file, config_text);
  }
  hexsched::SchedulerConfig cfg = scheduler_config(config_text, o.threads);

  std::vector<std::pair<std::string, hexsched::Schedule>> items;
  items.emplace_back("ring",
                     hexsched::make_ring_schedule(cluster, work, cfg.quantum));
  items.emplace_back("ulysses",
                     hexsched::make_ulysses_schedule(cluster, work, cfg.quantum));
  for (auto [cp, hp] :
       hexsched::usp_layouts(cluster.num_devices(), work.num_heads)) {
    items.emplace_back(
        "usp_cp" + std::to_string(cp) + "_hp" + std::to_string(hp),
        hexsched::make_usp_schedule(cluster, work, cp, hp, cfg.quantum));
  }

  fs::create_directories(o.out_dir);
  std::string csv = "name," + hexsched::breakdown_csv_header() + "\n";
  std::vector<std::string> outputs;
  for (const auto &[name, sched] : items) {
    write_file(o.out_dir + "/" + name + ".json",
               hexsched::save_schedule(sched, cluster));
    outputs.push_back(name + ".json");
    hexsched::CostBreakdown bd = hexsched::iteration_latency(cluster, work, sched);
    csv += name + "," +
           hexsched::breakdown_csv_row(hexsched::schedule_id(sched, cluster), bd) +
           "\n";
  }
  write_file(o.out_dir + "/baselines.csv", csv);
  outputs.push_back("baselines.csv");
  std::cout << csv;
  write_manifest(o.out_dir, "baselines", inputs,
                 json::parse(hexsched::scheduler_config_json(cfg)), outputs,
                 timer.seconds());
  return 0;
}

int cmd_compare(const Options &o) {
  Timer timer;
  Inputs inputs;
  std::string config_text;
  if (!o.config_file.empty()) {
    config_text = read_file(o.config_file);
    inputs.emplace_back(o.config_file, config_text);
  }
  hexsched::DeviceTable table = config_text.empty()
                                    ? hexsched::default_device_table()
                                    : hexsched::device_table_from_config(config_text);
  hexsched::SchedulerConfig cfg = scheduler_config(config_text, o.threads);
  json snapshot = json::parse(hexsched::scheduler_config_json(cfg));

  hexsched::ComparisonReport rep;
  // The cluster a row's schedule belongs to (FLOP-equivalent pairs evaluate
  // baselines on the homogeneous twin).
  const hexsched::ClusterSpec *het_cluster = nullptr;
  const hexsched::ClusterSpec *base_cluster = nullptr;
  hexsched::Scenario scenario;
  hexsched::ClusterSpec file_cluster;

  if (!o.preset.empty()) {
    if (!o.cluster_file.empty() || !o.workload_file.empty()) {
      throw hexsched::ValidationError(
          "compare: use --preset or --cluster/--workload, not both");
    }
    scenario = hexsched::make_preset(o.preset, table);
    snapshot["preset"] = o.preset;
    if (scenario.flop_equivalent) {
      if (!o.sweep.empty()) {
        hexsched::log_warn("compare: --sweep ignored for FLOP-equivalent presets");
      }
      snapshot["sweep"] = {scenario.work.L_tot};
      rep = hexsched::run_flop_equivalent(scenario.cluster, scenario.homo_cluster,
                                          scenario.work, cfg, scenario.label);
      het_cluster = &scenario.cluster;
      base_cluster = &scenario.homo_cluster;
    } else {
      hexsched::ExperimentSpec spec;
      spec.cluster = scenario.cluster;
      spec.work = scenario.work;
      spec.sweep = o.sweep.empty() ? scenario.sweep : o.sweep;
      spec.label = scenario.label;
      snapshot["sweep"] = spec.sweep;
      rep = hexsched::run_comparison(spec, cfg);
      het_cluster = base_cluster = &scenario.cluster;
    }
  } else {
    if (o.cluster_file.empty() || o.workload_file.empty()) {
      throw hexsched::ValidationError(
          "compare: --preset or both --cluster and --workload are required");
    }
    std::string cluster_text = read_file(o.cluster_file);
    std::string workload_text = read_file(o.workload_file);
    inputs.emplace_back(o.cluster_file, cluster_text);
    inputs.emplace_back(o.workload_file, workload_text);
    file_cluster = hexsched::load_cluster(cluster_text);
    hexsched::WorkloadSpec work = hexsched::load_workload(workload_text);
    hexsched::ExperimentSpec spec;
    spec.cluster = file_cluster;
    spec.work = work;
    spec.sweep = o.sweep.empty() ? std::vector<int64_t>{work.L_tot} : o.sweep;
    spec.label = "custom";
    snapshot["sweep"] = spec.sweep;
    rep = hexsched::run_comparison(spec, cfg);
    het_cluster = base_cluster = &file_cluster;
  }

  fs::create_directories(o.out_dir + "/schedules");
  std::vector<std::string> outputs = {"report.csv"};
  for (const hexsched::ReportRow &row : rep.rows) {
    if (!row.has_schedule) {
      continue;
    }
    const hexsched::ClusterSpec &c =
        row.method == "hexiseq" ? *het_cluster : *base_cluster;
    write_file(o.out_dir + "/" + row.schedule_file,
               hexsched::save_schedule(row.sched, c));
    outputs.push_back(row.schedule_file);
  }
  std::string csv = hexsched::report_csv(rep);
  write_file(o.out_dir + "/report.csv", csv);
  std::cout << csv;
  write_manifest(o.out_dir, "compare", inputs, snapshot, outputs, timer.seconds());
  return 0;
}

int cmd_oracle(const Options &o) {
  Timer timer;
  Inputs inputs;
  inputs.emplace_back(o.cluster_file, read_file(o.cluster_file));
  inputs.emplace_back(o.workload_file, read_file(o.workload_file));
  hexsched::ClusterSpec cluster = hexsched::load_cluster(inputs[0].second);
  hexsched::WorkloadSpec work = hexsched::load_workload(inputs[1].second);
  hexsched::OracleConfig ocfg;
  if (!o.config_file.empty()) {
    std::string config_text = read_file(o.config_file);
    inputs.emplace_back(o.config_file, config_text);
    ocfg = hexsched::load_oracle_config(config_text);
  }

  hexsched::OracleResult r = hexsched::exhaustive_search(cluster, work, ocfg);

  fs::create_directories(o.out_dir);
  std::string best_text = hexsched::save_schedule(r.best, cluster);
  write_file(o.out_dir + "/best_schedule.json", best_text);
  std::vector<std::string> outputs = {"best_schedule.json"};
  std::string csv = "rank,block_s,schedule_file\n";
  for (size_t i = 0; i < r.top.size(); ++i) {
    std::string name = "oracle_top_" + std::to_string(i + 1) + ".json";
    write_file(o.out_dir + "/" + name,
               hexsched::save_schedule(r.top[i].sched, cluster));
    outputs.push_back(name);
    csv += std::to_string(i + 1) + "," + format_double(r.top[i].block_s) + "," +
           name + "\n";
  }
  write_file(o.out_dir + "/top10.csv", csv);
  outputs.push_back("top10.csv");

  json snapshot;
  snapshot["max_devices"] = ocfg.max_devices;
  snapshot["quantum"] = ocfg.resolved_quantum(work.L_tot);
  snapshot["head_step"] = ocfg.head_step;
  snapshot["state_cap"] = ocfg.state_cap;
  write_manifest(o.out_dir, "oracle", inputs, snapshot, outputs, timer.seconds());

  std::cout << best_text << "evaluated " << r.evaluated << " schedules, "
            << r.feasible_count << " feasible, best block_s "
            << format_double(r.breakdown.block_s) << "\n";
  return 0;
}

int cmd_bench(const Options &o) {
  Timer timer;
  Inputs inputs;
  std::string config_text;
  if (!o.config_file.empty()) {
    config_text = read_file(o.config_file);
    inputs.emplace_back(o.config_file, config_text);
  }
  hexsched::DeviceTable table = config_text.empty()
                                    ? hexsched::default_device_table()
                                    : hexsched::device_table_from_config(config_text);
  hexsched::SchedulerConfig cfg = scheduler_config(config_text, o.threads);

  std::vector<hexsched::BenchRow> rows =
      hexsched::bench_scheduler_runtime(o.sizes, table, cfg);
  std::string csv = hexsched::bench_csv(rows);
  std::cout << csv;
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_file(o.out_dir + "/runtime.csv", csv);
    json snapshot = json::parse(hexsched::scheduler_config_json(cfg));
    snapshot["sizes"] = o.sizes;
    write_manifest(o.out_dir, "bench", inputs, snapshot, {"runtime.csv"},
                   timer.seconds());
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Asymmetric context/head-parallel schedule planner and "
               "analytical cost model for heterogeneous clusters"};
  app.set_version_flag("--version", std::string(hexsched::kVersion));
  app.require_subcommand(1);

  Options o;
  auto add_seed = [&](CLI::App *cmd) {
    cmd->add_option("--seed", o.seed,
                    "reserved; the engine is deterministic");
  };

  CLI::App *plan = app.add_subcommand("plan", "Plan a schedule");
  plan->add_option("--cluster", o.cluster_file, "cluster spec JSON")->required();
  plan->add_option("--workload", o.workload_file, "workload spec JSON")->required();
  plan->add_option("--config", o.config_file, "planner config JSON");
  plan->add_option("--out", o.out_dir, "output directory")->required();
  plan->add_option("--threads", o.threads, "worker threads (overrides config)");
  add_seed(plan);

  CLI::App *evaluate = app.add_subcommand("evaluate", "Evaluate a schedule file");
  evaluate->add_option("--cluster", o.cluster_file, "cluster spec JSON")->required();
  evaluate->add_option("--workload", o.workload_file, "workload spec JSON")->required();
  evaluate->add_option("--schedule", o.schedule_file, "schedule JSON")->required();
  evaluate->add_option("--out", o.out_dir, "optional output directory");
  add_seed(evaluate);

  CLI::App *baselines =
      app.add_subcommand("baselines", "Emit the symmetric baseline schedules");
  baselines->add_option("--cluster", o.cluster_file, "cluster spec JSON")->required();
  baselines->add_option("--workload", o.workload_file, "workload spec JSON")->required();
  baselines->add_option("--config", o.config_file, "planner config JSON");
  baselines->add_option("--out", o.out_dir, "output directory")->required();
  baselines->add_option("--threads", o.threads, "worker threads");
  add_seed(baselines);

  CLI::App *compare =
      app.add_subcommand("compare", "Planner vs. baselines across a sweep");
  compare->add_option("--cluster", o.cluster_file, "cluster spec JSON");
  compare->add_option("--workload", o.workload_file, "workload spec JSON");
  compare->add_option("--preset", o.preset,
                      "built-in scenario (case_study, sim1..sim5)");
  compare->add_option("--sweep", o.sweep, "context lengths, e.g. 16384,32768")
      ->delimiter(',');
  compare->add_option("--config", o.config_file, "planner config JSON");
  compare->add_option("--out", o.out_dir, "output directory")->required();
  compare->add_option("--threads", o.threads, "worker threads (overrides config)");
  add_seed(compare);

  CLI::App *oracle =
      app.add_subcommand("oracle", "Exhaustive search on a tiny instance");
  oracle->add_option("--cluster", o.cluster_file, "cluster spec JSON")->required();
  oracle->add_option("--workload", o.workload_file, "workload spec JSON")->required();
  oracle->add_option("--config", o.config_file, "oracle config JSON");
  oracle->add_option("--out", o.out_dir, "output directory")->required();
  add_seed(oracle);

  CLI::App *bench =
      app.add_subcommand("bench", "Wall-clock the planner on synthetic clusters");
  bench->add_option("--sizes", o.sizes, "device counts, ascending, e.g. 32,64,128")
      ->delimiter(',')
      ->required();
  bench->add_option("--config", o.config_file, "planner config JSON");
  bench->add_option("--out", o.out_dir, "optional output directory");
  bench->add_option("--threads", o.threads, "worker threads (overrides config)");
  add_seed(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(plan)) {
      return cmd_plan(o);
    }
    if (app.got_subcommand(evaluate)) {
      return cmd_evaluate(o);
    }
    if (app.got_subcommand(baselines)) {
      return cmd_baselines(o);
    }
    if (app.got_subcommand(compare)) {
      return cmd_compare(o);
    }
    if (app.got_subcommand(oracle)) {
      return cmd_oracle(o);
    }
    if (app.got_subcommand(bench)) {
      return cmd_bench(o);
    }
  } catch (const hexsched::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hexsched::ValidationError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hexsched::InfeasibleError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
