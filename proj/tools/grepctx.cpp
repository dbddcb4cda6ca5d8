// grepctx: index-free lexical retrieval for repository-level code completion.
//
// Subcommands: retrieve (one completion site), eval (task file, retrieval-side
// evaluation), bench (latency over synthetic repos), sweep (hyperparameter
// sweep over repeated evals).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grepctx/bench.hpp"
#include "grepctx/eval.hpp"
#include "grepctx/external_http.hpp"
#include "grepctx/io.hpp"
#include "grepctx/pipeline.hpp"

namespace {

using namespace grepctx;

QueryGenerator make_external_generator(const PipelineConfig& cfg) {
  if (cfg.generator == "heuristic") return {};
  std::string endpoint = cfg.generator;
  return [endpoint](const CompletionTask& task, int m) {
    return fetch_external_queries(endpoint, task, m);
  };
}

PipelineConfig finalize_config(PipelineConfig cfg, const std::string& config_path,
                               const std::string& mode_flag) {
  if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
  if (const char* ep = std::getenv("GREPCTX_GENERATOR_ENDPOINT"); ep && *ep) cfg.generator = ep;
  if (!mode_flag.empty()) cfg.mode = pipeline_mode_from_name(mode_flag);
  return cfg;
}

std::string read_all(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_retrieve(const std::string& repo, const std::string& task_path,
                 const PipelineConfig& cfg) {
  std::string payload;
  if (task_path == "-") {
    payload = read_all(std::cin);
  } else {
    std::ifstream in(task_path);
    if (!in) throw std::runtime_error("cannot open task file: " + task_path);
    payload = read_all(in);
  }
  TaskRecord rec = parse_task_record(nlohmann::json::parse(payload));
  RepoSnapshot snap = scan_repo(repo);
  RetrievalResult res = run_retrieval(snap, rec.task, cfg, make_external_generator(cfg));

  nlohmann::json out = context_pack_json(res.pack);
  out["retrieval_empty"] = res.retrieval_empty;
  out["latency"] = latency_json(res.latency);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_eval(const std::string& repo_root, const std::string& tasks_path,
             const std::string& gold_path, const std::string& predictions_path,
             const std::string& out_prefix, double tau, const PipelineConfig& cfg) {
  auto tasks = load_task_file(tasks_path);
  std::map<std::string, std::vector<GoldEntry>> gold;
  if (!gold_path.empty()) gold = load_gold_file(gold_path);
  std::map<std::string, std::string> predictions;
  if (!predictions_path.empty()) predictions = load_predictions_file(predictions_path);

  EvalRun run = run_eval(repo_root, tasks, cfg, gold, predictions, tau,
                         make_external_generator(cfg));

  std::ofstream results(out_prefix + ".jsonl");
  std::ofstream latency(out_prefix + ".latency.jsonl");
  for (const auto& tr : run.results) {
    results << task_result_json(tr).dump() << "\n";
    latency << latency_json(tr.latency).dump() << "\n";
  }
  std::ofstream summary(out_prefix + ".summary.json");
  summary << summary_json(run.summary).dump(2) << "\n";
  std::cout << summary_json(run.summary).dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::vector<std::uint64_t>& sizes, int reps, const PipelineConfig& cfg) {
  auto rows = run_bench(sizes, cfg, reps);
  std::printf("%12s %12s %14s %16s\n", "repo_lines", "scan_s", "retrieval_s", "querygen_s");
  for (const auto& r : rows)
    std::printf("%12llu %12.4f %14.4f %16.6f\n",
                static_cast<unsigned long long>(r.repo_lines), r.scan_seconds,
                r.mean_retrieval_seconds, r.mean_generation_seconds);
  return 0;
}

int cmd_sweep(const std::string& repo_root, const std::string& tasks_path,
              const std::string& gold_path, const std::string& param,
              const std::vector<double>& values, double tau, const PipelineConfig& cfg) {
  auto tasks = load_task_file(tasks_path);
  std::map<std::string, std::vector<GoldEntry>> gold;
  if (!gold_path.empty()) gold = load_gold_file(gold_path);
  auto rows = run_sweep(repo_root, tasks, cfg, sweep_param_from_name(param), values, gold, tau);
  for (const auto& row : rows) {
    nlohmann::json j = {{"param", param}, {"value", row.value}, {"summary", summary_json(row.summary)}};
    std::cout << j.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grepctx: index-free lexical retrieval for repository-level code completion"};
  app.require_subcommand(1);

  std::string config_path, mode_flag;
  app.add_option("--config", config_path, "key = value config file (keys mirror PipelineConfig)")
      ->capture_default_str();

  auto* retrieve = app.add_subcommand("retrieve", "run retrieval for one completion site");
  std::string repo, task_path;
  retrieve->add_option("--repo", repo, "repository directory")->required();
  retrieve->add_option("--task", task_path, "task JSON file, or - for stdin")->required();
  retrieve->add_option("--mode", mode_flag, "naive | full");

  auto* eval = app.add_subcommand("eval", "evaluate retrieval over a task file");
  std::string repo_root, tasks_path, gold_path, predictions_path, out_prefix = "results";
  double tau = 0.8;
  eval->add_option("--repo-root", repo_root, "root containing task repositories")->required();
  eval->add_option("--tasks", tasks_path, "task JSONL file")->required();
  eval->add_option("--gold", gold_path, "golden-context JSONL file");
  eval->add_option("--predictions", predictions_path, "predictions JSONL file");
  eval->add_option("--out", out_prefix, "output prefix (.jsonl/.latency.jsonl/.summary.json)");
  eval->add_option("--tau", tau, "coverage threshold");
  eval->add_option("--mode", mode_flag, "naive | full");

  auto* bench = app.add_subcommand("bench", "latency benchmark on synthetic repos");
  std::vector<std::uint64_t> sizes;
  int reps = 3;
  bench->add_option("--sizes", sizes, "repo sizes in lines of code")->required()->delimiter(',');
  bench->add_option("--reps", reps, "repetitions per size");
  bench->add_option("--mode", mode_flag, "naive | full");

  auto* sweep = app.add_subcommand("sweep", "re-run eval across one parameter");
  std::string param;
  std::vector<double> values;
  sweep->add_option("--repo-root", repo_root, "root containing task repositories")->required();
  sweep->add_option("--tasks", tasks_path, "task JSONL file")->required();
  sweep->add_option("--gold", gold_path, "golden-context JSONL file");
  sweep->add_option("--param", param, "N | tau | K")->required();
  sweep->add_option("--values", values, "parameter values")->required()->delimiter(',');
  sweep->add_option("--tau", tau, "coverage threshold (when not swept)");
  sweep->add_option("--mode", mode_flag, "naive | full");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = finalize_config({}, config_path, mode_flag);
    if (retrieve->parsed()) return cmd_retrieve(repo, task_path, cfg);
    if (eval->parsed()) return cmd_eval(repo_root, tasks_path, gold_path, predictions_path,
                                        out_prefix, tau, cfg);
    if (bench->parsed()) return cmd_bench(sizes, reps, cfg);
    if (sweep->parsed()) return cmd_sweep(repo_root, tasks_path, gold_path, param, values, tau, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
