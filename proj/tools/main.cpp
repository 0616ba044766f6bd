#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "casetl/error.hpp"
#include "commands.hpp"

namespace cli = casetl::cli;

namespace {

void AddBackendOptions(CLI::App* cmd, cli::BackendOptions& backend, std::string& mock_dir) {
  cmd->add_option("--mock-backend", mock_dir,
                  "Replay canned replies from <dir>/<task>/<case_id>.txt instead of calling an LLM");
  cmd->add_option("--llm-endpoint", backend.llm.endpoint,
                  "Chat-completions URL (default: $LLM_ENDPOINT)");
  cmd->add_option("--model", backend.llm.model, "Model name sent to the endpoint");
  cmd->add_option("--temperature", backend.llm.temperature,
                  "Sampling temperature (default 0.6 for deepseek models, else 0.7)")
      ->check(CLI::Range(0.0, 2.0))
      ->each([&](const std::string&) { backend.temperature_set = true; });
  cmd->add_option("--max-retries", backend.llm.max_retries, "Retries for retriable failures")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--timeout", backend.llm.timeout_seconds, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber);
}

void FinalizeBackend(cli::BackendOptions& backend, const std::string& mock_dir) {
  if (!mock_dir.empty()) backend.mock_dir = mock_dir;
  if (backend.llm.endpoint.empty()) {
    if (const char* env = std::getenv("LLM_ENDPOINT")) backend.llm.endpoint = env;
  }
  if (const char* key = std::getenv("LLM_API_KEY")) backend.llm.api_key = key;
  if (!backend.temperature_set) {
    backend.llm.temperature = casetl::DefaultTemperature(backend.llm.model);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"casetl: case report timeline extraction and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("casetl 0.1.0"));

  // filter
  cli::FilterConfig filter;
  std::string filter_mock;
  std::string filter_template_file;
  auto* filter_cmd = app.add_subcommand("filter", "Select single case reports from a corpus");
  filter_cmd->add_option("--corpus", filter.corpus_dir, "Directory of article text files")
      ->required()
      ->check(CLI::ExistingDirectory);
  filter_cmd->add_option("--out", filter.out_dir, "Output directory")->required();
  filter_cmd->add_option("--template", filter.template_name, "Built-in case-count template");
  filter_cmd->add_option("--template-file", filter_template_file, "Case-count template file")
      ->check(CLI::ExistingFile);
  filter_cmd->add_option("-j,--concurrency", filter.concurrency, "Requests in flight")
      ->check(CLI::PositiveNumber);
  filter_cmd->add_flag("--case-sensitive", filter.case_sensitive,
                       "Match the screening patterns case-sensitively");
  filter_cmd->add_flag("--strict-count", filter.strict_count,
                       "Treat replies that are not a bare integer as undecided");
  AddBackendOptions(filter_cmd, filter.backend, filter_mock);

  // extract
  cli::ExtractConfig extract;
  std::string extract_mock;
  std::string accepted_file;
  std::string timeline_file;
  std::string demographics_file;
  std::string diagnoses_file;
  auto* extract_cmd = app.add_subcommand("extract", "Extract timelines, demographics, diagnoses");
  extract_cmd->add_option("--corpus", extract.corpus_dir, "Directory of article text files")
      ->required()
      ->check(CLI::ExistingDirectory);
  extract_cmd->add_option("--out", extract.out_dir, "Output directory")->required();
  auto* accepted_opt =
      extract_cmd->add_option("--accepted", accepted_file, "accepted.txt written by filter")
          ->check(CLI::ExistingFile);
  auto* all_opt = extract_cmd->add_flag("--all", extract.all_documents, "Use every document");
  accepted_opt->excludes(all_opt);
  extract_cmd->add_option("--tasks", extract.tasks, "Subset of timeline,demographics,diagnoses")
      ->delimiter(',');
  extract_cmd->add_option("--timeline-template", extract.timeline_template,
                          "Built-in timeline template name");
  extract_cmd->add_option("--timeline-template-file", timeline_file)->check(CLI::ExistingFile);
  extract_cmd->add_option("--demographics-template-file", demographics_file)
      ->check(CLI::ExistingFile);
  extract_cmd->add_option("--diagnoses-template-file", diagnoses_file)->check(CLI::ExistingFile);
  extract_cmd->add_option("-j,--concurrency", extract.concurrency, "Requests in flight")
      ->check(CLI::PositiveNumber);
  extract_cmd->add_flag("--skip-existing", extract.skip_existing,
                        "Keep outputs that already exist from an earlier run");
  AddBackendOptions(extract_cmd, extract.backend, extract_mock);

  // evaluate and sweep share their options
  cli::EvaluateConfig evaluate;
  std::string tau_grid;
  auto add_eval_options = [&](CLI::App* cmd) {
    cmd->add_option("--ref", evaluate.ref_dir, "Reference annotation directory (*.bsv)")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--pred", evaluate.pred_dir, "Predicted timeline directory (*.bsv)")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--out", evaluate.out_dir, "Output directory")->required();
    cmd->add_option("--metric", evaluate.metric, "edit | embedding")
        ->check(CLI::IsMember({"edit", "embedding"}));
    cmd->add_option("--embed-url", evaluate.embed_url, "Embedding service URL (default: $EMBED_URL)");
    cmd->add_option("--tau", evaluate.tau, "Match threshold")->check(CLI::NonNegativeNumber);
    cmd->add_option("--s-max", evaluate.s_max, "Clipping bound in hours")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--taus", tau_grid, "Sweep grid, start:stop:step or a comma list");
    cmd->add_option("-j,--concurrency", evaluate.concurrency, "Cases evaluated in parallel")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--model", evaluate.model, "Model that produced the predictions");
    cmd->add_option("--template", evaluate.template_name, "Template that produced the predictions");
  };
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predicted timelines");
  add_eval_options(evaluate_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "Metrics across a grid of match thresholds");
  add_eval_options(sweep_cmd);

  // stats
  cli::StatsConfig stats;
  std::string stats_demo;
  std::string stats_diag;
  auto* stats_cmd = app.add_subcommand("stats", "Descriptive statistics of a dataset");
  stats_cmd->add_option("--timelines", stats.timelines_dir, "Timeline directory (*.bsv)")
      ->required()
      ->check(CLI::ExistingDirectory);
  stats_cmd->add_option("--demographics", stats_demo, "Demographics directory (*.bsv)")
      ->check(CLI::ExistingDirectory);
  stats_cmd->add_option("--diagnoses", stats_diag, "Diagnoses directory (*.txt)")
      ->check(CLI::ExistingDirectory);
  stats_cmd->add_option("--out", stats.out_file, "Output JSON file")->required();

  // bench-id
  cli::BenchConfig bench;
  auto* bench_cmd = app.add_subcommand("bench-id", "Score filter decisions against labels");
  bench_cmd->add_option("--labels", bench.labels_csv, "CSV case_id,diagnosis,label")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--decisions", bench.decisions_jsonl, "filter_decisions.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench.out_file, "Output JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (filter_cmd->parsed()) {
      FinalizeBackend(filter.backend, filter_mock);
      if (!filter_template_file.empty()) filter.template_file = filter_template_file;
      return cli::RunFilter(filter, std::cerr);
    }
    if (extract_cmd->parsed()) {
      FinalizeBackend(extract.backend, extract_mock);
      if (!accepted_file.empty()) extract.accepted_file = accepted_file;
      if (!timeline_file.empty()) extract.timeline_template_file = timeline_file;
      if (!demographics_file.empty()) extract.demographics_template_file = demographics_file;
      if (!diagnoses_file.empty()) extract.diagnoses_template_file = diagnoses_file;
      return cli::RunExtract(extract, std::cerr);
    }
    if (evaluate_cmd->parsed() || sweep_cmd->parsed()) {
      if (!tau_grid.empty()) evaluate.sweep_taus = cli::ParseTauGrid(tau_grid);
      return evaluate_cmd->parsed() ? cli::RunEvaluate(evaluate, std::cerr)
                                    : cli::RunSweep(evaluate, std::cerr);
    }
    if (stats_cmd->parsed()) {
      if (!stats_demo.empty()) stats.demographics_dir = stats_demo;
      if (!stats_diag.empty()) stats.diagnoses_dir = stats_diag;
      return cli::RunStats(stats, std::cerr);
    }
    if (bench_cmd->parsed()) return cli::RunBenchId(bench, std::cerr);
  } catch (const cli::CommandError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const casetl::LlmError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitBackend;
  } catch (const casetl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == casetl::ErrorCode::kInvalidArgument ||
                   e.code() == casetl::ErrorCode::kInvalidTemplate
               ? cli::kExitUsage
               : cli::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitData;
  }
  return cli::kExitUsage;
}
