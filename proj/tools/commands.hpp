#pragma once

// Pipeline commands behind the `casetl` CLI. Each command reads its inputs,
// writes its artifacts under an output directory, and returns an exit code.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casetl/llm_client.hpp"
#include "casetl/temporal_metrics.hpp"

namespace casetl::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitBackend = 4,
};

// Failure that maps directly onto a process exit code.
class CommandError : public std::runtime_error {
 public:
  CommandError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

struct BackendOptions {
  std::optional<std::filesystem::path> mock_dir;  // replay instead of HTTP
  LlmRequestConfig llm;
  bool temperature_set = false;
};

struct FilterConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path out_dir;
  std::string template_name = "case_count";
  std::optional<std::filesystem::path> template_file;
  BackendOptions backend;
  std::size_t concurrency = 4;
  bool case_sensitive = false;
  bool strict_count = false;
};

struct ExtractConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> accepted_file;
  bool all_documents = false;
  std::vector<std::string> tasks = {"timeline", "demographics", "diagnoses"};
  std::string timeline_template = "timeline";
  std::optional<std::filesystem::path> timeline_template_file;
  std::optional<std::filesystem::path> demographics_template_file;
  std::optional<std::filesystem::path> diagnoses_template_file;
  BackendOptions backend;
  std::size_t concurrency = 4;
  bool skip_existing = false;
};

struct EvaluateConfig {
  std::filesystem::path ref_dir;
  std::filesystem::path pred_dir;
  std::filesystem::path out_dir;
  std::string metric = "edit";  // edit | embedding
  std::string embed_url;
  double tau = kDefaultTau;
  double s_max = kDefaultSmaxHours;
  std::vector<double> sweep_taus = DefaultSweepTaus();
  std::size_t concurrency = 4;
  // Provenance of the predictions, recorded in every report.
  std::string model = "unspecified";
  std::string template_name = "unspecified";
};

struct StatsConfig {
  std::filesystem::path timelines_dir;
  std::optional<std::filesystem::path> demographics_dir;
  std::optional<std::filesystem::path> diagnoses_dir;
  std::filesystem::path out_file;
};

struct BenchConfig {
  std::filesystem::path labels_csv;
  std::filesystem::path decisions_jsonl;
  std::filesystem::path out_file;
};

// Each command logs progress and warnings to `log` and throws CommandError
// for fatal conditions.
int RunFilter(const FilterConfig& config, std::ostream& log);
int RunExtract(const ExtractConfig& config, std::ostream& log);
int RunEvaluate(const EvaluateConfig& config, std::ostream& log);
int RunSweep(const EvaluateConfig& config, std::ostream& log);
int RunStats(const StatsConfig& config, std::ostream& log);
int RunBenchId(const BenchConfig& config, std::ostream& log);

// "0.01:0.25:0.01" or "0.05,0.1,0.2".
std::vector<double> ParseTauGrid(const std::string& spec);

}  // namespace casetl::cli
