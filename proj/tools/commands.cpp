#include "commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "casetl/alignment.hpp"
#include "casetl/corpus_filter.hpp"
#include "casetl/corpus_model.hpp"
#include "casetl/evaluation.hpp"
#include "casetl/extraction.hpp"
#include "casetl/parallel.hpp"
#include "json.hpp"

namespace casetl::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<fs::path> ListFiles(const fs::path& dir, std::string_view extension = {}) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw CommandError(kExitData, "not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.filename().string().starts_with('.')) continue;
    if (!extension.empty() && p.extension() != extension) continue;
    files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError(kExitData, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void WriteFile(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw CommandError(kExitData, "cannot write " + path.string());
}

std::string FormatReal(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

json Number(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

std::string Csv(const std::optional<double>& value) {
  return value ? FormatReal(*value) : "NA";
}

std::unique_ptr<LlmClient> MakeClient(const BackendOptions& options) {
  if (options.mock_dir) return std::make_unique<ReplayLlmClient>(*options.mock_dir);
  if (options.llm.endpoint.empty()) {
    throw CommandError(kExitUsage,
                       "no LLM backend: pass --llm-endpoint (or set LLM_ENDPOINT) or --mock-backend");
  }
  try {
    return std::make_unique<HttpLlmClient>(options.llm);
  } catch (const Error& e) {
    throw CommandError(kExitUsage, e.what());
  }
}

json BackendJson(const BackendOptions& options) {
  json j;
  if (options.mock_dir) {
    j["backend"] = "replay";
    j["mock_dir"] = options.mock_dir->generic_string();
  } else {
    j["backend"] = "http";
    j["endpoint"] = options.llm.endpoint;
  }
  j["model"] = options.llm.model;
  j["temperature"] = options.llm.temperature;
  j["max_retries"] = options.llm.max_retries;
  j["timeout_seconds"] = options.llm.timeout_seconds;
  return j;
}

PromptTemplate ResolveTemplate(const std::string& name, const std::optional<fs::path>& file) {
  try {
    return file ? LoadTemplateFile(*file) : BuiltinTemplate(name);
  } catch (const Error& e) {
    throw CommandError(kExitUsage, e.what());
  }
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::vector<double> ParseTauGrid(const std::string& spec) {
  auto number = [&](std::string_view s) {
    std::optional<double> v = ParseHours(s);
    if (!v || *v < 0.0) throw CommandError(kExitUsage, "bad tau value '" + std::string(s) + "'");
    return *v;
  };
  std::vector<double> taus;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw CommandError(kExitUsage, "tau grid must be start:stop:step");
    double start = number(parts[0]);
    double stop = number(parts[1]);
    double step = number(parts[2]);
    if (step <= 0.0 || stop < start) throw CommandError(kExitUsage, "bad tau grid " + spec);
    auto steps = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= steps; ++i) {
      // Round to 12 digits so 0.01 * 7 prints as 0.07.
      double tau = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
      taus.push_back(tau);
    }
  } else {
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) taus.push_back(number(part));
  }
  if (taus.empty()) throw CommandError(kExitUsage, "empty tau grid");
  return taus;
}

// ---------------------------------------------------------------- filter

int RunFilter(const FilterConfig& config, std::ostream& log) {
  PromptTemplate prompt = ResolveTemplate(config.template_name, config.template_file);
  auto client = MakeClient(config.backend);
  auto files = ListFiles(config.corpus_dir);
  FilterOptions options{config.case_sensitive, config.strict_count};

  std::vector<FilterDecision> decisions(files.size());
  ParallelFor(files.size(), config.concurrency, [&](std::size_t i) {
    std::string raw = ReadFile(files[i]);
    CaseDocument doc{files[i].stem().string(), {}};
    try {
      doc.body = ExtractBody(raw);
    } catch (const Error& e) {
      decisions[i].case_id = doc.id;
      decisions[i].status = FilterStatus::kRejectedDocument;
      decisions[i].error = e.what();
      return;
    }
    decisions[i] = DecideCase(doc, prompt, *client, options);
  });
  std::sort(decisions.begin(), decisions.end(),
            [](const auto& a, const auto& b) { return a.case_id < b.case_id; });

  std::map<std::string, std::size_t> counts;
  std::string jsonl;
  std::string accepted;
  std::string undecided;
  std::size_t lenient = 0;
  std::size_t passed = 0;
  for (const auto& d : decisions) {
    ++counts[std::string(ToString(d.status))];
    passed += d.passed_regex ? 1 : 0;
    lenient += d.lenient_parse ? 1 : 0;
    json j;
    j["case_id"] = d.case_id;
    j["status"] = ToString(d.status);
    j["passed_regex"] = d.passed_regex;
    j["llm_case_count"] = d.llm_case_count ? json(*d.llm_case_count) : json(nullptr);
    j["lenient_parse"] = d.lenient_parse;
    j["accepted"] = d.accepted;
    if (!d.error.empty()) j["error"] = d.error;
    jsonl += j.dump() + "\n";
    if (d.accepted) accepted += d.case_id + "\n";
    if (d.status == FilterStatus::kUndecided) undecided += d.case_id + "\n";
  }
  WriteFile(config.out_dir / "filter_decisions.jsonl", jsonl);
  WriteFile(config.out_dir / "accepted.txt", accepted);
  WriteFile(config.out_dir / "undecided.txt", undecided);

  auto count = [&](FilterStatus s) { return counts[std::string(ToString(s))]; };
  json summary;
  summary["config"] = {
      {"command", "filter"},
      {"template", prompt.name()},
      {"case_sensitive", config.case_sensitive},
      {"strict_count", config.strict_count},
      {"concurrency", config.concurrency},
      {"llm", BackendJson(config.backend)},
  };
  summary["counts"] = {
      {"documents", decisions.size()},
      {"rejected_document", count(FilterStatus::kRejectedDocument)},
      {"screened", decisions.size() - count(FilterStatus::kRejectedDocument)},
      {"passed_regex", passed},
      {"accepted", count(FilterStatus::kAccepted)},
      {"rejected_count", count(FilterStatus::kRejectedCount)},
      {"undecided", count(FilterStatus::kUndecided)},
      {"lenient_replies", lenient},
  };
  WriteFile(config.out_dir / "filter_summary.json", Dump(summary));

  log << "filter: " << decisions.size() << " documents, " << passed << " passed regex, "
      << count(FilterStatus::kAccepted) << " accepted, " << count(FilterStatus::kUndecided)
      << " undecided\n";
  if (count(FilterStatus::kUndecided) > 0) {
    log << "warning: " << count(FilterStatus::kUndecided)
        << " documents undecided (backend failure or unparseable reply); see undecided.txt\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- extract

namespace {

struct TaskOutcome {
  std::string task;
  std::string status = "ok";  // ok | failed | skipped
  std::string error;
  json details;
};

std::vector<std::string> ReadIdList(const fs::path& path) {
  std::vector<std::string> ids;
  std::istringstream in(ReadFile(path));
  for (std::string line; std::getline(in, line);) {
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t\r");
    ids.push_back(line.substr(begin, end - begin + 1));
  }
  return ids;
}

}  // namespace

int RunExtract(const ExtractConfig& config, std::ostream& log) {
  static const std::set<std::string> kKnownTasks = {"timeline", "demographics", "diagnoses"};
  for (const auto& t : config.tasks) {
    if (!kKnownTasks.contains(t)) throw CommandError(kExitUsage, "unknown task '" + t + "'");
  }
  if (!config.accepted_file && !config.all_documents) {
    throw CommandError(kExitUsage, "pass --accepted <file> (from filter) or --all");
  }
  PromptTemplate timeline_prompt =
      ResolveTemplate(config.timeline_template, config.timeline_template_file);
  PromptTemplate demographics_prompt =
      ResolveTemplate("demographics", config.demographics_template_file);
  PromptTemplate diagnoses_prompt = ResolveTemplate("diagnoses", config.diagnoses_template_file);
  auto client = MakeClient(config.backend);

  std::map<std::string, fs::path> corpus;
  for (const auto& p : ListFiles(config.corpus_dir)) corpus.emplace(p.stem().string(), p);
  std::vector<std::string> ids;
  if (config.accepted_file) {
    ids = ReadIdList(*config.accepted_file);
  } else {
    for (const auto& [id, path] : corpus) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  const fs::path out = config.out_dir;
  std::vector<std::vector<TaskOutcome>> outcomes(ids.size());

  ParallelFor(ids.size(), config.concurrency, [&](std::size_t i) {
    const std::string& id = ids[i];
    auto fail_all = [&](const std::string& error) {
      for (const auto& task : config.tasks) outcomes[i].push_back({task, "failed", error, {}});
    };
    auto it = corpus.find(id);
    if (it == corpus.end()) return fail_all("document not found in corpus");
    CaseDocument doc{id, {}};
    try {
      doc.body = ExtractBody(ReadFile(it->second));
    } catch (const Error& e) {
      return fail_all(e.what());
    }

    for (const auto& task : config.tasks) {
      TaskOutcome outcome{task, "ok", {}, json::object()};
      fs::path target = task == "timeline"       ? out / "timelines" / (id + ".bsv")
                        : task == "demographics" ? out / "demographics" / (id + ".bsv")
                                                 : out / "diagnoses" / (id + ".txt");
      if (config.skip_existing && fs::exists(target)) {
        outcome.status = "skipped";
        outcomes[i].push_back(std::move(outcome));
        continue;
      }
      fs::path raw_path = out / "raw" / task / (id + ".txt");
      try {
        if (task == "timeline") {
          TimelineExtraction x = ExtractTimeline(doc, timeline_prompt, *client);
          WriteFile(raw_path, x.raw_reply);
          WriteFile(target, SerializeTimeline(x.timeline) + "\n");
          outcome.details = {{"events", x.timeline.events.size()},
                             {"skipped_lines", x.skipped_lines},
                             {"source_lines", x.source_lines}};
        } else if (task == "demographics") {
          DemographicsExtraction x = ExtractDemographics(doc, demographics_prompt, *client);
          WriteFile(raw_path, x.raw_reply);
          WriteFile(target, SerializeDemographics(x.record) + "\n");
        } else {
          DiagnosesExtraction x = ExtractDiagnoses(doc, diagnoses_prompt, *client);
          WriteFile(raw_path, x.raw_reply);
          WriteFile(target, SerializeDiagnoses(x.list));
          outcome.details = {{"diagnoses", x.list.diagnoses.size()}};
        }
      } catch (const ExtractionError& e) {
        WriteFile(raw_path, e.raw_reply());
        outcome.status = "failed";
        outcome.error = e.what();
      } catch (const Error& e) {
        outcome.status = "failed";
        outcome.error = e.what();
      }
      outcomes[i].push_back(std::move(outcome));
    }
  });

  json manifest;
  manifest["config"] = {
      {"command", "extract"},
      {"tasks", config.tasks},
      {"timeline_template", timeline_prompt.name()},
      {"demographics_template", demographics_prompt.name()},
      {"diagnoses_template", diagnoses_prompt.name()},
      {"concurrency", config.concurrency},
      {"llm", BackendJson(config.backend)},
  };
  json cases = json::array();
  json failures = json::array();
  std::map<std::string, std::size_t> failed_by_task;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    json c;
    c["case_id"] = ids[i];
    for (const auto& o : outcomes[i]) {
      json t;
      t["status"] = o.status;
      if (!o.error.empty()) t["error"] = o.error;
      for (const auto& [key, value] : o.details.items()) t[key] = value;
      c[o.task] = t;
      if (o.status == "failed") {
        ++failed_by_task[o.task];
        failures.push_back({{"case_id", ids[i]}, {"task", o.task}, {"error", o.error}});
      }
    }
    cases.push_back(c);
  }
  manifest["cases"] = cases;
  WriteFile(out / "extract_manifest.json", Dump(manifest));
  WriteFile(out / "failures.json", Dump(failures));

  log << "extract: " << ids.size() << " cases";
  for (const auto& task : config.tasks) {
    log << ", " << task << " failures " << failed_by_task[task];
  }
  log << "\n";
  if (!failures.empty()) {
    log << "warning: " << failures.size() << " task failures; see failures.json\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

namespace {

struct EvaluationRun {
  EvaluationConfig metrics;
  std::vector<CaseEvaluation> cases;
  CorpusAggregate aggregate;
  std::vector<std::string> only_ref;
  std::vector<std::string> only_pred;
  json config;
};

std::map<std::string, fs::path> ByStem(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& p : ListFiles(dir, ".bsv")) out.emplace(p.stem().string(), p);
  return out;
}

std::unique_ptr<DistanceMetric> MakeMetric(const EvaluateConfig& config, std::string& url) {
  if (config.metric == "edit") return std::make_unique<EditDistanceMetric>();
  if (config.metric != "embedding") {
    throw CommandError(kExitUsage, "unknown metric '" + config.metric + "' (edit | embedding)");
  }
  url = config.embed_url;
  if (url.empty()) {
    if (const char* env = std::getenv("EMBED_URL")) url = env;
  }
  if (url.empty()) {
    throw CommandError(kExitUsage, "embedding metric needs --embed-url or EMBED_URL");
  }
  auto provider = std::make_shared<HttpEmbeddingProvider>(url);
  try {
    provider->CheckHealth();
  } catch (const Error& e) {
    throw CommandError(kExitBackend, e.what());
  }
  return std::make_unique<EmbeddingDistanceMetric>(provider);
}

EvaluationRun Evaluate(const EvaluateConfig& config, const char* command) {
  if (!(config.tau >= 0.0)) throw CommandError(kExitUsage, "--tau must be >= 0");
  if (!(config.s_max > 0.0)) throw CommandError(kExitUsage, "--s-max must be > 0");
  if (config.sweep_taus.empty()) throw CommandError(kExitUsage, "empty tau grid");

  auto ref = ByStem(config.ref_dir);
  auto pred = ByStem(config.pred_dir);
  EvaluationRun run;
  std::vector<std::string> overlap;
  for (const auto& [id, path] : ref) {
    if (pred.contains(id)) {
      overlap.push_back(id);
    } else {
      run.only_ref.push_back(id);
    }
  }
  for (const auto& [id, path] : pred) {
    if (!ref.contains(id)) run.only_pred.push_back(id);
  }
  if (overlap.empty()) {
    throw CommandError(kExitData, "no case ids in common between " + config.ref_dir.string() +
                                      " and " + config.pred_dir.string());
  }

  std::string url;
  auto metric = MakeMetric(config, url);
  run.metrics.tau = config.tau;
  run.metrics.s_max = config.s_max;
  run.metrics.sweep_taus = config.sweep_taus;

  run.cases.resize(overlap.size());
  try {
    ParallelFor(overlap.size(), config.concurrency, [&](std::size_t i) {
      const std::string& id = overlap[i];
      ParsedTimeline r = ParseTimelineLines(ReadFile(ref.at(id)));
      ParsedTimeline p = ParseTimelineLines(ReadFile(pred.at(id)));
      run.cases[i] = EvaluateCase(id, r, p, *metric, run.metrics);
    });
  } catch (const Error& e) {
    int code = config.metric == "embedding" && e.code() == ErrorCode::kIo ? kExitBackend : kExitData;
    throw CommandError(code, e.what());
  }
  run.aggregate = Aggregate(run.cases, run.metrics);

  json taus = json::array();
  for (double t : config.sweep_taus) taus.push_back(t);
  run.config = {
      {"command", command},
      {"reference_dir", config.ref_dir.generic_string()},
      {"prediction_dir", config.pred_dir.generic_string()},
      {"metric", metric->name()},
      {"tau", config.tau},
      {"s_max", config.s_max},
      {"time_unit", "hours"},
      {"log_base", "e"},
      {"sweep_taus", taus},
      {"model", config.model},
      {"template", config.template_name},
  };
  if (!url.empty()) run.config["embed_url"] = url;
  return run;
}

json StrataJson(const std::vector<StratumResult>& strata) {
  json out = json::array();
  for (const auto& s : strata) {
    out.push_back({
        {"bucket", s.label},
        {"upper_bound_hours", std::isinf(s.upper_bound_hours) ? json(nullptr)
                                                              : json(s.upper_bound_hours)},
        {"n", s.discrepancies.size()},
        {"aultc", Number(s.aultc)},
        {"median_abs_error_hours", Number(s.median_abs_error_hours)},
        {"median_log_discrepancy", Number(s.median_log_discrepancy)},
    });
  }
  return out;
}

json SummaryJson(const Summary& s, const std::optional<double>& pooled) {
  return {{"n_defined", s.n_defined},
          {"mean", Number(s.mean)},
          {"median", Number(s.median)},
          {"pooled", Number(pooled)}};
}

json SweepJson(const std::vector<AggregateSweepPoint>& sweep) {
  json out = json::array();
  for (const auto& p : sweep) {
    out.push_back({{"tau", p.tau},
                   {"match_rate", Number(p.match_rate)},
                   {"c_index_median", Number(p.c_index_median)},
                   {"c_index_pooled", Number(p.c_index_pooled)},
                   {"aultc", Number(p.aultc)}});
  }
  return out;
}

std::string SweepCsv(const std::vector<AggregateSweepPoint>& sweep) {
  std::string csv = "tau,match_rate,c_index_median,c_index_pooled,aultc\n";
  for (const auto& p : sweep) {
    csv += FormatReal(p.tau) + "," + Csv(p.match_rate) + "," + Csv(p.c_index_median) + "," +
           Csv(p.c_index_pooled) + "," + Csv(p.aultc) + "\n";
  }
  return csv;
}

void LogSkipped(const EvaluationRun& run, std::ostream& log) {
  if (!run.only_ref.empty() || !run.only_pred.empty()) {
    log << "warning: skipped " << run.only_ref.size() << " reference-only and "
        << run.only_pred.size() << " prediction-only cases\n";
  }
}

}  // namespace

int RunEvaluate(const EvaluateConfig& config, std::ostream& log) {
  EvaluationRun run = Evaluate(config, "evaluate");

  json cases = json::array();
  for (const auto& c : run.cases) {
    json pairs = json::array();
    for (const auto& p : c.pairs) {
      pairs.push_back({{"ref_index", p.ref_index},
                       {"pred_index", p.pred_index},
                       {"ref_event", p.ref_event},
                       {"pred_event", p.pred_event},
                       {"distance", p.distance},
                       {"t_ref", p.t_ref},
                       {"t_pred", p.t_pred},
                       {"matched", p.distance <= config.tau}});
    }
    cases.push_back({
        {"case_id", c.case_id},
        {"n_ref", c.n_ref},
        {"n_pred", c.n_pred},
        {"n_pairs", c.pairs.size()},
        {"n_matched", c.matched.size()},
        {"match_rate", Number(c.match_rate)},
        {"c_index", Number(c.c_index)},
        {"comparable_pairs", c.concordance.comparable},
        {"aultc", Number(c.aultc)},
        {"s_max", config.s_max},
        {"ref_skipped_lines", c.ref_skipped_lines},
        {"pred_skipped_lines", c.pred_skipped_lines},
        {"strata", StrataJson(c.strata)},
        {"pairs", pairs},
    });
  }

  const CorpusAggregate& agg = run.aggregate;
  json cdf = json::array();
  std::string cdf_csv = "log_discrepancy,cdf\n";
  for (auto [x, f] : CdfStepPoints(agg.pooled_discrepancies)) {
    cdf.push_back({{"x", x}, {"F", f}});
    cdf_csv += FormatReal(x) + "," + FormatReal(f) + "\n";
  }
  json aggregate = {
      {"n_cases", agg.n_cases},
      {"match_rate", SummaryJson(agg.match_rate, agg.match_rate_pooled)},
      {"c_index", SummaryJson(agg.c_index, agg.c_index_pooled)},
      {"aultc", SummaryJson(agg.aultc, agg.aultc_pooled)},
      {"strata", StrataJson(agg.strata)},
      {"ltcdf", cdf},
      {"sweep", SweepJson(agg.sweep)},
  };

  json report;
  report["config"] = run.config;
  report["skipped"] = {{"only_in_reference", run.only_ref}, {"only_in_prediction", run.only_pred}};
  report["cases"] = cases;
  report["aggregate"] = aggregate;
  WriteFile(config.out_dir / "evaluation.json", Dump(report));
  WriteFile(config.out_dir / "ltcdf.csv", cdf_csv);
  WriteFile(config.out_dir / "sweep.csv", SweepCsv(agg.sweep));

  log << "evaluate: " << agg.n_cases << " cases, median match rate "
      << Csv(agg.match_rate.median) << ", median c-index " << Csv(agg.c_index.median)
      << ", median AULTC " << Csv(agg.aultc.median) << " (tau " << FormatReal(config.tau)
      << ", s_max " << FormatReal(config.s_max) << " h)\n";
  LogSkipped(run, log);
  return kExitOk;
}

int RunSweep(const EvaluateConfig& config, std::ostream& log) {
  EvaluationRun run = Evaluate(config, "sweep");
  json report;
  report["config"] = run.config;
  report["skipped"] = {{"only_in_reference", run.only_ref}, {"only_in_prediction", run.only_pred}};
  report["sweep"] = SweepJson(run.aggregate.sweep);
  WriteFile(config.out_dir / "sweep.json", Dump(report));
  WriteFile(config.out_dir / "sweep.csv", SweepCsv(run.aggregate.sweep));
  log << "sweep: " << run.cases.size() << " cases, " << run.aggregate.sweep.size()
      << " thresholds\n";
  LogSkipped(run, log);
  return kExitOk;
}

// ---------------------------------------------------------------- stats

int RunStats(const StatsConfig& config, std::ostream& log) {
  auto timeline_files = ListFiles(config.timelines_dir, ".bsv");
  if (timeline_files.empty()) {
    throw CommandError(kExitData, "no .bsv annotation files in " + config.timelines_dir.string());
  }
  std::vector<double> counts;
  std::size_t skipped_lines = 0;
  for (const auto& f : timeline_files) {
    ParsedTimeline t = ParseTimelineLines(ReadFile(f));
    counts.push_back(static_cast<double>(t.timeline.events.size()));
    skipped_lines += t.skipped_lines;
  }
  double total = 0.0;
  for (double c : counts) total += c;
  double mean = total / static_cast<double>(counts.size());
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean);
  double sd = counts.size() > 1 ? std::sqrt(var / static_cast<double>(counts.size() - 1)) : 0.0;

  json report;
  report["config"] = {{"command", "stats"},
                      {"timelines_dir", config.timelines_dir.generic_string()}};
  report["events_per_report"] = {
      {"n_reports", counts.size()},
      {"total_events", static_cast<std::uint64_t>(total)},
      {"mean", mean},
      {"median", Median(counts)},
      {"sd", sd},
      {"min", *std::min_element(counts.begin(), counts.end())},
      {"max", *std::max_element(counts.begin(), counts.end())},
      {"skipped_lines", skipped_lines},
  };

  if (config.demographics_dir) {
    report["config"]["demographics_dir"] = config.demographics_dir->generic_string();
    std::vector<std::optional<double>> ages;
    std::map<std::string, std::size_t> sex;
    std::map<std::string, std::size_t> ethnicity;
    std::size_t unparseable = 0;
    auto files = ListFiles(*config.demographics_dir, ".bsv");
    for (const auto& f : files) {
      try {
        DemographicsRecord d = ParseDemographics(ReadFile(f));
        ages.push_back(d.age_years);
        switch (d.sex.kind) {
          case SexKind::kMale: ++sex["Male"]; break;
          case SexKind::kFemale: ++sex["Female"]; break;
          case SexKind::kNotSpecified: ++sex["Not Specified"]; break;
          case SexKind::kCustom: ++sex[d.sex.custom]; break;
        }
        ++ethnicity[d.ethnicity.value_or("Not Specified")];
      } catch (const Error&) {
        ++unparseable;
      }
    }
    Summary age = Summarize(ages);
    std::vector<double> defined;
    for (const auto& a : ages) {
      if (a) defined.push_back(*a);
    }
    json age_json = {{"n_specified", age.n_defined},
                     {"n_not_specified", ages.size() - age.n_defined},
                     {"mean", Number(age.mean)},
                     {"median", Number(age.median)}};
    if (!defined.empty()) {
      age_json["min"] = *std::min_element(defined.begin(), defined.end());
      age_json["max"] = *std::max_element(defined.begin(), defined.end());
    }
    report["demographics"] = {{"n_records", files.size()},
                              {"unparseable", unparseable},
                              {"age_years", age_json},
                              {"sex", sex},
                              {"ethnicity", ethnicity}};
  }

  if (config.diagnoses_dir) {
    report["config"]["diagnoses_dir"] = config.diagnoses_dir->generic_string();
    std::map<std::string, std::size_t> all;
    std::map<std::string, std::size_t> primary;
    std::size_t unparseable = 0;
    auto files = ListFiles(*config.diagnoses_dir, ".txt");
    for (const auto& f : files) {
      try {
        DiagnosisList d = ParseDiagnoses(ReadFile(f));
        ++primary[d.diagnoses.front()];
        for (const auto& name : d.diagnoses) ++all[name];
      } catch (const Error&) {
        ++unparseable;
      }
    }
    auto table = [](const std::map<std::string, std::size_t>& freq) {
      std::vector<std::pair<std::string, std::size_t>> rows(freq.begin(), freq.end());
      std::stable_sort(rows.begin(), rows.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      json out = json::array();
      for (const auto& [name, n] : rows) out.push_back({{"diagnosis", name}, {"count", n}});
      return out;
    };
    report["diagnoses"] = {{"n_lists", files.size()},
                           {"unparseable", unparseable},
                           {"frequency", table(all)},
                           {"primary_frequency", table(primary)}};
  }

  WriteFile(config.out_file, Dump(report));
  log << "stats: " << counts.size() << " reports, mean " << FormatReal(mean)
      << " events per report\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench-id

int RunBenchId(const BenchConfig& config, std::ostream& log) {
  std::vector<BenchmarkLabel> labels;
  {
    std::istringstream in(ReadFile(config.labels_csv));
    try {
      labels = ReadBenchmarkLabels(in);
    } catch (const Error& e) {
      throw CommandError(kExitData, e.what());
    }
  }
  std::map<std::string, bool> accepted;
  {
    std::istringstream in(ReadFile(config.decisions_jsonl));
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("case_id") || !j.contains("accepted")) {
        throw CommandError(kExitData, "bad decision record on line " + std::to_string(line_no));
      }
      accepted[j["case_id"].get<std::string>()] = j["accepted"].get<bool>();
    }
  }
  BenchmarkResult result = ScoreBenchmark(labels, accepted);

  auto row = [](const std::string& name, const ConfusionCounts& c) {
    ClassificationMetrics m = ComputeClassificationMetrics(c);
    return json{{"diagnosis", name},     {"tp", c.tp},
                {"fp", c.fp},            {"tn", c.tn},
                {"fn", c.fn},            {"precision", Number(m.precision)},
                {"recall", Number(m.recall)}, {"accuracy", Number(m.accuracy)},
                {"f1", Number(m.f1)}};
  };
  json per = json::array();
  for (const auto& [name, c] : result.per_diagnosis) per.push_back(row(name, c));
  json report;
  report["config"] = {{"command", "bench-id"},
                      {"labels", config.labels_csv.generic_string()},
                      {"decisions", config.decisions_jsonl.generic_string()}};
  report["per_diagnosis"] = per;
  report["overall"] = row("All Diagnoses", result.overall);
  report["missing"] = result.missing;
  WriteFile(config.out_file, Dump(report));

  auto fmt = [](const json& v) { return v.is_null() ? std::string("undefined") : FormatReal(v.get<double>()); };
  log << "diagnosis\tprecision\trecall\taccuracy\tf1\n";
  for (const auto& r : per) {
    log << r["diagnosis"].get<std::string>() << "\t" << fmt(r["precision"]) << "\t"
        << fmt(r["recall"]) << "\t" << fmt(r["accuracy"]) << "\t" << fmt(r["f1"]) << "\n";
  }
  const json& o = report["overall"];
  log << "All Diagnoses\t" << fmt(o["precision"]) << "\t" << fmt(o["recall"]) << "\t"
      << fmt(o["accuracy"]) << "\t" << fmt(o["f1"]) << "\n";
  if (!result.missing.empty()) {
    log << "warning: " << result.missing.size() << " labeled cases have no filter decision\n";
  }
  return kExitOk;
}

}  // namespace casetl::cli
