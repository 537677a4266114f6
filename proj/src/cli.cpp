#include "verikit/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "verikit/client.hpp"
#include "verikit/curate.hpp"
#include "verikit/error.hpp"
#include "verikit/log.hpp"
#include "verikit/metrics.hpp"
#include "verikit/problem.hpp"
#include "verikit/sim.hpp"
#include "verikit/taxonomy.hpp"

namespace verikit::cli {

namespace {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  out << text;
}

struct CurateArgs {
  std::string input;
  std::string column = kDefaultCodeColumn;
  std::string output;
  std::string label_endpoint;
  std::string label_model;
  std::string template_file;
  std::size_t concurrency = 8;
  bool normalize_dedup = false;
  std::string system_prompt = kDefaultSystemPrompt;
  std::string instruction = kDefaultInstruction;
  std::string label_instruction = kDefaultLabelInstruction;
  std::string api_key_env = kDefaultApiKeyEnv;
  double timeout_secs = 60.0;
  int retries = 3;
};

void run_curate(const CurateArgs& args) {
  const IngestResult ingested = ingest_csv(args.input, args.column);
  log::info("ingested " + std::to_string(ingested.records.size()) + " rows from " + args.input);

  CleanOptions clean_options;
  clean_options.normalize_dedup = args.normalize_dedup;
  clean_options.system_prompt = args.system_prompt;
  clean_options.instruction = args.instruction;
  CleanResult cleaned = clean(ingested.records, clean_options);
  log::info("kept " + std::to_string(cleaned.records.size()) + " modules (" +
            std::to_string(cleaned.duplicates_removed) + " duplicates, " +
            std::to_string(cleaned.rows_without_modules) + " module-free rows removed)");

  std::vector<DatasetRecord> records = std::move(cleaned.records);
  if (!args.label_endpoint.empty()) {
    GenerationConfig config;
    config.endpoint_url = args.label_endpoint;
    config.model_name = args.label_model;
    config.api_key_env = args.api_key_env;
    config.timeout_secs = args.timeout_secs;
    config.retries = 0;  // annotate owns the retry loop
    config.label_instruction = args.label_instruction;
    const Labeler labeler = [&config](const DatasetRecord& rec) {
      return label_description(rec.module, config);
    };
    AnnotateOptions annotate_options;
    annotate_options.concurrency = args.concurrency;
    annotate_options.retries = args.retries;
    AnnotateResult annotated = annotate(std::move(records), labeler, annotate_options);
    records = std::move(annotated.records);
    log::info("labeled " + std::to_string(records.size() - annotated.failed) + " of " +
              std::to_string(records.size()) + " records");
  } else {
    log::info("no label endpoint configured; descriptions left empty");
  }

  const std::string prompt_template =
      args.template_file.empty() ? kDefaultPromptTemplate : read_text_file(args.template_file);
  for (auto& rec : records) assemble_prompt(rec, prompt_template);

  const std::size_t written = export_jsonl(records, args.output);
  log::info("wrote " + std::to_string(written) + " records to " + args.output);
}

struct GenerateArgs {
  std::string problems;
  std::string out;
  bool resume = false;
  GenerationConfig config;
};

void run_generate(const GenerateArgs& args) {
  const std::vector<Problem> problems = load_problems(args.problems);
  if (problems.empty()) {
    throw Error(ErrorKind::empty_input, args.problems + " holds no problems");
  }
  const GenerateStats stats = generate_to_file(problems, args.config, args.out, args.resume);
  log::info("requested " + std::to_string(stats.requested) + " samples (" +
            std::to_string(stats.skipped) + " already present, " +
            std::to_string(stats.failed) + " failed); file now holds " +
            std::to_string(stats.skipped + stats.written) + " samples");
}

struct EvaluateArgs {
  std::string problems;
  std::string samples;
  std::string out;
  std::size_t jobs = 8;
  SimConfig config;
  std::string work_root;
};

void run_evaluate(const EvaluateArgs& args) {
  const std::vector<Problem> problems = load_problems(args.problems);
  const std::vector<RawSample> samples = read_samples(args.samples);
  SimConfig config = args.config;
  if (!args.work_root.empty()) config.work_root = args.work_root;
  const auto results =
      run_suite(problems, samples, config, args.jobs, std::filesystem::path(args.out));
  std::size_t passed = 0;
  for (const auto& r : results) {
    if (r.sim == SimStatus::pass) ++passed;
  }
  log::info(std::to_string(passed) + " of " + std::to_string(results.size()) +
            " samples passed; results in " + args.out);
}

struct ReportArgs {
  std::vector<std::string> results_files;
  std::vector<std::string> labels;
  std::vector<int> ks = {1, 5, 10};
  std::string by_type;
  std::string format = "markdown";
  std::string out;
};

void run_report(const ReportArgs& args) {
  std::vector<RunInput> runs;
  for (std::size_t i = 0; i < args.results_files.size(); ++i) {
    RunInput run;
    run.label = i < args.labels.size()
                    ? args.labels[i]
                    : std::filesystem::path(args.results_files[i]).stem().string();
    run.results = read_results(args.results_files[i]);
    runs.push_back(std::move(run));
  }

  std::optional<std::map<std::string, std::string>> type_map;
  if (!args.by_type.empty()) type_map = load_type_map(args.by_type);

  const auto format = report_format_from_string(args.format);
  if (!format) {
    throw Error(ErrorKind::config_error, "unknown report format \"" + args.format + "\"");
  }
  const EvalReport report =
      build_report(runs, args.ks, type_map ? &*type_map : nullptr);
  const std::string text = render_report(report, *format);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(args.out, text);
    log::info("report written to " + args.out);
  }
}

struct ClassifyArgs {
  std::string samples;
  std::string results;
  std::string problems;
  std::string out;
  std::string summary;
  std::string rules_file;
};

void run_classify(const ClassifyArgs& args) {
  const std::vector<Problem> problems = load_problems(args.problems);
  const std::vector<RawSample> samples = read_samples(args.samples);
  const std::vector<SampleResult> results = read_results(args.results);
  const TaxonomyRules rules =
      args.rules_file.empty() ? TaxonomyRules{} : load_rules(args.rules_file);
  const auto records = classify_all(problems, samples, results, rules);
  write_taxonomy(records, args.out);
  log::info("classified " + std::to_string(records.size()) + " samples into " + args.out);
  if (!args.summary.empty()) {
    const bool markdown = args.summary.ends_with(".md");
    write_text_file(args.summary, render_taxonomy(taxonomy_summary(records), markdown));
    log::info("summary written to " + args.summary);
  }
}

}  // namespace

int run(std::vector<std::string> args) {
  CLI::App app{"Curate labeled Verilog datasets and evaluate generated completions"};
  app.name("verikit");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file; sections mirror subcommands");
  app.get_config_ptr()->configurable(false);

  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "debug logging")->configurable(true);
  bool json_logs = false;
  app.add_flag("--json-logs", json_logs, "one JSON object per log line");
  long long seed = 0;
  app.add_option("--seed", seed, "reserved; every stage is deterministic");

  CurateArgs curate_args;
  auto* curate_cmd =
      app.add_subcommand("curate", "CSV corpus -> cleaned, labeled dataset JSONL");
  curate_cmd->add_option("--input", curate_args.input, "raw corpus CSV")->required();
  curate_cmd->add_option("--column", curate_args.column, "code column name");
  curate_cmd->add_option("--output", curate_args.output, "dataset JSONL path")->required();
  curate_cmd->add_option("--label-endpoint", curate_args.label_endpoint,
                         "chat-completion endpoint for descriptions (omit to skip labeling)");
  curate_cmd->add_option("--label-model", curate_args.label_model, "labeler model name");
  curate_cmd->add_option("--template", curate_args.template_file, "prompt template file");
  curate_cmd->add_option("--concurrency", curate_args.concurrency, "in-flight label requests");
  curate_cmd->add_flag("--normalize-dedup", curate_args.normalize_dedup,
                       "collapse whitespace for duplicate detection");
  curate_cmd->add_option("--system-prompt", curate_args.system_prompt, "system_prompt field");
  curate_cmd->add_option("--instruction", curate_args.instruction, "instruction field");
  curate_cmd->add_option("--label-instruction", curate_args.label_instruction,
                         "instruction sent to the labeler");
  curate_cmd->add_option("--api-key-env", curate_args.api_key_env,
                         "env var holding the API key");
  curate_cmd->add_option("--timeout-secs", curate_args.timeout_secs, "per-request timeout");
  curate_cmd->add_option("--retries", curate_args.retries, "label retries per record");

  GenerateArgs generate_args;
  auto* generate_cmd =
      app.add_subcommand("generate", "sample completions for every problem");
  generate_cmd->add_option("--problems", generate_args.problems, "problems JSONL")->required();
  generate_cmd->add_option("--endpoint", generate_args.config.endpoint_url,
                           "chat-completion endpoint")
      ->required();
  generate_cmd->add_option("--model", generate_args.config.model_name, "model name");
  generate_cmd->add_option("--temperature", generate_args.config.temperature,
                           "sampling temperature");
  generate_cmd->add_option("--num-samples", generate_args.config.num_samples_per_problem,
                           "samples per problem");
  generate_cmd->add_option("--max-new-tokens", generate_args.config.max_new_tokens,
                           "completion token limit");
  generate_cmd->add_option("--out", generate_args.out, "samples JSONL path")->required();
  generate_cmd->add_flag("--resume", generate_args.resume,
                         "keep existing samples, request only missing ones");
  generate_cmd->add_option("--concurrency", generate_args.config.concurrency,
                           "in-flight requests");
  generate_cmd->add_option("--timeout-secs", generate_args.config.timeout_secs,
                           "per-request timeout");
  generate_cmd->add_option("--retries", generate_args.config.retries, "retries per request");
  generate_cmd->add_option("--api-key-env", generate_args.config.api_key_env,
                           "env var holding the API key");
  generate_cmd->add_option("--system-prompt", generate_args.config.system_prompt,
                           "system message (empty disables)");

  EvaluateArgs evaluate_args;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "compile and simulate samples against testbenches");
  evaluate_cmd->add_option("--problems", evaluate_args.problems, "problems JSONL")->required();
  evaluate_cmd->add_option("--samples", evaluate_args.samples, "samples JSONL")->required();
  evaluate_cmd->add_option("--compile-cmd", evaluate_args.config.compile_cmd,
                           "compile template with {output} and {sources}");
  evaluate_cmd->add_option("--run-cmd", evaluate_args.config.run_cmd,
                           "run template with {output}");
  evaluate_cmd->add_option("--jobs", evaluate_args.jobs, "parallel evaluators");
  evaluate_cmd->add_option("--timeout-secs", evaluate_args.config.timeout_secs,
                           "compile+run budget per sample");
  evaluate_cmd->add_option("--out", evaluate_args.out, "results JSONL path")->required();
  evaluate_cmd->add_flag("--keep-artifacts", evaluate_args.config.keep_artifacts,
                         "keep per-sample work dirs");
  evaluate_cmd->add_option("--work-root", evaluate_args.work_root,
                           "parent dir for work dirs (default: system temp)");
  evaluate_cmd->add_option("--judge-pattern", evaluate_args.config.judge.failure_pattern,
                           "stdout regex consulted by the judge");
  const std::map<std::string, bool> polarity{{"fail", true}, {"pass", false}};
  evaluate_cmd
      ->add_option("--judge-match-means", evaluate_args.config.judge.fail_on_match,
                   "whether a pattern match fails or passes the sample")
      ->transform(CLI::CheckedTransformer(polarity, CLI::ignore_case));
  evaluate_cmd->add_flag("!--no-durations", evaluate_args.config.record_durations,
                         "zero the duration field for reproducible output");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "pass@k and per-type accuracy tables");
  report_cmd->add_option("--results", report_args.results_files, "results JSONL (repeatable)")
      ->required();
  report_cmd->add_option("--label", report_args.labels, "run label (repeatable, in order)");
  report_cmd->add_option("--k", report_args.ks, "k values")->delimiter(',');
  report_cmd->add_option("--by-type", report_args.by_type, "task_id,circuit_type CSV");
  report_cmd->add_option("--format", report_args.format, "plain, markdown, or json");
  report_cmd->add_option("--out", report_args.out, "output file (default: stdout)");

  ClassifyArgs classify_args;
  auto* classify_cmd = app.add_subcommand("classify", "failure taxonomy for evaluated samples");
  classify_cmd->add_option("--samples", classify_args.samples, "samples JSONL")->required();
  classify_cmd->add_option("--results", classify_args.results, "results JSONL")->required();
  classify_cmd->add_option("--problems", classify_args.problems, "problems JSONL")->required();
  classify_cmd->add_option("--out", classify_args.out, "taxonomy JSONL path")->required();
  classify_cmd->add_option("--summary", classify_args.summary,
                           "summary file (.md renders markdown)");
  classify_cmd->add_option("--rules", classify_args.rules_file, "classification rules file");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("verikit");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    log::set_level(verbosity > 0 ? log::Level::debug : log::Level::info);
    log::set_json(json_logs);
    if (*curate_cmd) run_curate(curate_args);
    if (*generate_cmd) run_generate(generate_args);
    if (*evaluate_cmd) run_evaluate(evaluate_args);
    if (*report_cmd) run_report(report_args);
    if (*classify_cmd) run_classify(classify_args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    std::cerr << (parsed.empty() ? app.help() : parsed.back()->help());
    return 2;
  } catch (const Error& e) {
    log::error(e.what());
    return 1;
  } catch (const std::exception& e) {
    log::error(e.what());
    return 1;
  }
  return 0;
}

}  // namespace verikit::cli
