#include "labelforge/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "labelforge/analysis.hpp"
#include "labelforge/cache.hpp"
#include "labelforge/config.hpp"
#include "labelforge/corpus.hpp"
#include "labelforge/dataset_io.hpp"
#include "labelforge/error.hpp"
#include "labelforge/gateway.hpp"
#include "labelforge/hash.hpp"
#include "labelforge/log.hpp"
#include "labelforge/metrics.hpp"
#include "labelforge/pipeline.hpp"
#include "labelforge/prompt.hpp"
#include "labelforge/random.hpp"
#include "labelforge/registry.hpp"
#include "labelforge/review.hpp"
#include "labelforge/review_server.hpp"

namespace labelforge::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
  std::string cache_path;
  std::string work_dir;
};

struct Context {
  PipelineConfig config;
  Registry registry;
  std::ostream& out;
  std::ostream& err;
  bool dry_run = false;
  SystemClock clock;

  Context(PipelineConfig c, Registry r, std::ostream& o, std::ostream& e, bool dry)
      : config(std::move(c)), registry(std::move(r)), out(o), err(e), dry_run(dry) {}

  bool record_timing() const { return !config.reproducible; }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::string file_digest(const std::string& path) { return sha256_hex(read_file(path)); }

/// Run record next to an artifact. Input files are identified by content
/// digest so that the record does not depend on where the run happened.
void write_meta(Context& ctx, const std::string& artifact, const std::string& command,
                const std::map<std::string, std::string>& inputs, nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json templates = nlohmann::json::object();
  for (auto kind : kAllPromptKinds) templates[std::string(to_string(kind))] = template_hash(kind);
  nlohmann::json digests = nlohmann::json::object();
  for (const auto& [role, path] : inputs) digests[role] = file_digest(path);
  nlohmann::json meta = {{"schema", "labelforge.run"},
                         {"version", 1},
                         {"labelforge", kVersion},
                         {"command", command},
                         {"config_digest", config_digest(ctx.config)},
                         {"seed", ctx.config.seed},
                         {"template_hashes", templates},
                         {"inputs", digests},
                         {"details", std::move(extra)}};
  if (!ctx.config.reproducible) meta["created_at"] = ctx.clock.timestamp();
  write_file_atomic(artifact + ".meta.json", meta.dump(2) + "\n");
}

void ensure_parent(const std::string& path) {
  auto parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
  }
}

void save_output(const Dataset& dataset, const std::string& path) {
  ensure_parent(path);
  save_dataset(dataset, path);
}

std::string manifest_path(const Context& ctx, const std::string& name) {
  if (ctx.config.work_dir.empty()) return "";
  std::error_code ec;
  fs::create_directories(ctx.config.work_dir, ec);
  if (ec) throw IoError("cannot create work directory " + ctx.config.work_dir + ": " + ec.message());
  return (fs::path(ctx.config.work_dir) / name).string();
}

std::unique_ptr<ResponseCache> open_cache(const Context& ctx) {
  ensure_parent(ctx.config.cache_path);
  return std::make_unique<ResponseCache>(ctx.config.cache_path);
}

nlohmann::json report_json(const AnnotateReport& r) {
  return {{"jobs", r.jobs},
          {"cache_hits", r.cache_hits},
          {"provider_calls", r.provider_calls},
          {"skipped_retained", r.skipped_retained},
          {"skipped_existing", r.skipped_existing},
          {"failed_posts", r.failed_post_ids.size()}};
}

// merge ---------------------------------------------------------------------

struct MergeArgs {
  std::string dreaddit;
  std::string depseverity;
  std::string output;
  double min_join_rate = 0.95;
};

int cmd_merge(Context& ctx, const MergeArgs& a) {
  auto dreaddit = load_dreaddit(a.dreaddit);
  auto depseverity = load_depseverity(a.depseverity);
  for (const auto& w : dreaddit.warnings) log::warning(a.dreaddit + " row " + std::to_string(w.row) + ": " + w.message);
  for (const auto& w : depseverity.warnings) {
    log::warning(a.depseverity + " row " + std::to_string(w.row) + ": " + w.message);
  }
  MergeOptions options;
  options.min_join_rate = a.min_join_rate;
  auto merged = merge_depseverity_dreaddit(dreaddit.records, depseverity.records, options);
  merged.dataset.meta().seed = ctx.config.seed;

  const auto labels = resolve_labels(merged.dataset, LabelSource{}, {"depression", "stress"});
  const auto table = contingency(labels, "depression", "stress");
  const auto& s = merged.stats;
  ctx.out << "posts " << merged.dataset.size() << " (join rate " << s.join_rate << ", " << s.duplicate_conflicts
          << " duplicate conflicts)\n"
          << "depression+ stress+ " << table.a << "\n"
          << "depression+ stress- " << table.b << "\n"
          << "depression- stress+ " << table.c << "\n"
          << "depression- stress- " << table.d << "\n";
  if (ctx.dry_run) return 0;
  save_output(merged.dataset, a.output);
  write_meta(ctx, a.output, "merge", {{"dreaddit", a.dreaddit}, {"depseverity", a.depseverity}},
             {{"dreaddit_rows", s.dreaddit_rows},
              {"depseverity_rows", s.depseverity_rows},
              {"dreaddit_unique", s.dreaddit_unique},
              {"depseverity_unique", s.depseverity_unique},
              {"matched_by_text", s.matched_by_text},
              {"matched_by_id", s.matched_by_id},
              {"duplicate_conflicts", s.duplicate_conflicts},
              {"unmatched_dreaddit", s.unmatched_dreaddit.size()},
              {"unmatched_depseverity", s.unmatched_depseverity.size()},
              {"join_rate", s.join_rate},
              {"cells", {{"a", table.a}, {"b", table.b}, {"c", table.c}, {"d", table.d}}}});
  return 0;
}

// sample --------------------------------------------------------------------

struct SampleArgs {
  std::vector<std::string> rmhd;
  std::string input;
  std::string output;
  std::optional<std::size_t> per_disorder;
  std::optional<std::size_t> control;
  std::string groups;
  bool top_up = false;
  bool balanced = false;
  std::string disorders;
};

Dataset load_rmhd_files(Context& ctx, const std::vector<std::string>& files) {
  std::vector<Post> posts;
  for (const auto& file : files) {
    auto load = load_rmhd(file);
    for (const auto& w : load.warnings) log::warning(file + " row " + std::to_string(w.row) + ": " + w.message);
    posts.insert(posts.end(), std::make_move_iterator(load.posts.begin()), std::make_move_iterator(load.posts.end()));
  }
  return rmhd_dataset(std::move(posts), ctx.registry);
}

int cmd_sample(Context& ctx, const SampleArgs& a) {
  std::map<std::string, std::string> inputs;
  Dataset out;
  nlohmann::json details;
  if (a.balanced) {
    if (a.input.empty()) throw UserError("sample --balanced needs --input");
    inputs["input"] = a.input;
    const auto base = load_dataset(a.input);
    const auto disorders =
        ctx.registry.in_registry_order(a.disorders.empty() ? std::vector<std::string>{"depression", "stress"}
                                                           : split_list(a.disorders));
    out = balanced_subset(base, disorders, ctx.config.seed);
    details = {{"mode", "balanced"}, {"posts", out.size()}};
  } else {
    if (a.rmhd.empty()) throw UserError("sample needs --rmhd (or --balanced --input)");
    for (std::size_t i = 0; i < a.rmhd.size(); ++i) inputs["rmhd" + std::to_string(i)] = a.rmhd[i];
    auto corpus = load_rmhd_files(ctx, a.rmhd);
    RmhdSampleOptions options;
    options.seed = ctx.config.seed;
    options.per_disorder = a.per_disorder.value_or(ctx.config.sample.initial);
    options.control = a.control.value_or(a.top_up ? 0 : ctx.config.sample.control);
    options.groups = split_list(a.groups);
    if (a.top_up) {
      if (a.input.empty()) throw UserError("sample --top-up needs --input with the dataset to extend");
      inputs["input"] = a.input;
      out = load_dataset(a.input);
      for (const auto& post : out.posts()) options.exclude.insert(post.id);
      // A separate stream per round keeps top-ups from repeating the first draw.
      options.seed = derive_seed(ctx.config.seed, "top-up/" + std::to_string(out.size()));
      const auto fresh = sample_rmhd(corpus, ctx.registry, options);
      for (const auto& post : fresh.posts()) out.add_post(post);
      out.meta().params["top_up_rounds"] = out.meta().params.value("top_up_rounds", 0) + 1;
      details = {{"mode", "top-up"}, {"added", fresh.size()}, {"posts", out.size()}};
    } else {
      out = sample_rmhd(corpus, ctx.registry, options);
      out.meta().name = "rmhd-sample";
      details = {{"mode", "rmhd"}, {"posts", out.size()}};
    }
  }
  ctx.out << "sampled " << out.size() << " posts\n";
  if (ctx.dry_run) return 0;
  save_output(out, a.output);
  write_meta(ctx, a.output, "sample", inputs, details);
  return 0;
}

// screen --------------------------------------------------------------------

struct ScreenArgs {
  std::string input;
  std::string output;
  std::string queue;
  std::string model;
};

int cmd_screen(Context& ctx, const ScreenArgs& a) {
  auto dataset = load_dataset(a.input);
  const auto model = a.model.empty() ? ctx.config.screening_model : a.model;
  std::optional<ReviewQueue> previous;
  if (fs::exists(a.queue)) previous = load_review_queue(a.queue);
  if (ctx.dry_run) {
    ctx.out << "would screen " << dataset.size() << " posts with " << model << "\n";
    return 0;
  }
  auto cache = open_cache(ctx);
  GatewayPool pool(ctx.config, ctx.registry, *cache, ctx.clock);
  ScreenOptions options;
  options.manifest_path = manifest_path(ctx, "screen.manifest.json");
  options.record_timing = ctx.record_timing();
  auto result = screen(dataset, ctx.registry, pool.get(model), options);

  // Decisions already made on a previous queue survive a rescreen.
  std::size_t carried = 0;
  if (previous) {
    ReviewQueue merged;
    merged.auto_kept = result.queue.auto_kept;
    for (auto item : result.queue.items()) {
      if (const auto* old = previous->find(item.post_id)) {
        item.decision = old->decision;
        item.decided_at = old->decided_at;
        item.note = old->note;
        carried += old->decision != Decision::pending;
      }
      merged.add(std::move(item));
    }
    result.queue = std::move(merged);
  }
  ctx.out << "screened " << result.queue.auto_kept.size() + result.queue.items().size() << " posts: "
          << result.queue.auto_kept.size() << " kept, " << result.queue.items().size() << " queued for review";
  if (carried) ctx.out << " (" << carried << " decisions carried over)";
  ctx.out << "\n";
  save_output(dataset, a.output);
  ensure_parent(a.queue);
  save_review_queue(result.queue, a.queue);
  write_meta(ctx, a.output, "screen", {{"input", a.input}},
             {{"model", model},
              {"auto_kept", result.queue.auto_kept.size()},
              {"queued", result.queue.items().size()},
              {"annotate", report_json(result.report)}});
  return 0;
}

// review-serve --------------------------------------------------------------

struct ServeArgs {
  std::string queue;
  std::string host = "127.0.0.1";
  std::optional<int> port;
  std::string matrix;
  std::string static_dir;
};

ReviewServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_review_serve(Context& ctx, const ServeArgs& a) {
  ReviewServerOptions options;
  options.queue_path = a.queue;
  options.matrix_path = a.matrix;
  options.static_dir = a.static_dir;
  ReviewServer server(options);
  const int port = server.bind(a.host, a.port.value_or(ctx.config.review_port));
  ctx.out << "review server listening on http://" << a.host << ":" << port << "\n" << std::flush;
  if (ctx.dry_run) return 0;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.serve();
  g_server = nullptr;
  return 0;
}

// finalize ------------------------------------------------------------------

struct FinalizeArgs {
  std::string input;
  std::string queue;
  std::string output;
  std::optional<std::size_t> per_disorder;
  bool auto_keep_all = false;
};

int cmd_finalize(Context& ctx, const FinalizeArgs& a) {
  const auto dataset = load_dataset(a.input);
  auto queue = load_review_queue(a.queue);
  std::size_t auto_kept = 0;
  if (a.auto_keep_all) {
    auto_kept = queue.keep_all_pending(ctx.config.reproducible ? "" : ctx.clock.timestamp());
  }
  FinalizeOptions options;
  options.per_disorder = a.per_disorder.value_or(ctx.config.sample.final);
  options.seed = ctx.config.seed;
  auto out = finalize(dataset, queue, options);
  out.meta().name = "finalized";
  ctx.out << "finalized " << out.size() << " posts (" << queue.removed_ids().size() << " removed in review)\n";
  if (ctx.dry_run) return 0;
  if (auto_kept) save_review_queue(queue, a.queue);
  save_output(out, a.output);
  write_meta(ctx, a.output, "finalize", {{"input", a.input}},
             {{"removed", queue.removed_ids().size()}, {"auto_kept_pending", auto_kept}, {"posts", out.size()}});
  return 0;
}

// build ---------------------------------------------------------------------

struct BuildArgs {
  std::string input;
  std::string output;
  std::string models;
  std::string prompt;
  std::string disorders;
};

int cmd_build(Context& ctx, const BuildArgs& a) {
  auto dataset = load_dataset(a.input);
  BuildOptions options;
  options.disorders = a.disorders.empty() ? ctx.config.disorders : split_list(a.disorders);
  options.models = a.models.empty() ? ctx.config.annotation_model_ids() : split_list(a.models);
  options.kind = a.prompt.empty() ? ctx.config.prompt_kind : prompt_kind_from_string(a.prompt);
  options.canonical_model = ctx.config.canonical_model;
  options.record_timing = ctx.record_timing();
  for (const auto& m : options.models) ctx.config.provider(m);
  if (ctx.dry_run) {
    ctx.out << "would annotate " << dataset.size() << " posts with " << options.models.size() << " models\n";
    return 0;
  }
  options.work_dir = manifest_path(ctx, "");
  auto cache = open_cache(ctx);
  GatewayPool pool(ctx.config, ctx.registry, *cache, ctx.clock);
  auto result = build_multilabel(dataset, ctx.registry, pool, options);
  dataset.meta().name = "multilabel";

  const auto disorders = ctx.registry.in_registry_order(options.disorders);
  const auto table = render_distribution_table(result.distribution, disorders);
  ctx.out << table;
  save_output(dataset, a.output);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.distribution) rows.push_back(to_json(row));
  write_file_atomic(a.output + ".distribution.json", rows.dump(2) + "\n");
  write_file_atomic(a.output + ".distribution.txt", table);
  nlohmann::json reports = nlohmann::json::object();
  for (const auto& [model, r] : result.reports) reports[model] = report_json(r);
  write_meta(ctx, a.output, "build", {{"input", a.input}}, {{"annotate", reports}, {"posts", dataset.size()}});
  return 0;
}

// annotate ------------------------------------------------------------------

struct AnnotateArgs {
  std::string input;
  std::string output;
  std::string model;
  std::string prompt;
  std::string disorders;
  bool retain_origin = false;
  bool overwrite = false;
};

int cmd_annotate(Context& ctx, const AnnotateArgs& a) {
  auto dataset = load_dataset(a.input);
  AnnotateRequest request;
  request.kind = a.prompt.empty() ? ctx.config.prompt_kind : prompt_kind_from_string(a.prompt);
  request.disorders = a.disorders.empty() ? ctx.config.disorders : split_list(a.disorders);
  request.retain_origin = a.retain_origin;
  request.overwrite = a.overwrite;
  request.record_timing = ctx.record_timing();
  const auto model = a.model.empty() ? ctx.config.providers.front().model_id : a.model;
  ctx.config.provider(model);
  if (ctx.dry_run) {
    ctx.out << "would annotate " << dataset.size() << " posts with " << model << " ("
            << to_string(request.kind) << ")\n";
    return 0;
  }
  request.manifest_path = manifest_path(ctx, "annotate-" + model + "-" + std::string(to_string(request.kind)) +
                                                 ".manifest.json");
  auto cache = open_cache(ctx);
  GatewayPool pool(ctx.config, ctx.registry, *cache, ctx.clock);
  auto report = annotate(dataset, ctx.registry, request, pool.get(model));
  ctx.out << "annotated with " << model << ": " << report.jobs << " requests, " << report.cache_hits
          << " cache hits, " << report.provider_calls << " provider calls\n";
  // Partial work is kept; a rerun resumes from the cache.
  save_output(dataset, a.output);
  write_meta(ctx, a.output, "annotate", {{"input", a.input}},
             {{"model", model}, {"prompt", to_string(request.kind)}, {"annotate", report_json(report)}});
  if (!report.complete()) {
    const auto message = std::to_string(report.failed_post_ids.size()) + " posts unannotated, rerun to resume (" +
                         report.first_error + ")";
    if (report.first_error_code == ExitCode::user) throw UserError(message);
    throw ProviderError(message, model, 0, 0);
  }
  return 0;
}

// evaluate ------------------------------------------------------------------

struct EvaluateArgs {
  std::string input;
  std::string output;
  std::string model;
  std::string vote;
  std::string prompt;
  std::string disorders;
  std::string truth = "truth";
  bool balanced = false;
};

int cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  if (a.model.empty() == a.vote.empty()) throw UserError("evaluate needs exactly one of --model and --vote");
  auto dataset = load_dataset(a.input);
  const auto kind = a.prompt.empty() ? ctx.config.prompt_kind : prompt_kind_from_string(a.prompt);
  EvaluateRequest request;
  request.prediction = LabelSource::parse(a.model.empty() ? "vote:" + a.vote : "model:" + a.model, kind);
  request.truth = LabelSource::parse(a.truth, kind);
  request.disorders = a.disorders.empty() ? ctx.config.disorders : split_list(a.disorders);
  if (a.balanced) dataset = balanced_subset(dataset, ctx.registry.in_registry_order(request.disorders), ctx.config.seed);
  const auto report = evaluate(dataset, ctx.registry, request);
  const MetricsReport reports[] = {report};
  const auto table = render_metrics_table(reports);
  ctx.out << table;
  if (ctx.dry_run) return 0;
  ensure_parent(a.output);
  write_file_atomic(a.output, to_json(report).dump(2) + "\n");
  write_file_atomic(a.output + ".txt", table);
  write_meta(ctx, a.output, "evaluate", {{"input", a.input}}, {{"balanced", a.balanced}, {"posts", report.posts}});
  return 0;
}

// analyze -------------------------------------------------------------------

struct AnalyzeArgs {
  std::string input;
  std::string output;
  std::string labels = "truth";
  std::string prompt;
  std::string disorders;
};

int cmd_analyze(Context& ctx, const AnalyzeArgs& a) {
  const auto dataset = load_dataset(a.input);
  const auto kind = a.prompt.empty() ? ctx.config.prompt_kind : prompt_kind_from_string(a.prompt);
  const auto source = LabelSource::parse(a.labels, kind);
  const auto disorders =
      ctx.registry.in_registry_order(a.disorders.empty() ? ctx.config.disorders : split_list(a.disorders));
  const auto labels = resolve_labels(dataset, source, disorders);
  const auto matrix = comorbidity_matrix(labels, disorders, source.describe());
  for (std::size_t i = 0; i < matrix.unordered.size(); ++i) {
    const auto& t = matrix.unordered[i];
    const auto& o = matrix.odds_ratios[i];
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-16s OR %8.3f%s\n", t.disorder_a.c_str(), t.disorder_b.c_str(), o.value,
                  o.corrected ? " (corrected)" : "");
    ctx.out << line;
  }
  if (ctx.dry_run) return 0;
  ensure_parent(a.output);
  auto record = to_json(matrix);
  record["distribution"] = to_json(label_distribution(labels, disorders, source.describe()));
  write_file_atomic(a.output, record.dump(2) + "\n");
  write_meta(ctx, a.output, "analyze", {{"input", a.input}}, {{"posts", labels.size()}});
  return 0;
}

// report --------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string output;
};

int cmd_report(Context& ctx, const ReportArgs& a) {
  std::vector<MetricsReport> reports;
  std::map<std::string, std::string> inputs;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(read_file(a.inputs[i]));
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("cannot parse " + a.inputs[i] + ": " + e.what());
    }
    reports.push_back(metrics_report_from_json(record));
    inputs["report" + std::to_string(i)] = a.inputs[i];
  }
  const auto table = render_metrics_table(reports);
  ctx.out << table;
  if (ctx.dry_run) return 0;
  ensure_parent(a.output);
  write_file_atomic(a.output, table);
  write_meta(ctx, a.output, "report", inputs, {{"rows", reports.size()}});
  return 0;
}

std::string one_line(std::string text) {
  for (auto& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

std::string_view kind_name(ExitCode code) {
  switch (code) {
    case ExitCode::io: return "io";
    case ExitCode::provider: return "provider";
    default: return "user";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"labelforge: multi-label mental-health dataset pipeline", "labelforge"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "Pipeline config (JSON)");
  app.add_option("--seed", g.seed, "Override the config seed");
  app.add_flag("--dry-run", g.dry_run, "Validate inputs and report the plan without writing or calling providers");
  app.add_option("--cache", g.cache_path, "Response cache file");
  app.add_option("--work-dir", g.work_dir, "Directory for resumable manifests");

  std::function<int(Context&)> action;

  MergeArgs merge;
  auto* c_merge = app.add_subcommand("merge", "Join Dreaddit and DepSeverity into the two-label dataset");
  c_merge->add_option("--dreaddit", merge.dreaddit)->required();
  c_merge->add_option("--depseverity", merge.depseverity)->required();
  c_merge->add_option("-o,--output", merge.output)->required();
  c_merge->add_option("--min-join-rate", merge.min_join_rate);
  c_merge->callback([&] { action = [&](Context& ctx) { return cmd_merge(ctx, merge); }; });

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Draw the per-disorder and control samples");
  c_sample->add_option("--rmhd", sample.rmhd, "RMHD CSV file (repeatable)");
  c_sample->add_option("-i,--input", sample.input, "Dataset to extend (--top-up) or balance (--balanced)");
  c_sample->add_option("-o,--output", sample.output)->required();
  c_sample->add_option("--per-disorder", sample.per_disorder);
  c_sample->add_option("--control", sample.control);
  c_sample->add_option("--groups", sample.groups, "Comma-separated disorder groups to draw");
  c_sample->add_flag("--top-up", sample.top_up, "Append fresh posts to --input");
  c_sample->add_flag("--balanced", sample.balanced, "Power-set balanced subset of --input");
  c_sample->add_option("--disorders", sample.disorders);
  c_sample->callback([&] { action = [&](Context& ctx) { return cmd_sample(ctx, sample); }; });

  ScreenArgs scr;
  auto* c_screen = app.add_subcommand("screen", "Ask the screening model about each post's own disorder");
  c_screen->add_option("-i,--input", scr.input)->required();
  c_screen->add_option("-o,--output", scr.output)->required();
  c_screen->add_option("--queue", scr.queue)->required();
  c_screen->add_option("--model", scr.model);
  c_screen->callback([&] { action = [&](Context& ctx) { return cmd_screen(ctx, scr); }; });

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("review-serve", "Serve the review API over a queue file");
  c_serve->add_option("--queue", serve.queue)->required();
  c_serve->add_option("--host", serve.host);
  c_serve->add_option("--port", serve.port);
  c_serve->add_option("--matrix", serve.matrix, "Analysis export for /api/matrix");
  c_serve->add_option("--static", serve.static_dir, "UI assets");
  c_serve->callback([&] { action = [&](Context& ctx) { return cmd_review_serve(ctx, serve); }; });

  FinalizeArgs fin;
  auto* c_fin = app.add_subcommand("finalize", "Apply review decisions and draw the final sample");
  c_fin->add_option("-i,--input", fin.input)->required();
  c_fin->add_option("--queue", fin.queue)->required();
  c_fin->add_option("-o,--output", fin.output)->required();
  c_fin->add_option("--per-disorder", fin.per_disorder);
  c_fin->add_flag("--auto-keep-all", fin.auto_keep_all, "Decide every pending item as keep");
  c_fin->callback([&] { action = [&](Context& ctx) { return cmd_finalize(ctx, fin); }; });

  BuildArgs build;
  auto* c_build = app.add_subcommand("build", "Convert a finalized dataset to multi-label form");
  c_build->add_option("-i,--input", build.input)->required();
  c_build->add_option("-o,--output", build.output)->required();
  c_build->add_option("--models", build.models);
  c_build->add_option("--prompt", build.prompt);
  c_build->add_option("--disorders", build.disorders);
  c_build->callback([&] { action = [&](Context& ctx) { return cmd_build(ctx, build); }; });

  AnnotateArgs ann;
  auto* c_ann = app.add_subcommand("annotate", "Run one annotation pass");
  c_ann->add_option("-i,--input", ann.input)->required();
  c_ann->add_option("-o,--output", ann.output)->required();
  c_ann->add_option("--model", ann.model);
  c_ann->add_option("--prompt", ann.prompt);
  c_ann->add_option("--disorders", ann.disorders);
  c_ann->add_flag("--retain-origin", ann.retain_origin);
  c_ann->add_flag("--overwrite", ann.overwrite);
  c_ann->callback([&] { action = [&](Context& ctx) { return cmd_annotate(ctx, ann); }; });

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score annotations against truth");
  c_ev->add_option("-i,--input", ev.input)->required();
  c_ev->add_option("-o,--output", ev.output)->required();
  c_ev->add_option("--model", ev.model);
  c_ev->add_option("--vote", ev.vote, "Comma-separated models for majority voting");
  c_ev->add_option("--prompt", ev.prompt);
  c_ev->add_option("--disorders", ev.disorders);
  c_ev->add_option("--truth", ev.truth);
  c_ev->add_flag("--balanced", ev.balanced, "Score the power-set balanced subset");
  c_ev->callback([&] { action = [&](Context& ctx) { return cmd_evaluate(ctx, ev); }; });

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Co-occurrence proportions and odds ratios");
  c_an->add_option("-i,--input", an.input)->required();
  c_an->add_option("-o,--output", an.output)->required();
  c_an->add_option("--labels", an.labels, "truth, model:<id> or vote:<id>,<id>,...");
  c_an->add_option("--prompt", an.prompt);
  c_an->add_option("--disorders", an.disorders);
  c_an->callback([&] { action = [&](Context& ctx) { return cmd_analyze(ctx, an); }; });

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Combine evaluation reports into one table");
  c_rep->add_option("inputs", rep.inputs)->required();
  c_rep->add_option("-o,--output", rep.output)->required();
  c_rep->callback([&] { action = [&](Context& ctx) { return cmd_report(ctx, rep); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "labelforge: error: user: " << one_line(e.what()) << "\n";
    return static_cast<int>(ExitCode::user);
  }

  try {
    auto config = g.config_path.empty() ? default_config() : load_config(g.config_path);
    if (g.seed) config.seed = *g.seed;
    if (!g.cache_path.empty()) config.cache_path = g.cache_path;
    if (!g.work_dir.empty()) config.work_dir = g.work_dir;
    auto registry = config.registry_path.empty() ? Registry::builtin()
                                                 : Registry::load(config.registry_path, config.synonyms_path);
    registry.in_registry_order(config.disorders);
    Context ctx(std::move(config), std::move(registry), out, err, g.dry_run);
    return action(ctx);
  } catch (const Error& e) {
    err << "labelforge: error: " << kind_name(e.code()) << ": " << one_line(e.what()) << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "labelforge: error: user: " << one_line(e.what()) << "\n";
    return static_cast<int>(ExitCode::user);
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace labelforge::cli
