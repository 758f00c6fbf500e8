// patternforge: forge, describe, match, select and eval from the shell.
//
// Exit codes: 0 success, 1 partial per-record failures, 2 usage/config/input errors.
#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "patternforge/descriptors.hpp"
#include "patternforge/errors.hpp"
#include "patternforge/forge.hpp"
#include "patternforge/manifest.hpp"
#include "patternforge/matches.hpp"
#include "patternforge/metrics.hpp"
#include "patternforge/patterns.hpp"
#include "patternforge/rng.hpp"
#include "patternforge/selection.hpp"

namespace pf = patternforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kUsage = 2;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Effective configuration of one invocation; written as run.json.
struct RunLog {
  std::string command;
  json config = json::object();
  std::string started = utc_now();

  void write(const fs::path& dir, int exit_code) const {
    if (dir.empty()) return;
    fs::create_directories(dir);
    json j = {{"command", command},
              {"config", config},
              {"exit_code", exit_code},
              {"started_at", started},
              {"finished_at", utc_now()}};
    std::ofstream(dir / "run.json") << j.dump(2) << "\n";
  }
};

fs::path dir_of(const fs::path& file) { return file.has_parent_path() ? file.parent_path() : fs::path("."); }

std::string joined(const fs::path& base, const std::string& rel) {
  const fs::path p(rel);
  return (p.is_absolute() ? p : base / p).lexically_normal().string();
}

/// Image list from a source directory, a source manifest, a record manifest
/// (id/path relative to the manifest) or a pool manifest (replicas, keyed by pair id).
std::vector<pf::ImageRef> image_list(const fs::path& input) {
  std::vector<pf::ImageRef> refs;
  if (fs::is_directory(input)) {
    for (const auto& s : pf::load_sources(input)) refs.push_back({s.id, s.path});
    return refs;
  }
  const auto rows = pf::read_jsonl(input);
  const fs::path base = dir_of(input);
  if (!rows.empty() && rows.front().contains("pair_id") && rows.front().contains("replica_path")) {
    for (const auto& e : pf::read_pool(input)) refs.push_back({e.pair_id, joined(base, e.replica_path)});
  } else if (!rows.empty() && rows.front().contains("split")) {
    for (const auto& r : pf::read_records(input)) refs.push_back({r.id, joined(base, r.path)});
  } else {
    for (const auto& s : pf::load_sources(input)) refs.push_back({s.id, s.path});
  }
  return refs;
}

int report_errors(const std::vector<pf::RecordError>& errors, std::string_view what) {
  if (errors.empty()) return kOk;
  std::cerr << "patternforge: " << errors.size() << " " << what << " record(s) failed\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(errors.size(), 5); ++i) {
    std::cerr << "  " << errors[i].record_id << ": " << errors[i].message << "\n";
  }
  return kPartial;
}

std::uint64_t seed_default() {
  const char* env = std::getenv("PATTERNFORGE_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used, 0);
    if (env[used] != '\0') throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw pf::ConfigError(std::string("PATTERNFORGE_SEED is not an unsigned integer: ") + env);
  }
}

struct ForgeFlags {
  std::string sources;
  std::string distractors;
  std::string eval_dir;
  std::string keys;
  std::string out;
  std::string category;
  pf::ForgeConfig config;
};

void add_forge_common(CLI::App* cmd, ForgeFlags& f) {
  cmd->add_option("--sources", f.sources, "source directory or manifest")->required();
  cmd->add_option("--out", f.out, "output directory")->required();
  cmd->add_option("--kmin", f.config.kmin, "smallest combo size");
  cmd->add_option("--kmax", f.config.kmax, "largest combo size");
  cmd->add_option("--category", f.category, "restrict patterns to one category");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patternforge: seeded tamper patterns, dataset forge, matching and metrics"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  try {
    seed = seed_default();
  } catch (const pf::Error& e) {
    std::cerr << "patternforge: " << e.what() << "\n";
    return kUsage;
  }
  app.add_option("--seed", seed, "global seed (default $PATTERNFORGE_SEED or 0)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  // patterns
  auto* patterns = app.add_subcommand("patterns", "inspect and demo the pattern catalog");
  patterns->require_subcommand(1);
  auto* p_list = patterns->add_subcommand("list", "one line per pattern");
  auto* p_dump = patterns->add_subcommand("dump", "catalog with parameter schemas as JSON");
  auto* p_demo = patterns->add_subcommand("demo", "seeded variants of one image");
  std::string demo_pattern, demo_input, demo_out;
  std::size_t demo_count = 4;
  p_demo->add_option("--pattern", demo_pattern, "pattern id")->required();
  p_demo->add_option("--input", demo_input, "input image")->required();
  p_demo->add_option("--count", demo_count, "number of variants")->check(CLI::PositiveNumber);
  p_demo->add_option("--out", demo_out, "output directory")->required();

  // forge
  auto* forge = app.add_subcommand("forge", "build training, evaluation and prompt-pool sets");
  forge->require_subcommand(1);
  ForgeFlags train, eval, pool;
  train.config.pattern_split = pf::Split::base;
  eval.config.pattern_split = pf::Split::novel;
  pool.config.pattern_split = pf::Split::novel;
  auto* f_train = forge->add_subcommand("train", "originals plus base-pattern replicas");
  add_forge_common(f_train, train);
  f_train->add_option("--replicas", train.config.replicas_per_original, "replicas per original");
  auto* f_eval = forge->add_subcommand("eval", "gallery, true queries and distractors");
  add_forge_common(f_eval, eval);
  f_eval->add_option("--distractors", eval.distractors, "distractor source directory or manifest");
  f_eval->add_option("--true-queries", eval.config.n_true_queries, "true query count");
  f_eval->add_option("--distractor-queries", eval.config.n_distractor_queries, "distractor query count");
  f_eval->add_flag("--noop", eval.config.noop_queries, "queries are untransformed copies");
  auto* f_pool = forge->add_subcommand("pool", "prompt pairs for the combos of an eval set");
  add_forge_common(f_pool, pool);
  f_pool->add_option("--eval", pool.eval_dir, "eval directory (keys and excluded sources)");
  f_pool->add_option("--keys", pool.keys, "comma separated combo keys instead of --eval");
  f_pool->add_option("--pairs-per-combo", pool.config.pool_pairs_per_combo, "pairs per combo key");

  // describe
  auto* describe = app.add_subcommand("describe", "thumbnail descriptors for a manifest");
  std::string describe_manifest, describe_out;
  describe->add_option("--manifest", describe_manifest, "image directory or manifest")->required();
  describe->add_option("--out", describe_out, "descriptor file")->required();

  // match
  auto* match = app.add_subcommand("match", "exact cosine top-k search");
  std::vector<std::string> match_queries;
  std::string match_gallery, match_out;
  std::size_t match_k = 10;
  match->add_option("--queries", match_queries, "query descriptors (repeat for top-N prompts)")->required();
  match->add_option("--gallery", match_gallery, "gallery descriptors")->required();
  match->add_option("--k", match_k, "candidates per query")->check(CLI::PositiveNumber);
  match->add_option("--out", match_out, "match CSV")->required();

  // select
  auto* select = app.add_subcommand("select", "assign prompt pairs to queries");
  std::string sel_mode, sel_queries, sel_pool, sel_qf, sel_pf, sel_gt, sel_out;
  std::size_t sel_n = 1;
  select->add_option("--mode", sel_mode, "random|feature|ground_truth|wrong|self_upper|zero_shot")->required();
  select->add_option("--queries", sel_queries, "queries.jsonl")->required();
  select->add_option("--pool", sel_pool, "pool.jsonl");
  select->add_option("--query-features", sel_qf, "query pattern features");
  select->add_option("--pool-features", sel_pf, "pool pattern features");
  select->add_option("--gt", sel_gt, "gt.csv");
  select->add_option("--n", sel_n, "pairs per query")->check(CLI::PositiveNumber);
  select->add_option("--out", sel_out, "prompts.jsonl")->required();

  // eval
  auto* evaluate = app.add_subcommand("eval", "micro AP, recall@1 and pattern accuracy");
  std::string ev_matches, ev_gt, ev_queries, ev_gallery, ev_prompts, ev_out;
  evaluate->add_option("--matches", ev_matches, "match CSV")->required();
  evaluate->add_option("--gt", ev_gt, "gt.csv")->required();
  evaluate->add_option("--queries", ev_queries, "queries.jsonl");
  evaluate->add_option("--gallery", ev_gallery, "gallery.jsonl");
  evaluate->add_option("--prompts", ev_prompts, "prompts.jsonl (adds pattern accuracy)");
  evaluate->add_option("--out", ev_out, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  RunLog log;
  fs::path run_dir;
  int code = kOk;
  try {
    log.config["seed"] = seed;
    log.config["workers"] = workers;

    if (p_list->parsed()) {
      log.command = "patterns list";
      for (const auto& d : pf::catalog()) {
        std::cout << d.id << '\t' << pf::to_string(d.split) << '\t' << pf::to_string(d.category) << '\t'
                  << d.summary << '\n';
      }
    } else if (p_dump->parsed()) {
      log.command = "patterns dump";
      std::cout << pf::catalog_json().dump(2) << '\n';
    } else if (p_demo->parsed()) {
      log.command = "patterns demo";
      run_dir = demo_out;
      log.config.update({{"pattern", demo_pattern}, {"input", demo_input}, {"count", demo_count}});
      pf::find_pattern(demo_pattern);
      const pf::Image input = pf::read_image(demo_input);
      fs::create_directories(demo_out);
      std::vector<json> rows;
      for (std::size_t i = 0; i < demo_count; ++i) {
        const auto instance = pf::sample_instance(demo_pattern, pf::derive_seed(seed, demo_pattern, i));
        const std::string name = demo_pattern + "_" + std::to_string(i) + ".png";
        pf::write_png(pf::apply(input, instance), fs::path(demo_out) / name);
        rows.push_back({{"file", name}, {"instance", pf::to_json(instance)}});
      }
      pf::write_jsonl(fs::path(demo_out) / "demo.jsonl", rows);
    } else if (forge->parsed()) {
      ForgeFlags& f = f_train->parsed() ? train : f_eval->parsed() ? eval : pool;
      log.command = std::string("forge ") + (f_train->parsed() ? "train" : f_eval->parsed() ? "eval" : "pool");
      run_dir = f.out;
      f.config.global_seed = seed;
      f.config.workers = workers;
      if (!f.category.empty()) f.config.category = pf::parse_category(f.category);
      log.config.update({{"sources", f.sources},
                         {"kmin", f.config.kmin},
                         {"kmax", f.config.kmax},
                         {"split", pf::to_string(f.config.pattern_split)},
                         {"category", f.category}});
      if (!fs::exists(f.sources)) throw pf::ConfigError("sources not found: " + f.sources);
      const auto sources = pf::load_sources(f.sources);
      if (f_train->parsed()) {
        log.config["replicas"] = f.config.replicas_per_original;
        const auto result = pf::forge_training_set(sources, f.config, f.out);
        std::cout << "train: " << result.records.size() << " records\n";
        code = report_errors(result.errors, "training");
      } else if (f_eval->parsed()) {
        log.config.update({{"distractors", f.distractors},
                           {"true_queries", f.config.n_true_queries},
                           {"distractor_queries", f.config.n_distractor_queries},
                           {"noop", f.config.noop_queries}});
        std::vector<pf::SourceEntry> distractors;
        if (!f.distractors.empty()) {
          if (!fs::exists(f.distractors)) throw pf::ConfigError("distractors not found: " + f.distractors);
          distractors = pf::load_sources(f.distractors);
        }
        const auto result = pf::forge_eval_set(sources, distractors, f.config, f.out);
        std::cout << "eval: " << result.gallery.size() << " gallery, " << result.queries.size() << " queries, "
                  << result.ground_truth.size() << " true\n";
        code = report_errors(result.errors, "evaluation");
      } else {
        log.config.update({{"eval", f.eval_dir}, {"keys", f.keys}, {"pairs_per_combo", f.config.pool_pairs_per_combo}});
        std::vector<std::string> keys;
        std::vector<std::string> excluded;
        if (!f.eval_dir.empty()) {
          const fs::path dir(f.eval_dir);
          const auto queries = pf::read_records(dir / "queries.jsonl");
          const auto gallery = pf::read_records(dir / "gallery.jsonl");
          keys = pf::true_query_combo_keys(queries, pf::read_ground_truth(dir / "gt.csv"));
          for (const auto& r : queries) excluded.push_back(r.source_id);
          for (const auto& r : gallery) excluded.push_back(r.source_id);
        }
        if (!f.keys.empty()) {
          std::stringstream ss(f.keys);
          for (std::string key; std::getline(ss, key, ',');) keys.push_back(pf::combo_key(pf::parse_combo_key(key)));
        }
        if (keys.empty()) throw pf::ConfigError("forge pool needs --eval or --keys");
        const auto result = pf::build_prompt_pool(sources, keys, f.config, excluded, f.out);
        std::cout << "pool: " << result.entries.size() << " pairs over " << keys.size() << " keys\n";
        code = report_errors(result.errors, "pool");
      }
    } else if (describe->parsed()) {
      log.command = "describe";
      run_dir = dir_of(describe_out);
      log.config.update({{"manifest", describe_manifest}, {"out", describe_out}, {"backend", "thumbnail"}});
      if (!fs::exists(describe_manifest)) throw pf::ConfigError("manifest not found: " + describe_manifest);
      const auto refs = image_list(describe_manifest);
      pf::write_descriptors(pf::describe_images(refs, workers), describe_out);
      std::cout << "describe: " << refs.size() << " descriptors\n";
    } else if (match->parsed()) {
      log.command = "match";
      run_dir = dir_of(match_out);
      log.config.update({{"queries", match_queries}, {"gallery", match_gallery}, {"k", match_k}});
      const auto gallery = pf::read_descriptors(match_gallery);
      std::vector<pf::MatchList> lists;
      for (const auto& q : match_queries) lists.push_back(pf::search_topk(pf::read_descriptors(q), gallery, match_k, workers));
      pf::MatchList result = lists.size() == 1 ? std::move(lists.front()) : pf::aggregate_max(lists);
      pf::truncate(result, match_k);
      pf::write_matches(result, match_out);
    } else if (select->parsed()) {
      log.command = "select";
      run_dir = dir_of(sel_out);
      const auto mode = pf::parse_selection_mode(sel_mode);
      log.config.update({{"mode", sel_mode}, {"queries", sel_queries}, {"pool", sel_pool},
                         {"query_features", sel_qf}, {"pool_features", sel_pf}, {"gt", sel_gt}, {"n", sel_n}});
      pf::SelectionInputs in;
      in.queries = pf::read_records(sel_queries);
      for (auto& q : in.queries) {
        q.path = joined(dir_of(sel_queries), q.path);
      }
      if (!sel_pool.empty()) {
        in.pool = pf::read_pool(sel_pool);
        for (auto& e : in.pool) {
          e.original_path = joined(dir_of(sel_pool), e.original_path);
          e.replica_path = joined(dir_of(sel_pool), e.replica_path);
        }
      }
      std::optional<pf::Descriptors> qf, pfeat;
      std::optional<pf::GroundTruth> gt;
      if (!sel_qf.empty()) qf = pf::read_descriptors(sel_qf);
      if (!sel_pf.empty()) pfeat = pf::read_descriptors(sel_pf);
      if (!sel_gt.empty()) gt = pf::read_ground_truth(sel_gt);
      in.query_features = qf ? &*qf : nullptr;
      in.pool_features = pfeat ? &*pfeat : nullptr;
      in.ground_truth = gt ? &*gt : nullptr;
      in.n = sel_n;
      in.seed = seed;
      pf::write_assignment(sel_out, pf::select_prompts(mode, in));
    } else if (evaluate->parsed()) {
      log.command = "eval";
      run_dir = dir_of(ev_out);
      log.config.update({{"matches", ev_matches}, {"gt", ev_gt}, {"queries", ev_queries},
                         {"gallery", ev_gallery}, {"prompts", ev_prompts}});
      const auto matches = pf::read_matches(ev_matches);
      const auto gt = pf::read_ground_truth(ev_gt);
      std::optional<std::vector<pf::ProvenanceRecord>> queries, gallery;
      std::optional<pf::PromptAssignment> prompts;
      if (!ev_queries.empty()) queries = pf::read_records(ev_queries);
      if (!ev_gallery.empty()) gallery = pf::read_records(ev_gallery);
      if (!ev_prompts.empty()) prompts = pf::read_assignment(ev_prompts);
      pf::ReportInputs in;
      in.matches = &matches;
      in.ground_truth = &gt;
      in.queries = queries ? &*queries : nullptr;
      in.gallery = gallery ? &*gallery : nullptr;
      in.assignment = prompts ? &*prompts : nullptr;
      in.config = {{"matches", ev_matches}, {"gt", ev_gt}};
      if (prompts) in.config["selection_mode"] = std::string(pf::to_string(prompts->mode));
      const auto report = pf::build_report(in);
      const std::string text = report.to_json_text();
      if (fs::path(ev_out).has_parent_path()) fs::create_directories(fs::path(ev_out).parent_path());
      std::ofstream(ev_out, std::ios::binary | std::ios::trunc) << text;
      std::cout << text;
    }
  } catch (const pf::Error& e) {
    std::cerr << "patternforge: " << e.what() << "\n";
    code = kUsage;
  } catch (const std::exception& e) {
    std::cerr << "patternforge: " << e.what() << "\n";
    code = kUsage;
  }
  try {
    log.write(run_dir, code);
  } catch (const std::exception& e) {
    std::cerr << "patternforge: cannot write run.json: " << e.what() << "\n";
  }
  return code;
}
