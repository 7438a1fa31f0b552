#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "colmatch/embedding.hpp"
#include "colmatch/error.hpp"
#include "colmatch/evaluation.hpp"
#include "colmatch/ingest.hpp"
#include "colmatch/pipeline.hpp"
#include "colmatch/report.hpp"
#include "colmatch/store.hpp"
#include "run_config.hpp"

namespace colmatch::cli {
namespace {

namespace fs = std::filesystem;

// Flag values plus the option handles used to tell whether each was given;
// only given flags override the config file.
struct SharedFlags {
  std::string config_path;
  std::string store, provider, endpoint, mode, format;
  std::size_t dim = 0, chunk_size = 0, k = 0, jobs = 0;
  double threshold = 0;
  std::uint64_t seed = 0;
  bool force = false;
  bool on_demand = false;
  std::string reference;
  std::vector<std::string> unknowns;
  std::string columns, truth, counts;

  CLI::Option *store_opt{}, *provider_opt{}, *endpoint_opt{}, *mode_opt{}, *dim_opt{},
      *chunk_opt{}, *k_opt{}, *threshold_opt{}, *seed_opt{}, *jobs_opt{}, *reference_opt{},
      *unknown_opt{}, *columns_opt{}, *truth_opt{}, *counts_opt{};
};

void add_shared_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config_path, "Run configuration file (key = value)");
  f.store_opt = cmd->add_option("--store", f.store, "Embedding store directory");
  f.provider_opt = cmd->add_option("--provider", f.provider, "Embedding provider")
                       ->check(CLI::IsMember({"hash", "hash-v1", "remote"}));
  f.endpoint_opt = cmd->add_option("--endpoint", f.endpoint, "Remote embedding service URL");
  f.dim_opt = cmd->add_option("--dim", f.dim, "Embedding dimension (default 384)");
  f.chunk_opt = cmd->add_option("--chunk-size", f.chunk_size, "Values per embedding chunk");
  f.k_opt = cmd->add_option("--k", f.k, "Candidates per reference column (default 3)");
  f.threshold_opt = cmd->add_option("--threshold", f.threshold,
                                    "Value-score threshold before metadata re-ranking");
  f.mode_opt = cmd->add_option("--mode", f.mode, "Match mode")
                   ->check(CLI::IsMember({"values", "metadata", "names"}));
  f.seed_opt = cmd->add_option("--seed", f.seed, "Seed for distractor sampling");
  f.jobs_opt = cmd->add_option("--jobs", f.jobs, "Parallel embedding jobs");
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_flag("--force", f.force, "Recompute embeddings that are already stored");
  f.reference_opt = cmd->add_option("--reference", f.reference, "Reference database [name=]path");
  f.unknown_opt = cmd->add_option("--unknown", f.unknowns, "Unknown database [name=]path");
  f.columns_opt = cmd->add_option("--columns", f.columns, "Comma-separated columns of interest");
  f.truth_opt = cmd->add_option("--truth", f.truth, "Ground-truth JSON file");
  f.counts_opt = cmd->add_option("--counts", f.counts, "Distractor counts, e.g. 0,20,50,all");
  cmd->add_flag("--on-demand", f.on_demand, "Compute embeddings missing from the store");
}

RunConfig build_config(const SharedFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) load_config_file(f.config_path, cfg);
  if (f.store_opt->count()) cfg.store = f.store;
  if (f.provider_opt->count()) cfg.provider = f.provider;
  if (f.endpoint_opt->count()) cfg.endpoint = f.endpoint;
  if (f.dim_opt->count()) cfg.dim = f.dim;
  if (f.chunk_opt->count()) cfg.chunk_size = f.chunk_size;
  if (f.k_opt->count()) cfg.match.k = f.k;
  if (f.threshold_opt->count()) cfg.match.threshold = f.threshold;
  if (f.mode_opt->count()) cfg.match.mode = *parse_match_mode(f.mode);
  if (f.seed_opt->count()) cfg.seed = f.seed;
  if (f.jobs_opt->count()) cfg.jobs = f.jobs;
  if (f.reference_opt->count()) cfg.reference = parse_db_spec(f.reference);
  if (f.unknown_opt->count()) {
    cfg.unknowns.clear();
    for (const auto& u : f.unknowns) cfg.unknowns.push_back(parse_db_spec(u));
  }
  if (f.columns_opt->count()) cfg.columns = split_list(f.columns);
  if (f.truth_opt->count()) cfg.truth = fs::path(f.truth);
  if (f.counts_opt->count()) cfg.counts = split_list(f.counts);

  if (cfg.dim == 0) throw InputError("--dim must be >= 1");
  if (cfg.chunk_size == 0) throw InputError("--chunk-size must be >= 1");
  if (cfg.jobs == 0) throw InputError("--jobs must be >= 1");
  cfg.match.validate();
  return cfg;
}

std::unique_ptr<EmbeddingProvider> make_provider(const RunConfig& cfg) {
  if (cfg.provider == "hash" || cfg.provider == "hash-v1") {
    return std::make_unique<HashProvider>(cfg.dim);
  }
  if (cfg.provider == "remote") {
    if (cfg.endpoint.empty()) throw InputError("--provider remote requires --endpoint");
    RemoteConfig rc{cfg.endpoint, cfg.dim, cfg.max_batch,
                    std::chrono::milliseconds(cfg.timeout_ms)};
    auto provider = std::make_unique<RemoteProvider>(rc);
    provider->check_health();
    return provider;
  }
  throw InputError("unknown provider '" + cfg.provider + "'");
}

DatabaseHandle load(const DbSpec& spec) { return load_database(spec.path, spec.name); }

DatabaseHandle load_reference(const RunConfig& cfg) {
  if (!cfg.reference) throw InputError("no reference database configured (--reference)");
  return load(*cfg.reference);
}

std::vector<DatabaseHandle> load_unknowns(const RunConfig& cfg) {
  if (cfg.unknowns.empty()) throw InputError("no unknown databases configured (--unknown)");
  std::vector<DatabaseHandle> dbs;
  for (const auto& u : cfg.unknowns) dbs.push_back(load(u));
  return dbs;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::size_t> parse_sizes(const std::vector<std::string>& items, std::size_t all,
                                     const char* what) {
  std::vector<std::size_t> out;
  for (const auto& item : items) {
    if (item == "all") {
      out.push_back(all);
      continue;
    }
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw InputError(std::string("bad ") + what + " '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

ResultFormat result_format(const SharedFlags& f) {
  return f.format.empty() ? ResultFormat::kCsv : *parse_result_format(f.format);
}

OnDemand on_demand_for(const SharedFlags& f, const RunConfig& cfg,
                       std::unique_ptr<EmbeddingProvider>& holder) {
  if (!f.on_demand) return {};
  holder = make_provider(cfg);
  return {holder.get(), cfg.chunk_size};
}

// --- subcommands -----------------------------------------------------------

int cmd_profile(const std::string& db_path, const std::string& name, const SharedFlags& f,
                std::ostream& out) {
  const auto db = load_database(db_path, name);
  const auto profiles = profile_database(db);
  const std::string format = f.format.empty() ? "table" : f.format;

  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["database"] = db.name;
    doc["columns"] = nlohmann::ordered_json::array();
    for (const auto& p : profiles) {
      nlohmann::ordered_json c;
      c["column"] = p.ref.column_name;
      c["dtype"] = to_string(p.dtype);
      c["tables"] = p.ref.tables;
      c["unique_count"] = p.unique_values.size();
      c["total_count"] = p.total_count;
      c["null_count"] = p.null_count;
      doc["columns"].push_back(std::move(c));
    }
    out << doc.dump(2) << "\n";
  } else if (format == "csv") {
    out << "column,dtype,tables,unique_count,total_count,null_count\n";
    for (const auto& p : profiles) {
      out << p.ref.column_name << "," << to_string(p.dtype) << ",\"" << join_tables(p.ref.tables)
          << "\"," << p.unique_values.size() << "," << p.total_count << "," << p.null_count
          << "\n";
    }
  } else {
    out << db.name << " (" << db.tables.size() << " tables, " << profiles.size()
        << " columns)\n";
    for (const auto& p : profiles) {
      out << "  " << p.ref.column_name << ": " << to_string(p.dtype) << ", uniques "
          << p.unique_values.size() << ", total " << p.total_count << ", nulls "
          << p.null_count << ", tables [" << join_tables(p.ref.tables) << "]\n";
    }
  }
  return kExitOk;
}

int cmd_embed(const SharedFlags& f, std::ostream& out, std::ostream& err) {
  const auto cfg = build_config(f);
  std::vector<DatabaseHandle> dbs;
  if (cfg.reference) dbs.push_back(load_reference(cfg));
  for (const auto& u : cfg.unknowns) dbs.push_back(load(u));
  if (dbs.empty()) throw InputError("no databases configured (--reference / --unknown)");

  const auto provider = make_provider(cfg);
  const auto store = EmbeddingStore::open_or_create(cfg.store, provider->id(), provider->dim());
  EmbedOptions options{cfg.chunk_size, cfg.jobs, f.force};

  std::size_t embedded = 0, up_to_date = 0, empty = 0;
  for (const auto& db : dbs) {
    auto summary = embed_database(db, *provider, store, options);
    embedded += summary.embedded;
    up_to_date += summary.up_to_date;
    empty += summary.empty_columns.size();
    for (const auto& ref : summary.empty_columns) {
      err << "colmatch: " << ref.database << "." << ref.column_name
          << " skipped: " << kNoValuesReason << "\n";
    }
  }
  out << "store " << cfg.store.string() << " (" << store.provider_id() << ", dim "
      << store.dim() << "): embedded " << embedded << ", skipped " << up_to_date
      << " up to date, " << empty << " empty\n";
  return kExitOk;
}

int cmd_match(const SharedFlags& f, const std::string& out_path, std::ostream& out) {
  const auto cfg = build_config(f);
  const auto reference = load_reference(cfg);
  const auto unknowns = load_unknowns(cfg);
  const auto store = EmbeddingStore::open(cfg.store);

  std::vector<std::string> columns = cfg.columns;
  if (columns.empty()) {
    for (const auto& ref : list_column_refs(reference)) columns.push_back(ref.column_name);
  }
  std::unique_ptr<EmbeddingProvider> provider;
  const auto on_demand = on_demand_for(f, cfg, provider);
  const auto report = match_columns(reference, columns, unknowns, store, cfg.match, on_demand);
  const auto text = serialize_report(report);
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw InputError("cannot write " + out_path);
    file << text;
  }
  return kExitOk;
}

int cmd_eval(const SharedFlags& f, const std::string& report_path, const std::string& ks_text,
             std::ostream& out) {
  const auto cfg = build_config(f);
  if (report_path.empty()) throw InputError("eval requires --report");
  if (!cfg.truth) throw InputError("eval requires --truth");
  const auto report = parse_report(read_text(report_path));
  const auto truth = load_ground_truth(*cfg.truth);

  std::vector<std::size_t> ks;
  if (ks_text.empty()) {
    for (std::size_t k = 1; k <= report.config.k; ++k) ks.push_back(k);
  } else {
    ks = parse_sizes(split_list(ks_text), report.config.k, "k");
  }
  std::vector<EvalResult> results;
  for (auto k : ks) results.push_back(accuracy_at_k(report, truth, k));
  out << render_results(results, result_format(f));
  return kExitOk;
}

int cmd_scale(const SharedFlags& f, std::ostream& out) {
  const auto cfg = build_config(f);
  if (!cfg.truth) throw InputError("scale requires --truth");
  const auto reference = load_reference(cfg);
  const auto unknowns = load_unknowns(cfg);
  const auto truth = load_ground_truth(*cfg.truth);
  {
    std::vector<DatabaseHandle> all{reference};
    all.insert(all.end(), unknowns.begin(), unknowns.end());
    validate_ground_truth(truth, all);
  }
  const auto store = EmbeddingStore::open(cfg.store);
  std::unique_ptr<EmbeddingProvider> provider;
  const auto on_demand = on_demand_for(f, cfg, provider);

  std::vector<ColumnRef> query_refs;
  std::set<ColumnId> truth_ids;
  const auto ref_columns = list_column_refs(reference);
  for (const auto& e : truth.entries) {
    for (const auto& r : ref_columns) {
      if (r.column_name == e.reference.column) query_refs.push_back(r);
    }
    if (e.truth) truth_ids.insert(*e.truth);
  }

  ScalingInputs inputs;
  inputs.reference_db = reference.name;
  auto resolved = resolve_columns(reference, query_refs, store, on_demand);
  std::vector<StoreKey> missing = resolved.missing;
  std::vector<EmbeddedColumn> pool;
  try {
    pool = load_candidate_pool(unknowns, store, on_demand);
  } catch (const MissingEmbeddingsError& e) {
    missing.insert(missing.end(), e.keys().begin(), e.keys().end());
  }
  if (!missing.empty()) throw MissingEmbeddingsError(std::move(missing));

  inputs.queries = std::move(resolved.columns);
  inputs.skipped_queries = std::move(resolved.skipped);
  for (auto& c : pool) {
    const ColumnId id{c.values.ref.database, c.values.ref.column_name};
    (truth_ids.contains(id) ? inputs.true_pool : inputs.distractor_pool).push_back(std::move(c));
  }

  std::vector<std::string> count_items = cfg.counts;
  if (count_items.empty()) count_items = {"0", "all"};
  const auto counts = parse_sizes(count_items, inputs.distractor_pool.size(), "count");
  const auto results = scaling_experiment(inputs, truth, counts, cfg.seed, cfg.match);
  out << render_results(results, result_format(f));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Embedding-based column matching across databases", "colmatch"};
  app.require_subcommand(1);

  SharedFlags profile_flags, embed_flags, match_flags, eval_flags, scale_flags;

  auto* profile = app.add_subcommand("profile", "Print per-column profiles of a database");
  std::string profile_path, profile_name;
  profile->add_option("database", profile_path, "Database directory")->required();
  profile->add_option("--name", profile_name, "Database name (default: directory name)");
  add_shared_flags(profile, profile_flags);

  auto* embed = app.add_subcommand("embed", "Compute and store column embeddings");
  add_shared_flags(embed, embed_flags);

  auto* match = app.add_subcommand("match", "Match reference columns against unknown databases");
  std::string match_out;
  match->add_option("--out,-o", match_out, "Write the report here instead of stdout");
  add_shared_flags(match, match_flags);

  auto* eval = app.add_subcommand("eval", "Score a match report against ground truth");
  std::string report_path, ks_text;
  eval->add_option("--report", report_path, "Match report JSON")->required();
  eval->add_option("--ks", ks_text, "Comma-separated k values (default 1..report k)");
  add_shared_flags(eval, eval_flags);

  auto* scale = app.add_subcommand("scale", "Accuracy as random distractor columns are added");
  add_shared_flags(scale, scale_flags);

  std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv_tail.begin(), argv_tail.end());
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "colmatch: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*profile) return cmd_profile(profile_path, profile_name, profile_flags, out);
    if (*embed) return cmd_embed(embed_flags, out, err);
    if (*match) return cmd_match(match_flags, match_out, out);
    if (*eval) return cmd_eval(eval_flags, report_path, ks_text, out);
    if (*scale) return cmd_scale(scale_flags, out);
  } catch (const MissingEmbeddingsError& e) {
    err << "colmatch: " << e.what() << "\n";
    return kExitMissing;
  } catch (const Error& e) {
    err << "colmatch: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kProvider: return kExitProvider;
      case ErrorKind::kMissing: return kExitMissing;
      case ErrorKind::kInput:
      case ErrorKind::kCorrupted: return kExitInput;
    }
  } catch (const std::exception& e) {
    err << "colmatch: internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace colmatch::cli
