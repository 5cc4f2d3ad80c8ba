#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include <CLI11.hpp>

#include "fosbench/corpus.hpp"
#include "fosbench/diagnostics.hpp"
#include "fosbench/edgebank.hpp"
#include "fosbench/error.hpp"
#include "fosbench/evaluation.hpp"
#include "fosbench/features.hpp"
#include "fosbench/io.hpp"
#include "fosbench/neural_scorer.hpp"
#include "fosbench/temporal_graph.hpp"

namespace fosbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class Kind { kString, kInt, kUnsigned, kDouble, kFlag };

struct FlagSpec {
  const char* flag;
  const char* key;
  Kind kind;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--concepts", "concepts", Kind::kString, "concept records (JSON lines)"},
    {"--works", "works", Kind::kString, "work records (JSON lines)"},
    {"--embeddings", "embeddings", Kind::kString, "text embedding table"},
    {"--out", "out", Kind::kString, "run directory"},
    {"--horizon", "horizon", Kind::kString, "year range kept from the corpus, e.g. 2002:2024"},
    {"--roots", "roots", Kind::kString, "comma-separated root field ids of the domain"},
    {"--train", "train_years", Kind::kString, "training years"},
    {"--val", "val_years", Kind::kString, "validation years"},
    {"--test", "test_years", Kind::kString, "test years"},
    {"--regime", "regimes", Kind::kString, "comma-separated negative regimes: random,historical,inductive"},
    {"--models", "models", Kind::kString, "comma-separated scorers: edgebank_inf,edgebank_tw,neural"},
    {"--neighbors", "neighbors", Kind::kString, "neighbor sampler: uniform, recent or time_aware"},
    {"--S", "S", Kind::kInt, "neighbor budget"},
    {"--alpha", "alpha", Kind::kDouble, "recency factor of the time-aware sampler"},
    {"--negatives", "negatives", Kind::kInt, "negatives per positive"},
    {"--batch-size", "batch_size", Kind::kInt, "positives per batch"},
    {"--seed", "seed", Kind::kUnsigned, "master seed"},
    {"--tw-window", "tw_window", Kind::kInt, "EdgeBank window in years (0: length of the test range)"},
    {"--lr", "lr", Kind::kDouble, "learning rate"},
    {"--dropout", "dropout", Kind::kDouble, "dropout rate"},
    {"--epochs", "epochs", Kind::kInt, "maximum epochs"},
    {"--patience", "patience", Kind::kInt, "early-stopping patience"},
    {"--embed-dim", "embed_dim", Kind::kInt, "node embedding size"},
    {"--hidden-dim", "hidden_dim", Kind::kInt, "hidden layer size"},
    {"--time-dim", "time_dim", Kind::kInt, "time encoding size"},
    {"--ablation", "ablation", Kind::kString, "feature terms to drop: level,name,desc,ancestor,related"},
    {"--pca-dim", "pca_dim", Kind::kInt, "PCA output dimension (0 keeps the raw features)"},
    {"--threads", "threads", Kind::kInt, "worker threads"},
    {"--year", "year", Kind::kInt, "reference year for predict"},
    {"--top-k", "top_k", Kind::kInt, "predictions to keep"},
    {"--candidate-budget", "candidate_budget", Kind::kUnsigned, "maximum candidate pairs scored by predict"},
    {"--predict-model", "predict_model", Kind::kString, "scorer used by predict"},
    {"--strict", "strict", Kind::kFlag, "fail on the first malformed record"},
    {"--drop-ancestor-pairs", "drop_ancestor_pairs", Kind::kFlag, "skip pairs where one field is an ancestor of the other"},
    {"--reference", "reference", Kind::kFlag, "report counts against the published graph size"},
    {"--audit", "audit", Kind::kFlag, "write every sampled negative to audit CSVs"},
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Context {
  json config;
  std::string hash;
  std::uint64_t seed = 0;
  fs::path out;
  std::ostream* log = nullptr;

  std::string header() const { return metadata_header(hash, seed); }
  std::string str(const char* key) const { return config.at(key).get<std::string>(); }
  int integer(const char* key) const { return config.at(key).get<int>(); }
  double real(const char* key) const { return config.at(key).get<double>(); }
  bool flag(const char* key) const { return config.at(key).get<bool>(); }

  fs::path input(const char* key) const {
    const auto p = str(key);
    if (p.empty()) throw UsageError(std::string("missing --") + key);
    if (!fs::exists(p)) throw DataError(p + ": no such file");
    return p;
  }

  SplitManifest manifest() const {
    SplitManifest m{YearRange::parse(str("train_years")), YearRange::parse(str("val_years")),
                    YearRange::parse(str("test_years"))};
    m.validate();
    return m;
  }

  SamplerConfig sampler() const {
    SamplerConfig s;
    s.seed = seed;
    s.negatives_per_positive = integer("negatives");
    s.neighbor_strategy = parse_neighbor_strategy(str("neighbors"));
    s.neighbor_budget = integer("S");
    s.alpha = real("alpha");
    s.validate();
    return s;
  }

  void record(const std::string& command, const std::vector<std::string>& files) const {
    update_run_manifest(out, command, hash, seed, files);
  }
};

ConceptCatalog load_catalog(const Context& ctx, bool filter) {
  auto in = open_input(ctx.input("concepts"));
  ParseOptions opts;
  opts.strict = ctx.flag("strict");
  opts.source = ctx.str("concepts");
  ConceptParseStats stats;
  auto catalog = parse_concepts(in, opts, &stats);
  for (const auto& w : stats.warnings) *ctx.log << "warning: " << w << '\n';
  const auto roots = split_list(ctx.str("roots"));
  if (!filter || roots.empty()) return catalog;
  return filter_domain(catalog, std::set<std::string>(roots.begin(), roots.end()));
}

json read_json_file(const fs::path& path) {
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw DataError(path.string() + ": invalid JSON");
  return j;
}

TemporalGraph load_graph(const Context& ctx) {
  const auto summary_path = ctx.out / "build_summary.json";
  if (!fs::exists(summary_path)) throw DataError(summary_path.string() + ": missing, run `fosbench build` first");
  const auto summary = read_json_file(summary_path);
  const auto horizon = YearRange::parse(summary.at("horizon").get<std::string>());
  auto nodes_in = open_input(ctx.out / "nodes.csv");
  auto vertices = read_nodes(nodes_in, (ctx.out / "nodes.csv").string());
  auto edges_in = open_input(ctx.out / "edges.csv");
  return read_edge_stream(edges_in, std::move(vertices), horizon, (ctx.out / "edges.csv").string());
}

NodeFeatureMatrix load_features(const Context& ctx, const TemporalGraph& graph) {
  const auto path = ctx.out / "features.tsv";
  if (!fs::exists(path)) throw DataError(path.string() + ": missing, run `fosbench features` first");
  auto in = open_input(path);
  return NodeFeatureMatrix::from_table(read_embedding_table(in, path.string()), graph.vertices());
}

ScorerShape scorer_shape(const Context& ctx, int feature_dim) {
  ScorerShape s;
  s.feature_dim = feature_dim;
  s.embed_dim = ctx.integer("embed_dim");
  s.hidden_dim = ctx.integer("hidden_dim");
  s.time_dim = ctx.integer("time_dim");
  s.validate();
  return s;
}

TrainConfig train_config(const Context& ctx) {
  TrainConfig t;
  t.learning_rate = ctx.real("lr");
  t.dropout = ctx.real("dropout");
  t.max_epochs = ctx.integer("epochs");
  t.patience = ctx.integer("patience");
  t.batch_size = ctx.integer("batch_size");
  t.seed = ctx.seed;
  t.validate();
  return t;
}

int tw_window(const Context& ctx, const SplitManifest& m) {
  const int w = ctx.integer("tw_window");
  return w > 0 ? w : m.test.size();
}

std::string with_header(const Context& ctx, const std::string& body) { return ctx.header() + body; }

void cmd_build(Context& ctx, std::ostream& out) {
  const auto horizon = YearRange::parse(ctx.str("horizon"));
  if (horizon.empty()) throw UsageError("empty horizon");
  const auto catalog = load_catalog(ctx, true);
  GraphBuilder builder(catalog, horizon, BuildOptions{ctx.flag("drop_ancestor_pairs")});
  auto in = open_input(ctx.input("works"));
  ParseOptions opts;
  opts.strict = ctx.flag("strict");
  opts.source = ctx.str("works");
  WorkParseStats stats;
  for_each_work(in, catalog, horizon, opts, [&](WorkRecord&& w) { builder.add(w); }, &stats);
  for (const auto& w : stats.warnings) *ctx.log << "warning: " << w << '\n';
  const auto graph = std::move(builder).finish();

  std::ostringstream nodes, edges;
  write_nodes(nodes, catalog);
  write_edge_stream(edges, graph);
  write_file(ctx.out / "nodes.csv", with_header(ctx, nodes.str()));
  write_file(ctx.out / "edges.csv", with_header(ctx, edges.str()));

  json s;
  s["config_hash"] = ctx.hash;
  s["seed"] = ctx.seed;
  s["horizon"] = horizon.to_string();
  s["nodes"] = graph.num_vertices();
  std::vector<bool> touched(graph.num_vertices(), false);
  for (const auto& e : graph.events()) touched[e.u] = touched[e.v] = true;
  s["active_nodes"] = std::count(touched.begin(), touched.end(), true);
  s["edge_events"] = graph.events().size();
  s["distinct_pairs"] = graph.distinct_pairs();
  s["total_weight"] = graph.total_weight();
  s["works"] = {{"lines", stats.lines},           {"kept", stats.kept},
                {"malformed", stats.malformed},   {"bad_year", stats.bad_year},
                {"outside_horizon", stats.outside_horizon}, {"empty_closure", stats.empty_closure},
                {"unknown_tags", stats.unknown_tags}};
  s["catalog"] = {{"records", catalog.size()},
                  {"roots", catalog.root_ids()},
                  {"dangling_ancestors", catalog.dangling_ancestors()},
                  {"orphans", catalog.orphans()}};
  if (ctx.flag("reference")) {
    constexpr double kNodes = 3238, kEdges = 3472315;
    const auto n = static_cast<double>(graph.num_vertices());
    const auto e = static_cast<double>(graph.events().size());
    s["reference"] = {{"nodes", kNodes},
                      {"edges", kEdges},
                      {"node_delta", n - kNodes},
                      {"node_delta_rel", (n - kNodes) / kNodes},
                      {"edge_event_delta", e - kEdges},
                      {"edge_event_delta_rel", (e - kEdges) / kEdges}};
  }
  write_file(ctx.out / "build_summary.json", s.dump(2) + "\n");
  ctx.record("build", {"nodes.csv", "edges.csv", "build_summary.json"});
  out << "nodes " << graph.num_vertices() << " edge_events " << graph.events().size() << " distinct_pairs "
      << graph.distinct_pairs() << " works " << stats.kept << " dropped " << stats.dropped() << '\n';
}

void cmd_features(Context& ctx, std::ostream& out) {
  const auto catalog = load_catalog(ctx, false);
  std::vector<std::string> vertices;
  if (fs::exists(ctx.out / "nodes.csv")) {
    auto in = open_input(ctx.out / "nodes.csv");
    vertices = read_nodes(in, (ctx.out / "nodes.csv").string());
  } else {
    for (const auto& r : catalog.records()) vertices.push_back(r.field_id);
  }
  auto in = open_input(ctx.input("embeddings"));
  const auto table = read_embedding_table(in, ctx.str("embeddings"));
  const auto mask = FeatureMask::from_ablation(ctx.str("ablation"));
  const auto raw = compose(catalog, table, mask, vertices);

  std::ostringstream raw_text;
  write_embedding_table(raw_text, raw);
  write_file(ctx.out / "features_raw.tsv", with_header(ctx, raw_text.str()));
  std::vector<std::string> files{"features_raw.tsv", "features.tsv"};

  const int k = ctx.integer("pca_dim");
  if (k < 0) throw UsageError("--pca-dim must be >= 0");
  std::string reduced_text = raw_text.str();
  int dim = raw.dim();
  if (k > 0 && k < raw.dim()) {
    const auto basis = pca_fit(raw, k);
    std::ostringstream basis_text, reduced;
    write_pca_basis(basis_text, basis);
    write_embedding_table(reduced, pca_reduce(raw, basis));
    write_file(ctx.out / "pca_basis.json", basis_text.str());
    reduced_text = reduced.str();
    dim = k;
    files.push_back("pca_basis.json");
  }
  write_file(ctx.out / "features.tsv", with_header(ctx, reduced_text));
  ctx.record("features", files);
  out << "features " << raw.size() << " rows, " << mask.label() << ", dim " << raw.dim() << " -> " << dim << '\n';
}

void cmd_split(Context& ctx, std::ostream& out) {
  const auto graph = load_graph(ctx);
  const auto m = ctx.manifest();
  const auto s = split(graph, m);
  auto part = [](YearRange r, std::span<const EdgeEvent> events) {
    std::unordered_set<std::uint64_t> pairs;
    for (const auto& e : events) pairs.insert(pair_key(e.u, e.v));
    return json{{"years", r.to_string()}, {"events", events.size()}, {"distinct_pairs", pairs.size()}};
  };
  json j;
  j["config_hash"] = ctx.hash;
  j["seed"] = ctx.seed;
  j["train"] = part(m.train, s.train);
  j["val"] = part(m.val, s.val);
  j["test"] = part(m.test, s.test);
  write_file(ctx.out / "split.json", j.dump(2) + "\n");
  ctx.record("split", {"split.json"});
  out << "train " << s.train.size() << " val " << s.val.size() << " test " << s.test.size() << " events\n";
}

std::unique_ptr<LinkScorer> edgebank(const std::string& model, int window) {
  if (model == "edgebank_inf") return std::make_unique<EdgeBankScorer>(EdgeBankMode::kInfinite);
  if (model == "edgebank_tw") return std::make_unique<EdgeBankScorer>(EdgeBankMode::kTimeWindow, window);
  return nullptr;
}

void cmd_eval(Context& ctx, std::ostream& out) {
  const auto graph = load_graph(ctx);
  const auto m = ctx.manifest();
  const auto sampler = ctx.sampler();
  const auto streams = split(graph, m);
  const NegativePools pools(graph.num_vertices(), streams.train, streams.test);
  std::vector<NegativeRegime> regimes;
  for (const auto& r : split_list(ctx.str("regimes"))) regimes.push_back(parse_regime(r));
  const auto models = split_list(ctx.str("models"));
  if (regimes.empty() || models.empty()) throw UsageError("need at least one regime and one model");

  json report;
  report["config_hash"] = ctx.hash;
  report["seed"] = ctx.seed;
  report["eval_years"] = m.test.to_string();
  report["results"] = json::array();
  std::string text;
  std::vector<std::string> files{"eval_report.json", "eval_report.txt"};
  NodeFeatureMatrix features;

  for (const auto& model : models) {
    std::unique_ptr<LinkScorer> scorer = edgebank(model, tw_window(ctx, m));
    if (!scorer && model == "neural") {
      features = load_features(ctx, graph);
      const auto cfg = train_config(ctx);
      auto trained = train(graph, m, features, scorer_shape(ctx, features.dim()), cfg, sampler);
      std::ostringstream ck, log;
      write_checkpoint(ck, Checkpoint{trained.best, cfg, sampler, trained.best_epoch});
      write_train_log(log, trained.log);
      write_file(ctx.out / "checkpoint.json", ck.str());
      write_file(ctx.out / "train_log.csv", with_header(ctx, log.str()));
      files.insert(files.end(), {"checkpoint.json", "train_log.csv"});
      scorer = std::make_unique<NeuralScorer>(std::move(trained.best), features, sampler);
    }
    if (!scorer) throw UsageError("unknown model '" + model + "'");
    for (const auto regime : regimes) {
      EvalConfig cfg;
      cfg.sampler = sampler;
      cfg.sampler.regime = regime;
      cfg.batch_size = ctx.integer("batch_size");
      std::ostringstream audit;
      if (ctx.flag("audit")) cfg.audit = &audit;
      const auto r = evaluate(*scorer, graph, m.test, pools, cfg);
      auto entry = to_json(r);
      entry["model"] = model;
      report["results"].push_back(entry);
      text += format_report(r) + "\n";
      if (cfg.audit) {
        const auto name = "audit_" + model + "_" + regime_name(regime) + ".csv";
        write_file(ctx.out / name, with_header(ctx, audit.str()));
        files.push_back(name);
      }
      out << model << ' ' << regime_name(regime) << " AP " << r.mean_ap << " AUC " << r.mean_auc << '\n';
    }
  }
  write_file(ctx.out / "eval_report.json", report.dump(2) + "\n");
  write_file(ctx.out / "eval_report.txt", with_header(ctx, text));
  ctx.record("eval", files);
}

void cmd_diagnose(Context& ctx, std::ostream& out) {
  const auto graph = load_graph(ctx);
  const auto m = ctx.manifest();
  DiagnosticsOptions opts;
  opts.threads = ctx.integer("threads");
  opts.seed = ctx.seed;
  const auto report = diagnose(graph, m, opts);
  const auto dir = ctx.out / "diagnostics";
  write_diagnostics(dir, graph, report, ctx.header());
  auto summary = summary_json(report);
  summary["config_hash"] = ctx.hash;
  summary["seed"] = ctx.seed;
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) files.push_back("diagnostics/" + entry.path().filename().string());
  std::sort(files.begin(), files.end());
  ctx.record("diagnose", files);
  out << "novelty " << report.novelty << " recurrence " << report.recurrence.recurrence << " surprise "
      << report.recurrence.surprise << '\n';
}

void cmd_predict(Context& ctx, std::ostream& out) {
  const auto graph = load_graph(ctx);
  const auto m = ctx.manifest();
  const int year = ctx.config.at("year").is_null() ? m.val.last : ctx.integer("year");
  RankOptions opts;
  opts.top_k = ctx.integer("top_k");
  opts.candidate_budget = ctx.config.at("candidate_budget").get<std::size_t>();
  opts.seed = ctx.seed;
  const auto model = ctx.str("predict_model");
  NodeFeatureMatrix features;
  std::unique_ptr<LinkScorer> scorer = edgebank(model, tw_window(ctx, m));
  if (!scorer && model == "neural") {
    const auto path = ctx.out / "checkpoint.json";
    if (!fs::exists(path)) throw DataError(path.string() + ": missing, run `fosbench eval --models neural` first");
    auto in = open_input(path);
    auto ck = read_checkpoint(in, path.string());
    features = load_features(ctx, graph);
    scorer = std::make_unique<NeuralScorer>(std::move(ck.params), features, ck.sampler);
  }
  if (!scorer) throw UsageError("unknown model '" + model + "'");
  const auto ranking = rank_emerging(*scorer, graph, year, opts);
  std::ostringstream csv;
  write_ranking(csv, graph, ranking);
  write_file(ctx.out / "predictions.csv", with_header(ctx, csv.str()));
  ctx.record("predict", {"predictions.csv"});
  out << ranking.size() << " emerging pairs ranked for " << year + 1 << '\n';
}

}  // namespace

json default_config() {
  return json{{"concepts", ""},
              {"works", ""},
              {"embeddings", ""},
              {"out", "run"},
              {"horizon", "2002:2024"},
              {"roots", ""},
              {"train_years", "2002:2017"},
              {"val_years", "2018:2021"},
              {"test_years", "2022:2024"},
              {"regimes", "random,historical,inductive"},
              {"models", "edgebank_inf,edgebank_tw"},
              {"neighbors", "uniform"},
              {"S", 20},
              {"alpha", 1e-6},
              {"negatives", 1},
              {"batch_size", 300},
              {"seed", 0},
              {"tw_window", 0},
              {"lr", 1e-4},
              {"dropout", 0.1},
              {"epochs", 30},
              {"patience", 20},
              {"embed_dim", 32},
              {"hidden_dim", 32},
              {"time_dim", 8},
              {"ablation", ""},
              {"pca_dim", 100},
              {"threads", 1},
              {"year", nullptr},
              {"top_k", 20},
              {"candidate_budget", 2000000},
              {"predict_model", "edgebank_inf"},
              {"strict", false},
              {"drop_ancestor_pairs", false},
              {"reference", false},
              {"audit", false},
              // Settings of the external temporal graph models; carried for
              // scorer plugins, not read by the built-in scorers.
              {"gnn_layers", 2},
              {"attention_heads", 2},
              {"walk_length", 1},
              {"walk_heads", 8},
              {"positional_dim", 172},
              {"channel_dim", 50},
              {"patch_size", 1},
              {"max_sequence_length", 32}};
}

namespace {

json parse_value(const FlagSpec& spec, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (spec.kind) {
      case Kind::kString:
        return text;
      case Kind::kInt: {
        const int v = std::stoi(text, &used);
        if (used == text.size()) return v;
        break;
      }
      case Kind::kUnsigned: {
        if (!text.empty() && text[0] == '-') break;
        const auto v = std::stoull(text, &used);
        if (used == text.size()) return v;
        break;
      }
      case Kind::kDouble: {
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
        break;
      }
      case Kind::kFlag:
        return true;
    }
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("invalid value '") + text + "' for " + spec.flag);
}

void check_types(const json& config) {
  const auto defaults = default_config();
  for (const auto& [key, value] : config.items()) {
    if (!defaults.contains(key)) throw UsageError("unknown config key '" + key + "'");
    const auto& d = defaults.at(key);
    const bool ok = (d.is_string() && value.is_string()) || (d.is_boolean() && value.is_boolean()) ||
                    (d.is_number_integer() && value.is_number_integer()) ||
                    (d.is_number_float() && value.is_number()) || (d.is_null() && (value.is_null() || value.is_number_integer()));
    if (!ok) throw UsageError("config key '" + key + "' has the wrong type");
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporal link prediction benchmark toolkit for field-of-study graphs", "fosbench"};
  app.require_subcommand(1);
  const std::pair<const char*, const char*> commands[] = {
      {"build", "ingest concepts and works and write the yearly edge stream"},
      {"features", "compose node features and reduce them with PCA"},
      {"split", "partition the edge stream into train, validation and test years"},
      {"eval", "score baselines (and the neural scorer) under each negative regime"},
      {"diagnose", "dataset diagnostics: novelty, recurrence, surprise and per-year statistics"},
      {"predict", "rank never-observed pairs for the following year"}};
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::tuple<CLI::App*, const FlagSpec*, CLI::Option*>> bound;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file; flags override it");
    for (const auto& spec : kFlags) {
      CLI::Option* opt = spec.kind == Kind::kFlag ? sub->add_flag(spec.flag, spec.help)
                                                  : sub->add_option(spec.flag, values[spec.key], spec.help);
      bound.emplace_back(sub, &spec, opt);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help("fosbench"));
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fosbench: " << e.what() << '\n';
    return 1;
  }
  auto* sub = app.get_subcommands().front();

  Context ctx;
  ctx.log = &err;
  ctx.config = default_config();
  if (!config_path.empty()) {
    const auto file = read_json_file(config_path);
    if (!file.is_object()) throw UsageError(config_path + ": config must be a JSON object");
    check_types(file);
    ctx.config.update(file);
  }
  for (const auto& [owner, spec, opt] : bound) {
    if (owner != sub || opt->count() == 0) continue;
    ctx.config[spec->key] = parse_value(*spec, values[spec->key]);
  }
  ctx.seed = ctx.config.at("seed").get<std::uint64_t>();
  ctx.out = ctx.str("out");
  auto hashed = ctx.config;
  hashed.erase("out");
  hashed.erase("threads");
  ctx.hash = config_hash(hashed);
  fs::create_directories(ctx.out);

  const auto name = sub->get_name();
  if (name == "build") cmd_build(ctx, out);
  if (name == "features") cmd_features(ctx, out);
  if (name == "split") cmd_split(ctx, out);
  if (name == "eval") cmd_eval(ctx, out);
  if (name == "diagnose") cmd_diagnose(ctx, out);
  if (name == "predict") cmd_predict(ctx, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "fosbench: usage: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "fosbench: numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    err << "fosbench: data error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "fosbench: data error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "fosbench: data error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "fosbench: usage: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fosbench::cli
