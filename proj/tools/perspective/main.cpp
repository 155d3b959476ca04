#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "context.hpp"
#include "json.hpp"
#include "perspective/agreement.hpp"
#include "perspective/augment.hpp"
#include "perspective/classify.hpp"
#include "perspective/csv.hpp"
#include "perspective/evalens.hpp"
#include "perspective/goldstd.hpp"
#include "perspective/partition.hpp"
#include "perspective/pipeline.hpp"
#include "perspective/polarization.hpp"
#include "perspective/report.hpp"
#include "perspective/synthetic.hpp"
#include "perspective/version.hpp"

namespace {

using nlohmann::json;
using cli::Context;

// Options shared by every subcommand.
struct Common {
  std::string output;
  std::string manifest;
  std::string categories = "0,1";
  std::string positive = "1";

  void attach(CLI::App& sub, bool with_output = true) {
    if (with_output) sub.add_option("-o,--output", output, "Output file (default: stdout)");
    sub.add_option("--manifest", manifest, "Manifest path (default: <output>.manifest.json)");
    sub.add_option("--categories", categories, "Comma-separated label categories")->capture_default_str();
    sub.add_option("--positive", positive, "Positive (detection) category")->capture_default_str();
  }
  persp::LabelScheme scheme() const { return cli::make_scheme(categories, positive); }
};

// Annotation input options.
struct MatrixArgs {
  std::string annotations;
  std::string format = "long-csv";
  std::string annotators;

  void attach(CLI::App& sub) {
    sub.add_option("--annotations", annotations, "Annotation file")->required();
    sub.add_option("--format", format, "long-csv or wide-tsv")->capture_default_str();
    sub.add_option("--annotators", annotators, "Annotator metadata CSV (annotator_id,group,expert)");
  }
  persp::AnnotationMatrix load(Context& ctx, const persp::LabelScheme& scheme, persp::Corpus* texts = nullptr) const {
    return cli::load_matrix(ctx, annotations, format, annotators, scheme, texts);
  }
};

std::string render(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream out;
  writer(out);
  return out.str();
}

persp::Corpus load_corpus(Context& ctx, const std::string& path) { return persp::load_texts(ctx.input(path)); }

struct Command {
  CLI::App* app = nullptr;
  Common common;
  std::function<void(Context&)> run;
};

using Registry = std::vector<std::unique_ptr<Command>>;

Command& add(Registry& registry, CLI::App& app, const std::string& name, const std::string& help,
             bool with_output = true) {
  auto cmd = std::make_unique<Command>();
  cmd->app = app.add_subcommand(name, help);
  cmd->common.attach(*cmd->app, with_output);
  registry.push_back(std::move(cmd));
  return *registry.back();
}

void corpus_commands(CLI::App& app, Registry& registry) {
  {
    auto& cmd = add(registry, app, "ingest", "Load annotations and write the canonical long-csv matrix");
    auto m = std::make_shared<MatrixArgs>();
    auto texts_out = std::make_shared<std::string>();
    m->attach(*cmd.app);
    cmd.app->add_option("--texts-out", *texts_out, "Write texts carried by wide-tsv input as JSONL");
    cmd.run = [&cmd, m, texts_out](Context& ctx) {
      persp::Corpus texts;
      auto matrix = m->load(ctx, cmd.common.scheme(), &texts);
      ctx.emit(render([&](std::ostream& o) { persp::write_long_csv(matrix, o); }));
      if (!texts_out->empty()) ctx.emit_file(*texts_out, render([&](std::ostream& o) { persp::write_texts(texts, o); }));
    };
  }
  {
    auto& cmd = add(registry, app, "dedup", "Drop near-duplicate texts (retweets, URL variants)");
    auto texts = std::make_shared<std::string>();
    cmd.app->add_option("--texts", *texts, "JSONL corpus")->required();
    cmd.run = [texts](Context& ctx) {
      auto kept = persp::deduplicate(load_corpus(ctx, *texts));
      ctx.emit(render([&](std::ostream& o) { persp::write_texts(kept, o); }));
    };
  }
  {
    auto& cmd = add(registry, app, "filter", "Keep texts containing any keyword");
    auto texts = std::make_shared<std::string>();
    auto keywords = std::make_shared<std::vector<std::string>>();
    cmd.app->add_option("--texts", *texts, "JSONL corpus")->required();
    cmd.app->add_option("--keywords", *keywords, "Keywords (comma-separated or repeated)")->required()->delimiter(',');
    cmd.run = [texts, keywords](Context& ctx) {
      auto kept = persp::keyword_filter(load_corpus(ctx, *texts), *keywords);
      ctx.emit(render([&](std::ostream& o) { persp::write_texts(kept, o); }));
    };
  }
  {
    auto& cmd = add(registry, app, "stats", "Corpus and label statistics as JSON");
    auto m = std::make_shared<MatrixArgs>();
    auto gold = std::make_shared<std::string>();
    auto texts = std::make_shared<std::string>();
    auto keywords = std::make_shared<std::vector<std::string>>();
    m->attach(*cmd.app);
    cmd.app->add_option("--gold", *gold, "Report the distribution of this gold CSV instead of raw majorities");
    cmd.app->add_option("--texts", *texts, "JSONL corpus for keyword frequencies");
    cmd.app->add_option("--keywords", *keywords, "Keywords to count")->delimiter(',');
    cmd.run = [&cmd, m, gold, texts, keywords](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      auto matrix = m->load(ctx, scheme);
      auto dist = gold->empty() ? persp::label_distribution(matrix)
                                : persp::label_distribution(matrix, persp::read_gold_csv(ctx.input(*gold), scheme));
      json j{{"items", matrix.item_count()},
             {"annotators", matrix.annotator_count()},
             {"missing_cells", matrix.missing_count()},
             {"labels", json::object()}};
      for (std::size_t c = 0; c < scheme.size(); ++c) {
        j["labels"][scheme.categories()[c]] = {{"count", dist.counts[c]},
                                               {"percent", persp::report::percent_value(dist.counts[c], dist.total)}};
      }
      if (!keywords->empty()) {
        if (texts->empty()) throw persp::Error("--keywords needs --texts");
        json freq = json::array();
        for (const auto& [word, n] : persp::keyword_frequencies(load_corpus(ctx, *texts), *keywords)) {
          freq.push_back({{"keyword", word}, {"occurrences", n}});
        }
        j["keywords"] = freq;
      }
      ctx.emit(j.dump(2) + "\n");
    };
  }
}

void polarization_commands(CLI::App& app, Registry& registry) {
  {
    auto& cmd = add(registry, app, "agreement", "Fleiss and pairwise Cohen kappa report");
    auto m = std::make_shared<MatrixArgs>();
    auto partition = std::make_shared<std::string>();
    auto text = std::make_shared<bool>(false);
    m->attach(*cmd.app);
    cmd.app->add_option("--partition", *partition, "natural or a partition JSON file");
    cmd.app->add_flag("--text", *text, "Aligned text tables instead of JSON");
    cmd.run = [&cmd, m, partition, text](Context& ctx) {
      auto matrix = m->load(ctx, cmd.common.scheme());
      std::optional<persp::Partition> p;
      if (!partition->empty()) p = cli::resolve_partition(matrix, *partition, ctx);
      auto report = persp::agreement_report(matrix, p);
      ctx.emit(*text ? persp::to_text(report) : persp::to_json(report));
    };
  }
  for (const bool ranked : {false, true}) {
    auto& cmd = add(registry, app, ranked ? "rank" : "polarize",
                    ranked ? "Items ranked by P-index, with an optional census" : "Per-item P-index as TSV");
    auto m = std::make_shared<MatrixArgs>();
    auto partition = std::make_shared<std::string>();
    auto texts = std::make_shared<std::string>();
    auto census = std::make_shared<std::string>();
    auto ascending = std::make_shared<bool>(false);
    m->attach(*cmd.app);
    cmd.app->add_option("--partition", *partition, "natural or a partition JSON file")->required();
    cmd.app->add_option("--texts", *texts, "JSONL corpus; adds a text column");
    if (ranked) {
      cmd.app->add_flag("--ascending", *ascending, "Least polarized first");
      cmd.app->add_option("--census", *census, "Also write the polarization census JSON here");
    }
    cmd.run = [&cmd, ranked, m, partition, texts, census, ascending](Context& ctx) {
      auto matrix = m->load(ctx, cmd.common.scheme());
      auto p = cli::resolve_partition(matrix, *partition, ctx);
      auto scores = ranked ? persp::rank_by_polarization(matrix, p, !*ascending) : persp::score_items(matrix, p);
      persp::Corpus corpus;
      if (!texts->empty()) corpus = load_corpus(ctx, *texts);
      ctx.emit(render([&](std::ostream& o) { persp::write_ranked_tsv(scores, o, texts->empty() ? nullptr : &corpus); }));
      if (!census->empty()) ctx.emit_file(*census, persp::to_json(persp::polarization_census(matrix, p)));
    };
  }
  {
    auto& cmd = add(registry, app, "partition", "Natural annotator split, or exhaustive max-polarization search");
    auto m = std::make_shared<MatrixArgs>();
    auto opts = std::make_shared<persp::PartitionOptions>();
    auto search = std::make_shared<bool>(false);
    auto scores = std::make_shared<std::string>();
    m->attach(*cmd.app);
    cmd.app->add_flag("--search", *search, "Search all partitions instead of using group tags");
    cmd.app->add_option("--k", opts->k, "Number of groups")->capture_default_str();
    cmd.app->add_option("--min-size", opts->min_size, "Minimum group size")->capture_default_str();
    cmd.app->add_flag("--allow-large", opts->allow_large, "Permit more than 1e6 partitions");
    cmd.app->add_option("--threads", opts->threads, "Scoring threads (0: hardware)");
    cmd.app->add_option("--scores", *scores, "Score dump TSV (default: <output>.scores.tsv or partition_scores.tsv)");
    cmd.run = [&cmd, m, opts, search, scores](Context& ctx) {
      auto matrix = m->load(ctx, cmd.common.scheme());
      auto natural = persp::natural_partition(matrix);
      if (!*search) {
        if (!natural) throw persp::Error("no natural partition: tag annotators with --annotators or pass --search");
        ctx.emit(persp::to_json(*natural));
        return;
      }
      auto result = persp::search_max_polarization(matrix, *opts, natural);
      ctx.emit(persp::to_json(result));
      std::string dump = *scores;
      if (dump.empty()) dump = cmd.common.output.empty() ? "partition_scores.tsv" : cmd.common.output + ".scores.tsv";
      ctx.emit_file(dump, render([&](std::ostream& o) { persp::write_scored_tsv(result, o); }));
    };
  }
}

persp::TiePolicy tie_policy(const std::string& name) {
  auto p = persp::parse_tie_policy(name);
  if (!p) throw persp::Error("unknown tie policy '" + name + "'");
  return *p;
}

void gold_commands(CLI::App& app, Registry& registry) {
  const std::vector<std::string> policies{"prefer-positive", "prefer-negative", "prefer-expert", "error"};
  {
    auto& cmd = add(registry, app, "gold", "Majority-vote gold standard, overall or for one group");
    auto m = std::make_shared<MatrixArgs>();
    auto partition = std::make_shared<std::string>();
    auto group = std::make_shared<std::string>();
    auto policy = std::make_shared<std::string>("prefer-positive");
    m->attach(*cmd.app);
    cmd.app->add_option("--partition", *partition, "natural or a partition JSON file");
    cmd.app->add_option("--group", *group, "Group name within --partition (default: all annotators)");
    cmd.app->add_option("--tie-policy", *policy, "Tie handling")->check(CLI::IsMember(policies))->capture_default_str();
    cmd.run = [&cmd, m, partition, group, policy](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      auto matrix = m->load(ctx, scheme);
      persp::GoldStandard gold;
      if (group->empty()) {
        gold = persp::majority_gold(matrix, matrix.annotator_ids(), tie_policy(*policy), "overall");
      } else {
        if (partition->empty()) throw persp::Error("--group needs --partition");
        auto p = cli::resolve_partition(matrix, *partition, ctx);
        std::optional<std::size_t> w;
        for (std::size_t i = 0; i < p.k(); ++i) {
          if (p.group_name(i) == *group) w = i;
        }
        if (!w) throw persp::Error("partition has no group '" + *group + "'");
        gold = persp::majority_gold(matrix, p.groups[*w], tie_policy(*policy), *group);
      }
      if (gold.tie_count > 0) std::cerr << "note: " << gold.tie_count << " tied items resolved by " << *policy << "\n";
      ctx.emit(render([&](std::ostream& o) { persp::write_gold_csv(gold, scheme, o); }));
    };
  }
  {
    auto& cmd = add(registry, app, "split", "Seeded train/test split manifest shared by every gold");
    auto gold = std::make_shared<std::string>();
    auto spec = std::make_shared<persp::SplitSpec>();
    auto plain = std::make_shared<bool>(false);
    auto apply = std::make_shared<std::vector<std::string>>();
    auto dir = std::make_shared<std::string>(".");
    cmd.app->add_option("--gold", *gold, "Gold CSV defining the item set")->required();
    cmd.app->add_option("--train-fraction", spec->train_fraction, "Training share")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd.app->add_option("--seed", spec->seed, "Shuffle seed")->capture_default_str();
    cmd.app->add_flag("--no-stratify", *plain, "Plain rather than stratified split");
    cmd.app->add_option("--apply", *apply, "Gold CSVs to cut with this split (writes <stem>_train/_test.csv)");
    cmd.app->add_option("--apply-dir", *dir, "Directory for --apply outputs")->capture_default_str();
    cmd.run = [&cmd, gold, spec, plain, apply, dir](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      spec->stratified = !*plain;
      ctx.set_seed(spec->seed);
      auto split = persp::make_split(persp::read_gold_csv(ctx.input(*gold), scheme), *spec);
      ctx.emit(persp::to_json(split));
      for (const auto& path : *apply) {
        auto [train, test] = persp::apply_split(persp::read_gold_csv(ctx.input(path), scheme), split);
        const auto stem = std::filesystem::path(path).stem().string();
        const std::filesystem::path base(*dir);
        ctx.emit_file(base / (stem + "_train.csv"), render([&](std::ostream& o) { persp::write_gold_csv(train, scheme, o); }));
        ctx.emit_file(base / (stem + "_test.csv"), render([&](std::ostream& o) { persp::write_gold_csv(test, scheme, o); }));
      }
    };
  }
  {
    auto& cmd = add(registry, app, "augment", "Replicate training items inversely to polarization");
    auto gold = std::make_shared<std::string>();
    auto polarization = std::make_shared<std::string>();
    auto m = std::make_shared<MatrixArgs>();
    auto partition = std::make_shared<std::string>();
    auto policy = std::make_shared<persp::AugmentPolicy>();
    auto report = std::make_shared<std::string>();
    cmd.app->add_option("--gold", *gold, "Training gold CSV")->required();
    cmd.app->add_option("--polarization", *polarization, "P-index TSV from polarize/rank");
    cmd.app->add_option("--annotations", m->annotations, "Compute P-index from annotations instead");
    cmd.app->add_option("--format", m->format, "long-csv or wide-tsv")->capture_default_str();
    cmd.app->add_option("--annotators", m->annotators, "Annotator metadata CSV");
    cmd.app->add_option("--partition", *partition, "natural or a partition JSON file (with --annotations)");
    cmd.app->add_option("--factor", policy->factor, "Replication factor F >= 1")->capture_default_str();
    cmd.app->add_option("--delta", policy->delete_threshold, "Deletion threshold in (0, 1]")->capture_default_str();
    cmd.app->add_option("--report", *report, "JSON listing deleted and undefined items");
    cmd.run = [&cmd, gold, polarization, m, partition, policy, report](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      policy->validate();
      std::map<std::string, std::optional<double>> scores;
      if (!polarization->empty()) {
        scores = cli::read_polarization_tsv(ctx.input(*polarization));
      } else if (!m->annotations.empty() && !partition->empty()) {
        auto matrix = m->load(ctx, scheme);
        for (auto& s : persp::score_items(matrix, cli::resolve_partition(matrix, *partition, ctx))) {
          scores[s.item_id] = s.p;
        }
      } else {
        throw persp::Error("need --polarization, or --annotations with --partition");
      }
      auto result = persp::replicate_by_polarization(persp::read_gold_csv(ctx.input(*gold), scheme), scores, *policy);
      ctx.emit(render([&](std::ostream& o) { persp::write_augmented_csv(result, scheme, o); }));
      if (!report->empty()) {
        json j{{"factor", policy->factor},
               {"delete_threshold", policy->delete_threshold},
               {"rows", result.rows.size()},
               {"retained", result.copies.size()},
               {"deleted", result.deleted},
               {"undefined", result.undefined}};
        ctx.emit_file(*report, j.dump(2) + "\n");
      }
    };
  }
}

persp::GoldStandard read_gold_or_augmented(Context& ctx, const std::string& path, const persp::LabelScheme& scheme,
                                           std::vector<persp::LabeledItem>& rows) {
  // Augmented CSVs carry a copies column that expands into repeated rows.
  std::ifstream in(ctx.input(path));
  std::string header;
  std::getline(in, header);
  if (header.starts_with("item_id,label,copies")) {
    std::string line;
    std::size_t n = 1;
    persp::GoldStandard gold;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto f = persp::csv::split_line(line, ',');
      if (f.size() != 3) throw persp::ParseError(path, n, "expected item_id,label,copies");
      auto label = scheme.find(f[1]);
      if (!label) throw persp::ParseError(path, n, "unknown label '" + f[1] + "'");
      std::size_t copies = 0;
      auto [end, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), copies);
      if (ec != std::errc() || end != f[2].data() + f[2].size()) throw persp::ParseError(path, n, "bad copies '" + f[2] + "'");
      for (std::size_t c = 0; c < copies; ++c) rows.push_back({f[0], *label});
      gold.labels.push_back({f[0], *label});
    }
    gold.normalize();
    return gold;
  }
  auto gold = persp::read_gold_csv(path, scheme);
  rows = gold.labels;
  return gold;
}

std::vector<persp::TokenizedDoc> docs_for(const std::vector<std::string>& ids, const persp::Corpus& corpus) {
  std::map<std::string_view, const persp::CorpusItem*> by_id;
  for (const auto& item : corpus) by_id[item.id] = &item;
  std::vector<persp::TokenizedDoc> docs;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw persp::Error("no text for item '" + id + "'");
    docs.push_back(persp::tokenize(id, it->second->text));
  }
  return docs;
}

void classifier_commands(CLI::App& app, Registry& registry) {
  {
    auto& cmd = add(registry, app, "train", "Fit the reference TF-IDF logistic-regression classifier");
    auto gold = std::make_shared<std::string>();
    auto texts = std::make_shared<std::string>();
    auto hyper = std::make_shared<persp::Hyperparams>();
    auto seed = std::make_shared<std::uint64_t>(0);
    cmd.app->add_option("--gold", *gold, "Training gold CSV (augmented CSVs are expanded)")->required();
    cmd.app->add_option("--texts", *texts, "JSONL corpus")->required();
    cmd.app->add_option("--lr", hyper->learning_rate, "Learning rate")->capture_default_str();
    cmd.app->add_option("--epochs", hyper->epochs, "Full-batch epochs")->capture_default_str();
    cmd.app->add_option("--l2", hyper->l2, "L2 penalty")->capture_default_str();
    cmd.app->add_option("--seed", *seed, "Recorded in the model")->capture_default_str();
    cmd.run = [&cmd, gold, texts, hyper, seed](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      ctx.set_seed(*seed);
      std::vector<persp::LabeledItem> rows;
      read_gold_or_augmented(ctx, *gold, scheme, rows);
      std::vector<std::string> ids;
      std::vector<persp::Label> labels;
      for (const auto& r : rows) {
        ids.push_back(r.item_id);
        labels.push_back(r.label);
      }
      auto model = persp::train_linear(docs_for(ids, load_corpus(ctx, *texts)), labels, scheme, *hyper, *seed);
      ctx.emit(persp::to_json(model));
    };
  }
  {
    auto& cmd = add(registry, app, "predict", "Apply a trained model");
    auto model = std::make_shared<std::string>();
    auto texts = std::make_shared<std::string>();
    auto gold = std::make_shared<std::string>();
    auto source = std::make_shared<std::string>();
    cmd.app->add_option("--model", *model, "Model JSON from train")->required();
    cmd.app->add_option("--texts", *texts, "JSONL corpus")->required();
    cmd.app->add_option("--gold", *gold, "Predict only this gold's items (e.g. the test split)");
    cmd.app->add_option("--source", *source, "Classifier name (default: model file stem)");
    cmd.run = [&cmd, model, texts, gold, source](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      auto m = persp::model_from_json(cli::slurp(ctx.input(*model)));
      auto corpus = load_corpus(ctx, *texts);
      std::vector<std::string> ids;
      if (gold->empty()) {
        for (const auto& item : corpus) ids.push_back(item.id);
      } else {
        ids = persp::read_gold_csv(ctx.input(*gold), scheme).ids();
      }
      auto name = source->empty() ? std::filesystem::path(*model).stem().string() : *source;
      auto set = persp::predict(m, docs_for(ids, corpus), scheme, name);
      ctx.emit(render([&](std::ostream& o) { persp::write_predictions_csv(set, scheme, o); }));
    };
  }
  {
    auto& cmd = add(registry, app, "import", "Validate and normalize externally produced predictions");
    auto predictions = std::make_shared<std::string>();
    auto gold = std::make_shared<std::string>();
    cmd.app->add_option("--predictions", *predictions, "CSV item_id,label[,score]")->required();
    cmd.app->add_option("--gold", *gold, "Warn about ids outside this gold");
    cmd.run = [&cmd, predictions, gold](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      std::optional<persp::GoldStandard> g;
      if (!gold->empty()) g = persp::read_gold_csv(ctx.input(*gold), scheme);
      auto imported = persp::import_predictions(ctx.input(*predictions), scheme, g ? &*g : nullptr);
      for (const auto& w : imported.warnings) std::cerr << "warning: " << w << "\n";
      ctx.emit(render([&](std::ostream& o) { persp::write_predictions_csv(imported.set, scheme, o); }));
    };
  }
  {
    auto& cmd = add(registry, app, "ensemble", "Inclusive (OR) ensemble of group classifiers");
    auto predictions = std::make_shared<std::vector<std::string>>();
    cmd.app->add_option("--predictions", *predictions, "Member prediction CSVs")->required()->expected(2, -1);
    cmd.run = [&cmd, predictions](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      std::vector<persp::PredictionSet> members;
      for (const auto& p : *predictions) members.push_back(persp::import_predictions(ctx.input(p), scheme).set);
      auto fused = persp::inclusive_ensemble(members, scheme);
      ctx.emit(render([&](std::ostream& o) { persp::write_predictions_csv(fused, scheme, o); }));
    };
  }
  {
    auto& cmd = add(registry, app, "evaluate", "Accuracy, precision, recall and F1 against a gold test set");
    auto predictions = std::make_shared<std::vector<std::string>>();
    auto gold = std::make_shared<std::string>();
    auto table = std::make_shared<bool>(false);
    cmd.app->add_option("--predictions", *predictions, "Prediction CSVs")->required();
    cmd.app->add_option("--gold", *gold, "Test gold CSV")->required();
    cmd.app->add_flag("--table", *table, "Plain-text comparison table instead of JSON");
    cmd.run = [&cmd, predictions, gold, table](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      auto g = persp::read_gold_csv(ctx.input(*gold), scheme);
      std::vector<persp::MetricsReport> reports;
      for (const auto& p : *predictions) {
        reports.push_back(persp::evaluate(persp::import_predictions(ctx.input(p), scheme).set, g, scheme));
      }
      if (*table) {
        ctx.emit(persp::comparison_table(reports));
        return;
      }
      json j = json::array();
      for (const auto& r : reports) j.push_back(json::parse(persp::to_json(r)));
      ctx.emit(j.dump(2) + "\n");
    };
  }
  {
    auto& cmd = add(registry, app, "diverge", "How often two classifiers disagree, and in which direction");
    auto a = std::make_shared<std::string>();
    auto b = std::make_shared<std::string>();
    cmd.app->add_option("--a", *a, "First prediction CSV")->required();
    cmd.app->add_option("--b", *b, "Second prediction CSV")->required();
    cmd.run = [&cmd, a, b](Context& ctx) {
      const auto scheme = cmd.common.scheme();
      auto census = persp::classifier_disagreement(persp::import_predictions(ctx.input(*a), scheme).set,
                                                   persp::import_predictions(ctx.input(*b), scheme).set, scheme);
      ctx.emit(persp::to_json(census));
    };
  }
}

void run_commands(CLI::App& app, Registry& registry) {
  {
    auto& cmd = add(registry, app, "report", "Render the plain-text summary of a pipeline output directory");
    auto dir = std::make_shared<std::string>();
    cmd.app->add_option("--run-dir", *dir, "Pipeline output directory")->required();
    cmd.run = [dir](Context& ctx) {
      for (const char* name : {"partition.json", "metrics.json"}) ctx.input(std::filesystem::path(*dir) / name);
      ctx.emit(persp::render_summary(*dir));
    };
  }
  {
    auto& cmd = add(registry, app, "pipeline", "Run every stage from a JSON config", false);
    auto config = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd.app->add_option("--config", *config, "Run configuration JSON")->required();
    cmd.app->add_option("--output-dir", *out, "Override the configured output directory");
    cmd.run = [config, out](Context& ctx) {
      const std::filesystem::path path(*config);
      auto rc = persp::RunConfig::from_json(cli::slurp(ctx.input(path)), path.parent_path());
      if (!out->empty()) rc.output_dir = *out;
      auto result = persp::full_pipeline(rc);
      std::cout << persp::comparison_table(result.overall);
      std::cerr << "wrote " << result.artifacts.size() << " artifacts to " << rc.output_dir.string() << "\n";
    };
  }
  {
    auto& cmd = add(registry, app, "synth", "Generate the planted two-group synthetic fixture", false);
    auto dir = std::make_shared<std::string>();
    auto spec = std::make_shared<persp::SyntheticSpec>();
    cmd.app->add_option("--out-dir", *dir, "Directory for annotations.csv, texts.jsonl, annotators.csv")->required();
    cmd.app->add_option("--items", spec->items, "Items")->capture_default_str();
    cmd.app->add_option("--group-size", spec->group_size, "Annotators per planted group")->capture_default_str();
    cmd.app->add_option("--marker-rate", spec->marker_rate, "Per-marker inclusion rate")->capture_default_str();
    cmd.app->add_option("--noise", spec->noise, "Per-annotation flip probability")->capture_default_str();
    cmd.app->add_option("--seed", spec->seed, "Generator seed")->capture_default_str();
    cmd.run = [dir, spec](Context& ctx) {
      ctx.set_seed(spec->seed);
      auto data = persp::make_synthetic(*spec);
      persp::write_synthetic(data, *dir);
      const std::filesystem::path base(*dir);
      json cfg{{"annotations", "annotations.csv"},
               {"texts", "texts.jsonl"},
               {"annotators", "annotators.csv"},
               {"partition", {{"mode", "search"}, {"k", 2}, {"min_size", 2}}},
               {"split", {{"train_fraction", 0.8}, {"seed", 13}}},
               {"output_dir", "run"}};
      ctx.emit_file(base / "config.json", cfg.dump(2) + "\n");
      for (const char* name : {"annotations.csv", "texts.jsonl", "annotators.csv"}) ctx.record_output(base / name);
    };
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perspective-aware annotation analysis and classification"};
  app.set_version_flag("--version", PERSPECTIVE_VERSION);
  app.require_subcommand(1);
  Registry registry;
  corpus_commands(app, registry);
  polarization_commands(app, registry);
  gold_commands(app, registry);
  classifier_commands(app, registry);
  run_commands(app, registry);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    const CLI::App* scope = &app;
    for (const auto* sub : app.get_subcommands()) scope = sub;
    std::cerr << scope->help();
    return 2;
  }

  for (auto& cmd : registry) {
    if (!cmd->app->parsed()) continue;
    const std::string name = cmd->app->get_name();
    Context ctx(name);
    ctx.set_output(cmd->common.output);
    if (!cmd->common.manifest.empty()) ctx.set_manifest_path(cmd->common.manifest);
    json config{{"command", name}};
    for (const auto* opt : cmd->app->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
      if (opt->count() == 0 && opt->get_default_str().empty()) continue;
      auto values = opt->results();
      config["options"][opt->get_lnames().front()] =
          values.empty() ? json(opt->get_default_str()) : values.size() == 1 ? json(values.front()) : json(values);
    }
    ctx.set_config(config.dump());
    const bool own_manifest = name == "pipeline";
    try {
      cmd->run(ctx);
      if (!own_manifest) ctx.write_manifest();
      return 0;
    } catch (const std::exception& e) {
      std::string message = e.what();
      std::replace(message.begin(), message.end(), '\n', ' ');
      if (!own_manifest) {
        ctx.fail(message);
        try {
          ctx.write_manifest();
        } catch (const std::exception&) {
        }
      }
      std::cerr << "error: " << name << ": " << message << "\n";
      return 1;
    }
  }
  return 2;
}
