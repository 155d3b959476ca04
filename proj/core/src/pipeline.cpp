#include "perspective/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "perspective/agreement.hpp"
#include "perspective/manifest.hpp"
#include "perspective/report.hpp"

namespace persp {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

const char* mode_name(PartitionMode m) { return m == PartitionMode::kNatural ? "natural" : "search"; }
const char* kind_name(ClassifierKind k) { return k == ClassifierKind::kReference ? "reference" : "import"; }
const char* format_name(AnnotationFormat f) { return f == AnnotationFormat::LongCsv ? "long-csv" : "wide-tsv"; }

std::string file_safe(const std::string& name) {
  std::string out;
  for (char c : name) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Run {
 public:
  Run(const RunConfig& config) : config_(config), manifest_("pipeline") {
    manifest_.set_base(config.output_dir);
    manifest_.set_config(config.to_json());
    manifest_.set_seed(config.split.seed);
  }

  template <typename Fn>
  auto stage(const std::string& name, Fn&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      manifest_.fail(name, e.what());
      try {
        manifest_.write(config_.output_dir / "manifest.json");
      } catch (const std::exception&) {
      }
      throw StageError(name, e.what());
    }
  }

  void emit(const std::string& name, const std::string& contents) {
    write_file_atomic(config_.output_dir / name, contents);
    manifest_.add_output(config_.output_dir / name);
    result_.artifacts.push_back(name);
  }

  template <typename Writer>
  void emit_with(const std::string& name, Writer&& writer) {
    std::ostringstream out;
    writer(out);
    emit(name, out.str());
  }

  PipelineResult execute();

 private:
  std::vector<TokenizedDoc> docs_for(const std::vector<LabeledItem>& rows) const {
    std::vector<TokenizedDoc> docs;
    docs.reserve(rows.size());
    for (const auto& r : rows) {
      auto it = tokens_.find(r.item_id);
      if (it == tokens_.end()) throw Error("no text for item '" + r.item_id + "'");
      docs.push_back(it->second);
    }
    return docs;
  }

  PredictionSet classify(const std::string& role, const GoldStandard& train, const GoldStandard& test);

  const RunConfig& config_;
  Manifest manifest_;
  PipelineResult result_;
  AnnotationMatrix* matrix_ = nullptr;
  std::map<std::string, TokenizedDoc> tokens_;
  std::map<std::string, std::optional<double>> p_scores_;
};

PredictionSet restrict_to(const PredictionSet& set, const GoldStandard& test) {
  PredictionSet out;
  out.source = set.source;
  for (const auto& g : test.labels) {
    const Prediction* p = set.find(g.item_id);
    if (!p) throw Error("predictions '" + set.source + "' lack test item '" + g.item_id + "'");
    out.predictions.push_back(*p);
  }
  return out;
}

PredictionSet Run::classify(const std::string& role, const GoldStandard& train, const GoldStandard& test) {
  const auto& scheme = config_.scheme;
  const std::string safe = file_safe(role);
  if (config_.classifier == ClassifierKind::kImport) {
    auto it = config_.imported.find(role);
    if (it == config_.imported.end()) throw Error("no imported predictions for '" + role + "'");
    manifest_.add_input(it->second);
    auto imported = import_predictions(it->second, scheme, &test);
    auto set = restrict_to(imported.set, test);
    set.source = role;
    emit_with("predictions_" + safe + ".csv", [&](std::ostream& o) { write_predictions_csv(set, scheme, o); });
    return set;
  }

  std::vector<LabeledItem> rows = train.labels;
  if (config_.augment) {
    auto augmented = replicate_by_polarization(train, p_scores_, *config_.augment);
    emit_with("augmented_" + safe + ".csv", [&](std::ostream& o) { write_augmented_csv(augmented, scheme, o); });
    rows = augmented.rows;
  }
  std::vector<Label> labels;
  for (const auto& r : rows) labels.push_back(r.label);
  auto model = train_linear(docs_for(rows), labels, scheme, config_.hyperparams, config_.model_seed);
  emit("model_" + safe + ".json", to_json(model));
  auto set = predict(model, docs_for(test.labels), scheme, role);
  emit_with("predictions_" + safe + ".csv", [&](std::ostream& o) { write_predictions_csv(set, scheme, o); });
  return set;
}

PipelineResult Run::execute() {
  const auto& scheme = config_.scheme;
  stage("setup", [&] {
    std::filesystem::create_directories(config_.output_dir);
    emit("config.json", config_.to_json());
    return 0;
  });

  auto loaded = stage("ingest", [&] {
    manifest_.add_input(config_.annotations);
    auto l = load_annotations(config_.annotations, config_.format, scheme);
    if (config_.annotators) {
      manifest_.add_input(*config_.annotators);
      l.matrix = l.matrix.with_annotator_meta(load_annotator_meta(*config_.annotators));
    }
    if (config_.texts) {
      manifest_.add_input(*config_.texts);
      l.texts = load_texts(*config_.texts);
    }
    return l;
  });
  AnnotationMatrix matrix = loaded.matrix;
  matrix_ = &matrix;
  Corpus corpus = loaded.texts;

  stage("clean", [&] {
    if (corpus.empty()) return 0;
    std::set<std::string> annotated(matrix.items().begin(), matrix.items().end());
    Corpus kept;
    for (const auto& item : corpus) {
      if (annotated.contains(item.id)) kept.push_back(item);
    }
    if (config_.dedup) kept = deduplicate(kept);
    if (!config_.keywords.empty()) kept = keyword_filter(kept, config_.keywords);
    if (kept.empty()) throw Error("no items left after cleaning");
    std::vector<std::string> ids;
    for (const auto& item : kept) ids.push_back(item.id);
    matrix = matrix.restrict_items(ids);
    corpus = kept;
    for (const auto& item : corpus) tokens_.emplace(item.id, tokenize(item.id, item.text));
    emit_with("corpus.jsonl", [&](std::ostream& o) { write_texts(corpus, o); });
    return 0;
  });
  emit_with("matrix.csv", [&](std::ostream& o) { write_long_csv(matrix, o); });
  emit_with("annotators.csv", [&](std::ostream& o) { write_annotator_meta(matrix, o); });

  stage("partition", [&] {
    auto natural = natural_partition(matrix);
    if (config_.partition_mode == PartitionMode::kNatural && !natural) {
      throw Error("natural mode needs at least two annotator group tags");
    }
    const auto count = count_partitions(matrix.annotator_count(), config_.partition.k, config_.partition.min_size);
    const bool can_search = count > 0 && (count <= kLargeEnumeration || config_.partition.allow_large);
    if (config_.partition_mode == PartitionMode::kSearch || can_search) {
      result_.search = search_max_polarization(matrix, config_.partition, natural);
      emit_with("partition_scores.tsv", [&](std::ostream& o) { write_scored_tsv(*result_.search, o); });
      emit("partition_search.json", to_json(*result_.search));
    }
    if (config_.partition_mode == PartitionMode::kNatural) {
      result_.partition = *natural;
    } else {
      result_.partition = result_.search->best;
    }
    if (natural) result_.natural_average = average_p_index(matrix, *natural).mean;
    result_.average_p = average_p_index(matrix, result_.partition).mean;
    emit("partition.json", to_json(result_.partition));
    return 0;
  });
  const Partition& partition = result_.partition;

  stage("polarize", [&] {
    auto ranked = rank_by_polarization(matrix, partition, true);
    for (const auto& s : ranked) p_scores_[s.item_id] = s.p;
    emit_with("polarization.tsv", [&](std::ostream& o) { write_ranked_tsv(ranked, o, corpus.empty() ? nullptr : &corpus); });
    result_.census = polarization_census(matrix, partition);
    emit("census.json", to_json(result_.census));
    auto agreement = agreement_report(matrix, partition);
    emit("agreement.json", to_json(agreement));
    emit("agreement.txt", to_text(agreement));
    return 0;
  });

  std::vector<std::string> roles;
  std::vector<GoldStandard> golds;
  GoldStandard overall = stage("gold", [&] {
    auto all_ids = matrix.annotator_ids();
    auto g = majority_gold(matrix, all_ids, config_.overall_tie_policy, "overall");
    emit_with("gold_overall.csv", [&](std::ostream& o) { write_gold_csv(g, scheme, o); });
    for (std::size_t w = 0; w < partition.k(); ++w) {
      roles.push_back(partition.group_name(w));
      golds.push_back(majority_gold(matrix, partition.groups[w], config_.group_tie_policy, roles.back()));
      emit_with("gold_" + file_safe(roles.back()) + ".csv",
                [&](std::ostream& o) { write_gold_csv(golds.back(), scheme, o); });
    }
    return g;
  });

  auto split = stage("split", [&] {
    auto s = make_split(overall, config_.split);
    emit("split.json", to_json(s));
    return s;
  });

  stage("classify", [&] {
    auto [overall_train, overall_test] = apply_split(overall, split);
    if (config_.classifier == ClassifierKind::kReference && tokens_.empty()) {
      throw Error("the reference classifier needs item texts");
    }
    std::vector<PredictionSet> members;
    auto baseline = classify("baseline", overall_train, overall_test);
    std::vector<GoldStandard> group_tests;
    for (std::size_t w = 0; w < golds.size(); ++w) {
      auto [train, test] = apply_split(golds[w], split);
      group_tests.push_back(test);
      members.push_back(classify(roles[w], train, overall_test));
    }
    auto inclusive = inclusive_ensemble(members, scheme);
    emit_with("predictions_inclusive.csv", [&](std::ostream& o) { write_predictions_csv(inclusive, scheme, o); });

    result_.overall.push_back(evaluate(baseline, overall_test, scheme));
    for (const auto& m : members) result_.overall.push_back(evaluate(m, overall_test, scheme));
    result_.overall.push_back(evaluate(inclusive, overall_test, scheme));

    for (std::size_t w = 0; w < members.size(); ++w) {
      auto r = evaluate(members[w], group_tests[w], scheme);
      result_.own_group.push_back(r);
    }

    GoldStandard union_gold;
    union_gold.source = "union-positive";
    for (const auto& t : overall_test.labels) {
      bool positive = false;
      for (const auto& g : golds) positive = positive || g.find(t.item_id) == scheme.positive();
      union_gold.labels.push_back({t.item_id, positive ? scheme.positive() : scheme.negative()});
    }
    for (const auto& m : members) result_.union_positive.push_back(evaluate(m, union_gold, scheme));
    result_.union_positive.push_back(evaluate(inclusive, union_gold, scheme));

    if (members.size() >= 2) {
      result_.disagreement = classifier_disagreement(members[0], members[1], scheme);
      emit("disagreement.json", to_json(*result_.disagreement));
    }

    json metrics{{"overall_test", json::array()}, {"own_group_test", json::array()}, {"union_positive_test", json::array()}};
    for (const auto& r : result_.overall) metrics["overall_test"].push_back(json::parse(to_json(r)));
    for (const auto& r : result_.own_group) metrics["own_group_test"].push_back(json::parse(to_json(r)));
    for (const auto& r : result_.union_positive) metrics["union_positive_test"].push_back(json::parse(to_json(r)));
    metrics["average_p"] = result_.average_p;
    metrics["natural_average_p"] = result_.natural_average ? json(*result_.natural_average) : json(nullptr);
    metrics["test_items"] = overall_test.size();
    emit("metrics.json", metrics.dump(2) + "\n");
    return 0;
  });

  stage("report", [&] {
    emit("summary.txt", render_summary(config_.output_dir));
    return 0;
  });

  manifest_.write(config_.output_dir / "manifest.json");
  return result_;
}

void table_from_metrics(std::ostringstream& out, const json& list, const std::string& title) {
  std::vector<MetricsReport> reports;
  for (const auto& j : list) {
    MetricsReport r;
    r.source = j.at("source").get<std::string>();
    r.accuracy = j.at("accuracy");
    r.precision_pos = j.at("precision_pos");
    r.recall_pos = j.at("recall_pos");
    r.f1_pos = j.at("f1_pos");
    r.macro_precision = j.at("macro_precision");
    r.macro_recall = j.at("macro_recall");
    r.macro_f1 = j.at("macro_f1");
    reports.push_back(r);
  }
  out << title << "\n\n" << comparison_table(reports) << '\n';
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid config JSON: ") + e.what());
  }
  try {
    c.annotations = resolve(base_dir, j.at("annotations").get<std::string>());
    if (j.contains("format")) {
      auto f = parse_annotation_format(j["format"].get<std::string>());
      if (!f) throw Error("unknown annotation format '" + j["format"].get<std::string>() + "'");
      c.format = *f;
    }
    if (j.contains("texts")) c.texts = resolve(base_dir, j["texts"].get<std::string>());
    if (j.contains("annotators")) c.annotators = resolve(base_dir, j["annotators"].get<std::string>());
    if (j.contains("scheme")) {
      c.scheme = LabelScheme(j["scheme"].at("categories").get<std::vector<std::string>>(),
                             j["scheme"].at("positive").get<std::string>());
    }
    c.dedup = j.value("dedup", true);
    if (j.contains("keywords")) c.keywords = j["keywords"].get<std::vector<std::string>>();
    if (j.contains("partition")) {
      const auto& p = j["partition"];
      const auto mode = p.value("mode", "search");
      if (mode == "natural") c.partition_mode = PartitionMode::kNatural;
      else if (mode == "search") c.partition_mode = PartitionMode::kSearch;
      else throw Error("unknown partition mode '" + mode + "'");
      c.partition.k = p.value("k", c.partition.k);
      c.partition.min_size = p.value("min_size", c.partition.min_size);
      c.partition.allow_large = p.value("allow_large", false);
      c.partition.threads = p.value("threads", 0u);
    }
    auto policy = [](const json& v) {
      auto p = parse_tie_policy(v.get<std::string>());
      if (!p) throw Error("unknown tie policy '" + v.get<std::string>() + "'");
      return *p;
    };
    if (j.contains("tie_policy")) c.group_tie_policy = policy(j["tie_policy"]);
    if (j.contains("overall_tie_policy")) c.overall_tie_policy = policy(j["overall_tie_policy"]);
    if (j.contains("split")) {
      const auto& s = j["split"];
      c.split.train_fraction = s.value("train_fraction", c.split.train_fraction);
      c.split.seed = s.value("seed", c.split.seed);
      c.split.stratified = s.value("stratified", c.split.stratified);
    }
    if (j.contains("augment") && j["augment"].value("enabled", true)) {
      AugmentPolicy a;
      a.factor = j["augment"].value("factor", a.factor);
      a.delete_threshold = j["augment"].value("delete_threshold", a.delete_threshold);
      a.validate();
      c.augment = a;
    }
    if (j.contains("classifier")) {
      const auto& k = j["classifier"];
      const auto kind = k.value("kind", "reference");
      if (kind == "reference") c.classifier = ClassifierKind::kReference;
      else if (kind == "import") c.classifier = ClassifierKind::kImport;
      else throw Error("unknown classifier kind '" + kind + "'");
      c.hyperparams.learning_rate = k.value("learning_rate", c.hyperparams.learning_rate);
      c.hyperparams.epochs = k.value("epochs", c.hyperparams.epochs);
      c.hyperparams.l2 = k.value("l2", c.hyperparams.l2);
      c.model_seed = k.value("seed", c.model_seed);
      if (k.contains("predictions")) {
        for (const auto& [role, path] : k["predictions"].items()) {
          c.imported[role] = resolve(base_dir, path.get<std::string>());
        }
      }
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
  } catch (const json::exception& e) {
    throw Error(std::string("invalid config: ") + e.what());
  }
  return c;
}

std::string RunConfig::to_json() const {
  json j{{"annotations", annotations.generic_string()},
         {"format", format_name(format)},
         {"scheme", {{"categories", scheme.categories()}, {"positive", scheme.name(scheme.positive())}}},
         {"dedup", dedup},
         {"keywords", keywords},
         {"partition",
          {{"mode", mode_name(partition_mode)},
           {"k", partition.k},
           {"min_size", partition.min_size},
           {"allow_large", partition.allow_large}}},
         {"tie_policy", to_string(group_tie_policy)},
         {"overall_tie_policy", to_string(overall_tie_policy)},
         {"split", {{"train_fraction", split.train_fraction}, {"seed", split.seed}, {"stratified", split.stratified}}},
         {"classifier",
          {{"kind", kind_name(classifier)},
           {"learning_rate", hyperparams.learning_rate},
           {"epochs", hyperparams.epochs},
           {"l2", hyperparams.l2},
           {"seed", model_seed}}}};
  if (texts) j["texts"] = texts->generic_string();
  if (annotators) j["annotators"] = annotators->generic_string();
  if (augment) {
    j["augment"] = {{"enabled", true}, {"factor", augment->factor}, {"delete_threshold", augment->delete_threshold}};
  }
  if (!imported.empty()) {
    json p = json::object();
    for (const auto& [role, path] : imported) p[role] = path.generic_string();
    j["classifier"]["predictions"] = p;
  }
  return j.dump(2) + "\n";
}

PipelineResult full_pipeline(const RunConfig& config) {
  Run run(config);
  return run.execute();
}

std::string render_summary(const std::filesystem::path& dir) {
  std::ostringstream out;
  out << "Perspective-aware classification summary\n"
      << "========================================\n\n";

  auto partition = partition_from_json(read_file(dir / "partition.json"));
  out << "Annotator groups\n\n";
  report::TextTable groups({"group", "members"});
  for (std::size_t w = 0; w < partition.k(); ++w) {
    std::string members;
    for (const auto& m : partition.groups[w]) members += (members.empty() ? "" : ", ") + m;
    groups.add_row({partition.group_name(w), members});
  }
  out << groups.render() << '\n';

  if (std::filesystem::exists(dir / "partition_search.json")) {
    auto s = json::parse(read_file(dir / "partition_search.json"));
    auto opt = [](const json& v) { return v.is_null() ? std::string("NA") : report::fixed(v.get<double>()); };
    report::TextTable t({"split", "avg_p"});
    if (s.contains("natural")) t.add_row({"Natural", opt(s["natural"]["score"])});
    t.add_row({"Max.(all splits)", report::fixed(s["best_score"].get<double>())});
    if (s.contains("others_max")) {
      t.add_row({"Max.(other splits)", opt(s["others_max"])});
      t.add_row({"Min.(other splits)", opt(s["others_min"])});
    }
    out << "Average P-index by split (" << s["partitions_scored"].get<std::size_t>() << " partitions scored)\n\n"
        << t.render() << '\n';
  }

  if (std::filesystem::exists(dir / "agreement.txt")) {
    out << "Agreement\n\n" << read_file(dir / "agreement.txt") << '\n';
  }

  if (std::filesystem::exists(dir / "census.json")) {
    auto c = json::parse(read_file(dir / "census.json"));
    report::TextTable t({"measure", "items", "percent"});
    t.add_row({"defined", std::to_string(c["defined"].get<std::size_t>()), ""});
    t.add_row({"p = 1", std::to_string(c["max_polarization"].get<std::size_t>()),
               report::fixed(c["max_polarization_percent"].get<double>(), 1) + "%"});
    t.add_row({"p = 0", std::to_string(c["zero_polarization"].get<std::size_t>()),
               report::fixed(c["zero_polarization_percent"].get<double>(), 1) + "%"});
    for (const auto& [dir_name, count] : c["directions"].items()) {
      t.add_row({"p = 1, " + dir_name, std::to_string(count.get<std::size_t>()), ""});
    }
    out << "Polarization census\n\n" << t.render() << '\n';
  }

  if (std::filesystem::exists(dir / "metrics.json")) {
    auto m = json::parse(read_file(dir / "metrics.json"));
    table_from_metrics(out, m["overall_test"], "Classifiers on the overall gold test set");
    table_from_metrics(out, m["own_group_test"], "Group classifiers on their own group gold test set");
    table_from_metrics(out, m["union_positive_test"], "Classifiers on the union-positive test gold");
  }

  if (std::filesystem::exists(dir / "disagreement.json")) {
    auto d = json::parse(read_file(dir / "disagreement.json"));
    out << "Classifier disagreement (" << d["source_a"].get<std::string>() << " vs "
        << d["source_b"].get<std::string>() << "): " << d["diverging"].get<std::size_t>() << " of "
        << d["compared"].get<std::size_t>() << " (" << report::fixed(d["percent"].get<double>(), 1) << "%); "
        << d["a_positive_b_negative"].get<std::size_t>() << " " << d["source_a"].get<std::string>()
        << "-positive, " << d["b_positive_a_negative"].get<std::size_t>() << " "
        << d["source_b"].get<std::string>() << "-positive\n";
  }
  return out.str();
}

}  // namespace persp
