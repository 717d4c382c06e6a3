// Copyright 2026  The hwcls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hwcls/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <set>

#include "hwcls/checkpoint.hpp"
#include "hwcls/report.hpp"

#ifndef HWCLS_DEFAULT_DATA_DIR
#define HWCLS_DEFAULT_DATA_DIR "data"
#endif

namespace hwcls {

namespace fs = std::filesystem;

std::string resolve_data_dir(const std::optional<std::string>& explicit_dir) {
  if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
  if (const char* env = std::getenv("HWCLS_DATA_DIR"); env && *env) return env;
  return HWCLS_DEFAULT_DATA_DIR;
}

Resources Resources::load(const std::string& data_dir) {
  const fs::path d(data_dir);
  return {GlyphBank::load((d / "glyphs.jsonl").string()), load_font((d / "font5x9.json").string()),
          load_wordlist((d / "words.txt").string())};
}

namespace {

template <typename T>
T get_as(const nlohmann::json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

void require_object(const nlohmann::json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
}

std::vector<LabelClass> classes_from_json(const nlohmann::json& j, const std::string& key) {
  std::vector<LabelClass> out;
  if (j.is_string()) return parse_label_list(j.get<std::string>());
  for (const auto& v : j) out.push_back(label_from_name(get_as<std::string>(v, key)));
  if (out.empty()) throw ConfigError("config key '" + key + "' lists no classes");
  return out;
}

nlohmann::json classes_to_json(const std::vector<LabelClass>& classes) {
  nlohmann::json out = nlohmann::json::array();
  for (LabelClass c : classes) out.push_back(label_name(c));
  return out;
}

}  // namespace

nlohmann::json synthesis_config_to_json(const SynthesisConfig& cfg) {
  return {{"image_height", cfg.image_height},
          {"printed_fraction", cfg.printed_fraction},
          {"stroke_width_min", cfg.stroke_width_min},
          {"stroke_width_max", cfg.stroke_width_max},
          {"ink_max", cfg.ink_max},
          {"jitter_max", cfg.jitter_max},
          {"gap_min", cfg.gap_min},
          {"gap_max", cfg.gap_max},
          {"text",
           {{"date_patterns", cfg.text.date_patterns},
            {"min_year", cfg.text.min_year},
            {"max_year", cfg.text.max_year},
            {"max_number_digits", cfg.text.max_number_digits},
            {"min_alnum_length", cfg.text.min_alnum_length},
            {"max_alnum_length", cfg.text.max_alnum_length}}}};
}

SynthesisConfig synthesis_config_from_json(const nlohmann::json& j) {
  require_object(j, "synthesis config");
  SynthesisConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (key == "image_height") cfg.image_height = get_as<int>(v, key);
    else if (key == "printed_fraction") cfg.printed_fraction = get_as<double>(v, key);
    else if (key == "stroke_width_min") cfg.stroke_width_min = get_as<double>(v, key);
    else if (key == "stroke_width_max") cfg.stroke_width_max = get_as<double>(v, key);
    else if (key == "ink_max") cfg.ink_max = get_as<double>(v, key);
    else if (key == "jitter_max") cfg.jitter_max = get_as<double>(v, key);
    else if (key == "gap_min") cfg.gap_min = get_as<double>(v, key);
    else if (key == "gap_max") cfg.gap_max = get_as<double>(v, key);
    else if (key == "text") {
      require_object(v, "synthesis.text");
      for (const auto& [tk, tv] : v.items()) {
        if (tk == "date_patterns") cfg.text.date_patterns = get_as<std::vector<std::string>>(tv, tk);
        else if (tk == "min_year") cfg.text.min_year = get_as<int>(tv, tk);
        else if (tk == "max_year") cfg.text.max_year = get_as<int>(tv, tk);
        else if (tk == "max_number_digits") cfg.text.max_number_digits = get_as<int>(tv, tk);
        else if (tk == "min_alnum_length") cfg.text.min_alnum_length = get_as<int>(tv, tk);
        else if (tk == "max_alnum_length") cfg.text.max_alnum_length = get_as<int>(tv, tk);
        else throw ConfigError("unknown synthesis.text key '" + tk + "'");
      }
    } else {
      throw ConfigError("unknown synthesis config key '" + key + "'");
    }
  }
  if (cfg.image_height < 8) throw ConfigError("synthesis image_height must be at least 8");
  if (cfg.printed_fraction < 0 || cfg.printed_fraction > 1)
    throw ConfigError("printed_fraction must lie in [0,1]");
  if (cfg.stroke_width_min <= 0 || cfg.stroke_width_max < cfg.stroke_width_min)
    throw ConfigError("bad stroke width range");
  if (cfg.gap_min < 0 || cfg.gap_max < cfg.gap_min) throw ConfigError("bad glyph gap range");
  return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["kind"] = cfg.kind == ExperimentKind::kStandard ? "standard" : "unseen";
  j["seed"] = cfg.seed;
  j["data_dir"] = cfg.data_dir ? nlohmann::json(*cfg.data_dir) : nlohmann::json(nullptr);
  j["corpus"] = {{"classes", classes_to_json(cfg.corpus.classes)},
                 {"per_class", cfg.corpus.per_class},
                 {"split", cfg.corpus.split},
                 {"synthesis", synthesis_config_to_json(cfg.corpus.synthesis)}};
  j["preprocess"] = preprocess_config_to_json(cfg.preprocess);
  j["model"] = model_config_to_json(cfg.model);
  j["training"] = {{"softmax", train_config_to_json(cfg.softmax_training)},
                   {"triplet", train_config_to_json(cfg.triplet_training)}};
  j["classifiers"] = cfg.classifiers;
  j["classifier"] = {{"knn_k", cfg.classifier.knn_k},
                     {"family", family_name(cfg.classifier.family)},
                     {"aggregation", aggregation_name(cfg.classifier.aggregation)},
                     {"averaging", averaging_name(cfg.classifier.averaging)}};
  j["unseen"] = {{"trained", classes_to_json(cfg.unseen.trained)},
                 {"new_class", label_name(cfg.unseen.new_class)},
                 {"support_per_class", cfg.unseen.support_per_class},
                 {"test_per_class", cfg.unseen.test_per_class}};
  return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  require_object(j, "experiment config");
  ExperimentConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (key == "name") {
      cfg.name = get_as<std::string>(v, key);
    } else if (key == "kind") {
      const auto k = get_as<std::string>(v, key);
      if (k == "standard") cfg.kind = ExperimentKind::kStandard;
      else if (k == "unseen") cfg.kind = ExperimentKind::kUnseen;
      else throw ConfigError("unknown experiment kind '" + k + "'");
    } else if (key == "seed") {
      cfg.seed = get_as<std::uint64_t>(v, key);
    } else if (key == "data_dir") {
      if (!v.is_null()) cfg.data_dir = get_as<std::string>(v, key);
    } else if (key == "corpus") {
      require_object(v, "corpus");
      for (const auto& [ck, cv] : v.items()) {
        if (ck == "classes") cfg.corpus.classes = classes_from_json(cv, ck);
        else if (ck == "per_class") cfg.corpus.per_class = get_as<int>(cv, ck);
        else if (ck == "split") cfg.corpus.split = get_as<std::array<double, 3>>(cv, ck);
        else if (ck == "synthesis") cfg.corpus.synthesis = synthesis_config_from_json(cv);
        else throw ConfigError("unknown corpus key '" + ck + "'");
      }
    } else if (key == "preprocess") {
      cfg.preprocess = preprocess_config_from_json(v);
    } else if (key == "model") {
      cfg.model = model_config_from_json(v);
    } else if (key == "training") {
      require_object(v, "training");
      for (const auto& [tk, tv] : v.items()) {
        if (tk == "softmax") cfg.softmax_training = train_config_from_json(tv);
        else if (tk == "triplet") cfg.triplet_training = train_config_from_json(tv);
        else throw ConfigError("unknown training key '" + tk + "' (expected softmax or triplet)");
      }
    } else if (key == "classifiers") {
      cfg.classifiers = get_as<std::vector<std::string>>(v, key);
      for (const auto& c : cfg.classifiers)
        if (c != "softmax" && c != "naive" && c != "llr")
          throw ConfigError("unknown classifier '" + c + "' (expected softmax, naive or llr)");
    } else if (key == "classifier") {
      require_object(v, "classifier");
      for (const auto& [ck, cv] : v.items()) {
        if (ck == "knn_k") cfg.classifier.knn_k = get_as<int>(cv, ck);
        else if (ck == "family") cfg.classifier.family = family_from_name(get_as<std::string>(cv, ck));
        else if (ck == "aggregation") cfg.classifier.aggregation = aggregation_from_name(get_as<std::string>(cv, ck));
        else if (ck == "averaging") cfg.classifier.averaging = averaging_from_name(get_as<std::string>(cv, ck));
        else throw ConfigError("unknown classifier key '" + ck + "'");
      }
    } else if (key == "unseen") {
      require_object(v, "unseen");
      for (const auto& [uk, uv] : v.items()) {
        if (uk == "trained") cfg.unseen.trained = classes_from_json(uv, uk);
        else if (uk == "new_class") cfg.unseen.new_class = label_from_name(get_as<std::string>(uv, uk));
        else if (uk == "support_per_class") cfg.unseen.support_per_class = get_as<int>(uv, uk);
        else if (uk == "test_per_class") cfg.unseen.test_per_class = get_as<int>(uv, uk);
        else throw ConfigError("unknown unseen key '" + uk + "'");
      }
    } else {
      throw ConfigError("unknown experiment config key '" + key + "'");
    }
  }
  if (cfg.corpus.per_class < 3) throw ConfigError("corpus.per_class must be at least 3");
  if (cfg.classifier.knn_k < 1) throw ConfigError("classifier.knn_k must be positive");
  if (cfg.model.input_height != cfg.preprocess.out_height || cfg.model.input_width != cfg.preprocess.out_width)
    throw ConfigError("model input size must equal the preprocess output size");
  if (cfg.kind == ExperimentKind::kUnseen) {
    const auto& u = cfg.unseen;
    if (std::find(u.trained.begin(), u.trained.end(), u.new_class) != u.trained.end())
      throw ConfigError("unseen.new_class must not be a trained class");
    if (u.support_per_class < 2) throw ConfigError("unseen.support_per_class must be at least 2");
    if (u.test_per_class < 1) throw ConfigError("unseen.test_per_class must be positive");
    std::set<LabelClass> all(u.trained.begin(), u.trained.end());
    all.insert(u.new_class);
    cfg.corpus.classes.assign(all.begin(), all.end());
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON at byte " + std::to_string(e.byte));
  }
  return experiment_config_from_json(j);
}

SupportSet embed_manifest(const Checkpoint& ckpt, const Manifest& m) {
  if (ckpt.model.is_classifier()) throw ConfigError("checkpoint has a softmax head, not an embedding head");
  SupportSet s;
  s.embeddings = run_model(ckpt, m).rows_view();
  for (const auto& sample : m.samples) s.labels.push_back(sample.label);
  return s;
}

Manifest take_per_class(const Manifest& m, const std::vector<LabelClass>& classes, int n) {
  Manifest out = m;
  out.samples.clear();
  std::map<LabelClass, int> taken;
  for (const auto& s : m.samples)
    if (std::find(classes.begin(), classes.end(), s.label) != classes.end() && taken[s.label] < n) {
      ++taken[s.label];
      out.samples.push_back(s);
    }
  for (LabelClass c : classes)
    if (taken[c] < n)
      throw ConfigError("need " + std::to_string(n) + " samples of '" + std::string(label_name(c)) +
                        "' but the split has " + std::to_string(taken[c]));
  return out;
}

nlohmann::json headline(const MetricsReport& r) {
  return {{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}};
}

namespace {

std::string now_iso() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream* log)
      : cfg_(cfg), out_(out_dir), log_(log) {}

  nlohmann::json run() {
    const auto start = std::chrono::steady_clock::now();
    meta_["started"] = now_iso();
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw IoError(out_.string(), ec.message());
    write_file((out_ / "config.json").string(), experiment_config_to_json(cfg_).dump(2) + "\n");

    synthesize();
    summary_["name"] = cfg_.name;
    summary_["kind"] = cfg_.kind == ExperimentKind::kStandard ? "standard" : "unseen";
    summary_["corpus"] = {{"train", splits_.train.samples.size()},
                          {"val", splits_.val.samples.size()},
                          {"test", splits_.test.samples.size()}};
    if (cfg_.kind == ExperimentKind::kStandard)
      run_standard();
    else
      run_unseen();

    write_file((out_ / "metrics.json").string(), summary_.dump(2) + "\n");
    meta_["finished"] = now_iso();
    meta_["seconds_total"] = seconds_since(start);
    write_file((out_ / "run_metadata.json").string(), meta_.dump(2) + "\n");
    return summary_;
  }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  }

  void say(const std::string& msg) {
    if (log_) *log_ << "[" << cfg_.name << "] " << msg << std::endl;
  }

  void synthesize() {
    const auto t = std::chrono::steady_clock::now();
    const std::string data_dir = resolve_data_dir(cfg_.data_dir);
    say("loading resources from " + data_dir);
    const Resources res = Resources::load(data_dir);
    CorpusSpec spec;
    for (LabelClass c : cfg_.corpus.classes) spec.counts.emplace_back(c, cfg_.corpus.per_class);
    spec.synthesis = cfg_.corpus.synthesis;
    spec.synthesis.text.wordlist = res.words;
    say("synthesizing " + std::to_string(cfg_.corpus.per_class) + " samples per class");
    const fs::path dir = out_ / "corpus";
    const Manifest all = build_corpus(spec, res.generators(), derive_seed(cfg_.seed, 1), dir.string());
    splits_ = split_manifest(all, cfg_.corpus.split, derive_seed(cfg_.seed, 2));
    write_manifest(splits_.train, (dir / "train.jsonl").string());
    write_manifest(splits_.val, (dir / "val.jsonl").string());
    write_manifest(splits_.test, (dir / "test.jsonl").string());
    meta_["seconds_synthesis"] = seconds_since(t);
  }

  Checkpoint fit(TrainConfig tc, LossKind loss, std::uint64_t stream, const Manifest& train,
                 const Manifest& val, const std::string& subdir) {
    const auto t = std::chrono::steady_clock::now();
    tc.loss = loss;
    tc.seed = derive_seed(cfg_.seed, stream);
    const std::string tag(loss_name(loss));
    say("training " + tag + " model on " + std::to_string(train.samples.size()) + " samples");
    std::string csv = "epoch,train_loss," + std::string(val_metric_name(loss)) + "\n";
    TrainResult r = hwcls::train(cfg_.model, cfg_.preprocess, train, &val, tc, [&](const EpochLog& e) {
      csv += std::to_string(e.epoch) + "," + format_number(e.train_loss) + "," + format_number(e.val_metric) + "\n";
      say(tag + " epoch " + std::to_string(e.epoch) + " loss " + format_number(e.train_loss, 5) + " " +
          std::string(val_metric_name(loss)) + " " + format_number(e.val_metric, 4));
    });
    const fs::path dir = out_ / subdir;
    fs::create_directories(dir);
    save_checkpoint(r.checkpoint, (dir / "model.ckpt").string());
    write_file((dir / "train_log.csv").string(), csv);
    meta_["seconds_train_" + subdir] = seconds_since(t);
    if (r.diverged) throw Error("training diverged: " + r.message);
    return r.checkpoint;
  }

  MetricsReport report(const std::vector<LabelClass>& truth, const std::vector<LabelClass>& pred,
                       const std::vector<LabelClass>& order, const PcaResult* pca,
                       const std::vector<LabelClass>& pca_labels, const std::string& subdir,
                       nlohmann::json extra = nlohmann::json::object()) {
    ReportInput in;
    in.confusion = confusion(truth, pred, order);
    in.metrics = metrics(in.confusion, cfg_.classifier.averaging);
    in.pca = pca;
    in.pca_labels = pca_labels;
    in.extra = std::move(extra);
    emit_report(in, (out_ / subdir).string());
    say(subdir + " accuracy " + format_number(in.metrics.accuracy, 4));
    return in.metrics;
  }

  static std::vector<LabelClass> labels_of(const Manifest& m) {
    std::vector<LabelClass> out;
    for (const auto& s : m.samples) out.push_back(s.label);
    return out;
  }

  nlohmann::json embedding_stats(const PcaResult& pca, const std::vector<LabelClass>& labels,
                                 const std::vector<LabelClass>& classes) {
    nlohmann::json sil = nlohmann::json::object();
    for (LabelClass c : classes)
      sil[std::string(label_name(c))] = class_silhouette(pca.projection, labels, c);
    return {{"silhouette_pca", sil}, {"explained_ratio", pca.explained_ratio}};
  }

  bool wants(const std::string& c) const {
    return std::find(cfg_.classifiers.begin(), cfg_.classifiers.end(), c) != cfg_.classifiers.end();
  }

  void run_standard() {
    const auto classes = splits_.train.classes();
    const auto truth = labels_of(splits_.test);
    if (wants("softmax")) {
      const Checkpoint ckpt = fit(cfg_.softmax_training, LossKind::kSoftmax, 10, splits_.train, splits_.val, "softmax");
      const Embeddings logits = run_model(ckpt, splits_.test).rows_view();
      const auto pred = softmax_classify(logits, ckpt.classes);
      const PcaResult pca = pca_project(logits);
      summary_["softmax"] = headline(report(truth, pred.predicted, classes, &pca, truth, "softmax"));
    }
    if (wants("naive") || wants("llr")) {
      const Checkpoint ckpt = fit(cfg_.triplet_training, LossKind::kTriplet, 20, splits_.train, splits_.val, "triplet");
      const SupportSet support = embed_manifest(ckpt, splits_.val);
      const SupportSet test = embed_manifest(ckpt, splits_.test);
      const PcaResult pca = pca_project(test.embeddings);
      const nlohmann::json stats = embedding_stats(pca, truth, classes);
      summary_["embedding"] = stats;
      if (wants("naive")) {
        const auto pred = naive_classify(test.embeddings, support, static_cast<int>(classes.size()),
                                         cfg_.classifier.knn_k, derive_seed(cfg_.seed, 30));
        summary_["naive"] = headline(report(truth, pred, classes, &pca, truth, "naive", stats));
      }
      if (wants("llr")) {
        const DistanceModel dm = fit_distance_model(support, cfg_.classifier.family);
        std::vector<LabelClass> pred;
        for (Eigen::Index i = 0; i < test.embeddings.rows(); ++i)
          pred.push_back(llr_classify(test.embeddings.row(i), support, dm, cfg_.classifier.aggregation).predicted);
        summary_["llr"] = headline(report(truth, pred, classes, &pca, truth, "llr", stats));
      }
    }
  }

  void run_unseen() {
    const UnseenSpec& u = cfg_.unseen;
    std::vector<LabelClass> trained = u.trained;
    std::sort(trained.begin(), trained.end());
    std::vector<LabelClass> all = trained;
    all.push_back(u.new_class);
    std::sort(all.begin(), all.end());

    const Checkpoint ckpt = fit(cfg_.triplet_training, LossKind::kTriplet, 20, splits_.train.filter(trained),
                                splits_.val.filter(trained), "triplet");
    const Manifest support2_m = take_per_class(splits_.val, trained, u.support_per_class);
    const Manifest support3_m = take_per_class(splits_.val, all, u.support_per_class);
    const Manifest test2_m = take_per_class(splits_.test, trained, u.test_per_class);
    const Manifest test3_m = take_per_class(splits_.test, all, u.test_per_class);
    const SupportSet support2 = embed_manifest(ckpt, support2_m);
    const SupportSet support3 = embed_manifest(ckpt, support3_m);
    const SupportSet test2 = embed_manifest(ckpt, test2_m);
    const SupportSet test3 = embed_manifest(ckpt, test3_m);

    const PcaResult pca2 = pca_project(test2.embeddings);
    const PcaResult pca3 = pca_project(test3.embeddings);
    summary_["embedding"] = embedding_stats(pca3, test3.labels, all);

    nlohmann::json two, three;
    {
      const auto naive = naive_classify(test2.embeddings, support2, static_cast<int>(trained.size()),
                                        cfg_.classifier.knn_k, derive_seed(cfg_.seed, 30));
      two["naive"] = headline(report(test2.labels, naive, trained, &pca2, test2.labels, "two_classes/naive"));
      const DistanceModel dm = fit_distance_model(support2, cfg_.classifier.family);
      std::vector<LabelClass> pred;
      for (Eigen::Index i = 0; i < test2.embeddings.rows(); ++i)
        pred.push_back(llr_classify(test2.embeddings.row(i), support2, dm, cfg_.classifier.aggregation).predicted);
      two["llr"] = headline(report(test2.labels, pred, trained, &pca2, test2.labels, "two_classes/llr"));
    }
    {
      UnseenConfig uc;
      uc.knn_k = cfg_.classifier.knn_k;
      uc.family = cfg_.classifier.family;
      uc.aggregation = cfg_.classifier.aggregation;
      uc.seed = derive_seed(cfg_.seed, 31);
      const UnseenPredictions p = unseen_class_protocol(test3.embeddings, support3, trained, u.new_class, uc);
      three["naive"] = headline(report(test3.labels, p.naive, all, &pca3, test3.labels, "three_classes/naive"));
      std::vector<LabelClass> pred;
      for (const auto& s : p.llr) pred.push_back(s.predicted);
      three["llr"] = headline(report(test3.labels, pred, all, &pca3, test3.labels, "three_classes/llr"));
    }
    summary_["two_classes"] = two;
    summary_["three_classes"] = three;
  }

  const ExperimentConfig& cfg_;
  fs::path out_;
  std::ostream* log_;
  SplitManifests splits_;
  nlohmann::json summary_ = nlohmann::json::object();
  nlohmann::json meta_ = nlohmann::json::object();
};

}  // namespace

nlohmann::json run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream* log) {
  return Runner(cfg, out_dir, log).run();
}

}  // namespace hwcls
