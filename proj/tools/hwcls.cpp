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

// hwcls: command-line front end for synthesis, training, classification
// and evaluation. Exit codes: 0 success, 1 runtime failure, 2 usage or
// configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwcls/checkpoint.hpp"
#include "hwcls/classify.hpp"
#include "hwcls/dataset.hpp"
#include "hwcls/experiment.hpp"
#include "hwcls/metrics.hpp"
#include "hwcls/report.hpp"
#include "hwcls/train.hpp"

namespace fs = std::filesystem;
using namespace hwcls;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string config;
  std::string data_dir;
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
  cmd->add_option("--seed", c.seed, "random seed");
  auto* o = cmd->add_option("--out", c.out, "output path");
  if (out_required) o->required();
  cmd->add_option("--config", c.config, "experiment config (JSON)")->check(CLI::ExistingFile);
}

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_experiment_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.data_dir.empty()) cfg.data_dir = c.data_dir;
  return cfg;
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string classes;
  std::optional<int> per_class;
  std::optional<double> printed_fraction;
  std::optional<int> height;
  std::vector<double> split;
};

int cmd_synth(const SynthArgs& a) {
  ExperimentConfig cfg = base_config(a.common);
  if (!a.classes.empty()) cfg.corpus.classes = parse_label_list(a.classes);
  if (a.per_class) cfg.corpus.per_class = *a.per_class;
  if (a.printed_fraction) cfg.corpus.synthesis.printed_fraction = *a.printed_fraction;
  if (a.height) cfg.corpus.synthesis.image_height = *a.height;
  if (!a.split.empty()) {
    if (a.split.size() != 3) throw ConfigError("--split needs three fractions");
    cfg.corpus.split = {a.split[0], a.split[1], a.split[2]};
  }
  if (cfg.corpus.per_class < 1) throw ConfigError("--per-class must be positive");
  const Resources res = Resources::load(resolve_data_dir(cfg.data_dir));
  CorpusSpec spec;
  for (LabelClass c : cfg.corpus.classes) spec.counts.emplace_back(c, cfg.corpus.per_class);
  spec.synthesis = cfg.corpus.synthesis;
  spec.synthesis.text.wordlist = res.words;
  const Manifest m = build_corpus(spec, res.generators(), derive_seed(cfg.seed, 1), a.common.out);
  if (cfg.corpus.per_class >= 3) {
    const auto s = split_manifest(m, cfg.corpus.split, derive_seed(cfg.seed, 2));
    const fs::path dir(a.common.out);
    write_manifest(s.train, (dir / "train.jsonl").string());
    write_manifest(s.val, (dir / "val.jsonl").string());
    write_manifest(s.test, (dir / "test.jsonl").string());
  }
  std::cout << "wrote " << m.samples.size() << " samples to " << a.common.out << "\n";
  return 0;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string train, val, loss = "softmax";
  std::optional<int> epochs, batch_size;
  std::optional<double> lr, margin;
  std::string mining;
  bool float32 = false;
};

int cmd_train(const TrainArgs& a) {
  ExperimentConfig cfg = base_config(a.common);
  const LossKind loss = loss_from_name(a.loss);
  TrainConfig tc = loss == LossKind::kSoftmax ? cfg.softmax_training : cfg.triplet_training;
  tc.loss = loss;
  tc.seed = cfg.seed;
  if (a.epochs) tc.epochs = *a.epochs;
  if (a.batch_size) tc.batch_size = *a.batch_size;
  if (a.lr) tc.lr = *a.lr;
  if (a.margin) tc.margin = *a.margin;
  if (!a.mining.empty()) tc.mining = mining_from_name(a.mining);
  if (a.float32) tc.float32 = true;
  tc = train_config_from_json(train_config_to_json(tc));  // validates

  const Manifest train_m = read_manifest(a.train);
  std::optional<Manifest> val_m;
  if (!a.val.empty()) val_m = read_manifest(a.val);
  if (loss == LossKind::kTriplet && train_m.classes().size() < 2)
    throw ConfigError("triplet loss needs at least two classes; " + a.train + " has " +
                      std::to_string(train_m.classes().size()));

  fs::create_directories(a.common.out);
  std::string csv = "epoch,train_loss," + std::string(val_metric_name(loss)) + "\n";
  TrainResult r = train(cfg.model, cfg.preprocess, train_m, val_m ? &*val_m : nullptr, tc, [&](const EpochLog& e) {
    csv += std::to_string(e.epoch) + "," + format_number(e.train_loss) + "," + format_number(e.val_metric) + "\n";
    std::cerr << "epoch " << e.epoch << " loss " << format_number(e.train_loss, 5) << " "
              << val_metric_name(loss) << " " << format_number(e.val_metric, 4) << "\n";
  });
  const fs::path dir(a.common.out);
  save_checkpoint(r.checkpoint, (dir / "model.ckpt").string());
  write_file((dir / "train_log.csv").string(), csv);
  if (r.diverged) {
    std::cerr << "error: " << r.message << "\n";
    return 1;
  }
  std::cout << "wrote " << (dir / "model.ckpt").string() << "\n";
  return 0;
}

// --- shared helpers for embed / classify / eval ----------------------------

bool looks_like_manifest(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      return line.find("\"image_path\"") != std::string::npos;
  return false;
}

/// Support from an embedding JSONL, or a manifest embedded on load.
SupportSet load_support(const std::string& path, const Checkpoint& ckpt) {
  if (looks_like_manifest(path)) {
    SupportSet s = embed_manifest(ckpt, read_manifest(path));
    s.source = path;
    return s;
  }
  SupportSet s = support_from_jsonl(read_file(path));
  s.source = path;
  if (s.embeddings.cols() != ckpt.model.output_dim())
    throw ConfigError("support embeddings have dimension " + std::to_string(s.embeddings.cols()) +
                      ", the checkpoint produces " + std::to_string(ckpt.model.output_dim()));
  return s;
}

struct Classified {
  std::vector<LabelClass> predicted;
  std::vector<nlohmann::json> detail;  // per sample, may be empty objects
  Embeddings outputs;                  // logits or embeddings
  std::vector<LabelClass> order;       // confusion class order
};

Classified classify_manifest(const Checkpoint& ckpt, const Manifest& m, const std::string& classifier,
                             const std::string& support_path, const ClassifierConfig& cc,
                             std::uint64_t seed) {
  Classified out;
  if (classifier == "softmax") {
    if (!ckpt.model.is_classifier()) throw ConfigError("softmax classifier needs a softmax checkpoint");
    for (const auto& s : m.samples)
      if (std::find(ckpt.classes.begin(), ckpt.classes.end(), s.label) == ckpt.classes.end())
        throw ConfigError("manifest label '" + std::string(label_name(s.label)) +
                          "' is not one of the checkpoint's classes");
    out.outputs = run_model(ckpt, m).rows_view();
    const auto p = softmax_classify(out.outputs, ckpt.classes);
    out.predicted = p.predicted;
    for (Eigen::Index i = 0; i < p.probabilities.rows(); ++i) {
      nlohmann::json probs = nlohmann::json::object();
      for (std::size_t c = 0; c < ckpt.classes.size(); ++c)
        probs[std::string(label_name(ckpt.classes[c]))] = p.probabilities(i, static_cast<Eigen::Index>(c));
      out.detail.push_back({{"probabilities", probs}});
    }
    out.order = ckpt.classes;
    return out;
  }
  if (classifier != "naive" && classifier != "llr")
    throw ConfigError("unknown classifier '" + classifier + "' (expected softmax, naive or llr)");
  if (support_path.empty()) throw ConfigError(classifier + " classification needs --support");
  const SupportSet support = load_support(support_path, ckpt);
  out.outputs = embed_manifest(ckpt, m).embeddings;
  out.order = support.classes();
  if (classifier == "naive") {
    out.predicted = naive_classify(out.outputs, support, static_cast<int>(out.order.size()), cc.knn_k, seed);
    out.detail.assign(out.predicted.size(), nlohmann::json::object());
  } else {
    const DistanceModel dm = fit_distance_model(support, cc.family);
    for (Eigen::Index i = 0; i < out.outputs.rows(); ++i) {
      const LlrScore s = llr_classify(out.outputs.row(i), support, dm, cc.aggregation);
      out.predicted.push_back(s.predicted);
      nlohmann::json llr = nlohmann::json::object();
      for (std::size_t c = 0; c < s.classes.size(); ++c) llr[std::string(label_name(s.classes[c]))] = s.llr[c];
      out.detail.push_back({{"per_class_llr", llr}});
    }
  }
  // Truth may contain classes the support lacks; keep them in the order.
  for (const auto& s : m.samples)
    if (std::find(out.order.begin(), out.order.end(), s.label) == out.order.end()) out.order.push_back(s.label);
  std::sort(out.order.begin(), out.order.end());
  return out;
}

// --- embed ---------------------------------------------------------------

struct EmbedArgs {
  Common common;
  std::string checkpoint, manifest;
};

int cmd_embed(const EmbedArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  SupportSet s = embed_manifest(ckpt, read_manifest(a.manifest));
  write_file(a.common.out, support_to_jsonl(s));
  std::cout << "wrote " << s.embeddings.rows() << " embeddings to " << a.common.out << "\n";
  return 0;
}

// --- classify ------------------------------------------------------------

struct ClassifyArgs {
  Common common;
  std::string checkpoint, manifest, classifier = "softmax", support;
  std::optional<int> knn_k;
  std::string family, aggregation;
};

ClassifierConfig classifier_config(const ExperimentConfig& cfg, const ClassifyArgs& a) {
  ClassifierConfig cc = cfg.classifier;
  if (a.knn_k) cc.knn_k = *a.knn_k;
  if (!a.family.empty()) cc.family = family_from_name(a.family);
  if (!a.aggregation.empty()) cc.aggregation = aggregation_from_name(a.aggregation);
  if (cc.knn_k < 1) throw ConfigError("--knn-k must be positive");
  return cc;
}

int cmd_classify(const ClassifyArgs& a) {
  const ExperimentConfig cfg = base_config(a.common);
  const ClassifierConfig cc = classifier_config(cfg, a);
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const Manifest m = read_manifest(a.manifest);
  const Classified c = classify_manifest(ckpt, m, a.classifier, a.support, cc, derive_seed(cfg.seed, 30));
  std::string out;
  for (std::size_t i = 0; i < m.samples.size(); ++i) {
    nlohmann::json j = {{"sample", m.samples[i].image_path},
                        {"true_label", label_name(m.samples[i].label)},
                        {"predicted", label_name(c.predicted[i])}};
    for (const auto& [k, v] : c.detail[i].items()) j[k] = v;
    out += j.dump() + "\n";
  }
  write_file(a.common.out, out);
  std::cout << "wrote " << m.samples.size() << " predictions to " << a.common.out << "\n";
  return 0;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
  ClassifyArgs base;
  std::string averaging;
};

int cmd_eval(const EvalArgs& e) {
  const ClassifyArgs& a = e.base;
  const ExperimentConfig cfg = base_config(a.common);
  const ClassifierConfig cc = classifier_config(cfg, a);
  const Averaging avg = e.averaging.empty() ? cfg.classifier.averaging : averaging_from_name(e.averaging);
  std::vector<std::string> names;
  std::stringstream ss(a.classifier);
  for (std::string n; std::getline(ss, n, ',');) names.push_back(n);
  for (const auto& n : names) {
    if (n != "softmax" && n != "naive" && n != "llr")
      throw ConfigError("unknown classifier '" + n + "' (expected softmax, naive or llr)");
    if (n != "softmax" && a.support.empty()) throw ConfigError(n + " evaluation needs --support");
  }
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  const Manifest m = read_manifest(a.manifest);
  std::vector<LabelClass> truth;
  for (const auto& s : m.samples) truth.push_back(s.label);
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& n : names) {
    const Classified c = classify_manifest(ckpt, m, n, a.support, cc, derive_seed(cfg.seed, 30));
    ReportInput in;
    in.confusion = confusion(truth, c.predicted, c.order);
    in.metrics = metrics(in.confusion, avg);
    const PcaResult pca = pca_project(c.outputs);
    in.pca = &pca;
    in.pca_labels = truth;
    in.extra = {{"classifier", n}};
    const std::string dir = names.size() == 1 ? a.common.out : (fs::path(a.common.out) / n).string();
    emit_report(in, dir);
    summary[n] = headline(in.metrics);
    std::cout << n << " accuracy " << format_number(in.metrics.accuracy, 4) << "\n";
  }
  if (names.size() > 1) write_file((fs::path(a.common.out) / "summary.json").string(), summary.dump(2) + "\n");
  return 0;
}

// --- unseen / experiment -------------------------------------------------

struct UnseenArgs {
  Common common;
  std::string trained, new_class;
  std::optional<int> support_size, test_size;
};

int cmd_unseen(const UnseenArgs& a) {
  ExperimentConfig cfg = base_config(a.common);
  cfg.kind = ExperimentKind::kUnseen;
  nlohmann::json j = experiment_config_to_json(cfg);
  if (!a.trained.empty()) {
    j["unseen"]["trained"] = nlohmann::json::array();
    for (LabelClass c : parse_label_list(a.trained)) j["unseen"]["trained"].push_back(label_name(c));
  }
  if (!a.new_class.empty()) j["unseen"]["new_class"] = label_name(label_from_name(a.new_class));
  if (a.support_size) {
    if (*a.support_size < 2)
      throw ConfigError("support size " + std::to_string(*a.support_size) +
                        " for the new class: fitting its distance model needs at least 2 samples");
    j["unseen"]["support_per_class"] = *a.support_size;
  }
  if (a.test_size) j["unseen"]["test_per_class"] = *a.test_size;
  cfg = experiment_config_from_json(j);
  const auto summary = run_experiment(cfg, a.common.out, &std::cerr);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_experiment(const Common& c) {
  if (c.config.empty()) throw ConfigError("experiment needs --config");
  const ExperimentConfig cfg = base_config(c);
  const auto summary = run_experiment(cfg, c.out, &std::cerr);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// --- plot ----------------------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

int cmd_plot(const std::string& report_dir) {
  const fs::path dir(report_dir);
  fs::create_directories(dir / "plots");
  int written = 0;
  if (fs::exists(dir / "confusion.csv")) {
    const auto rows = read_csv((dir / "confusion.csv").string());
    if (rows.empty()) throw ParseError(0, "empty confusion.csv");
    ConfusionMatrix cm;
    for (std::size_t j = 1; j < rows[0].size(); ++j) cm.classes.push_back(label_from_name(rows[0][j]));
    const auto k = static_cast<Eigen::Index>(cm.classes.size());
    cm.counts = CountMatrix::Zero(k, k);
    for (Eigen::Index i = 0; i < k && static_cast<std::size_t>(i + 1) < rows.size(); ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        cm.counts(i, j) = std::stoll(rows[static_cast<std::size_t>(i + 1)].at(static_cast<std::size_t>(j + 1)));
    write_file((dir / "plots" / "confusion.svg").string(), confusion_svg(cm));
    ++written;
  }
  if (fs::exists(dir / "pca.csv")) {
    const auto rows = read_csv((dir / "pca.csv").string());
    PcaResult pca;
    std::vector<LabelClass> labels;
    pca.projection.resize(static_cast<Eigen::Index>(rows.size() > 0 ? rows.size() - 1 : 0), 2);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      pca.projection(static_cast<Eigen::Index>(i - 1), 0) = std::stod(rows[i].at(0));
      pca.projection(static_cast<Eigen::Index>(i - 1), 1) = std::stod(rows[i].at(1));
      labels.push_back(label_from_name(rows[i].at(2)));
    }
    write_file((dir / "plots" / "pca.svg").string(), pca_svg(pca, labels));
    ++written;
  }
  if (!written) throw ConfigError(report_dir + " holds neither confusion.csv nor pca.csv");
  std::cout << "wrote " << written << " plot(s) to " << (dir / "plots").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handwriting structure classification toolkit"};
  app.require_subcommand(1);
  std::string data_dir;
  app.add_option("--data-dir", data_dir, "glyph/font/wordlist directory (default $HWCLS_DATA_DIR)");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "synthesize a labeled corpus");
  add_common(s, synth.common);
  s->add_option("--classes", synth.classes, "comma-separated classes");
  s->add_option("--per-class", synth.per_class, "samples per class");
  s->add_option("--printed-fraction", synth.printed_fraction, "share of printed samples");
  s->add_option("--height", synth.height, "image height in pixels");
  s->add_option("--split", synth.split, "train,val,test fractions")->delimiter(',');

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model");
  add_common(t, tr.common);
  t->add_option("--train", tr.train, "training manifest")->required()->check(CLI::ExistingFile);
  t->add_option("--val", tr.val, "validation manifest")->check(CLI::ExistingFile);
  t->add_option("--loss", tr.loss, "softmax or triplet");
  t->add_option("--epochs", tr.epochs);
  t->add_option("--batch-size", tr.batch_size);
  t->add_option("--lr", tr.lr);
  t->add_option("--margin", tr.margin);
  t->add_option("--mining", tr.mining, "random or batch_hard");
  t->add_flag("--float32", tr.float32, "single-precision arithmetic");

  EmbedArgs em;
  auto* e = app.add_subcommand("embed", "write embeddings of a manifest as a support set");
  add_common(e, em.common);
  e->add_option("--checkpoint", em.checkpoint)->required()->check(CLI::ExistingFile);
  e->add_option("--manifest", em.manifest)->required()->check(CLI::ExistingFile);

  auto add_classify_opts = [](CLI::App* cmd, ClassifyArgs& c) {
    add_common(cmd, c.common);
    cmd->add_option("--checkpoint", c.checkpoint)->required()->check(CLI::ExistingFile);
    cmd->add_option("--manifest", c.manifest)->required()->check(CLI::ExistingFile);
    cmd->add_option("--classifier", c.classifier, "softmax, naive or llr");
    cmd->add_option("--support", c.support, "support embeddings (JSONL) or manifest")->check(CLI::ExistingFile);
    cmd->add_option("--knn-k", c.knn_k);
    cmd->add_option("--family", c.family, "gaussian or histogram");
    cmd->add_option("--aggregation", c.aggregation, "min_distance, mean_distance or nearest_mean");
  };
  ClassifyArgs cl;
  auto* c = app.add_subcommand("classify", "predict labels for a manifest");
  add_classify_opts(c, cl);

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "evaluate classifiers and write reports");
  add_classify_opts(v, ev.base);
  v->add_option("--averaging", ev.averaging, "weighted or macro");

  UnseenArgs un;
  auto* u = app.add_subcommand("unseen", "unseen-class study (two vs three classes)");
  add_common(u, un.common);
  u->add_option("--trained", un.trained, "classes used for training");
  u->add_option("--new-class", un.new_class, "class added through support samples only");
  u->add_option("--support-size", un.support_size, "support samples per class");
  u->add_option("--test-size", un.test_size, "test samples per class");

  Common ex;
  auto* x = app.add_subcommand("experiment", "run an experiment recipe");
  add_common(x, ex);

  std::string plot_dir;
  auto* p = app.add_subcommand("plot", "render SVG plots from a report directory");
  p->add_option("report", plot_dir, "report directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  for (Common* cm : {&synth.common, &tr.common, &em.common, &cl.common, &ev.base.common, &un.common, &ex})
    cm->data_dir = data_dir;

  try {
    if (*s) return cmd_synth(synth);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_embed(em);
    if (*c) return cmd_classify(cl);
    if (*v) return cmd_eval(ev);
    if (*u) return cmd_unseen(un);
    if (*x) return cmd_experiment(ex);
    if (*p) return cmd_plot(plot_dir);
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
