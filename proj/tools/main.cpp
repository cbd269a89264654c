// Copyright 2026 The ZSC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// zsc: zero-shot scene classification over precomputed embeddings, plus the
// sampling / verdict / sweep tooling used to validate it.
//
// Exit codes: 0 success, 1 usage or validation failure, 2 I/O failure.

#include <pthread.h>

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "zsc/classifier.hpp"
#include "zsc/embedding_io.hpp"
#include "zsc/ensemble.hpp"
#include "zsc/error.hpp"
#include "zsc/evaluation.hpp"
#include "zsc/review.hpp"
#include "zsc/review_server.hpp"
#include "zsc/synthetic.hpp"
#include "zsc/taxonomy.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct Options {
  std::string manifest, image_emb, text_emb, labels, label_emb;
  std::string decisions, plan, verdicts;
  std::string out;
  std::string template_spec = "natural";
  std::string mode = "weighted";
  double scale = 100.0;
  double threshold = 0.5;
  double w_image = 0.8;
  double gate = 0.6;
  double text_sim_threshold = 0.0;
  std::optional<std::size_t> top_k;  // default: 5, or every class when fewer
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  std::size_t classes = 10;
  std::size_t per_class = 100;
  double min_coverage = 0.3;
  std::vector<double> thresholds = zsc::default_thresholds();
  bool skip_missing = false;
  bool renormalize = false;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string image_root, static_dir;
  // synth
  zsc::SyntheticSpec synth;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::exists(path)) throw UsageError(std::string(flag) + ": no such file: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw zsc::Error(zsc::ErrorCode::kIoError, "cannot write " + path, path);
}

std::string percent(std::size_t n, std::size_t total) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", total == 0 ? 0.0 : 100.0 * n / total);
  return buf;
}

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

zsc::Taxonomy load_attached_taxonomy(const Options& o) {
  require_file(o.labels, "--labels");
  require_file(o.label_emb, "--label-emb");
  auto tax = zsc::load_taxonomy(o.labels, zsc::PromptTemplate::parse(o.template_spec));
  const auto store = zsc::read_embeddings(o.label_emb, {o.renormalize});
  return zsc::attach_prompt_embeddings(tax, store);
}

zsc::ClassificationConfig classification_config(const Options& o, const zsc::Taxonomy& tax) {
  return {o.scale, o.threshold, o.top_k.value_or(std::min<std::size_t>(5, tax.size()))};
}

void print_summary(const std::vector<zsc::DecisionRecord>& decisions,
                   const std::vector<std::string>& skipped, const Options& o) {
  std::size_t accepted = 0;
  for (const auto& d : decisions) accepted += d.accepted ? 1 : 0;
  std::cout << "decisions: " << decisions.size() << " written to " << o.out << "\n";
  std::cout << "accepted: " << accepted << " / " << decisions.size() << " ("
            << percent(accepted, decisions.size()) << ") at threshold " << fixed4(o.threshold)
            << "\n";
  if (!skipped.empty()) std::cout << "skipped (no image embedding): " << skipped.size() << "\n";
  for (const auto& id : skipped) std::cerr << "warning: no image embedding for '" << id << "'\n";
}

int cmd_classify(const Options& o) {
  require_file(o.manifest, "--manifest");
  require_file(o.image_emb, "--image-emb");
  if (o.out.empty()) throw UsageError("--out is required");
  const auto tax = load_attached_taxonomy(o);
  const auto manifest = zsc::read_manifest(o.manifest);
  const auto images = zsc::read_embeddings(o.image_emb, {o.renormalize});
  const auto result = zsc::classify_corpus(manifest, images, tax, classification_config(o, tax),
                                           {o.workers, 256, o.skip_missing});
  zsc::write_decisions(result.decisions, o.out);
  print_summary(result.decisions, result.skipped, o);
  return kExitOk;
}

int cmd_ensemble(const Options& o) {
  if (o.mode == "image") return cmd_classify(o);
  require_file(o.manifest, "--manifest");
  require_file(o.image_emb, "--image-emb");
  require_file(o.text_emb, "--text-emb");
  if (o.out.empty()) throw UsageError("--out is required");
  zsc::EnsembleConfig ecfg{o.w_image, o.gate, o.text_sim_threshold,
                           o.mode == "conditional" ? zsc::FusionMode::kConditional
                                                   : zsc::FusionMode::kWeighted};
  const auto tax = load_attached_taxonomy(o);
  const auto manifest = zsc::read_manifest(o.manifest);
  const auto images = zsc::read_embeddings(o.image_emb, {o.renormalize});
  const auto texts = zsc::read_embeddings(o.text_emb, {o.renormalize});
  const auto result = zsc::ensemble_corpus(manifest, images, texts, tax, classification_config(o, tax),
                                           ecfg, {o.workers, 256, o.skip_missing});
  zsc::write_decisions(result.decisions, o.out);
  print_summary(result.decisions, result.skipped, o);
  std::cout << "mode: " << o.mode << "\n";
  std::cout << "used text: " << result.used_text << "\n";
  std::cout << "image-only fallback (no usable caption): " << result.image_only_fallbacks << "\n";
  return kExitOk;
}

int cmd_coverage(const Options& o) {
  require_file(o.decisions, "--decisions");
  const auto csv = zsc::format_coverage_csv(
      zsc::coverage_curve(zsc::read_decisions(o.decisions), o.thresholds));
  std::cout << csv;
  if (!o.out.empty()) write_text(o.out, csv);
  return kExitOk;
}

int cmd_freq(const Options& o) {
  require_file(o.decisions, "--decisions");
  const auto freq = zsc::frequency_report(zsc::read_decisions(o.decisions));
  for (const auto& f : freq) std::cout << f.label << "," << f.count << "\n";
  if (!o.out.empty()) write_text(o.out, zsc::format_frequency_csv(freq));
  return kExitOk;
}

int cmd_sample(const Options& o) {
  require_file(o.decisions, "--decisions");
  if (o.out.empty()) throw UsageError("--out is required");
  const auto plan =
      zsc::stratified_sample(zsc::read_decisions(o.decisions), o.seed, o.classes, o.per_class);
  for (const auto& w : plan.warnings) std::cerr << "warning: " << w << "\n";
  zsc::write_sample_plan(plan, o.out);
  std::cout << "sample: " << plan.items.size() << " items written to " << o.out << " (seed "
            << o.seed << ")\n";
  return kExitOk;
}

std::vector<zsc::JudgedItem> load_judged(const Options& o, zsc::SamplePlan* plan_out = nullptr,
                                         std::vector<zsc::DecisionRecord>* decisions_out = nullptr) {
  require_file(o.plan, "--plan");
  require_file(o.decisions, "--decisions");
  require_file(o.verdicts, "--verdicts");
  auto plan = zsc::read_sample_plan(o.plan);
  auto decisions = zsc::read_decisions(o.decisions);
  const auto verdicts = zsc::read_verdicts(o.verdicts);
  auto judged = zsc::join_verdicts(plan, decisions, verdicts);
  if (plan_out) *plan_out = std::move(plan);
  if (decisions_out) *decisions_out = std::move(decisions);
  return judged;
}

int cmd_sweep(const Options& o) {
  const auto judged = load_judged(o);
  const auto sweep = zsc::threshold_sweep(judged, o.thresholds);
  const auto csv = zsc::format_sweep_csv(sweep);
  std::cout << csv;
  if (!o.out.empty()) write_text(o.out, csv);
  const auto& best = zsc::optimal_threshold(sweep, o.min_coverage);
  std::cout << "optimal_threshold," << fixed4(best.threshold) << ",ratio," << fixed4(*best.ratio)
            << ",coverage," << fixed4(static_cast<double>(best.classified) / sweep.total)
            << ",min_coverage," << fixed4(o.min_coverage) << "\n";
  return kExitOk;
}

int cmd_report(const Options& o) {
  zsc::SamplePlan plan;
  std::vector<zsc::DecisionRecord> decisions;
  const auto judged = load_judged(o, &plan, &decisions);
  std::vector<std::string> classes;
  for (const auto& item : plan.items) {
    if (std::find(classes.begin(), classes.end(), item.predicted_label) == classes.end()) {
      classes.push_back(item.predicted_label);
    }
  }
  const auto report = zsc::per_class_accuracy(judged, classes);
  const auto csv = zsc::format_accuracy_csv(report, zsc::frequency_report(decisions));
  std::cout << csv;
  if (!o.out.empty()) write_text(o.out, csv);
  try {
    const auto means = zsc::mean_top_prob_stats(judged);
    std::cout << "mean_top_prob,hits," << fixed4(means.mean_hit) << ",misses,"
              << fixed4(means.mean_miss) << "\n";
  } catch (const zsc::Error& e) {
    if (e.code() != zsc::ErrorCode::kEmptyPartition) throw;
    std::cout << "mean_top_prob unavailable: " << e.what() << "\n";
  }
  return kExitOk;
}

int cmd_prompts(const Options& o) {
  require_file(o.labels, "--labels");
  if (o.out.empty()) throw UsageError("--out is required");
  const auto tax = zsc::load_taxonomy(o.labels, zsc::PromptTemplate::parse(o.template_spec));
  zsc::write_prompt_dump(tax, o.out);
  std::cout << "prompts: " << tax.size() << " written to " << o.out << "\n";
  return kExitOk;
}

int cmd_serve(const Options& o) {
  require_file(o.plan, "--plan");
  require_file(o.decisions, "--decisions");
  if (o.verdicts.empty()) throw UsageError("--verdicts is required");
  if (o.image_root.empty() || !fs::is_directory(o.image_root)) {
    throw UsageError("--image-root: no such directory: " + o.image_root);
  }
  std::unordered_map<std::string, std::string> image_paths;
  if (!o.manifest.empty()) {
    require_file(o.manifest, "--manifest");
    for (auto& e : zsc::read_manifest(o.manifest)) image_paths.emplace(e.id, e.image_path);
  }
  const auto decisions = zsc::read_decisions(o.decisions);
  zsc::ReviewSession session(zsc::read_sample_plan(o.plan), decisions, std::move(image_paths),
                             o.verdicts);
  zsc::ReviewServer server(session, {o.image_root, o.static_dir});
  if (!server.bind(o.host, o.port)) {
    std::cerr << "error: cannot bind " << o.host << ":" << o.port << " (port in use?)\n";
    return kExitValidation;
  }
  // SIGINT/SIGTERM are blocked in every thread and collected here, so the
  // server is never stopped from inside a signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  std::cout << "serving on http://" << o.host << ":" << server.port() << "\n" << std::flush;
  const bool ok = server.listen();
  pthread_kill(waiter.native_handle(), SIGUSR1);  // wakes the waiter if listen() failed
  waiter.join();
  return ok ? kExitOk : kExitIo;
}

int cmd_synth(Options o) {
  if (o.out.empty()) throw UsageError("--out is required");
  if (!o.labels.empty()) {
    require_file(o.labels, "--labels");
    const auto tax = zsc::load_taxonomy(o.labels);
    o.synth.labels.clear();
    for (const auto& c : tax.classes()) o.synth.labels.push_back(c.raw_name);
  }
  const auto corpus = zsc::make_synthetic_corpus(o.synth);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  zsc::save_taxonomy(corpus.taxonomy, dir / "labels.txt");
  zsc::write_embeddings(corpus.label_store, dir / "label_emb.zse");
  zsc::write_embeddings(corpus.images, dir / "image_emb.zse");
  zsc::write_embeddings(corpus.texts, dir / "text_emb.zse");
  zsc::write_manifest(corpus.manifest, dir / "manifest.jsonl");
  std::cout << "synthetic corpus: " << corpus.manifest.size() << " items, "
            << corpus.taxonomy.size() << " classes, dim " << o.synth.dim << " in " << dir.string()
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-shot classification and validation over precomputed embeddings"};
  app.require_subcommand(1);
  Options o;

  auto add_taxonomy = [&](CLI::App* cmd) {
    cmd->add_option("--labels", o.labels, "Taxonomy file, one label per line");
    cmd->add_option("--label-emb", o.label_emb, "Label prompt embeddings (ZSE1)");
    cmd->add_option("--template", o.template_spec,
                    "Prompt template: natural, raw, or a pattern containing {label}");
  };
  auto add_classify = [&](CLI::App* cmd) {
    add_taxonomy(cmd);
    cmd->add_option("--manifest", o.manifest, "Corpus manifest (JSON lines)");
    cmd->add_option("--image-emb", o.image_emb, "Image embeddings (ZSE1)");
    cmd->add_option("--scale", o.scale, "Softmax scale applied to cosine similarities")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", o.threshold, "Acceptance threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--top-k", o.top_k, "Labels kept per decision")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    cmd->add_option("--out", o.out, "Decision file to write");
    cmd->add_flag("--skip-missing", o.skip_missing, "Skip items without an image embedding");
    cmd->add_flag("--renormalize", o.renormalize, "Rescale non-unit embeddings instead of failing");
  };
  auto add_thresholds = [&](CLI::App* cmd) {
    cmd->add_option("--thresholds", o.thresholds, "Comma-separated thresholds")->delimiter(',');
  };
  auto add_judged = [&](CLI::App* cmd) {
    cmd->add_option("--plan", o.plan, "Sample plan (JSON lines)");
    cmd->add_option("--decisions", o.decisions, "Decision file (JSON lines)");
    cmd->add_option("--verdicts", o.verdicts, "Verdict file (JSON lines)");
    cmd->add_option("--out", o.out, "CSV output");
  };

  auto* classify = app.add_subcommand("classify", "Classify images against prompted labels");
  add_classify(classify);

  auto* ensemble = app.add_subcommand("ensemble", "Fuse image and caption distributions");
  add_classify(ensemble);
  ensemble->add_option("--text-emb", o.text_emb, "Caption embeddings (ZSE1)");
  ensemble->add_option("--mode", o.mode, "image | weighted | conditional")
      ->check(CLI::IsMember({"image", "weighted", "conditional"}));
  ensemble->add_option("--w-image", o.w_image, "Image weight in the blend")
      ->check(CLI::Range(0.0, 1.0));
  ensemble->add_option("--gate", o.gate, "Conditional mode: image alone at or above this")
      ->check(CLI::Range(0.0, 1.0));
  ensemble->add_option("--text-sim-threshold", o.text_sim_threshold,
                       "Ignore captions whose best cosine is below this")
      ->check(CLI::Range(0.0, 1.0));

  auto* coverage = app.add_subcommand("coverage", "Share of items classified per threshold");
  coverage->add_option("--decisions", o.decisions, "Decision file (JSON lines)");
  coverage->add_option("--out", o.out, "CSV output");
  add_thresholds(coverage);

  auto* freq = app.add_subcommand("freq", "Top-1 label frequencies");
  freq->add_option("--decisions", o.decisions, "Decision file (JSON lines)");
  freq->add_option("--out", o.out, "CSV output");

  auto* sample = app.add_subcommand("sample", "Stratified validation sample");
  sample->add_option("--decisions", o.decisions, "Decision file (JSON lines)");
  sample->add_option("--seed", o.seed, "Sampling seed");
  sample->add_option("--classes", o.classes, "Most frequent classes to sample")
      ->check(CLI::PositiveNumber);
  sample->add_option("--per-class", o.per_class, "Items per class")->check(CLI::PositiveNumber);
  sample->add_option("--out", o.out, "Sample plan to write");

  auto* sweep = app.add_subcommand("sweep", "Hit/error rates per threshold");
  add_judged(sweep);
  add_thresholds(sweep);
  sweep->add_option("--min-coverage", o.min_coverage, "Coverage floor for the optimal threshold")
      ->check(CLI::Range(0.0, 1.0));

  auto* report = app.add_subcommand("report", "Per-class accuracy of the judged sample");
  add_judged(report);

  auto* prompts = app.add_subcommand("prompts", "Write the id/label/prompt dump");
  add_taxonomy(prompts);
  prompts->add_option("--out", o.out, "Prompt dump (tab-separated)");

  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  serve->add_option("--plan", o.plan, "Sample plan (JSON lines)");
  serve->add_option("--decisions", o.decisions, "Decision file (JSON lines)");
  serve->add_option("--verdicts", o.verdicts, "Verdict file, appended to");
  serve->add_option("--manifest", o.manifest, "Manifest supplying image paths");
  serve->add_option("--image-root", o.image_root, "Directory images are served from");
  serve->add_option("--static-dir", o.static_dir, "UI assets served at /");
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "TCP port")->check(CLI::Range(0, 65535));

  auto* synth = app.add_subcommand("synth", "Write a planted-label synthetic corpus");
  synth->add_option("--out", o.out, "Output directory");
  synth->add_option("--labels", o.labels, "Optional taxonomy supplying class names");
  synth->add_option("--items", o.synth.items, "Corpus size");
  synth->add_option("--dim", o.synth.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  synth->add_option("--classes", o.synth.classes, "Class count when --labels is absent");
  synth->add_option("--planted-fraction", o.synth.planted_fraction, "Share of planted items")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--image-noise", o.synth.image_noise, "Noise on planted images");
  synth->add_option("--text-noise", o.synth.text_noise, "Noise on planted captions");
  synth->add_option("--caption-fraction", o.synth.caption_fraction, "Share of items with captions")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", o.synth.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*ensemble) return cmd_ensemble(o);
    if (*coverage) return cmd_coverage(o);
    if (*freq) return cmd_freq(o);
    if (*sample) return cmd_sample(o);
    if (*sweep) return cmd_sweep(o);
    if (*report) return cmd_report(o);
    if (*prompts) return cmd_prompts(o);
    if (*serve) return cmd_serve(o);
    if (*synth) return cmd_synth(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const zsc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == zsc::ErrorCode::kIoError ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}
