// Command-line front end: dataset generation, training, evaluation,
// per-frame grading, and PSNR measurement over EMIF frames.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "emigrade/checkpoint.hpp"
#include "emigrade/dataset.hpp"
#include "emigrade/errors.hpp"
#include "emigrade/metrics.hpp"
#include "emigrade/model_zoo.hpp"
#include "emigrade/network.hpp"
#include "emigrade/preprocess.hpp"
#include "emigrade/trainer.hpp"

namespace fs = std::filesystem;

namespace {

using namespace emigrade;

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot open " + path.string() + " for writing");
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!file) throw DataError("write failed for " + path.string());
}

struct GenArgs {
  std::string out;
  double scale = 1.0;
  std::uint64_t seed = 0;
  int width = 1280;
  int height = 720;
  std::string range = "studio";
};

int run_gen(const GenArgs& args) {
  DatasetConfig config;
  config.width = args.width;
  config.height = args.height;
  config.range = args.range == "full" ? RangeTag::full : RangeTag::studio;
  config.scale = args.scale;
  config.noise.seed = args.seed;

  const DatasetManifest manifest = build_dataset(args.out, config);
  const auto counts = split_counts(args.scale);
  for (int level = 1; level <= 5; ++level) {
    std::printf("level %d: train %d  val %d  test %d\n", level, counts[0], counts[1], counts[2]);
  }
  std::printf("total %zu frames\n", manifest.entries.size());
  std::printf("manifest %s\n", (fs::path(args.out) / "manifest.txt").string().c_str());
  return 0;
}

struct TrainArgs {
  std::string dataset;
  std::string out;
  int model = 4;
  int epochs = 30;
  double lr = 1e-3;
  double l2 = 0.0;
  int batch = 32;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& args) {
  const DatasetManifest manifest = load_manifest(fs::path(args.dataset) / "manifest.txt");
  const std::vector<Sample> train_samples = load_split(manifest, args.dataset, Split::train);
  const std::vector<Sample> val_samples = load_split(manifest, args.dataset, Split::val);

  TrainConfig cfg;
  cfg.learning_rate = args.lr;
  cfg.l2_lambda = args.l2;
  cfg.epochs = args.epochs;
  cfg.batch_size = args.batch;
  cfg.seed = args.seed;

  const ModelSpec spec = build_model(args.model);
  const TrainOutcome outcome = train(spec, train_samples, val_samples, cfg);

  fs::create_directories(args.out);
  const std::string stem = "model" + std::to_string(args.model);
  save_checkpoint(checkpoint_of(outcome.network, args.model, static_cast<std::uint32_t>(cfg.epochs)),
                  (fs::path(args.out) / (stem + "_final.emic")).string());
  save_checkpoint(outcome.best, (fs::path(args.out) / (stem + "_best.emic")).string());

  const std::string log = format_train_log(cfg, args.model, outcome);
  write_text_file(fs::path(args.out) / (stem + "_train.log"), log);
  std::fputs(log.c_str(), stdout);
  return 0;
}

Network<float> network_from_checkpoint(const Checkpoint& ckpt) {
  ModelSpec spec;
  try {
    spec = build_model(ckpt.model_id);
  } catch (const std::invalid_argument&) {
    throw DataError("checkpoint names unknown model id " + std::to_string(ckpt.model_id));
  }
  Network<float> net(spec);
  apply_checkpoint(net, ckpt);
  return net;
}

struct EvalArgs {
  std::string checkpoint;
  std::string dataset;
  std::string split = "test";
  std::string out;
};

int run_eval(const EvalArgs& args) {
  const Network<float> net = network_from_checkpoint(load_checkpoint(args.checkpoint));
  const DatasetManifest manifest = load_manifest(fs::path(args.dataset) / "manifest.txt");
  const std::vector<Sample> samples =
      load_split(manifest, args.dataset, split_from_name(args.split));

  const MetricsReport report = evaluate(net, samples);
  const std::string text = format_report_text(report);
  const std::string confusion = format_confusion_csv(report);

  std::fputs(text.c_str(), stdout);
  std::printf("confusion matrix (rows = true level 1..5, columns = predicted):\n%s",
              confusion.c_str());

  if (!args.out.empty()) {
    fs::create_directories(args.out);
    write_text_file(fs::path(args.out) / "report.txt", text);
    write_text_file(fs::path(args.out) / "report.csv", format_report_csv(report));
    write_text_file(fs::path(args.out) / "confusion.csv", confusion);
  }
  return 0;
}

struct GradeArgs {
  std::string checkpoint;
  std::string input;
};

int run_grade(const GradeArgs& args) {
  const Network<float> net = network_from_checkpoint(load_checkpoint(args.checkpoint));

  std::vector<fs::path> paths;
  if (fs::is_directory(args.input)) {
    for (const auto& entry : fs::directory_iterator(args.input)) {
      if (entry.is_regular_file() && entry.path().extension() == ".emif") {
        paths.push_back(entry.path());
      }
    }
    std::sort(paths.begin(), paths.end());
  } else {
    paths.emplace_back(args.input);
  }

  int failures = 0;
  for (const fs::path& path : paths) {
    Frame frame;
    try {
      frame = load_emif(path);
    } catch (const DataError& e) {
      std::fprintf(stderr, "warning: skipping %s: %s\n", path.string().c_str(), e.what());
      ++failures;
      continue;
    }
    const Sample sample = make_sample(frame, 1);
    const Tensor<float> probs = net.probabilities(sample.tensor);
    std::printf("%s\t%d", path.string().c_str(), argmax_lowest(probs) + 1);
    for (int k = 0; k < probs.size(); ++k) std::printf("\t%.6f", static_cast<double>(probs[k]));
    std::printf("\n");
  }
  return failures > 0 ? 2 : 0;
}

struct PsnrArgs {
  std::string frame_a;
  std::string frame_b;
};

int run_psnr(const PsnrArgs& args) {
  const Frame a = load_emif(args.frame_a);
  const Frame b = load_emif(args.frame_b);
  const PsnrResult result = psnr(a, b);
  if (result.identical) {
    std::printf("identical\n");
  } else {
    std::printf("%.6f\n", result.value_db);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic EMI video grading toolkit"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a labelled synthetic dataset");
  gen->add_option("--out", gen_args.out, "Output dataset directory")
      ->envname("EMIGRADE_OUT")
      ->required();
  gen->add_option("--scale", gen_args.scale, "Split-size multiplier in (0, 1]");
  gen->add_option("--seed", gen_args.seed, "Master RNG seed");
  gen->add_option("--width", gen_args.width, "Frame width in pixels")->check(CLI::PositiveNumber);
  gen->add_option("--height", gen_args.height, "Frame height in pixels")
      ->check(CLI::PositiveNumber);
  gen->add_option("--range", gen_args.range, "Quantisation range")
      ->check(CLI::IsMember({"studio", "full"}));
  gen->set_config("--config", "", "Config file (key = value lines)");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train a classifier on a generated dataset");
  train->add_option("--dataset", train_args.dataset, "Dataset directory (contains manifest.txt)")
      ->required();
  train->add_option("--out", train_args.out, "Output directory for checkpoints and the log")
      ->envname("EMIGRADE_OUT")
      ->required();
  train->add_option("--model", train_args.model, "Model id")->check(CLI::Range(1, 4));
  train->add_option("--epochs", train_args.epochs, "Training epochs")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--lr", train_args.lr, "Adam learning rate");
  train->add_option("--l2", train_args.l2, "L2 penalty weight (0 = off)");
  train->add_option("--batch", train_args.batch, "Batch size")->check(CLI::PositiveNumber);
  train->add_option("--seed", train_args.seed, "Run RNG seed");
  train->set_config("--config", "", "Config file (key = value lines)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on one dataset split");
  eval->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
  eval->add_option("--dataset", eval_args.dataset, "Dataset directory")->required();
  eval->add_option("--split", eval_args.split, "Dataset split")
      ->check(CLI::IsMember({"train", "val", "test"}));
  eval->add_option("--out", eval_args.out, "Report output directory (optional)")
      ->envname("EMIGRADE_OUT");
  eval->set_config("--config", "", "Config file (key = value lines)");

  GradeArgs grade_args;
  CLI::App* grade = app.add_subcommand("grade", "Grade frames with a trained checkpoint");
  grade->add_option("--checkpoint", grade_args.checkpoint, "Checkpoint file")->required();
  grade->add_option("input", grade_args.input, "Frame file or directory of frames")->required();
  grade->set_config("--config", "", "Config file (key = value lines)");

  PsnrArgs psnr_args;
  CLI::App* psnr_cmd = app.add_subcommand("psnr", "PSNR between two frames");
  psnr_cmd->add_option("frame_a", psnr_args.frame_a, "Reference frame")->required();
  psnr_cmd->add_option("frame_b", psnr_args.frame_b, "Comparison frame")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (train->parsed()) return run_train(train_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (grade->parsed()) return run_grade(grade_args);
    if (psnr_cmd->parsed()) return run_psnr(psnr_args);
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
