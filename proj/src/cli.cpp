/*
 * Copyright 2026 The qrnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qrnn/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qrnn/acoustic.hpp"
#include "qrnn/copy_task.hpp"
#include "qrnn/errors.hpp"
#include "qrnn/io.hpp"
#include "qrnn/params.hpp"
#include "qrnn/training.hpp"

namespace qrnn::cli {

namespace fs = std::filesystem;

std::string per_seed_path(const std::string& path, unsigned long long seed) {
  const std::string tag = std::to_string(seed);
  if (const auto pos = path.find("{seed}"); pos != std::string::npos) {
    return path.substr(0, pos) + tag + path.substr(pos + 6);
  }
  const fs::path p(path);
  return (p.parent_path() / (p.stem().string() + ".seed" + tag + p.extension().string())).string();
}

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// --- copy-train ------------------------------------------------------------

struct CopyTrainArgs {
  std::string model = "qlstm";
  std::size_t hidden = 0;
  std::size_t seq_len = 10;
  std::size_t blank_len = 10;
  std::size_t epochs = 2000;
  double lr = 5e-3;
  std::size_t batch = 10;
  unsigned long long seed = 1;
  std::vector<unsigned long long> seeds;
  double clip = 0.0;
  std::string metrics;
  std::string checkpoint;
  std::string resume;
  bool quiet = false;
};

struct RunOutcome {
  int code = kOk;
  std::string summary;
};

RunOutcome train_one(TrainState state, const std::string& metrics_path,
                     const std::string& checkpoint_path, bool append_metrics, bool quiet,
                     std::ostream* progress) {
  std::ofstream metrics;
  if (!metrics_path.empty()) {
    const bool append = append_metrics && fs::exists(metrics_path);
    metrics.open(metrics_path, append ? std::ios::app : std::ios::trunc);
    if (!metrics) throw FormatError("cannot open metrics file '" + metrics_path + "'");
    if (!append) io::write_metrics_header(metrics);
  }
  double best_recall = 0.0;
  auto on_epoch = [&](const MetricsRecord& r, const TrainState&) {
    best_recall = std::max(best_recall, r.accuracy_recall);
    if (metrics.is_open()) {
      io::write_metrics_row(metrics, r);
      metrics.flush();
    }
    if (!quiet && progress != nullptr && (r.epoch % 100 == 0 || r.epoch == state.config.epochs)) {
      *progress << "seed " << state.config.seed << " epoch " << r.epoch << " loss "
                << io::format_double(r.loss) << " recall " << r.accuracy_recall << '\n';
    }
  };

  std::ostringstream summary;
  summary << "model=" << to_string(state.model.kind()) << " hidden=" << state.model.hidden_units()
          << " params=" << state.model.param_count() << " L=" << state.spec.seq_len
          << " T=" << state.spec.blank_len << " seed=" << state.config.seed;
  try {
    const auto records = run_training(state, on_epoch);
    if (!checkpoint_path.empty()) io::save_checkpoint(checkpoint_path, state);
    if (!records.empty()) {
      const auto& last = records.back();
      summary << " epoch=" << last.epoch << " loss=" << io::format_double(last.loss)
              << " accuracy_recall=" << io::format_double(last.accuracy_recall)
              << " accuracy_full=" << io::format_double(last.accuracy_full);
    } else {
      summary << " epoch=" << state.epoch << " (nothing to train)";
    }
    summary << " best_accuracy_recall=" << io::format_double(best_recall);
    return {kOk, summary.str()};
  } catch (const TrainingDiverged& e) {
    if (!checkpoint_path.empty()) io::save_checkpoint(checkpoint_path, *e.last_good);
    summary << " diverged: " << e.what() << " (last good epoch " << e.last_good->epoch << ")";
    return {kDiverged, summary.str()};
  }
}

int cmd_copy_train(const CopyTrainArgs& a, const CLI::App& sub, std::ostream& out,
                   std::ostream& err) {
  auto given = [&sub](const char* name) { return sub.count(name) > 0; };

  if (!a.resume.empty()) {
    for (const char* f : {"--model", "--hidden", "--seq-len", "--blank-len", "--lr", "--batch",
                          "--seed", "--seeds", "--clip"}) {
      if (given(f)) throw UsageError(std::string(f) + " cannot be combined with --resume");
    }
    TrainState state = io::load_checkpoint(a.resume);
    if (given("--epochs")) state.config.epochs = a.epochs;
    if (state.config.epochs < state.epoch) {
      throw UsageError("--epochs is below the checkpoint's completed epoch count");
    }
    const RunOutcome r = train_one(std::move(state), a.metrics, a.checkpoint, true, a.quiet, &err);
    out << r.summary << '\n';
    return r.code;
  }

  const ModelKind kind = parse_model_kind(a.model);
  const std::size_t hidden = a.hidden ? a.hidden : (kind == ModelKind::qlstm ? 20 : 40);
  if (given("--seed") && given("--seeds")) throw UsageError("use either --seed or --seeds");
  if (a.seq_len < 1) throw UsageError("--seq-len must be at least 1");

  TrainConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.clip_norm = a.clip;
  CopyTaskSpec spec{a.seq_len, a.blank_len};

  std::vector<unsigned long long> seeds = a.seeds.empty() ? std::vector{a.seed} : a.seeds;
  if (seeds.size() == 1 && a.seeds.size() <= 1) {
    cfg.seed = seeds[0];
    const auto path = [&](const std::string& p) {
      return a.seeds.empty() || p.empty() ? p : per_seed_path(p, seeds[0]);
    };
    const RunOutcome r = train_one(init_training(kind, hidden, spec, cfg), path(a.metrics),
                                   path(a.checkpoint), false, a.quiet, &err);
    out << r.summary << '\n';
    return r.code;
  }

  // Independent seeds on independent threads; each run owns all its state.
  std::vector<RunOutcome> outcomes(seeds.size());
  std::vector<std::string> failures(seeds.size());
  std::vector<TrainState> states;
  for (auto s : seeds) {
    cfg.seed = s;
    states.push_back(init_training(kind, hidden, spec, cfg));
  }
  {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      workers.emplace_back([&, k] {
        try {
          const auto path = [&](const std::string& p) {
            return p.empty() ? p : per_seed_path(p, seeds[k]);
          };
          outcomes[k] = train_one(std::move(states[k]), path(a.metrics), path(a.checkpoint),
                                  false, true, nullptr);
        } catch (const std::exception& e) {
          failures[k] = e.what();
        }
      });
    }
  }
  int code = kOk;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    if (!failures[k].empty()) throw FormatError(failures[k]);
    out << outcomes[k].summary << '\n';
    code = std::max(code, outcomes[k].code);
  }
  return code;
}

// --- grad-check ------------------------------------------------------------

struct GradCheckArgs {
  std::string model = "qlstm";
  std::size_t hidden = 2;
  std::size_t timesteps = 3;
  double tolerance = 1e-5;
  double step = 1e-5;
  unsigned long long seed = 1;
};

int cmd_grad_check(const GradCheckArgs& a, std::ostream& out) {
  const ModelKind kind = parse_model_kind(a.model);
  if (a.hidden < 1 || a.timesteps < 1) throw UsageError("--hidden and --timesteps must be >= 1");
  if (!(a.step > 0.0)) throw UsageError("--step must be positive");
  const GradCheckReport report =
      grad_check_model(kind, a.hidden, a.timesteps, a.seed, a.step, a.tolerance);
  out << "grad-check model=" << a.model << " hidden=" << a.hidden << " timesteps=" << a.timesteps
      << " h=" << io::format_double(a.step) << " tolerance=" << io::format_double(a.tolerance)
      << '\n';
  out << std::left << std::setw(14) << "parameter" << std::setw(26) << "max_rel_error"
      << "status\n";
  for (const auto& e : report.entries) {
    out << std::setw(14) << e.name << std::setw(26) << io::format_double(e.max_rel_error)
        << (e.flagged ? "FAIL" : "ok") << '\n';
  }
  out << "max_rel_error " << io::format_double(report.max_rel_error) << '\n';
  return report.passed() ? kOk : kCheckFailed;
}

// --- params ----------------------------------------------------------------

int cmd_params(const std::vector<std::string>& archs, bool compare, std::ostream& out) {
  std::vector<ParamReport> reports;
  std::vector<ArchDescriptor> parsed;
  for (const auto& text : archs) {
    parsed.push_back(parse_arch(text));
    reports.push_back(count_params(parsed.back()));
  }
  for (std::size_t k = 0; k < reports.size(); ++k) {
    out << parsed[k].text << '\n';
    for (const auto& line : reports[k].lines) {
      out << "  " << std::left << std::setw(40) << line.component << line.count << '\n';
    }
    out << "  " << std::setw(40) << "total" << reports[k].total << '\n';
  }
  if (compare) {
    std::size_t real = 0, quat = 0;
    for (std::size_t k = 0; k < parsed.size(); ++k) {
      (parsed[k].quaternion() ? quat : real) += reports[k].total;
    }
    if (real == 0 || quat == 0) {
      throw UsageError("--compare needs at least one real and one quaternion descriptor");
    }
    out << "real/quaternion ratio " << io::format_double(static_cast<double>(real) / quat) << '\n';
  }
  return kOk;
}

// --- features ------------------------------------------------------------

int cmd_pack_features(const std::string& in_path, const std::string& out_path,
                      std::size_t window, const std::string& format, std::ostream& out) {
  std::ifstream in(in_path);
  if (!in) throw FormatError("cannot open '" + in_path + "'");
  const Tensor energies = io::read_matrix_csv(in);
  const Tensor packed = acoustic::pack_features_matrix(energies, window);
  if (format == "csv") {
    std::ofstream o(out_path, std::ios::trunc);
    if (!o) throw FormatError("cannot open '" + out_path + "' for writing");
    io::write_matrix_csv(o, packed);
  } else {
    io::write_container_file(out_path, io::features_container(packed, energies.cols(), window));
  }
  out << "packed " << energies.rows() << " frames x " << energies.cols() << " bands -> "
      << packed.cols() << " columns (" << packed.cols() / 4 << " quaternions) into " << out_path
      << '\n';
  return kOk;
}

int cmd_export_features(const std::string& in_path, const std::string& out_path,
                        std::ostream& out) {
  const Tensor packed = io::features_from_container(io::read_container_file(in_path));
  std::ofstream o(out_path, std::ios::trunc);
  if (!o) throw FormatError("cannot open '" + out_path + "' for writing");
  io::write_matrix_csv(o, packed);
  out << "exported " << packed.rows() << " x " << packed.cols() << " to " << out_path << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quaternion LSTM experiments: copy task, gradient checks, parameter audits, "
               "acoustic quaternion features"};
  app.name("qrnn");
  app.require_subcommand(1);

  CopyTrainArgs train;
  auto* copy = app.add_subcommand("copy-train", "Train a QLSTM or LSTM on the copy task");
  copy->add_option("--model", train.model, "qlstm or lstm")
      ->check(CLI::IsMember({"qlstm", "lstm"}));
  copy->add_option("--hidden", train.hidden,
                   "Hidden units: quaternions for qlstm (default 20), reals for lstm (default 40)")
      ->check(CLI::PositiveNumber);
  copy->add_option("--seq-len", train.seq_len, "Payload length L")->capture_default_str();
  copy->add_option("--blank-len", train.blank_len, "Blank time lag T")->capture_default_str();
  copy->add_option("--epochs", train.epochs, "Epochs (one batch each)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  copy->add_option("--lr", train.lr, "Adam learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  copy->add_option("--batch", train.batch, "Sequences per batch")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  copy->add_option("--seed", train.seed, "Run seed")->capture_default_str();
  copy->add_option("--seeds", train.seeds, "Comma-separated seeds, run on parallel threads")
      ->delimiter(',');
  copy->add_option("--clip", train.clip, "Global gradient-norm clip (0 = off)")
      ->check(CLI::NonNegativeNumber);
  copy->add_option("--metrics", train.metrics, "Metrics CSV path");
  copy->add_option("--checkpoint", train.checkpoint, "Checkpoint path written at the end");
  copy->add_option("--resume", train.resume, "Continue from a checkpoint")
      ->check(CLI::ExistingFile);
  copy->add_flag("--quiet", train.quiet, "No progress lines on stderr");

  GradCheckArgs gc;
  auto* grad = app.add_subcommand("grad-check", "Finite-difference gradient check");
  grad->add_option("--model", gc.model, "qlstm or lstm")->check(CLI::IsMember({"qlstm", "lstm"}));
  grad->add_option("--hidden", gc.hidden, "Hidden units")->capture_default_str();
  grad->add_option("--timesteps", gc.timesteps, "Unroll length")->capture_default_str();
  grad->add_option("--tolerance", gc.tolerance, "Max relative error")->capture_default_str();
  grad->add_option("--step", gc.step, "Central-difference step h")->capture_default_str();
  grad->add_option("--seed", gc.seed, "Seed")->capture_default_str();

  std::vector<std::string> archs;
  bool compare = false;
  auto* params = app.add_subcommand("params", "Count learnable parameters");
  params
      ->add_option("--arch", archs,
                   "<kind>:<layers>x<width>[,in=D][,bias][,bidir][,dense=D][,dense-kind=real|"
                   "quaternion][,out=K]; kinds linear, qlinear, lstm, qlstm")
      ->required();
  params->add_flag("--compare", compare, "Print the real/quaternion total ratio");

  std::string in_path, out_path, format = "csv";
  std::size_t window = 2;
  auto* pack = app.add_subcommand("pack-features", "Build acoustic quaternions from energies");
  pack->add_option("--in", in_path, "Energy CSV, frames x bands, no header")->required();
  pack->add_option("--out", out_path, "Output path")->required();
  pack->add_option("--window", window, "Delta regression half-window N")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  pack->add_option("--format", format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));

  std::string export_in, export_out;
  auto* exp = app.add_subcommand("export-features", "Convert a packed .bin feature file to CSV");
  exp->add_option("--in", export_in, "Packed feature container")->required();
  exp->add_option("--out", export_out, "CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*copy) return cmd_copy_train(train, *copy, out, err);
    if (*grad) return cmd_grad_check(gc, out);
    if (*params) return cmd_params(archs, compare, out);
    if (*pack) return cmd_pack_features(in_path, out_path, window, format, out);
    if (*exp) return cmd_export_features(export_in, export_out, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kUsage;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace qrnn::cli
