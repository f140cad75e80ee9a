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

#include "qrnn/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qrnn/errors.hpp"

namespace qrnn::io {

using nlohmann::json;

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw FormatError("truncated header length");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_doubles(std::ostream& out, std::span<const double> values) {
  std::vector<char> buf(values.size() * 8);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto bits = std::bit_cast<std::uint64_t>(values[k]);
    for (int i = 0; i < 8; ++i) buf[k * 8 + i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void get_doubles(std::istream& in, std::span<double> values) {
  std::vector<unsigned char> buf(values.size() * 8);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw FormatError("payload shorter than the declared tensors");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[k * 8 + i]) << (8 * i);
    values[k] = std::bit_cast<double>(bits);
  }
}

std::vector<std::size_t> product_shape(const json& j) {
  std::vector<std::size_t> shape;
  for (const auto& d : j) shape.push_back(d.get<std::size_t>());
  return shape;
}

}  // namespace

const TensorRecord& Container::tensor(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw FormatError("container has no tensor named '" + name + "'");
}

void write_container(std::ostream& out, const Container& c) {
  json header = c.header;
  header["layout"] = "split";
  header["endianness"] = "little";
  header["scalar"] = "float64";
  json list = json::array();
  for (const auto& t : c.tensors) {
    list.push_back({{"name", t.name}, {"shape", t.value.shape()}, {"quaternion", t.quaternion}});
  }
  header["tensors"] = std::move(list);
  const std::string text = header.dump();
  out.write(kMagic, 8);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : c.tensors) put_doubles(out, t.value.data());
  if (!out) throw FormatError("failed writing container");
}

Container read_container(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw FormatError("not a QRNNCKP1 container (bad magic)");
  }
  const std::uint64_t n = get_u64(in);
  if (n > (std::uint64_t{1} << 32)) throw FormatError("implausible header length");
  std::string text(n, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(n))) throw FormatError("truncated header");

  Container c;
  try {
    c.header = json::parse(text);
    if (c.header.value("layout", "") != "split" || c.header.value("endianness", "") != "little" ||
        c.header.value("scalar", "") != "float64") {
      throw FormatError("container must be split-layout little-endian float64");
    }
    for (const auto& entry : c.header.at("tensors")) {
      TensorRecord t;
      t.name = entry.at("name").get<std::string>();
      t.quaternion = entry.at("quaternion").get<bool>();
      t.value = Tensor(product_shape(entry.at("shape")));
      c.tensors.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad container header: ") + e.what());
  }
  for (auto& t : c.tensors) get_doubles(in, t.value.data());
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("payload longer than the declared tensors");
  }
  // The tensor list is regenerated on write.
  c.header.erase("tensors");
  return c;
}

void write_container_file(const std::filesystem::path& path, const Container& c) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  write_container(out, c);
}

Container read_container_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_container(in);
}

// --- checkpoints ---------------------------------------------------------

Container checkpoint_container(const TrainState& s) {
  const TrainConfig& cfg = s.config;
  Container c;
  json train = {{"learning_rate", cfg.learning_rate}, {"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},        {"beta1", cfg.beta1},
                {"beta2", cfg.beta2},                  {"epsilon", cfg.epsilon},
                {"clip_norm", cfg.clip_norm}};
  if (cfg.anneal) {
    train["anneal"] = {{"halving_factor", cfg.anneal->halving_factor},
                       {"patience", cfg.anneal->patience}};
  }
  c.header = {
      {"format", "qrnn-checkpoint"},
      {"version", 1},
      {"seed", cfg.seed},
      {"epoch", s.epoch},
      {"model",
       {{"arch", to_string(s.model.kind())},
        {"hidden", s.model.hidden_units()},
        {"input_width", s.model.input_width()},
        {"hidden_width", s.model.hidden_width()},
        {"output_classes", CopyTaskSpec::output_classes}}},
      {"task", {{"seq_len", s.spec.seq_len}, {"blank_len", s.spec.blank_len}}},
      {"train", train},
      {"optimizer",
       {{"step", s.adam.step},
        {"lr_scale", s.adam.lr_scale},
        {"best_loss", s.adam.best_loss},
        {"epochs_since_best", s.adam.epochs_since_best}}},
  };
  const bool quaternion_cell = s.model.kind() == ModelKind::qlstm;
  const auto params = s.model.parameters();
  for (const Parameter* p : params) {
    c.tensors.push_back({p->name, p->value, quaternion_cell && !p->name.starts_with("head.")});
  }
  if (s.adam.m.size() == params.size()) {
    for (std::size_t k = 0; k < params.size(); ++k) {
      const bool q = c.tensors[k].quaternion;
      c.tensors.push_back({"adam.m." + params[k]->name, s.adam.m[k], q});
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      const bool q = c.tensors[k].quaternion;
      c.tensors.push_back({"adam.v." + params[k]->name, s.adam.v[k], q});
    }
  }
  return c;
}

TrainState state_from_container(const Container& c) {
  const json& h = c.header;
  TrainState s;
  try {
    if (h.at("format") != "qrnn-checkpoint") throw FormatError("not a checkpoint container");
    const json& train = h.at("train");
    TrainConfig& cfg = s.config;
    cfg.learning_rate = train.at("learning_rate").get<double>();
    cfg.epochs = train.at("epochs").get<std::size_t>();
    cfg.batch_size = train.at("batch_size").get<std::size_t>();
    cfg.beta1 = train.at("beta1").get<double>();
    cfg.beta2 = train.at("beta2").get<double>();
    cfg.epsilon = train.at("epsilon").get<double>();
    cfg.clip_norm = train.at("clip_norm").get<double>();
    if (train.contains("anneal")) {
      cfg.anneal = AnnealConfig{train["anneal"].at("halving_factor").get<double>(),
                                train["anneal"].at("patience").get<std::size_t>()};
    }
    cfg.seed = h.at("seed").get<std::uint64_t>();
    s.epoch = h.at("epoch").get<std::size_t>();
    s.spec.seq_len = h.at("task").at("seq_len").get<std::size_t>();
    s.spec.blank_len = h.at("task").at("blank_len").get<std::size_t>();
    const json& model = h.at("model");
    s.model = CopyModel(parse_model_kind(model.at("arch").get<std::string>()),
                        model.at("hidden").get<std::size_t>(), cfg.seed);
    const json& opt = h.at("optimizer");
    s.adam.step = opt.at("step").get<std::uint64_t>();
    s.adam.lr_scale = opt.at("lr_scale").get<double>();
    s.adam.best_loss = opt.at("best_loss").get<double>();
    s.adam.epochs_since_best = opt.at("epochs_since_best").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  } catch (const InputError& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }

  const auto params = s.model.parameters();
  auto take = [&c](const std::string& name, const std::vector<std::size_t>& shape) {
    const TensorRecord& t = c.tensor(name);
    if (t.value.shape() != shape) {
      throw FormatError("tensor '" + name + "' has shape " + shape_string(t.value.shape()) +
                        ", expected " + shape_string(shape));
    }
    return t.value;
  };
  for (Parameter* p : params) p->value = take(p->name, p->value.shape());
  const bool has_moments =
      std::any_of(c.tensors.begin(), c.tensors.end(),
                  [](const TensorRecord& t) { return t.name.starts_with("adam.m."); });
  if (has_moments) {
    for (Parameter* p : params) s.adam.m.push_back(take("adam.m." + p->name, p->value.shape()));
    for (Parameter* p : params) s.adam.v.push_back(take("adam.v." + p->name, p->value.shape()));
  }
  const std::size_t expected = params.size() * (has_moments ? 3 : 1);
  if (c.tensors.size() != expected) {
    throw FormatError("checkpoint holds " + std::to_string(c.tensors.size()) +
                      " tensors, expected " + std::to_string(expected));
  }
  return s;
}

void save_checkpoint(const std::filesystem::path& path, const TrainState& state) {
  write_container_file(path, checkpoint_container(state));
}

TrainState load_checkpoint(const std::filesystem::path& path) {
  return state_from_container(read_container_file(path));
}

// --- CSV -----------------------------------------------------------------

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return {buf.data(), ptr};
}

void write_metrics_header(std::ostream& out) { out << kMetricsHeader << '\n'; }

void write_metrics_row(std::ostream& out, const MetricsRecord& r) {
  out << r.epoch << ',' << format_double(r.loss) << ',' << format_double(r.accuracy_recall) << ','
      << format_double(r.accuracy_full) << '\n';
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  write_metrics_header(out);
  for (const auto& r : records) write_metrics_row(out, r);
}

namespace {

double parse_double(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw FormatError("line " + std::to_string(line) + ": '" + std::string(field) +
                      "' is not a number");
  }
  return v;
}

std::vector<double> parse_row(const std::string& text, std::size_t line) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    row.push_back(parse_double(std::string_view(text).substr(start, comma - start), line));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return row;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

std::vector<MetricsRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || (line != kMetricsHeader && line != std::string(kMetricsHeader) + "\r")) {
    throw FormatError("metrics file must start with '" + std::string(kMetricsHeader) + "'");
  }
  std::vector<MetricsRecord> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (blank(line)) continue;
    const auto row = parse_row(line, n);
    if (row.size() != 4) throw FormatError("line " + std::to_string(n) + ": expected 4 fields");
    out.push_back({static_cast<std::size_t>(row[0]), row[1], row[2], row[3]});
  }
  return out;
}

std::vector<MetricsRecord> read_metrics_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_metrics_csv(in);
}

Tensor read_matrix_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t cols = 0, rows = 0, n = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++n;
    if (blank(line)) continue;
    const auto row = parse_row(line, n);
    if (rows == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw FormatError("line " + std::to_string(n) + ": " + std::to_string(row.size()) +
                        " columns, expected " + std::to_string(cols) + " (ragged CSV)");
    }
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw FormatError("empty CSV");
  return Tensor({rows, cols}, std::move(data));
}

void write_matrix_csv(std::ostream& out, const Tensor& m) {
  const std::size_t cols = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << format_double(m.at(r, c));
    }
    out << '\n';
  }
}

Container features_container(const Tensor& packed, std::size_t bands, std::size_t window) {
  Container c;
  c.header = {{"format", "qrnn-features"},
              {"version", 1},
              {"kind", "acoustic_quaternions"},
              {"frames", packed.rows()},
              {"bands", bands},
              {"window", window}};
  c.tensors.push_back({"features", packed, true});
  return c;
}

Tensor features_from_container(const Container& c) {
  if (c.header.value("format", "") != "qrnn-features") {
    throw FormatError("not a feature container");
  }
  const Tensor& t = c.tensor("features").value;
  if (t.rank() != 2 || t.cols() % 4 != 0) throw FormatError("feature tensor must be [T x 4F]");
  return t;
}

}  // namespace qrnn::io
