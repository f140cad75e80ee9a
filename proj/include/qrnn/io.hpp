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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrnn/tensor.hpp"
#include "qrnn/training.hpp"

namespace qrnn::io {

// Binary container shared by checkpoints and packed feature files:
//
//   bytes 0..7   magic "QRNNCKP1"
//   bytes 8..15  header length n, unsigned 64-bit little-endian
//   n bytes      UTF-8 JSON header (compact, keys sorted)
//   payload      IEEE-754 float64 little-endian, tensors concatenated in the
//                order of header["tensors"]
//
// Every header carries layout = "split", endianness = "little" and
// scalar = "float64".
inline constexpr char kMagic[8] = {'Q', 'R', 'N', 'N', 'C', 'K', 'P', '1'};

struct TensorRecord {
  std::string name;
  Tensor value;
  bool quaternion = false;
};

struct Container {
  nlohmann::json header;
  std::vector<TensorRecord> tensors;

  // Throws FormatError if absent.
  const TensorRecord& tensor(const std::string& name) const;
};

void write_container(std::ostream& out, const Container& c);
// Throws FormatError on bad magic, truncated data or a payload whose length
// disagrees with the declared tensors.
Container read_container(std::istream& in);

void write_container_file(const std::filesystem::path& path, const Container& c);
Container read_container_file(const std::filesystem::path& path);

// --- checkpoints ---------------------------------------------------------

Container checkpoint_container(const TrainState& state);
TrainState state_from_container(const Container& c);

void save_checkpoint(const std::filesystem::path& path, const TrainState& state);
TrainState load_checkpoint(const std::filesystem::path& path);

// --- CSV -----------------------------------------------------------------

// 17 significant digits (exact round trip), '.' decimal point,
// independent of the process locale.
std::string format_double(double v);

inline constexpr const char* kMetricsHeader = "epoch,loss,accuracy_recall,accuracy_full";

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRecord& r);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(std::istream& in);
std::vector<MetricsRecord> read_metrics_csv_file(const std::filesystem::path& path);

// Headerless numeric CSV. Throws FormatError on ragged rows, empty input or
// unparsable fields.
Tensor read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Tensor& m);

// Packed acoustic features ([frames x 4F]) in the binary container.
Container features_container(const Tensor& packed, std::size_t bands, std::size_t window);
Tensor features_from_container(const Container& c);

}  // namespace qrnn::io
