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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qrnn {

std::size_t real_linear_params(std::size_t in, std::size_t out, bool bias);
std::size_t quaternion_linear_params(std::size_t in_q, std::size_t out_q, bool bias);
// Four gates, each with input map, recurrent map and bias.
std::size_t lstm_params(std::size_t in, std::size_t hidden);
std::size_t qlstm_params(std::size_t in_q, std::size_t hidden_q);

enum class ArchKind { linear, qlinear, lstm, qlstm };

// Parsed `<kind>:<layers>x<width>[,option...]` descriptor. Widths are in real
// dimensions; a quaternion layer of width N has N/4 quaternion units.
//
// Options: in=<d> (input width, default = width), bias, bidir,
// dense=<d> (one dense layer after the stack), dense-kind=real|quaternion
// (default: same family as the stack), out=<k> (real output layer with bias).
struct ArchDescriptor {
  std::string text;
  ArchKind kind = ArchKind::linear;
  std::size_t layers = 1;
  std::size_t width = 0;
  std::size_t input = 0;
  bool bias = false;
  bool bidirectional = false;
  std::optional<std::size_t> dense;
  bool dense_quaternion = false;
  std::optional<std::size_t> output;

  bool quaternion() const { return kind == ArchKind::qlinear || kind == ArchKind::qlstm; }
};

// Throws InputError on malformed text or widths a quaternion layer cannot split.
ArchDescriptor parse_arch(std::string_view text);

struct ParamLine {
  std::string component;
  std::size_t count = 0;
};

struct ParamReport {
  std::vector<ParamLine> lines;
  std::size_t total = 0;
};

ParamReport count_params(const ArchDescriptor& arch);

}  // namespace qrnn
