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

#include "qrnn/params.hpp"

#include <charconv>

#include "qrnn/errors.hpp"

namespace qrnn {

std::size_t real_linear_params(std::size_t in, std::size_t out, bool bias) {
  return in * out + (bias ? out : 0);
}

std::size_t quaternion_linear_params(std::size_t in_q, std::size_t out_q, bool bias) {
  return 4 * in_q * out_q + (bias ? 4 * out_q : 0);
}

std::size_t lstm_params(std::size_t in, std::size_t hidden) {
  return 4 * (real_linear_params(in, hidden, false) + real_linear_params(hidden, hidden, false) +
              hidden);
}

std::size_t qlstm_params(std::size_t in_q, std::size_t hidden_q) {
  return 4 * (quaternion_linear_params(in_q, hidden_q, false) +
              quaternion_linear_params(hidden_q, hidden_q, false) + 4 * hidden_q);
}

namespace {

[[noreturn]] void bad(std::string_view text, const std::string& why) {
  throw InputError("malformed architecture '" + std::string(text) + "': " + why);
}

std::size_t to_size(std::string_view text, std::string_view field) {
  std::size_t v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end || v == 0) {
    bad(text, "'" + std::string(field) + "' is not a positive integer");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

ArchDescriptor parse_arch(std::string_view text) {
  ArchDescriptor a;
  a.text = std::string(text);
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) bad(text, "expected <kind>:<layers>x<width>");
  const std::string_view kind = text.substr(0, colon);
  if (kind == "linear") {
    a.kind = ArchKind::linear;
  } else if (kind == "qlinear") {
    a.kind = ArchKind::qlinear;
  } else if (kind == "lstm") {
    a.kind = ArchKind::lstm;
  } else if (kind == "qlstm") {
    a.kind = ArchKind::qlstm;
  } else {
    bad(text, "unknown kind '" + std::string(kind) + "' (linear, qlinear, lstm, qlstm)");
  }

  const auto fields = split(text.substr(colon + 1), ',');
  const auto dims = split(fields[0], 'x');
  if (dims.size() != 2) bad(text, "expected <layers>x<width>");
  a.layers = to_size(text, dims[0]);
  a.width = to_size(text, dims[1]);
  a.input = a.width;
  a.dense_quaternion = a.quaternion();

  for (std::size_t i = 1; i < fields.size(); ++i) {
    const std::string_view opt = fields[i];
    const std::size_t eq = opt.find('=');
    const std::string_view key = opt.substr(0, eq);
    const std::string_view val = eq == std::string_view::npos ? "" : opt.substr(eq + 1);
    if (key == "bias" && val.empty()) {
      a.bias = true;
    } else if (key == "bidir" && val.empty()) {
      a.bidirectional = true;
    } else if (key == "in") {
      a.input = to_size(text, val);
    } else if (key == "dense") {
      a.dense = to_size(text, val);
    } else if (key == "out") {
      a.output = to_size(text, val);
    } else if (key == "dense-kind" && (val == "real" || val == "quaternion")) {
      a.dense_quaternion = val == "quaternion";
    } else {
      bad(text, "unknown option '" + std::string(opt) + "'");
    }
  }

  const bool recurrent = a.kind == ArchKind::lstm || a.kind == ArchKind::qlstm;
  if (!recurrent && a.bidirectional) bad(text, "bidir applies to recurrent stacks only");
  if (a.quaternion() && (a.width % 4 != 0 || a.input % 4 != 0)) {
    bad(text, "quaternion layers need widths divisible by 4");
  }
  if (a.dense && a.dense_quaternion && *a.dense % 4 != 0) {
    bad(text, "quaternion dense layer needs a width divisible by 4");
  }
  return a;
}

ParamReport count_params(const ArchDescriptor& a) {
  ParamReport report;
  auto add = [&report](std::string name, std::size_t n) {
    report.lines.push_back({std::move(name), n});
    report.total += n;
  };
  const std::size_t directions = a.bidirectional ? 2 : 1;
  for (std::size_t l = 0; l < a.layers; ++l) {
    const std::size_t in = l == 0 ? a.input : a.width;
    const std::string tag = "layer" + std::to_string(l + 1);
    switch (a.kind) {
      case ArchKind::linear:
        add(tag + " linear " + std::to_string(in) + "->" + std::to_string(a.width),
            real_linear_params(in, a.width, a.bias));
        break;
      case ArchKind::qlinear:
        add(tag + " qlinear " + std::to_string(in / 4) + "q->" + std::to_string(a.width / 4) + "q",
            quaternion_linear_params(in / 4, a.width / 4, a.bias));
        break;
      case ArchKind::lstm:
        for (std::size_t d = 0; d < directions; ++d) {
          add(tag + (d ? " lstm(bwd) " : " lstm ") + std::to_string(in) + "->" +
                  std::to_string(a.width),
              lstm_params(in, a.width));
        }
        break;
      case ArchKind::qlstm:
        for (std::size_t d = 0; d < directions; ++d) {
          add(tag + (d ? " qlstm(bwd) " : " qlstm ") + std::to_string(in / 4) + "q->" +
                  std::to_string(a.width / 4) + "q",
              qlstm_params(in / 4, a.width / 4));
        }
        break;
    }
  }
  std::size_t last = a.width;
  if (a.dense) {
    if (a.dense_quaternion) {
      add("dense qlinear " + std::to_string(last / 4) + "q->" + std::to_string(*a.dense / 4) + "q",
          quaternion_linear_params(last / 4, *a.dense / 4, true));
    } else {
      add("dense linear " + std::to_string(last) + "->" + std::to_string(*a.dense),
          real_linear_params(last, *a.dense, true));
    }
    last = *a.dense;
  }
  if (a.output) {
    add("output linear " + std::to_string(last) + "->" + std::to_string(*a.output),
        real_linear_params(last, *a.output, true));
  }
  return report;
}

}  // namespace qrnn
