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

#include <doctest.h>

#include <cmath>
#include <set>

#include "qrnn/errors.hpp"
#include "qrnn/copy_task.hpp"

using namespace qrnn;

TEST_CASE("worked layout example") {
  const CopyTaskSpec spec{2, 3};
  CHECK(spec.steps() == 8);
  std::vector<int> ids(8), targets(8);
  const std::vector<int> payload = {3, 7};
  layout_example(spec, payload, ids, targets);
  CHECK(ids == std::vector<int>{3, 7, 8, 8, 8, 9, 8, 8});
  CHECK(targets == std::vector<int>{8, 8, 8, 8, 8, 8, 3, 7});
  CHECK(spec.recall_start() == 6);
}

TEST_CASE("batch structure") {
  const CopyTaskSpec spec{10, 100};
  CHECK(spec.steps() == 121);
  Rng rng(5);
  const CopyBatch b = generate_batch(spec, 7, rng);
  REQUIRE(b.inputs.shape() == std::vector<std::size_t>{7, 121, 10});
  std::vector<int> counts(8, 0);
  for (std::size_t e = 0; e < 7; ++e) {
    for (std::size_t t = 0; t < 121; ++t) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 10; ++c) {
        const double v = b.inputs.raw()[(e * 121 + t) * 10 + c];
        CHECK((v == 0.0 || v == 1.0));
        sum += v;
        if (v == 1.0) CHECK(static_cast<int>(c) == b.input_id(e, t));
      }
      CHECK(sum == 1.0);
    }
    for (std::size_t t = 0; t < 10; ++t) {
      CHECK(b.input_id(e, t) < 8);
      CHECK(b.target(e, spec.recall_start() + t) == b.input_id(e, t));
      ++counts[b.input_id(e, t)];
    }
    CHECK(b.input_id(e, 110) == CopyTaskSpec::delimiter_id);
    for (std::size_t t = 0; t < spec.recall_start(); ++t) CHECK(b.target(e, t) == 8);
    for (std::size_t t = 10; t < 121; ++t)
      if (t != 110) CHECK(b.input_id(e, t) == 8);
  }
}

TEST_CASE("epoch batches are a pure function of seed and epoch") {
  const CopyTaskSpec spec{5, 5};
  const CopyBatch a = generate_batch(spec, 10, 7, 3);
  const CopyBatch b = generate_batch(spec, 10, 7, 3);
  CHECK(a.input_ids == b.input_ids);
  CHECK(generate_batch(spec, 10, 7, 4).input_ids != a.input_ids);
  CHECK(generate_batch(spec, 10, 8, 3).input_ids != a.input_ids);
}

TEST_CASE("payload symbols are roughly uniform") {
  Rng rng(11);
  const CopyBatch b = generate_batch(CopyTaskSpec{10, 1}, 2000, rng);
  std::vector<int> counts(8, 0);
  for (std::size_t e = 0; e < 2000; ++e)
    for (std::size_t t = 0; t < 10; ++t) ++counts[b.input_id(e, t)];
  for (int c : counts) CHECK(std::abs(c - 2500) < 250);
}

TEST_CASE("quaternion padding") {
  std::vector<double> e0(10, 0.0);
  e0[0] = 1.0;
  const QuaternionVector q = pad_to_quaternions(e0);
  REQUIRE(q.n_quats() == 3);
  CHECK(q.get(0) == Quaternion{1, 0, 0, 0});
  CHECK(q.get(1) == Quaternion{0, 0, 0, 0});
  CHECK(q.get(2) == Quaternion{0, 0, 0, 0});
  for (int c = 0; c < 10; ++c) {
    std::vector<double> v(10, 0.0);
    v[c] = 1.0;
    CHECK(unpad_from_quaternions(pad_to_quaternions(v)) == v);
  }
  CHECK_THROWS_AS(pad_to_quaternions(std::vector<double>(9)), ShapeError);
}

TEST_CASE("accuracy definitions") {
  const CopyTaskSpec spec{10, 10};
  Rng rng(2);
  const CopyBatch b = generate_batch(spec, 20, rng);
  const std::size_t S = spec.steps();

  std::vector<int> blanks(20 * S, CopyTaskSpec::blank_id);
  const CopyMetrics m = score_predictions(b, blanks);
  CHECK(m.accuracy_recall == 0.0);
  CHECK(m.accuracy_full == doctest::Approx(21.0 / 31.0));

  const CopyMetrics perfect = score_predictions(b, b.targets);
  CHECK(perfect.accuracy_recall == 1.0);
  CHECK(perfect.accuracy_full == 1.0);

  const CopyBatch big = generate_batch(spec, 1000, rng);
  std::vector<int> guesses(1000 * S);
  for (int& g : guesses) g = static_cast<int>(rng.below(9));
  const CopyMetrics r = score_predictions(big, guesses);
  CHECK(std::abs(r.accuracy_recall - 1.0 / 9.0) < 0.05);

  CHECK_THROWS_AS(score_predictions(b, std::vector<int>(3)), ShapeError);
}

TEST_CASE("model kinds") {
  CHECK(parse_model_kind("qlstm") == ModelKind::qlstm);
  CHECK(parse_model_kind("lstm") == ModelKind::lstm);
  CHECK(to_string(ModelKind::qlstm) == "qlstm");
  CHECK_THROWS_AS(parse_model_kind("gru"), InputError);
}

TEST_CASE("copy-task model sizes") {
  const CopyModel q(ModelKind::qlstm, 20, 1);
  const CopyModel l(ModelKind::lstm, 40, 1);
  CHECK(q.param_count() == 8409);
  CHECK(l.param_count() == 8529);
  for (std::size_t n : {q.param_count(), l.param_count()}) {
    CHECK(n >= 7500);
    CHECK(n <= 9000);
  }
  CHECK(q.input_width() == 12);
  CHECK(q.hidden_width() == 80);
  CHECK(l.input_width() == 10);

  std::set<std::string> names;
  for (const Parameter* p : q.parameters()) names.insert(p->name);
  CHECK(names.count("head.weight") == 1);
  CHECK(names.count("W_f") == 1);
}

TEST_CASE("an untrained model is close to chance") {
  const CopyTaskSpec spec{4, 4};
  Rng rng(9);
  const CopyBatch b = generate_batch(spec, 8, rng);
  for (ModelKind kind : {ModelKind::qlstm, ModelKind::lstm}) {
    CopyModel m(kind, kind == ModelKind::qlstm ? 3 : 6, 4);
    const CopyMetrics metrics = evaluate(m, b);
    CHECK(std::abs(metrics.loss - std::log(9.0)) < 0.5);

    Graph g(false);
    const Tensor logits = g.value(m.forward(g, b));
    CHECK(logits.shape() == std::vector<std::size_t>{spec.steps() * 8, 9});
    const CopyMetrics again = metrics_from_logits(b, logits, metrics.loss);
    CHECK(again.accuracy_full == metrics.accuracy_full);
  }
}
