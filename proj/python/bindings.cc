//
// Copyright 2026 The bilstm-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Python bindings for the main operations. Tensors cross the boundary as
// plain lists; models are float32.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "distill/augmentation.h"
#include "distill/checkpoint.h"
#include "distill/commands.h"
#include "distill/config.h"
#include "distill/data_io.h"
#include "distill/distillation.h"
#include "distill/errors.h"
#include "distill/experiment.h"
#include "distill/model.h"
#include "distill/synthetic.h"
#include "distill/training.h"

namespace py = pybind11;
using namespace distill;

namespace {

using Model = StudentModel<float>;

TokenExample encode_input(const Model& m, const py::handle& item) {
  TokenExample ex;
  if (py::isinstance<py::str>(item)) {
    ex.first = m.vocab().encode(tokenize(item.cast<std::string>()));
  } else {
    const auto pair = item.cast<std::pair<std::string, std::string>>();
    ex.first = m.vocab().encode(tokenize(pair.first));
    ex.second = m.vocab().encode(tokenize(pair.second));
  }
  return ex;
}

std::vector<std::vector<double>> predict(const Model& m, const py::list& texts) {
  std::vector<TokenExample> inputs;
  for (const py::handle& item : texts) inputs.push_back(encode_input(m, item));
  return predict_logits(m, inputs);
}

py::dict record_to_dict(const TransferRecord& r) {
  py::dict d;
  d["text_a"] = r.text_a;
  d["text_b"] = r.text_b ? py::cast(*r.text_b) : py::none();
  d["logits"] = r.logits;
  d["label"] = r.label;
  d["provenance"] = std::string(provenance_name(r.provenance));
  d["gold"] = r.gold ? py::cast(*r.gold) : py::none();
  return d;
}

TransferRecord record_from_dict(const py::dict& d) {
  TransferRecord r;
  r.text_a = d["text_a"].cast<std::string>();
  if (d.contains("text_b") && !d["text_b"].is_none()) r.text_b = d["text_b"].cast<std::string>();
  r.logits = d["logits"].cast<std::vector<double>>();
  r.label = d.contains("label") ? d["label"].cast<std::size_t>() : argmax(r.logits);
  if (d.contains("provenance")) r.provenance = parse_provenance(d["provenance"].cast<std::string>());
  if (d.contains("gold") && !d["gold"].is_none()) r.gold = d["gold"].cast<std::size_t>();
  return r;
}

std::string run(void (*cmd)(const RunConfig&, std::ostream&), const py::dict& options) {
  RunConfig config;
  for (const auto& [key, value] : options) {
    std::string text = py::str(value).cast<std::string>();
    if (py::isinstance<py::bool_>(value)) text = value.cast<bool>() ? "true" : "false";
    config.set(key.cast<std::string>(), text);
  }
  std::ostringstream out;
  cmd(config, out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_distill, m) {
  m.doc() = "BiLSTM students distilled from teacher logits";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("tokenize", &tokenize, py::arg("text"));

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init([](std::size_t embedding_dim, std::size_t hidden, std::size_t fc,
                       std::size_t num_labels, bool pair, bool static_embeddings) {
             return ModelConfig{embedding_dim, hidden, fc, num_labels,
                                pair ? Arity::kPair : Arity::kSingle,
                                static_embeddings ? EmbeddingMode::kStatic
                                                  : EmbeddingMode::kNonStatic};
           }),
           py::arg("embedding_dim") = 300, py::arg("hidden") = 150, py::arg("fc") = 200,
           py::arg("num_labels") = 2, py::arg("pair") = false,
           py::arg("static_embeddings") = false)
      .def_readonly("embedding_dim", &ModelConfig::embedding_dim)
      .def_readonly("hidden", &ModelConfig::hidden)
      .def_readonly("fc", &ModelConfig::fc)
      .def_readonly("num_labels", &ModelConfig::num_labels)
      .def_property_readonly("pair", [](const ModelConfig& c) { return c.arity == Arity::kPair; });

  py::class_<Model>(m, "StudentModel")
      .def(py::init([](const ModelConfig& config, const std::vector<std::vector<std::string>>& sentences,
                       std::uint64_t seed) {
             return Model(config, Vocabulary::build(sentences), seed);
           }),
           py::arg("config"), py::arg("sentences"), py::arg("seed") = 0,
           "Random initialization over the vocabulary of the given token lists.")
      .def_property_readonly("config", &Model::config)
      .def_property_readonly("vocab_size", [](const Model& self) { return self.vocab().size(); })
      .def("count_parameters", &Model::count_parameters, py::arg("include_embeddings"))
      .def("predict_logits", &predict, py::arg("texts"),
           "Logits for a list of texts, or of (text_a, text_b) pairs.")
      .def("save", [](const Model& self, const std::string& path) { save_checkpoint(self, path); })
      .def_static("load", [](const std::string& path) { return load_checkpoint<float>(path); });

  m.def("distill_loss",
        [](const std::vector<double>& student, const std::vector<double>& teacher) {
          return distill_loss(Tensor<double>::vector(student), teacher).item();
        });
  m.def("cross_entropy", [](const std::vector<double>& student, std::size_t label) {
    return cross_entropy(Tensor<double>::vector(student), TargetDistribution(label, student.size()))
        .item();
  });
  m.def("combined_loss",
        [](const std::vector<double>& student, std::size_t label,
           const std::vector<double>& teacher, double alpha) {
          return combined_loss(Tensor<double>::vector(student),
                               TargetDistribution(label, student.size()), teacher,
                               DistillConfig{alpha})
              .item();
        },
        py::arg("student"), py::arg("label"), py::arg("teacher"), py::arg("alpha") = 0.0);

  m.def("parse_transfer_set",
        [](const std::string& text, std::optional<std::size_t> num_labels) {
          py::list out;
          for (const auto& r : parse_transfer_set(text, num_labels)) out.append(record_to_dict(r));
          return out;
        },
        py::arg("text"), py::arg("num_labels") = py::none());
  m.def("serialize_transfer_set", [](const py::list& records) {
    std::vector<TransferRecord> rs;
    for (const py::handle& d : records) rs.push_back(record_from_dict(d.cast<py::dict>()));
    return serialize_transfer_set(rs);
  });

  m.def("augment_stats",
        [](const std::string& tagged_corpus, double p_mask, double p_pos, double p_ng,
           std::size_t n_iter, std::uint64_t seed) {
          const auto corpus = parse_tagged_corpus(tagged_corpus);
          AugStats s;
          const auto out = augment_corpus(corpus, {p_mask, p_pos, p_ng, n_iter, seed}, &s);
          py::dict d;
          d["corpus"] = serialize_tagged_corpus(out, true);
          d["tokens"] = s.tokens;
          d["mask_rate"] = s.mask_rate();
          d["pos_rate"] = s.pos_rate();
          d["ngram_rate"] = s.ngram_rate();
          d["synthesized"] = s.synthesized;
          d["duplicates"] = s.duplicates;
          return d;
        },
        py::arg("tagged_corpus"), py::arg("p_mask") = 0.1, py::arg("p_pos") = 0.1,
        py::arg("p_ng") = 0.25, py::arg("n_iter") = 20, py::arg("seed") = 0,
        "Augments a tagged corpus (TSV text) and returns the result with its rates.");

  m.def("synthetic_task",
        [](std::uint64_t seed) {
          SyntheticTaskConfig c;
          c.seed = seed;
          const SyntheticTask t = make_synthetic_task(c);
          return py::make_tuple(serialize_tagged_corpus(t.train, false),
                                serialize_tagged_corpus(t.dev, false));
        },
        py::arg("seed") = 0, "(train, dev) tagged corpora of the synthetic task.");

  m.def("run_experiment",
        [](std::uint64_t seed) {
          const ExperimentResult r = run_experiment(ExperimentConfig{}, seed);
          py::dict d;
          d["teacher_accuracy"] = r.teacher_accuracy;
          d["baseline_accuracy"] = r.baseline_accuracy;
          d["distilled_accuracy"] = r.distilled_accuracy;
          d["transfer_size"] = r.transfer_size;
          return d;
        },
        py::arg("seed"));

  // Subcommands take the CLI's keys (e.g. {"input": ..., "p-mask": 0.2}) and
  // return what the CLI would print.
  m.def("augment", [](const py::dict& o) { return run(cmd_augment, o); });
  m.def("label", [](const py::dict& o) { return run(cmd_label, o); });
  m.def("train", [](const py::dict& o) { return run(cmd_train, o); });
  m.def("eval", [](const py::dict& o) { return run(cmd_eval, o); });
  m.def("bench", [](const py::dict& o) { return run(cmd_bench, o); });
  m.def("synth", [](const py::dict& o) { return run(cmd_synth, o); });
}
