/*
 * Copyright 2026 The Driftwise Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Python bindings. Instances cross the boundary as (features, target) rows;
// configs and summaries as JSON text, decoded by the package wrapper.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "driftwise/experiments.hpp"

namespace py = pybind11;
using namespace driftwise;

namespace {

using ModelPtr = std::shared_ptr<learn::Model>;

std::vector<Instance> to_instances(const std::vector<std::vector<double>>& x,
                                   const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw ConfigError("X and y must have the same number of rows");
  }
  std::vector<Instance> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = Instance{x[i], y[i], i};
  }
  return out;
}

// A model whose predictions come from a Python callable taking a list.
ModelPtr python_model(std::size_t arity, py::function fn) {
  return std::make_shared<learn::FrozenOracle>(
      arity,
      [fn](std::span<const double> x) {
        py::gil_scoped_acquire gil;
        return fn(std::vector<double>(x.begin(), x.end())).cast<double>();
      },
      "python");
}

py::tuple generate(const std::string& generator, int concept_id,
                   std::size_t n, std::uint64_t seed) {
  std::unique_ptr<stream::Stream> s;
  if (generator == "agrawal") {
    s = std::make_unique<stream::AgrawalStream>(seed, concept_id);
  } else if (generator == "stagger") {
    s = std::make_unique<stream::StaggerStream>(seed, concept_id);
  } else {
    throw ConfigError("unknown generator '" + generator + "'");
  }
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (auto& inst : stream::take(*s, n)) {
    x.push_back(std::move(inst.features));
    y.push_back(inst.target);
  }
  return py::make_tuple(x, y, s->schema().names());
}

}  // namespace

PYBIND11_MODULE(_driftwise, m) {
  m.doc() = "Incremental permutation feature importance on data streams.";

  py::enum_<sampling::SamplerKind>(m, "SamplerKind")
      .value("UNIFORM", sampling::SamplerKind::kUniformFull)
      .value("UNIFORM_RESERVOIR", sampling::SamplerKind::kUniformReservoir)
      .value("GEOMETRIC", sampling::SamplerKind::kGeometric);
  py::enum_<importance::SmoothingInit>(m, "SmoothingInit")
      .value("ASSIGN", importance::SmoothingInit::kAssign)
      .value("ZERO", importance::SmoothingInit::kZero);

  m.def("generate", &generate, py::arg("generator"), py::arg("concept") = 1,
        py::arg("n"), py::arg("seed") = 0,
        "Draw n rows from a synthetic generator; returns (X, y, names).");

  py::class_<learn::Model, ModelPtr>(m, "Model")
      .def("predict", [](const learn::Model& self, std::vector<double> x) {
        return self.predict(x);
      })
      .def("learn_one", [](learn::Model& self, std::vector<double> x,
                           double y) { self.learn_one(x, y); })
      .def_property_readonly("name", &learn::Model::name);

  m.def("agrawal_oracle", [](int concept_id) -> ModelPtr {
    return std::make_shared<learn::FrozenOracle>(learn::agrawal_oracle(concept_id));
  }, py::arg("concept") = 1);
  m.def("stagger_oracle", [](int concept_id) -> ModelPtr {
    return std::make_shared<learn::FrozenOracle>(learn::stagger_oracle(concept_id));
  }, py::arg("concept") = 1);
  m.def("python_model", &python_model, py::arg("arity"), py::arg("fn"));
  m.def("naive_bayes", [](const std::string& generator) -> ModelPtr {
    return std::make_shared<learn::OnlineNaiveBayes>(
        generator == "stagger" ? stream::stagger_schema()
                               : stream::agrawal_schema());
  }, py::arg("generator") = "agrawal");
  m.def("logistic_regression",
        [](const std::string& generator, double learning_rate,
           double l2) -> ModelPtr {
          return std::make_shared<learn::OnlineLogisticRegression>(
              generator == "stagger" ? stream::stagger_schema()
                                     : stream::agrawal_schema(),
              learn::LogisticOptions{learning_rate, l2});
        },
        py::arg("generator") = "agrawal", py::arg("learning_rate") = 0.05,
        py::arg("l2") = 0.0);

  py::class_<importance::IpfiEnsemble>(m, "IpfiEnsemble")
      .def(py::init([](std::size_t features, double alpha,
                       sampling::SamplerKind sampler, std::size_t length,
                       std::size_t realizations, std::uint64_t seed,
                       importance::SmoothingInit init) {
             importance::IpfiOptions o;
             o.alpha = alpha;
             o.sampler = sampler;
             o.reservoir_length = length;
             o.realizations = realizations;
             o.seed = seed;
             o.init = init;
             return importance::IpfiEnsemble(features, o);
           }),
           py::arg("features"), py::arg("alpha") = 0.001,
           py::arg("sampler") = sampling::SamplerKind::kGeometric,
           py::arg("reservoir_length") = 100, py::arg("realizations") = 10,
           py::arg("seed") = 0,
           py::arg("init") = importance::SmoothingInit::kAssign)
      .def("explain_one",
           [](importance::IpfiEnsemble& self, const learn::Model& model,
              std::vector<double> x, double y) {
             return self.explain_one(model, Instance{std::move(x), y, 0});
           },
           py::arg("model"), py::arg("x"), py::arg("y"),
           "Explain one observation, then store it. None during warm-up.")
      .def("estimate", &importance::IpfiEnsemble::estimate)
      .def("realization_estimate", &importance::IpfiEnsemble::realization_estimate)
      .def_property_readonly("ready", &importance::IpfiEnsemble::ready)
      .def_property_readonly("warmup", &importance::IpfiEnsemble::warmup);

  m.def("expected_pfi",
        [](const learn::Model& model, const std::vector<std::vector<double>>& x,
           const std::vector<double>& y) {
          return importance::expected_pfi_all(model, to_instances(x, y));
        },
        py::arg("model"), py::arg("X"), py::arg("y"));
  m.def("batch_pfi",
        [](const learn::Model& model, const std::vector<std::vector<double>>& x,
           const std::vector<double>& y, std::size_t permutations,
           std::uint64_t seed) {
          Rng rng(seed);
          return importance::batch_pfi_all(model, to_instances(x, y),
                                           permutations, rng);
        },
        py::arg("model"), py::arg("X"), py::arg("y"),
        py::arg("permutations") = 10, py::arg("seed") = 0);
  m.def("normalized_error",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return importance::normalized_error(a, b);
        });

  m.def("marginal_probability", &sampling::marginal_probability, py::arg("kind"),
        py::arg("s"), py::arg("r"), py::arg("L"), py::arg("t0"));
  m.def("collision_probability", &sampling::collision_probability,
        py::arg("kind"), py::arg("s"), py::arg("L"), py::arg("t0"));
  m.def("static_bias", &theory::static_bias, py::arg("alpha"),
        py::arg("steps"), py::arg("phi"));
  m.def("window_to_alpha", &theory::window_to_alpha);
  m.def("alpha_to_window", &theory::alpha_to_window);
  m.def("agrawal_ground_truth", &theory::agrawal_ground_truth,
        py::arg("concept") = 1);

  m.def("_run_json", [](const std::string& text) {
    const auto config = experiment::config_from_json(experiment::Json::parse(text));
    py::gil_scoped_release release;
    return experiment::run_and_write(config).dump();
  });
  m.def("_config_json", [](const std::string& text) {
    return experiment::config_to_json(
               experiment::config_from_json(experiment::Json::parse(text)))
        .dump();
  });
  m.def("verify", [](std::uint64_t seed) {
    std::vector<experiment::CheckResult> checks;
    {
      py::gil_scoped_release release;
      checks = experiment::run_verification(seed);
    }
    py::list out;
    for (const auto& c : checks) {
      out.append(py::make_tuple(c.name, c.passed, c.detail));
    }
    return out;
  }, py::arg("seed") = 7, "Run the theory checks; returns (name, passed, detail).");
}
