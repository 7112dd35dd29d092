#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "relbelief/bias.hpp"
#include "relbelief/checking.hpp"
#include "relbelief/evidence.hpp"
#include "relbelief/models.hpp"

namespace relbelief::cli {

enum class ModelKind { LocationNormal, BetaBinomial, Finite };

struct ModelConfig {
  ModelKind kind = ModelKind::LocationNormal;
  LocationNormalSpec location_normal;
  BetaBinomialSpec beta_binomial;
  FiniteModelSpec finite;
};

struct TaskConfig {
  std::optional<PsiValue> psi0;
  std::optional<double> gamma;
  std::optional<double> delta;
  DesignTargets targets;
  std::vector<std::int64_t> n_grid;
  std::optional<double> threshold;
  bool monotone_boundary = true;
  Method method = Method::Auto;
  bool cell_hypothesis = false;
  bool estimation = false;
  std::vector<double> sup_grid;
  Factorization factorization = Factorization::SingleFactor;
};

struct RunConfig {
  ModelConfig model;
  std::optional<Data> data;
  std::optional<Discretization> discretization;
  TaskConfig task;
  McConfig mc;
  std::optional<std::filesystem::path> output_dir;
  // canonical serialization of the parsed file, for the run manifest
  std::string canonical;
};

/// Parses a JSON run configuration. Unknown keys, wrong types, missing
/// referenced files and values outside module preconditions raise
/// ConfigError.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

InferenceBundle make_bundle(const ModelConfig& model);
/// The same model with its sample size replaced (continuous models only).
InferenceBundle make_bundle_with_n(const ModelConfig& model, std::int64_t n);

}  // namespace relbelief::cli
