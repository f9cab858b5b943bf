#pragma once

#include "heatdecon/bounds.hpp"
#include "heatdecon/certificate.hpp"
#include "heatdecon/graph.hpp"
#include "heatdecon/recovery.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace heatdecon {

using Rng = std::mt19937_64;

struct GraphSpec {
  std::string generator;  // path | cycle | grid | complete | erdos_renyi
  Vertex n = 0;
  Vertex rows = 0;
  Vertex cols = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  double weight = 1.0;
  // Per-edge weights uniform in [lo, hi], drawn from `seed`.
  std::optional<std::pair<double, double>> weight_range;
};

// Erdos-Renyi draws are resampled up to 100 times until connected.
WeightedGraph generate_graph(const GraphSpec& spec);

// Greedy farthest-point placement. The random seed vertex only selects the
// starting point: placement begins at the vertex farthest from it, then keeps
// adding the vertex farthest from the chosen set. Ties go to the lower index.
std::vector<Vertex> place_support(const CompatibleMetric& m, Vertex j,
                                  std::uint64_t seed);

enum class TimeMode { kAbsolute, kFractionOfMax };
enum class NoiseModel { kSphere, kGaussian };

// Additive noise with ||w||_2 = eps (sphere) or ||w||_2 <= eps (gaussian).
Eigen::VectorXd draw_noise(Eigen::Index n, double eps, NoiseModel model, Rng& rng);

struct ExperimentConfig {
  // Exactly one graph source.
  std::optional<GraphSpec> graph_spec;
  std::optional<std::string> graph_file;

  // Explicit support, or j vertices placed greedily from `support_seed`.
  std::vector<Vertex> support;
  Vertex support_size = 0;
  std::uint64_t support_seed = 0;
  std::optional<double> min_separation_target;

  // Explicit coefficients aligned with the support, or random magnitudes in
  // `magnitude_range` with random signs.
  std::vector<double> coeffs;
  std::uint64_t signal_seed = 0;
  std::pair<double, double> magnitude_range{0.5, 2.0};

  TimeMode time_mode = TimeMode::kFractionOfMax;
  std::vector<double> times;  // nonempty, strictly increasing

  std::vector<double> noise_levels{0.0};  // nonempty, strictly increasing
  NoiseModel noise_model = NoiseModel::kSphere;
  std::uint64_t noise_seed = 0;
  int repeats = 1;

  bool build_certificate = true;
  SolverOptions solver;

  std::string csv_path;
  std::string json_path;
};

// Throws ConfigInvalid with the offending key.
ExperimentConfig parse_config(const std::string& json_text);
void validate(const ExperimentConfig& cfg);

struct TrialRecord {
  std::size_t index = 0;
  double t = 0.0;
  double t_fraction = 0.0;  // t / T*, 0 when T* is 0
  double eps = 0.0;
  int repeat = 0;
  GraphConstants constants;
  SupportProfile profile;
  FeasibilityReport feasibility;
  std::optional<CertificateVerdict> verdict;
  std::string status;  // optimal | max_iter | infeasible | error
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double err_l1 = 0.0;
  double err_l2 = 0.0;
  double off_support_l1 = 0.0;
  std::optional<double> delta;
  std::optional<double> bound_l1;
  bool bound_held = false;
  bool split_ok = false;
  std::optional<bool> off_support_ok;
  std::string error;
  double wall_time_ms = 0.0;

  bool failed() const { return status != "optimal"; }
};

struct ExperimentResult {
  Vertex n_vertices = 0;
  std::vector<Vertex> support;
  Eigen::VectorXd g_true;
  double t_max = 0.0;
  std::vector<TrialRecord> records;

  bool any_failure() const;
};

// Trials run in parallel; records come back in grid order (time-major, then
// noise level, then repeat).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace heatdecon
