#pragma once

// Command implementations behind the netmed CLI. Each cmd_* function takes
// parsed options, performs all computation, then writes its output files.
//
// Seeds: one root seed drives a run. Stage one uses
// split_seed(root, streams::eigenmodel); stage two passes the root to the
// mediation samplers, which derive one stream per chain.

#include "netmed/eigenmodel.hpp"
#include "netmed/io.hpp"
#include "netmed/mediation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace netmed::cli {

using io::json;

inline constexpr const char* version = "0.3.0";

struct NetworkSource {
  std::filesystem::path adjacency;  // --network
  std::filesystem::path edges;      // --edges
  std::filesystem::path nodes;      // --nodes: node universe for edge lists
};
io::Network load_network(const NetworkSource& source);

// {n, edges, density, diameter, disconnected_flag, transitivity, top_eigenvalues}
json cmd_stats(const io::Network& network, int top = 10);

struct StageOneOptions {
  NetworkSource network;
  std::filesystem::path covariates;
  std::string homophily;  // categorical column; non-empty selects the conditional model
  bool intercept = false;  // adds an all-ones dyadic covariate
  std::optional<int> rank;  // empty: choose automatically
  int q_max = 5;
  EigenmodelConfig eigen;  // rank and seed are overwritten
  std::uint64_t seed = 1;
  bool store_u_draws = false;
};

struct StageOneResult {
  io::Network network;
  EigenmodelFit fit;
  MediatorMatrix mediators;
  std::vector<double> adjacency_spectrum;
  json selection;
};

StageOneResult run_stage_one(const StageOneOptions& options);
// Writes fit.json, mediators.csv and scree.csv into `out`.
StageOneResult cmd_eigenfit(const StageOneOptions& options, const std::filesystem::path& out);

struct DiagnosticRow {
  std::string parameter;
  std::optional<double> geweke_z;  // largest |z| over chains, signed
  std::optional<double> ess;       // summed over chains
  std::optional<double> split_rhat;
  bool nonconvergent = false;      // |geweke_z| >= 1.96
  std::string error;
};
std::vector<DiagnosticRow> diagnose(const std::vector<std::pair<std::string, std::vector<Chain>>>& draws);
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows);
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticRow>& rows);

struct StageTwoOptions {
  std::filesystem::path mediators;   // used by cmd_mediate only
  std::filesystem::path covariates;
  std::string x;
  std::string y;
  OutcomeFamily family = OutcomeFamily::continuous;
  MediationConfig mediation;  // seed is overwritten by `seed`
  std::uint64_t seed = 1;
  bool write_draws = false;
};

struct StageTwoResult {
  MediationPosterior posterior;
  PosteriorSummary summary;
  MediationPosterior total_effect;
  PosteriorSummary total_effect_summary;
  std::vector<DiagnosticRow> diagnostics;
  std::vector<std::string> warnings;
};

// Aligns covariates to `ids` and fits the mediation model on `mediators`.
StageTwoResult run_stage_two(const StageTwoOptions& options, const std::vector<std::string>& ids,
                             const Eigen::MatrixXd& mediators);
// Writes summary.csv, summary.json, diagnostics.csv and optionally draws.csv.
void write_stage_two(const std::filesystem::path& out, const StageTwoResult& result, bool write_draws);
// Reads options.mediators and runs stage two.
StageTwoResult cmd_mediate(const StageTwoOptions& options, const std::filesystem::path& out);

struct PipelineConfig {
  StageOneOptions stage_one;
  StageTwoOptions stage_two;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};
struct PipelineResult {
  StageOneResult stage_one;
  StageTwoResult stage_two;
  json manifest;
};
// Writes summary.csv, summary.json, mediators.csv, fit.json, diagnostics.csv,
// manifest.json and scree.csv into config.out.
PipelineResult cmd_pipeline(const PipelineConfig& config);

struct SimulateOptions {
  std::string family = "mediation";  // erdos-renyi | latent-class | latent-distance | eigenmodel | mediation
  int n = 100;
  double p = 0.1;
  int classes = 2;
  double p_within = 0.5;
  double p_between = 0.05;
  double intercept = 2.0;  // latent-distance
  std::vector<double> lambda{8.0, 4.0};
  double beta = 0.0;       // homophily effect for eigenmodel and mediation families
  // Mediation scenario: latent angle of node i is pi * X_i + N(0, angle_sd).
  double cp = 0.5;
  double b = 1.0;
  double angle_sd = 0.6;
  double noise_sd = 1.0;
  bool null_effect = false;
  OutcomeFamily outcome = OutcomeFamily::continuous;
  std::uint64_t seed = 1;
};
// Writes network.csv, truth.json and (mediation family) covariates.csv.
json cmd_simulate(const SimulateOptions& options, const std::filesystem::path& out);

// Reads a draw file and writes the per-parameter table to `out`.
std::vector<DiagnosticRow> cmd_diagnose(const std::filesystem::path& draws, std::ostream& out);

}  // namespace netmed::cli
