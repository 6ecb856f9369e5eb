#pragma once

// File formats: CSV networks, nodal covariates, mediators, draws and
// summaries, and the JSON form of an eigenmodel fit. Doubles are written in
// shortest round-trip form, so a value read back is bit-identical.

#include "netmed/diagnostics.hpp"
#include "netmed/eigenmodel.hpp"
#include "netmed/graph.hpp"
#include "netmed/mediation.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace netmed::io {

using nlohmann::json;

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
// Comma-separated with optional double-quoted fields; blank lines skipped.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

std::string format_double(double v);
double parse_double(const std::string& text, std::size_t line);

struct Network {
  AdjacencyMatrix adjacency;
  std::vector<std::string> ids;
};

// Square 0/1 matrix. A non-numeric first row is a header of node ids; a
// header with an empty first cell means every row starts with its id. Without
// a header, ids are "1".."n".
Network read_adjacency_csv(const std::filesystem::path& path);
// Header `from,to`. When node_ids is empty the universe is every id in the
// file, sorted lexicographically.
Network read_edge_list_csv(const std::filesystem::path& path, const std::vector<std::string>& node_ids = {});
void write_adjacency_csv(const std::filesystem::path& path, const Network& network);

// Header row of column names; first column `id`. Columns where every value
// parses as a number are continuous, the rest categorical.
NodalCovariates read_nodal_covariates(const std::filesystem::path& path);
void write_nodal_covariates(const std::filesystem::path& path, const NodalCovariates& covariates);

// id,U1..UQ
void write_mediators_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                         const MediatorMatrix& mediators);
struct MediatorFile {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
};
MediatorFile read_mediators_csv(const std::filesystem::path& path);

// index,eigenvalue
void write_scree_csv(const std::filesystem::path& path, const std::vector<double>& spectrum);

json fit_to_json(const EigenmodelFit& fit, bool include_draws = true);
EigenmodelFit fit_from_json(const json& doc);

// parameter,estimate,post_sd,hpd_lower,hpd_upper,significant
void write_summary_csv(const std::filesystem::path& path, const PosteriorSummary& summary);
json summary_to_json(const PosteriorSummary& summary);

// chain,iteration,<parameters...>; iteration counts saved draws from 1.
void write_draws_csv(const std::filesystem::path& path, const MediationPosterior& posterior);
// Draws grouped by parameter (file column order), one Chain per chain id.
std::vector<std::pair<std::string, std::vector<Chain>>> read_draws_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& doc);
json read_json(const std::filesystem::path& path);

}  // namespace netmed::io
