#include "netmed/io.hpp"

#include "netmed/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace netmed::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<std::string> split_line(const std::string& line, std::size_t number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", number);
  fields.push_back(field);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

bool is_number(const std::string& text) {
  if (text.empty()) return false;
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data() + (text[0] == '+' ? 1 : 0), end, v);
  return ec == std::errc() && ptr == end;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back({number, split_line(line, number)});
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return {buf, ptr};
}

double parse_double(const std::string& text, std::size_t line) {
  if (!is_number(text)) throw ParseError("expected a number, found '" + text + "'", line);
  double v = 0.0;
  std::from_chars(text.data() + (text[0] == '+' ? 1 : 0), text.data() + text.size(), v);
  return v;
}

Network read_adjacency_csv(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw ParseError("empty adjacency file", 1);
  std::vector<std::string> ids;
  bool row_ids = false;
  const auto& first = rows.front().fields;
  if (!std::all_of(first.begin(), first.end(), is_number)) {
    row_ids = first.front().empty();
    ids.assign(first.begin() + (row_ids ? 1 : 0), first.end());
    rows.erase(rows.begin());
  }
  const std::size_t n = rows.size();
  if (ids.empty())
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i + 1));
  if (ids.size() != n)
    throw ParseError("header names " + std::to_string(ids.size()) + " nodes but there are " + std::to_string(n) +
                         " rows",
                     rows.empty() ? 1 : rows.front().line);
  std::vector<std::uint8_t> entries(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i];
    const std::size_t offset = row_ids ? 1 : 0;
    if (r.fields.size() != n + offset)
      throw ParseError("expected " + std::to_string(n + offset) + " fields, found " + std::to_string(r.fields.size()),
                       r.line);
    if (row_ids && r.fields.front() != ids[i]) throw ParseError("row id '" + r.fields.front() + "' does not match the header", r.line);
    for (std::size_t j = 0; j < n; ++j) {
      const double v = parse_double(r.fields[j + offset], r.line);
      if (v != 0.0 && v != 1.0) throw ParseError("adjacency values must be 0 or 1", r.line);
      entries[i * n + j] = v == 1.0 ? 1 : 0;
    }
  }
  return {AdjacencyMatrix(static_cast<int>(n), std::move(entries)), std::move(ids)};
}

Network read_edge_list_csv(const std::filesystem::path& path, const std::vector<std::string>& node_ids) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().fields.size() != 2 || rows.front().fields[0] != "from" ||
      rows.front().fields[1] != "to")
    throw ParseError("edge list must start with the header 'from,to'", rows.empty() ? 1 : rows.front().line);
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].fields.size() != 2) throw ParseError("expected 2 fields", rows[r].line);
    edges.emplace_back(rows[r].fields[0], rows[r].fields[1]);
  }
  std::vector<std::string> ids = node_ids;
  if (ids.empty()) {
    std::set<std::string> universe;
    for (const auto& [a, b] : edges) {
      universe.insert(a);
      universe.insert(b);
    }
    ids.assign(universe.begin(), universe.end());
  }
  auto adjacency = from_edge_list(edges, ids);
  return {std::move(adjacency), std::move(ids)};
}

void write_adjacency_csv(const std::filesystem::path& path, const Network& network) {
  auto out = open_out(path);
  const int n = network.adjacency.n();
  for (int i = 0; i < n; ++i) out << (i ? "," : "") << quote_if_needed(network.ids[i]);
  out << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << (network.adjacency(i, j) ? '1' : '0');
    out << '\n';
  }
}

NodalCovariates read_nodal_covariates(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw ParseError("empty covariate file", 1);
  const auto& header = rows.front().fields;
  if (header.front() != "id") throw ParseError("first covariate column must be 'id'", rows.front().line);
  NodalCovariates cov;
  cov.columns.resize(header.size() - 1);
  for (std::size_t c = 1; c < header.size(); ++c) cov.columns[c - 1].name = header[c];
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()),
                       rows[r].line);
    cov.ids.push_back(f[0]);
    for (std::size_t c = 1; c < f.size(); ++c) cov.columns[c - 1].labels.push_back(f[c]);
  }
  for (auto& col : cov.columns) {
    const bool numeric = !col.labels.empty() && std::all_of(col.labels.begin(), col.labels.end(), is_number);
    col.kind = numeric ? NodalColumn::Kind::continuous : NodalColumn::Kind::categorical;
    if (numeric)
      for (std::size_t i = 0; i < col.labels.size(); ++i) col.values.push_back(parse_double(col.labels[i], i + 2));
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < cov.ids.size(); ++i)
    if (!seen.insert(cov.ids[i]).second) throw ParseError("duplicate id '" + cov.ids[i] + "'", rows[i + 1].line);
  cov.validate();
  return cov;
}

void write_nodal_covariates(const std::filesystem::path& path, const NodalCovariates& covariates) {
  auto out = open_out(path);
  out << "id";
  for (const auto& c : covariates.columns) out << ',' << quote_if_needed(c.name);
  out << '\n';
  for (std::size_t i = 0; i < covariates.ids.size(); ++i) {
    out << quote_if_needed(covariates.ids[i]);
    for (const auto& c : covariates.columns) {
      out << ',';
      if (c.kind == NodalColumn::Kind::continuous)
        out << format_double(c.values[i]);
      else
        out << quote_if_needed(c.labels[i]);
    }
    out << '\n';
  }
}

void write_mediators_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                         const MediatorMatrix& mediators) {
  if (static_cast<int>(ids.size()) != mediators.n()) throw InputError("id count does not match the mediator rows");
  auto out = open_out(path);
  out << "id";
  for (int k = 1; k <= mediators.rank(); ++k) out << ",U" << k;
  out << '\n';
  for (int i = 0; i < mediators.n(); ++i) {
    out << quote_if_needed(ids[i]);
    for (int k = 0; k < mediators.rank(); ++k) out << ',' << format_double(mediators.vectors(i, k));
    out << '\n';
  }
}

MediatorFile read_mediators_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().fields.front() != "id")
    throw ParseError("mediator file must start with a header whose first column is 'id'", 1);
  const std::size_t q = rows.front().fields.size() - 1;
  if (q == 0) throw ParseError("mediator file has no mediator columns", rows.front().line);
  MediatorFile out;
  out.values.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(q));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != q + 1) throw ParseError("expected " + std::to_string(q + 1) + " fields", rows[r].line);
    out.ids.push_back(f[0]);
    for (std::size_t k = 0; k < q; ++k)
      out.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(k)) = parse_double(f[k + 1], rows[r].line);
  }
  return out;
}

void write_scree_csv(const std::filesystem::path& path, const std::vector<double>& spectrum) {
  auto out = open_out(path);
  out << "index,eigenvalue\n";
  for (std::size_t k = 0; k < spectrum.size(); ++k) out << k + 1 << ',' << format_double(spectrum[k]) << '\n';
}

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_rows(const json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = rows.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw InputError("ragged matrix in fit JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

json fit_to_json(const EigenmodelFit& fit, bool include_draws) {
  const auto& c = fit.config;
  json doc;
  doc["config"] = {{"rank", c.rank},
                   {"total_iterations", c.total_iterations},
                   {"burn_in", c.burn_in},
                   {"thin", c.thin},
                   {"link", to_string(c.link)},
                   {"prior_sd_beta", c.prior_sd_beta},
                   {"prior_sd_lambda", c.prior_sd_lambda},
                   {"prior_sd_u", c.prior_sd_u},
                   {"adaptation",
                    {{"target_acceptance", c.adaptation.target_acceptance},
                     {"decay", c.adaptation.decay},
                     {"initial_scale_u", c.adaptation.initial_scale_u},
                     {"initial_scale_lambda", c.adaptation.initial_scale_lambda},
                     {"initial_scale_beta", c.adaptation.initial_scale_beta}}},
                   {"seed", c.seed}};
  doc["n"] = fit.n;
  doc["saved_draws"] = fit.saved_draws();
  doc["acceptance"] = fit.acceptance;
  doc["warnings"] = fit.warnings;
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(fit.n) * fit.n);
  for (int i = 0; i < fit.n; ++i)
    for (int j = 0; j < fit.n; ++j) flat.push_back(fit.ulu_postmean(i, j));
  doc["ulu_postmean"] = flat;
  doc["beta_postmean"] = std::vector<double>(fit.beta_postmean.data(), fit.beta_postmean.data() + fit.beta_postmean.size());
  if (include_draws) {
    doc["draws"]["beta"] = matrix_rows(fit.beta_draws);
    doc["draws"]["lambda"] = matrix_rows(fit.lambda_draws);
    if (!fit.u_draws.empty()) {
      json u = json::array();
      for (const auto& draw : fit.u_draws) u.push_back(matrix_rows(draw));
      doc["draws"]["u"] = std::move(u);
    }
  }
  return doc;
}

EigenmodelFit fit_from_json(const json& doc) {
  EigenmodelFit fit;
  try {
    const auto& c = doc.at("config");
    fit.config.rank = c.at("rank").get<int>();
    fit.config.total_iterations = c.at("total_iterations").get<int>();
    fit.config.burn_in = c.at("burn_in").get<int>();
    fit.config.thin = c.at("thin").get<int>();
    fit.config.link = parse_link(c.at("link").get<std::string>());
    fit.config.prior_sd_beta = c.at("prior_sd_beta").get<double>();
    fit.config.prior_sd_lambda = c.at("prior_sd_lambda").get<double>();
    fit.config.prior_sd_u = c.at("prior_sd_u").get<double>();
    const auto& a = c.at("adaptation");
    fit.config.adaptation.target_acceptance = a.at("target_acceptance").get<double>();
    fit.config.adaptation.decay = a.at("decay").get<double>();
    fit.config.adaptation.initial_scale_u = a.at("initial_scale_u").get<double>();
    fit.config.adaptation.initial_scale_lambda = a.at("initial_scale_lambda").get<double>();
    fit.config.adaptation.initial_scale_beta = a.at("initial_scale_beta").get<double>();
    fit.config.seed = c.at("seed").get<std::uint64_t>();
    fit.n = doc.at("n").get<int>();
    fit.acceptance = doc.at("acceptance").get<std::map<std::string, double>>();
    fit.warnings = doc.at("warnings").get<std::vector<std::string>>();
    const auto flat = doc.at("ulu_postmean").get<std::vector<double>>();
    if (flat.size() != static_cast<std::size_t>(fit.n) * fit.n) throw InputError("ulu_postmean has the wrong size");
    fit.ulu_postmean.resize(fit.n, fit.n);
    for (int i = 0; i < fit.n; ++i)
      for (int j = 0; j < fit.n; ++j) fit.ulu_postmean(i, j) = flat[static_cast<std::size_t>(i) * fit.n + j];
    const auto beta = doc.at("beta_postmean").get<std::vector<double>>();
    fit.beta_postmean = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    const auto saved = doc.at("saved_draws").get<int>();
    if (doc.contains("draws")) {
      const auto& d = doc.at("draws");
      fit.beta_draws = matrix_from_rows(d.at("beta"), fit.beta_postmean.size());
      fit.lambda_draws = matrix_from_rows(d.at("lambda"), fit.config.rank);
      if (d.contains("u"))
        for (const auto& u : d.at("u")) fit.u_draws.push_back(matrix_from_rows(u, fit.config.rank));
    } else {
      // Draw arrays omitted: keep the draw count so the fit still reports it.
      fit.beta_draws = Eigen::MatrixXd::Zero(saved, fit.beta_postmean.size());
      fit.lambda_draws = Eigen::MatrixXd::Zero(saved, fit.config.rank);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed fit JSON: ") + e.what());
  }
  return fit;
}

void write_summary_csv(const std::filesystem::path& path, const PosteriorSummary& summary) {
  auto out = open_out(path);
  out << "parameter,estimate,post_sd,hpd_lower,hpd_upper,significant\n";
  for (const auto& s : summary)
    out << s.parameter << ',' << format_double(s.estimate) << ',' << format_double(s.post_sd) << ','
        << format_double(s.hpd_lower) << ',' << format_double(s.hpd_upper) << ',' << (s.significant ? "true" : "false")
        << '\n';
}

json summary_to_json(const PosteriorSummary& summary) {
  json rows = json::array();
  for (const auto& s : summary)
    rows.push_back({{"parameter", s.parameter},
                    {"estimate", s.estimate},
                    {"post_sd", s.post_sd},
                    {"hpd_lower", s.hpd_lower},
                    {"hpd_upper", s.hpd_upper},
                    {"significant", s.significant}});
  return rows;
}

void write_draws_csv(const std::filesystem::path& path, const MediationPosterior& posterior) {
  auto out = open_out(path);
  out << "chain,iteration";
  for (const auto& name : posterior.names()) out << ',' << name;
  out << '\n';
  for (std::size_t c = 0; c < posterior.chains.size(); ++c) {
    const auto& t = posterior.chains[c];
    for (Eigen::Index s = 0; s < t.values.rows(); ++s) {
      out << c + 1 << ',' << s + 1;
      for (Eigen::Index p = 0; p < t.values.cols(); ++p) out << ',' << format_double(t.values(s, p));
      out << '\n';
    }
  }
}

std::vector<std::pair<std::string, std::vector<Chain>>> read_draws_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw ParseError("empty draw file", 1);
  const auto& header = rows.front().fields;
  if (header.size() < 3 || header[0] != "chain" || header[1] != "iteration")
    throw ParseError("draw file must start with 'chain,iteration,<parameters>'", rows.front().line);
  std::vector<std::pair<std::string, std::vector<Chain>>> out;
  for (std::size_t p = 2; p < header.size(); ++p) out.push_back({header[p], {}});
  std::map<std::string, std::size_t> chain_index;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != header.size()) throw ParseError("expected " + std::to_string(header.size()) + " fields", rows[r].line);
    auto [it, fresh] = chain_index.emplace(f[0], chain_index.size());
    if (fresh)
      for (auto& [name, chains] : out) {
        Chain c;
        c.parameter = name;
        c.chain_id = static_cast<int>(parse_double(f[0], rows[r].line));
        chains.push_back(std::move(c));
      }
    for (std::size_t p = 2; p < f.size(); ++p)
      out[p - 2].second[it->second].draws.push_back(parse_double(f[p], rows[r].line));
  }
  return out;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace netmed::io
