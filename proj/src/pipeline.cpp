#include "netmed/pipeline.hpp"

#include "netmed/diagnostics.hpp"
#include "netmed/error.hpp"
#include "netmed/rng.hpp"
#include "netmed/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

namespace netmed::cli {

namespace {

std::vector<std::string> read_node_ids(const std::filesystem::path& path) {
  const auto rows = io::read_csv(path);
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r == 0 && rows[r].fields.front() == "id") continue;
    ids.push_back(rows[r].fields.front());
  }
  return ids;
}

// Positions of `ids` inside the covariate table; throws listing every missing id.
std::vector<int> align_ids(const NodalCovariates& covariates, const std::vector<std::string>& ids) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < covariates.ids.size(); ++i) index.emplace(covariates.ids[i], static_cast<int>(i));
  std::vector<int> order;
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    const auto it = index.find(id);
    if (it == index.end())
      missing.push_back(id);
    else
      order.push_back(it->second);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw InputError("covariates are missing network ids: " + list);
  }
  return order;
}

// Numeric columns pass through; two-level categorical columns are coded 0/1
// in lexicographic level order.
Eigen::VectorXd numeric_column(const NodalColumn& column, const std::vector<int>& order) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(order.size()));
  if (column.kind == NodalColumn::Kind::continuous) {
    for (std::size_t i = 0; i < order.size(); ++i) out(static_cast<Eigen::Index>(i)) = column.values[order[i]];
    return out;
  }
  std::set<std::string> levels;
  for (int i : order) levels.insert(column.labels[i]);
  if (levels.size() != 2)
    throw InputError("column '" + column.name + "' must be numeric or have exactly two levels");
  const std::string one = *levels.rbegin();
  for (std::size_t i = 0; i < order.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = column.labels[order[i]] == one ? 1.0 : 0.0;
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool is_effect_parameter(const std::string& name) {
  if (name == "cp" || name == "ab" || name == "total") return true;
  auto indexed = [&](const std::string& prefix) {
    return name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0 &&
           std::all_of(name.begin() + static_cast<long>(prefix.size()), name.end(), ::isdigit);
  };
  return indexed("a") || indexed("b") || indexed("ab");
}

std::vector<std::pair<std::string, std::vector<Chain>>> posterior_chains(const MediationPosterior& posterior) {
  std::vector<std::pair<std::string, std::vector<Chain>>> out;
  for (std::size_t p = 0; p < posterior.names().size(); ++p) {
    std::vector<Chain> chains;
    for (std::size_t c = 0; c < posterior.chains.size(); ++c) {
      const auto& col = posterior.chains[c].values.col(static_cast<Eigen::Index>(p));
      chains.push_back({posterior.names()[p], {col.data(), col.data() + col.size()}, static_cast<int>(c + 1)});
    }
    out.emplace_back(posterior.names()[p], std::move(chains));
  }
  return out;
}

json stage_one_diagnostics(const EigenmodelFit& fit) {
  std::vector<std::pair<std::string, std::vector<Chain>>> draws;
  auto add = [&](const std::string& name, const Eigen::VectorXd& col) {
    draws.push_back({name, {Chain{name, {col.data(), col.data() + col.size()}, 1}}});
  };
  for (Eigen::Index p = 0; p < fit.beta_draws.cols(); ++p)
    add("beta_" + std::to_string(p + 1), fit.beta_draws.col(p));
  for (Eigen::Index k = 0; k < fit.lambda_draws.cols(); ++k)
    add("lambda_" + std::to_string(k + 1), fit.lambda_draws.col(k));
  json rows = json::array();
  for (const auto& r : diagnose(draws))
    rows.push_back({{"parameter", r.parameter},
                    {"geweke_z", optional_number(r.geweke_z)},
                    {"ess", optional_number(r.ess)},
                    {"nonconvergent", r.nonconvergent},
                    {"error", r.error}});
  return rows;
}

json fit_document(const StageOneResult& r) {
  auto doc = io::fit_to_json(r.fit);
  doc["selection"] = r.selection;
  doc["diagnostics"] = stage_one_diagnostics(r.fit);
  doc["mediator_eigenvalues"] =
      std::vector<double>(r.mediators.eigenvalues.data(), r.mediators.eigenvalues.data() + r.mediators.eigenvalues.size());
  doc["mediator_warnings"] = r.mediators.warnings;
  return doc;
}

void write_stage_one(const std::filesystem::path& out, const StageOneResult& r) {
  io::write_json(out / "fit.json", fit_document(r));
  io::write_mediators_csv(out / "mediators.csv", r.network.ids, r.mediators);
  io::write_scree_csv(out / "scree.csv", r.adjacency_spectrum);
}

json spectrum_head(const std::vector<double>& s, std::size_t count) {
  return std::vector<double>(s.begin(), s.begin() + static_cast<long>(std::min(count, s.size())));
}

}  // namespace

io::Network load_network(const NetworkSource& source) {
  const bool adjacency = !source.adjacency.empty();
  const bool edges = !source.edges.empty();
  if (adjacency == edges) throw InputError("give exactly one of --network or --edges");
  if (adjacency) return io::read_adjacency_csv(source.adjacency);
  std::vector<std::string> ids;
  if (!source.nodes.empty()) ids = read_node_ids(source.nodes);
  return io::read_edge_list_csv(source.edges, ids);
}

json cmd_stats(const io::Network& network, int top) {
  const auto& a = network.adjacency;
  const auto d = diameter(a);
  const auto spectrum = adjacency_spectrum(a);
  return {{"n", a.n()},
          {"edges", a.edge_count()},
          {"density", density(a)},
          {"diameter", d.value},
          {"disconnected_flag", d.disconnected},
          {"transitivity", transitivity(a)},
          {"top_eigenvalues", spectrum_head(spectrum, static_cast<std::size_t>(std::max(top, 0)))}};
}

StageOneResult run_stage_one(const StageOneOptions& options) {
  StageOneResult r{load_network(options.network), {}, {}, {}, {}};
  const auto& a = r.network.adjacency;
  r.adjacency_spectrum = adjacency_spectrum(a);

  std::vector<DyadicCovariateMatrix> covariates;
  const bool conditional = !options.homophily.empty();
  if (conditional) {
    if (options.covariates.empty()) throw InputError("--homophily needs --covariates");
    const auto cov = io::read_nodal_covariates(options.covariates);
    const auto order = align_ids(cov, r.network.ids);
    const auto& column = cov.column(options.homophily);
    std::vector<std::string> labels;
    for (int i : order) labels.push_back(column.labels[i]);
    covariates.push_back(uniform_homophily(labels));
  }
  if (options.intercept) {
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(a.n(), a.n());
    ones.diagonal().setZero();
    covariates.emplace_back(std::move(ones));
  }

  auto cfg = options.eigen;
  cfg.seed = split_seed(options.seed, streams::eigenmodel);
  cfg.store_u_draws = options.store_u_draws;

  int q = 0;
  if (options.rank) {
    q = *options.rank;
    cfg.rank = q;
    r.fit = fit_eigenmodel(a, covariates, cfg);
    r.selection = {{"method", "fixed"}, {"selected", q}};
  } else if (conditional) {
    auto sel = select_dimension_conditional(a, covariates, options.q_max, cfg);
    q = sel.selected;
    r.fit = std::move(*sel.selected_fit);
    json candidates = json::array();
    for (const auto& c : sel.candidates)
      candidates.push_back({{"rank", c.rank},
                            {"has_negative", c.has_negative},
                            {"top_positive", c.top_positive},
                            {"spectrum", c.spectrum}});
    r.selection = {{"method", "negative-eigenvalue"},
                   {"selected", q},
                   {"fallback", sel.fallback},
                   {"q_max", options.q_max},
                   {"candidates", candidates}};
  } else {
    const auto elbow = scree_elbow(r.adjacency_spectrum);
    q = std::clamp(elbow.suggested, 1, a.n() - 1);
    cfg.rank = q;
    r.fit = fit_eigenmodel(a, covariates, cfg);
    r.selection = {{"method", "scree-elbow"},
                   {"selected", q},
                   {"heuristic_available", elbow.heuristic_available},
                   {"positive_spectrum", elbow.positive_spectrum}};
  }
  r.mediators = extract_mediators(r.fit, q);
  for (int k = 0; k < q; ++k)
    if (r.mediators.eigenvalues(k) <= 0.0)
      r.mediators.warnings.push_back("mediator U" + std::to_string(k + 1) + " has a non-positive eigenvalue");
  return r;
}

StageOneResult cmd_eigenfit(const StageOneOptions& options, const std::filesystem::path& out) {
  auto r = run_stage_one(options);
  write_stage_one(out, r);
  return r;
}

std::vector<DiagnosticRow> diagnose(const std::vector<std::pair<std::string, std::vector<Chain>>>& draws) {
  std::vector<DiagnosticRow> rows;
  for (const auto& [name, chains] : draws) {
    DiagnosticRow row;
    row.parameter = name;
    auto note = [&](const std::exception& e) {
      if (row.error.empty()) row.error = e.what();
    };
    try {
      double worst = 0.0;
      for (const auto& c : chains) {
        const double z = geweke_z(c);
        if (std::abs(z) >= std::abs(worst)) worst = z;
      }
      row.geweke_z = worst;
      row.nonconvergent = std::abs(worst) >= 1.96;
    } catch (const std::exception& e) {
      note(e);
    }
    try {
      double total = 0.0;
      for (const auto& c : chains) total += effective_sample_size(c);
      row.ess = total;
    } catch (const std::exception& e) {
      note(e);
    }
    try {
      row.split_rhat = split_rhat(chains);
    } catch (const std::exception& e) {
      note(e);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows) {
  auto num = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); };
  out << "parameter,geweke_z,ess,split_rhat,nonconvergent,error\n";
  for (const auto& r : rows)
    out << r.parameter << ',' << num(r.geweke_z) << ',' << num(r.ess) << ',' << num(r.split_rhat) << ','
        << (r.nonconvergent ? "true" : "false") << ',' << r.error << '\n';
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_diagnostics_csv(out, rows);
}

StageTwoResult run_stage_two(const StageTwoOptions& options, const std::vector<std::string>& ids,
                             const Eigen::MatrixXd& mediators) {
  if (options.covariates.empty()) throw InputError("stage two needs --covariates");
  if (options.x.empty() || options.y.empty()) throw InputError("stage two needs --x and --y");
  const auto cov = io::read_nodal_covariates(options.covariates);
  const auto order = align_ids(cov, ids);

  MediationData data;
  data.family = options.family;
  data.x = numeric_column(cov.column(options.x), order);
  data.y = numeric_column(cov.column(options.y), order);
  data.m = mediators;

  auto cfg = options.mediation;
  cfg.seed = options.seed;
  StageTwoResult r;
  r.posterior = fit_mediation(data, cfg);
  r.summary = summarize(r.posterior, cfg.hpd_prob);
  r.total_effect = fit_total_effect(data, cfg);
  r.total_effect_summary = summarize(r.total_effect, cfg.hpd_prob);
  r.diagnostics = diagnose(posterior_chains(r.posterior));

  r.warnings = r.posterior.warnings;
  for (const auto& w : r.total_effect.warnings) r.warnings.push_back("total effect: " + w);
  std::vector<std::string> flagged;
  for (const auto& d : r.diagnostics)
    if (d.nonconvergent && is_effect_parameter(d.parameter)) flagged.push_back(d.parameter);
  if (!flagged.empty()) {
    std::string list;
    for (const auto& p : flagged) list += (list.empty() ? "" : ", ") + p;
    r.warnings.push_back("non-convergent: |geweke_z| >= 1.96 for " + list);
  }
  return r;
}

void write_stage_two(const std::filesystem::path& out, const StageTwoResult& r, bool write_draws) {
  io::write_summary_csv(out / "summary.csv", r.summary);
  json doc;
  doc["family"] = to_string(r.posterior.family);
  doc["q"] = r.posterior.q;
  doc["chains"] = r.posterior.chains.size();
  doc["draws_per_chain"] = r.posterior.chains.front().values.rows();
  doc["parameters"] = io::summary_to_json(r.summary);
  doc["total_effect"] = io::summary_to_json(r.total_effect_summary);
  doc["warnings"] = r.warnings;
  io::write_json(out / "summary.json", doc);
  write_diagnostics_csv(out / "diagnostics.csv", r.diagnostics);
  if (write_draws) io::write_draws_csv(out / "draws.csv", r.posterior);
}

StageTwoResult cmd_mediate(const StageTwoOptions& options, const std::filesystem::path& out) {
  if (options.mediators.empty()) throw InputError("mediate needs --mediators");
  const auto file = io::read_mediators_csv(options.mediators);
  auto r = run_stage_two(options, file.ids, file.values);
  write_stage_two(out, r, options.write_draws);
  return r;
}

PipelineResult cmd_pipeline(const PipelineConfig& config) {
  auto one = config.stage_one;
  one.seed = config.seed;
  auto two = config.stage_two;
  two.seed = config.seed;
  if (two.covariates.empty()) two.covariates = one.covariates;

  auto first = run_stage_one(one);
  auto second = run_stage_two(two, first.network.ids, first.mediators.vectors);
  PipelineResult result{std::move(first), std::move(second), {}};

  std::vector<std::string> warnings;
  for (const auto& w : result.stage_one.fit.warnings) warnings.push_back("stage one: " + w);
  for (const auto& w : result.stage_one.mediators.warnings) warnings.push_back("stage one: " + w);
  for (const auto& w : result.stage_two.warnings) warnings.push_back("stage two: " + w);

  json chain_seeds = json::array();
  const auto mediation_stream = split_seed(config.seed, streams::mediation);
  for (int c = 0; c < two.mediation.n_chains; ++c) chain_seeds.push_back(split_seed(mediation_stream, c));
  const auto& e = one.eigen;
  const auto& m = two.mediation;
  result.manifest = {
      {"version", version},
      {"rng", "mt19937_64; child seeds via splitmix64"},
      {"seeds",
       {{"root", config.seed},
        {"eigenmodel", split_seed(config.seed, streams::eigenmodel)},
        {"mediation_chains", chain_seeds}}},
      {"config",
       {{"network", one.network.adjacency.string()},
        {"edges", one.network.edges.string()},
        {"nodes", one.network.nodes.string()},
        {"covariates", two.covariates.string()},
        {"x", two.x},
        {"y", two.y},
        {"y_family", to_string(two.family)},
        {"homophily", one.homophily},
        {"intercept", one.intercept},
        {"rank", one.rank ? json(*one.rank) : json("auto")},
        {"q_max", one.q_max},
        {"model", one.homophily.empty() ? "unconditional" : "conditional"},
        {"eigenmodel",
         {{"iterations", e.total_iterations},
          {"burn_in", e.burn_in},
          {"thin", e.thin},
          {"link", to_string(e.link)},
          {"prior_sd_beta", e.prior_sd_beta},
          {"prior_sd_lambda", e.prior_sd_lambda},
          {"prior_sd_u", e.prior_sd_u}}},
        {"mediation",
         {{"iterations", m.iterations},
          {"burn_in", m.burn_in},
          {"thin", m.thin},
          {"chains", m.n_chains},
          {"coef_prior_variance", m.coef_prior_variance},
          {"precision_shape", m.precision_shape},
          {"precision_rate", m.precision_rate},
          {"hpd_prob", m.hpd_prob}}}}},
      {"rank_selection", result.stage_one.selection},
      {"selected_rank", result.stage_one.mediators.rank()},
      {"acceptance", result.stage_one.fit.acceptance},
      {"warnings", warnings},
      {"outputs",
       {"summary.csv", "summary.json", "mediators.csv", "fit.json", "diagnostics.csv", "manifest.json", "scree.csv"}}};
  if (two.write_draws) result.manifest["outputs"].push_back("draws.csv");

  write_stage_one(config.out, result.stage_one);
  write_stage_two(config.out, result.stage_two, two.write_draws);
  io::write_json(config.out / "manifest.json", result.manifest);
  return result;
}

json cmd_simulate(const SimulateOptions& o, const std::filesystem::path& out) {
  if (o.n < 2) throw InputError("--n must be at least 2");
  const std::uint64_t seed = split_seed(o.seed, streams::simulation);
  std::vector<std::string> ids;
  for (int i = 0; i < o.n; ++i) ids.push_back("v" + std::to_string(i + 1));
  json truth{{"family", o.family}, {"n", o.n}, {"seed", o.seed}};
  Rng rng(split_seed(seed, 1));
  const auto network_seed = split_seed(seed, 2);

  auto two_blocks = [&]() {
    std::vector<std::string> g;
    for (int i = 0; i < o.n; ++i) g.push_back(i % 2 ? "g2" : "g1");
    return g;
  };
  auto homophily_terms = [&](const std::vector<std::string>& groups) {
    std::vector<DyadicTerm> terms;
    if (o.beta != 0.0) terms.push_back({o.beta, uniform_homophily(groups)});
    return terms;
  };

  std::optional<AdjacencyMatrix> a;
  if (o.family == "erdos-renyi") {
    a = gen_erdos_renyi(o.n, o.p, network_seed);
    truth["p"] = o.p;
  } else if (o.family == "latent-class") {
    if (o.classes < 1) throw InputError("--classes must be positive");
    std::vector<int> labels;
    for (int i = 0; i < o.n; ++i) labels.push_back(i * o.classes / o.n);
    Eigen::MatrixXd prob = Eigen::MatrixXd::Constant(o.classes, o.classes, o.p_between);
    prob.diagonal().setConstant(o.p_within);
    a = gen_latent_class(labels, prob, network_seed);
    truth["memberships"] = labels;
    truth["p_within"] = o.p_within;
    truth["p_between"] = o.p_between;
  } else if (o.family == "latent-distance") {
    Eigen::MatrixXd pos(o.n, 2);
    for (int i = 0; i < o.n; ++i) {
      const double centre = i < o.n / 2 ? -2.0 : 2.0;
      pos(i, 0) = centre + 0.5 * rng.normal();
      pos(i, 1) = 0.5 * rng.normal();
    }
    a = gen_latent_distance(pos, o.intercept, network_seed);
    truth["intercept"] = o.intercept;
    truth["positions"] = io::json::array();
    for (int i = 0; i < o.n; ++i) truth["positions"].push_back({pos(i, 0), pos(i, 1)});
  } else if (o.family == "eigenmodel" || o.family == "mediation") {
    const int q = static_cast<int>(o.lambda.size());
    if (q < 1) throw InputError("--lambda needs at least one value");
    const auto groups = two_blocks();
    Eigen::MatrixXd u(o.n, q);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(o.n);
    if (o.family == "eigenmodel") {
      // Unit-norm latent vectors spread around a circle (first two dimensions).
      for (int i = 0; i < o.n; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / o.n + 0.1 * rng.normal();
        for (int k = 0; k < q; ++k) u(i, k) = k == 0 ? std::cos(angle) : k == 1 ? std::sin(angle) : rng.normal();
        u.row(i).normalize();
      }
    } else {
      if (q < 2) throw InputError("the mediation scenario needs two latent dimensions");
      for (int i = 0; i < o.n; ++i) {
        x(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        const double angle = (o.null_effect ? 2.0 * std::numbers::pi * rng.uniform() : std::numbers::pi * x(i)) +
                             o.angle_sd * rng.normal();
        u(i, 0) = std::cos(angle);
        u(i, 1) = std::sin(angle);
        for (int k = 2; k < q; ++k) u(i, k) = 0.0;
      }
    }
    Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(o.lambda.data(), q);
    const auto terms = homophily_terms(groups);
    a = gen_eigenmodel(u, lambda, terms, network_seed);
    truth["lambda"] = o.lambda;
    truth["beta"] = o.beta;
    truth["u"] = io::json::array();
    for (int i = 0; i < o.n; ++i) {
      std::vector<double> row;
      for (int k = 0; k < q; ++k) row.push_back(u(i, k));
      truth["u"].push_back(row);
    }

    if (o.family == "mediation") {
      const double b = o.null_effect ? 0.0 : o.b;
      const double cp = o.null_effect ? 0.0 : o.cp;
      NodalCovariates cov;
      cov.ids = ids;
      NodalColumn xc{"x", NodalColumn::Kind::continuous, {}, {}};
      NodalColumn yc{"y", NodalColumn::Kind::continuous, {}, {}};
      NodalColumn gc{"group", NodalColumn::Kind::categorical, groups, {}};
      for (int i = 0; i < o.n; ++i) {
        const double eta = cp * x(i) + b * u(i, 0);
        double y = 0.0;
        if (o.outcome == OutcomeFamily::continuous)
          y = eta + o.noise_sd * rng.normal();
        else
          y = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0;
        xc.values.push_back(x(i));
        yc.values.push_back(y);
        xc.labels.push_back(io::format_double(x(i)));
        yc.labels.push_back(io::format_double(y));
      }
      cov.columns = {xc, yc, gc};
      io::write_nodal_covariates(out / "covariates.csv", cov);
      truth["outcome"] = to_string(o.outcome);
      truth["cp"] = cp;
      truth["b_latent"] = b;
      truth["angle_sd"] = o.angle_sd;
      truth["noise_sd"] = o.noise_sd;
      truth["null_effect"] = o.null_effect;
    }
  } else {
    throw InputError("unknown simulation family '" + o.family + "'");
  }

  io::write_adjacency_csv(out / "network.csv", {*a, ids});
  truth["density"] = density(*a);
  io::write_json(out / "truth.json", truth);
  return truth;
}

std::vector<DiagnosticRow> cmd_diagnose(const std::filesystem::path& draws, std::ostream& out) {
  auto rows = diagnose(io::read_draws_csv(draws));
  write_diagnostics_csv(out, rows);
  return rows;
}

}  // namespace netmed::cli
