// netmed: two-stage network mediation analysis from the command line.

#include "netmed/error.hpp"
#include "netmed/pipeline.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace netmed;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string network, edges, nodes, covariates, out;
  std::string x, y, y_family = "continuous", homophily, rank = "auto", link = "logit";
  int q_max = 5;
  int iters = 30000, burnin = 5000, thin = 1;
  int med_iters = 0, med_burnin = -1;
  int chains = 3;
  std::uint64_t seed = 1;
  bool intercept = false, draws = false;
};

void add_network(CLI::App* app, Common& c) {
  app->add_option("--network", c.network, "adjacency matrix CSV");
  app->add_option("--edges", c.edges, "edge list CSV (from,to)");
  app->add_option("--nodes", c.nodes, "node ids for an edge list, one per line");
}

void add_stage_one(CLI::App* app, Common& c) {
  add_network(app, c);
  app->add_option("--covariates", c.covariates, "nodal covariates CSV");
  app->add_option("--homophily", c.homophily, "categorical column; fits the conditional model");
  app->add_flag("--intercept", c.intercept, "add an all-ones dyadic covariate");
  app->add_option("--rank", c.rank, "latent rank Q or 'auto'");
  app->add_option("--q-max", c.q_max, "largest rank tried by 'auto' on the conditional model");
  app->add_option("--iters", c.iters, "eigenmodel iterations");
  app->add_option("--burnin", c.burnin, "eigenmodel burn-in");
  app->add_option("--thin", c.thin, "thinning interval");
  app->add_option("--link", c.link, "logit or probit");
  app->add_option("--seed", c.seed, "root seed");
}

void add_stage_two(CLI::App* app, Common& c) {
  app->add_option("--x", c.x, "predictor column");
  app->add_option("--y", c.y, "outcome column");
  app->add_option("--y-family", c.y_family, "continuous or binary");
  app->add_option("--chains", c.chains, "mediation chains");
  app->add_option("--med-iters", c.med_iters, "mediation iterations (default: --iters)");
  app->add_option("--med-burnin", c.med_burnin, "mediation burn-in (default: --burnin)");
  app->add_flag("--draws", c.draws, "also write draws.csv");
}

cli::StageOneOptions stage_one(const Common& c) {
  cli::StageOneOptions o;
  o.network = {c.network, c.edges, c.nodes};
  o.covariates = c.covariates;
  o.homophily = c.homophily;
  o.intercept = c.intercept;
  if (c.rank != "auto") {
    try {
      std::size_t used = 0;
      o.rank = std::stoi(c.rank, &used);
      if (used != c.rank.size()) throw std::invalid_argument("");
    } catch (const std::logic_error&) {
      throw InputError("--rank must be an integer or 'auto'");
    }
  }
  o.q_max = c.q_max;
  o.eigen.total_iterations = c.iters;
  o.eigen.burn_in = c.burnin;
  o.eigen.thin = c.thin;
  o.eigen.link = parse_link(c.link);
  o.seed = c.seed;
  return o;
}

cli::StageTwoOptions stage_two(const Common& c) {
  cli::StageTwoOptions o;
  o.covariates = c.covariates;
  o.x = c.x;
  o.y = c.y;
  o.family = parse_family(c.y_family);
  o.mediation.iterations = c.med_iters > 0 ? c.med_iters : c.iters;
  o.mediation.burn_in = c.med_burnin >= 0 ? c.med_burnin : c.burnin;
  o.mediation.thin = c.thin;
  o.mediation.n_chains = c.chains;
  o.seed = c.seed;
  o.write_draws = c.draws;
  return o;
}

fs::path out_dir(const Common& c) {
  if (c.out.empty()) throw InputError("--out is required");
  fs::create_directories(c.out);
  return c.out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int fail(const std::string& kind, const std::string& message, std::optional<std::size_t> line = {}) {
  io::json err{{"error", kind}, {"message", message}};
  if (line) err["line"] = *line;
  std::cerr << err.dump() << '\n';
  return kind == "input" || kind == "parse" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage network mediation analysis"};
  app.set_version_flag("--version", cli::version);
  app.require_subcommand(1);
  Common c;

  auto* stats = app.add_subcommand("stats", "network summary statistics as JSON");
  add_network(stats, c);
  int top = 10;
  stats->add_option("--top", top, "number of eigenvalues reported");

  auto* simulate = app.add_subcommand("simulate", "generate a network and ground truth");
  cli::SimulateOptions sim;
  std::string outcome = "continuous";
  simulate->add_option("--family", sim.family, "erdos-renyi, latent-class, latent-distance, eigenmodel or mediation");
  simulate->add_option("--n", sim.n);
  simulate->add_option("--p", sim.p);
  simulate->add_option("--classes", sim.classes);
  simulate->add_option("--p-within", sim.p_within);
  simulate->add_option("--p-between", sim.p_between);
  simulate->add_option("--intercept", sim.intercept, "latent-distance intercept");
  simulate->add_option("--lambda", sim.lambda)->delimiter(',');
  simulate->add_option("--beta", sim.beta, "homophily effect");
  simulate->add_option("--cp", sim.cp);
  simulate->add_option("--b", sim.b);
  simulate->add_option("--angle-sd", sim.angle_sd);
  simulate->add_option("--noise-sd", sim.noise_sd);
  simulate->add_flag("--null", sim.null_effect, "no mediation or direct effect");
  simulate->add_option("--y-family", outcome);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--out", c.out);

  auto* eigenfit = app.add_subcommand("eigenfit", "stage one: fit the eigenmodel and extract mediators");
  add_stage_one(eigenfit, c);
  eigenfit->add_option("--out", c.out);
  bool store_u = false;
  eigenfit->add_flag("--store-u", store_u, "keep U draws in fit.json");

  auto* mediate = app.add_subcommand("mediate", "stage two: Bayesian mediation on a mediator file");
  std::string mediators;
  mediate->add_option("--mediators", mediators, "mediators.csv from eigenfit")->required();
  mediate->add_option("--covariates", c.covariates, "nodal covariates CSV");
  mediate->add_option("--iters", c.iters);
  mediate->add_option("--burnin", c.burnin);
  mediate->add_option("--thin", c.thin);
  mediate->add_option("--seed", c.seed);
  mediate->add_option("--out", c.out);
  add_stage_two(mediate, c);

  auto* diagnose = app.add_subcommand("diagnose", "convergence table for a draws file");
  std::string draws_in;
  diagnose->add_option("--draws-file", draws_in, "draws.csv")->required();
  diagnose->add_option("--out", c.out, "output CSV (default: stdout)");

  auto* pipeline = app.add_subcommand("pipeline", "both stages end to end");
  add_stage_one(pipeline, c);
  add_stage_two(pipeline, c);
  pipeline->add_option("--out", c.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*stats) {
      std::cout << cli::cmd_stats(cli::load_network({c.network, c.edges, c.nodes}), top).dump(2) << '\n';
    } else if (*simulate) {
      sim.outcome = parse_family(outcome);
      cli::cmd_simulate(sim, out_dir(c));
    } else if (*eigenfit) {
      auto o = stage_one(c);
      o.store_u_draws = store_u;
      const auto r = cli::cmd_eigenfit(o, out_dir(c));
      print_warnings(r.fit.warnings);
      print_warnings(r.mediators.warnings);
    } else if (*mediate) {
      auto o = stage_two(c);
      o.mediators = mediators;
      print_warnings(cli::cmd_mediate(o, out_dir(c)).warnings);
    } else if (*diagnose) {
      if (c.out.empty()) {
        cli::cmd_diagnose(draws_in, std::cout);
      } else {
        std::ofstream out(c.out, std::ios::binary);
        if (!out) throw InputError("cannot open '" + c.out + "' for writing");
        cli::cmd_diagnose(draws_in, out);
      }
    } else if (*pipeline) {
      cli::PipelineConfig cfg{stage_one(c), stage_two(c), c.seed, out_dir(c)};
      const auto r = cli::cmd_pipeline(cfg);
      print_warnings(r.manifest["warnings"].get<std::vector<std::string>>());
    }
  } catch (const ParseError& e) {
    return fail("parse", e.what(), e.line());
  } catch (const InputError& e) {
    return fail("input", e.what());
  } catch (const DegenerateChainError& e) {
    return fail("degenerate", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 0;
}
