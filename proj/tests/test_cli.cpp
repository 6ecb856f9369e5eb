#include "doctest.h"

#include "netmed/error.hpp"
#include "netmed/pipeline.hpp"
#include "netmed/sim.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace netmed;
namespace fs = std::filesystem;

namespace {

fs::path fresh(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "netmed_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::PipelineConfig small_pipeline(const fs::path& data, const fs::path& out) {
  cli::PipelineConfig cfg;
  cfg.stage_one.network.adjacency = data / "network.csv";
  cfg.stage_one.covariates = data / "covariates.csv";
  cfg.stage_one.rank = 2;
  cfg.stage_one.eigen.total_iterations = 4000;
  cfg.stage_one.eigen.burn_in = 1000;
  cfg.stage_two.covariates = data / "covariates.csv";
  cfg.stage_two.x = "x";
  cfg.stage_two.y = "y";
  cfg.stage_two.mediation.iterations = 4000;
  cfg.stage_two.mediation.burn_in = 1000;
  cfg.seed = 77;
  cfg.out = out;
  return cfg;
}

fs::path simulated(const std::string& name, cli::SimulateOptions opts) {
  const auto dir = fresh(name);
  cli::cmd_simulate(opts, dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(NETMED_CLI) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("stats on small files") {
    const auto dir = fresh("stats");
    std::ofstream(dir / "k3.csv") << "0,1,1\n1,0,1\n1,1,0\n";
    const auto k3 = cli::cmd_stats(cli::load_network({dir / "k3.csv", {}, {}}));
    CHECK(k3["density"] == 1.0);
    CHECK(k3["diameter"] == 1);
    CHECK(k3["transitivity"] == 1.0);
    CHECK(k3["disconnected_flag"] == false);

    std::ofstream(dir / "e5.csv") << "0,0,0,0,0\n0,0,0,0,0\n0,0,0,0,0\n0,0,0,0,0\n0,0,0,0,0\n";
    const auto e5 = cli::cmd_stats(cli::load_network({dir / "e5.csv", {}, {}}));
    CHECK(e5["density"] == 0.0);
    CHECK(e5["disconnected_flag"] == true);

    std::ofstream(dir / "bad.csv") << "0,1\n1,zero\n";
    CHECK_THROWS_AS(cli::load_network({dir / "bad.csv", {}, {}}), ParseError);
    CHECK_THROWS_AS(cli::load_network({dir / "k3.csv", dir / "k3.csv", {}}), InputError);
    CHECK_THROWS_AS(cli::load_network({}), InputError);
  }

  TEST_CASE("stats on a simulated block model match the library") {
    cli::SimulateOptions o;
    o.family = "latent-class";
    o.n = 40;
    o.seed = 3;
    const auto dir = simulated("sbm", o);
    const auto net = cli::load_network({dir / "network.csv", {}, {}});
    const auto s = cli::cmd_stats(net, 5);
    CHECK(s["n"] == 40);
    CHECK(s["edges"] == net.adjacency.edge_count());
    CHECK(s["density"].get<double>() == density(net.adjacency));
    CHECK(s["diameter"] == diameter(net.adjacency).value);
    CHECK(s["transitivity"].get<double>() == transitivity(net.adjacency));
    const auto spec = adjacency_spectrum(net.adjacency);
    CHECK(s["top_eigenvalues"].size() == 5);
    CHECK(s["top_eigenvalues"][0].get<double>() == spec[0]);
  }

  TEST_CASE("simulate writes ground truth") {
    for (const auto* fam : {"erdos-renyi", "latent-class", "latent-distance", "eigenmodel", "mediation"}) {
      cli::SimulateOptions o;
      o.family = fam;
      o.n = 30;
      const auto dir = simulated(std::string("sim-") + fam, o);
      CHECK(fs::exists(dir / "network.csv"));
      CHECK(io::read_json(dir / "truth.json")["family"] == fam);
    }
    cli::SimulateOptions bad;
    bad.family = "smallworld";
    CHECK_THROWS_AS(cli::cmd_simulate(bad, fresh("sim-bad")), InputError);
  }

  TEST_CASE("eigenfit on K3 with rank one") {
    const auto dir = fresh("eigenfit");
    std::ofstream(dir / "k3.csv") << "a,b,c\n0,1,1\n1,0,1\n1,1,0\n";
    cli::StageOneOptions o;
    o.network.adjacency = dir / "k3.csv";
    o.rank = 1;
    o.eigen.total_iterations = 500;
    o.eigen.burn_in = 100;
    cli::cmd_eigenfit(o, dir);
    const auto fit = io::fit_from_json(io::read_json(dir / "fit.json"));
    CHECK(fit.n == 3);
    CHECK(fit.saved_draws() == 400);
    CHECK((fit.ulu_postmean - fit.ulu_postmean.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    const auto med = io::read_mediators_csv(dir / "mediators.csv");
    CHECK(med.ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(med.values.cols() == 1);
    CHECK(io::read_csv(dir / "scree.csv").size() == 4);
  }

  TEST_CASE("covariate ids must cover the network") {
    cli::SimulateOptions o;
    o.n = 20;
    const auto data = simulated("ids", o);
    std::ofstream(data / "short.csv") << "id,x,y\nv1,0,1.0\nv2,1,2.0\n";
    auto cfg = small_pipeline(data, fresh("ids-out"));
    cfg.stage_two.covariates = data / "short.csv";
    try {
      cli::cmd_pipeline(cfg);
      FAIL("expected an id mismatch");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("v3") != std::string::npos);
      CHECK(std::string(e.what()).find("v20") != std::string::npos);
    }
  }

  TEST_CASE("pipeline outputs and determinism") {
    cli::SimulateOptions o;
    o.n = 40;
    o.seed = 5;
    const auto data = simulated("det", o);
    const auto out1 = fresh("det-1"), out2 = fresh("det-2");
    const auto r = cli::cmd_pipeline(small_pipeline(data, out1));
    cli::cmd_pipeline(small_pipeline(data, out2));
    for (const auto* f : {"summary.csv", "summary.json", "mediators.csv", "fit.json", "diagnostics.csv", "manifest.json", "scree.csv"}) {
      INFO(f);
      CHECK(fs::exists(out1 / f));
      CHECK(slurp(out1 / f) == slurp(out2 / f));
    }
    const auto manifest = io::read_json(out1 / "manifest.json");
    CHECK(manifest["seeds"]["root"] == 77);
    CHECK(manifest["version"] == cli::version);
    CHECK(manifest["selected_rank"] == 2);
    CHECK(manifest["config"]["model"] == "unconditional");
    CHECK(r.stage_two.summary.front().parameter == "cp");
  }

  TEST_CASE("eigenfit then mediate reproduces the pipeline") {
    cli::SimulateOptions o;
    o.n = 40;
    o.seed = 6;
    const auto data = simulated("comp", o);
    const auto cfg = small_pipeline(data, fresh("comp-pipe"));
    cli::cmd_pipeline(cfg);

    const auto step = fresh("comp-steps");
    auto one = cfg.stage_one;
    one.seed = cfg.seed;
    cli::cmd_eigenfit(one, step);
    auto two = cfg.stage_two;
    two.seed = cfg.seed;
    two.mediators = step / "mediators.csv";
    cli::cmd_mediate(two, step);
    CHECK(slurp(step / "mediators.csv") == slurp(cfg.out / "mediators.csv"));
    CHECK(slurp(step / "summary.csv") == slurp(cfg.out / "summary.csv"));
  }

  TEST_CASE("auto rank on the conditional model records each candidate") {
    cli::SimulateOptions o;
    o.n = 30;
    o.beta = 1.0;
    const auto data = simulated("auto", o);
    auto cfg = small_pipeline(data, fresh("auto-out"));
    cfg.stage_one.rank.reset();
    cfg.stage_one.homophily = "group";
    cfg.stage_one.q_max = 3;
    cfg.stage_one.eigen.total_iterations = 2000;
    cfg.stage_one.eigen.burn_in = 500;
    const auto r = cli::cmd_pipeline(cfg);
    const auto& sel = r.manifest["rank_selection"];
    CHECK(sel["method"] == "negative-eigenvalue");
    CHECK(sel["selected"] == r.stage_one.mediators.rank());
    CHECK(sel["candidates"].size() >= 1);
    CHECK(sel["candidates"][0]["rank"] == 2);
    CHECK(sel["candidates"][0]["spectrum"].size() == 30);
    CHECK(r.manifest["config"]["model"] == "conditional");
    CHECK(r.stage_one.fit.beta_draws.cols() == 1);
  }

  TEST_CASE("unconditional auto rank uses the scree elbow") {
    cli::SimulateOptions o;
    o.n = 30;
    const auto data = simulated("scree", o);
    auto cfg = small_pipeline(data, fresh("scree-out"));
    cfg.stage_one.rank.reset();
    const auto r = cli::cmd_pipeline(cfg);
    const auto elbow = scree_elbow(r.stage_one.adjacency_spectrum);
    CHECK(r.manifest["rank_selection"]["method"] == "scree-elbow");
    CHECK(r.stage_one.mediators.rank() == std::max(1, elbow.suggested));
  }

  TEST_CASE("diagnose surfaces degenerate chains per parameter") {
    const auto dir = fresh("diag");
    std::ofstream f(dir / "draws.csv");
    f << "chain,iteration,theta,phi\n";
    for (int i = 1; i <= 200; ++i) f << "1," << i << ",3.0," << (i % 7) * 0.1 << "\n";
    f.close();
    std::stringstream out;
    const auto rows = cli::cmd_diagnose(dir / "draws.csv", out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].parameter == "theta");
    CHECK(rows[0].error == "degenerate chain");
    CHECK_FALSE(rows[0].geweke_z.has_value());
    CHECK(rows[1].error.empty());
    CHECK(out.str().find("theta,,,1,false,degenerate chain") != std::string::npos);
  }

  TEST_CASE("command line exit codes") {
    const auto dir = fresh("exe");
    std::ofstream(dir / "k3.csv") << "0,1,1\n1,0,1\n1,1,0\n";
    std::ofstream(dir / "bad.csv") << "0,1\n1,q\n";
    CHECK(run("stats --network " + (dir / "k3.csv").string()) == 0);
    CHECK(run("stats --network " + (dir / "bad.csv").string()) != 0);
    CHECK(run("stats") != 0);
    CHECK(run("frobnicate") != 0);
    const std::string err = (dir / "err.json").string();
    [[maybe_unused]] const int rc = std::system((std::string(NETMED_CLI) + " stats --network " + (dir / "bad.csv").string() + " 2> " + err).c_str());
    const auto doc = io::json::parse(slurp(err));
    CHECK(doc["error"] == "parse");
    CHECK(doc["line"] == 2);
  }
}
