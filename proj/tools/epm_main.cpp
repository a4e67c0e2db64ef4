#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epm/experiment.hpp"
#include "epm/oracle.hpp"

namespace fs = std::filesystem;
using namespace epm;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("EPM_OUT_DIR");
  return env && *env ? env : "epm_out";
}

struct RunArgs {
  std::string config;
  std::string dataset;
  std::string synthetic;
  std::string model;
  std::string T;
  std::string tdll;
  int iters = 0, retain = 0, folds = 0, max_folds = -1, jobs = 0;
  std::uint64_t seed = 0;
  double e0 = 0, f0 = 0, C1 = 0, C2 = 0;
  std::string out;
};

int cmd_run(CLI::App& sub, const RunArgs& a) {
  ExperimentConfig cfg;
  cfg.output_dir = default_out_dir();
  if (!a.config.empty()) cfg = ExperimentConfig::load(a.config);
  auto given = [&](const char* flag) { return sub.count(flag) > 0; };
  if (!a.dataset.empty()) cfg.dataset = a.dataset;
  if (given("--synthetic")) {
    cfg.synthetic = a.synthetic;
    cfg.dataset.clear();
  }
  if (given("--model")) cfg.model = a.model;
  if (given("--T")) cfg.set("T", a.T);
  if (given("--iters")) cfg.iterations = a.iters;
  if (given("--retain")) cfg.retained = a.retain;
  if (given("--folds")) cfg.folds = a.folds;
  if (given("--max-folds")) cfg.max_folds = a.max_folds;
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--jobs")) cfg.jobs = a.jobs;
  if (given("--e0")) cfg.e0 = a.e0;
  if (given("--f0")) cfg.f0 = a.f0;
  if (given("--C1")) cfg.C1 = a.C1;
  if (given("--C2")) cfg.C2 = a.C2;
  if (given("--tdll")) cfg.set("tdll", a.tdll);
  if (given("--out")) cfg.output_dir = a.out;
  cfg.validate();

  const auto results = run_experiment(cfg);
  const int n_folds = cfg.max_folds > 0 ? cfg.max_folds : cfg.folds;
  std::cout << "model  T     K_mean    TDLL        TDAUC-PR  seconds/fold\n";
  for (std::size_t b = 0; b < results.size(); b += static_cast<std::size_t>(n_folds)) {
    std::vector<double> k, ll, auc, sec;
    for (int f = 0; f < n_folds; ++f) {
      const auto& r = results[b + static_cast<std::size_t>(f)];
      k.push_back(r.report.k_mean);
      ll.push_back(r.report.tdll);
      auc.push_back(r.report.tdauc_pr);
      sec.push_back(r.seconds);
    }
    std::printf("%-6s %-5d %-9.3f %-11.5f %-9.4f %.2f\n", results[b].model.c_str(), results[b].T,
                mean_se(k).first, mean_se(ll).first, mean_se(auc).first, mean_se(sec).first);
  }
  std::cout << "wrote " << cfg.output_dir << "/summary.csv\n";
  return 0;
}

struct OracleArgs {
  std::vector<std::string> suites;
  std::int64_t n = 1000000;
  std::int64_t rounds = 100000;
  bool corrupt = false;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_oracle(const OracleArgs& a) {
  std::vector<std::string> suites = a.suites;
  if (suites.empty() || (suites.size() == 1 && suites[0] == "all")) {
    suites = {"expectations", "moments", "marginals", "geweke"};
  }
  for (const auto& s : suites) {
    if (s != "expectations" && s != "moments" && s != "marginals" && s != "geweke") {
      throw std::invalid_argument("unknown oracle suite '" + s + "'");
    }
  }
  const std::string out_dir = a.out.empty() ? default_out_dir() : a.out;
  fs::create_directories(out_dir);
  const Rng root(a.seed);
  bool ok = true;
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const auto& s = suites[i];
    Rng rng = root.split(i);
    std::ostringstream text;
    if (s == "expectations" || s == "moments") {
      const auto checks = s == "expectations" ? expectation_suite(a.n, rng) : moment_suite(a.n, rng);
      write_checks_text(text, checks);
      std::ofstream csv(fs::path(out_dir) / ("oracle_" + s + ".csv"));
      write_checks_csv(csv, checks);
      for (const auto& c : checks) ok = ok && c.pass;
    } else if (s == "marginals") {
      const auto m = marginal_suite(a.n, rng);
      write_marginal_text(text, m);
      std::ofstream csv(fs::path(out_dir) / "oracle_marginals.csv");
      write_checks_csv(csv, m.prior_mc);
      ok = ok && m.pass();
    } else {
      const auto reports = geweke_suite(a.rounds, a.corrupt, rng);
      for (const auto& r : reports) {
        write_geweke_text(text, r);
        ok = ok && r.pass;
      }
      std::ofstream csv(fs::path(out_dir) / (a.corrupt ? "oracle_geweke_corrupt.csv" : "oracle_geweke.csv"));
      write_geweke_csv(csv, reports);
    }
    std::cout << text.str();
    std::ofstream txt(fs::path(out_dir) / ("oracle_" + s + (a.corrupt && s == "geweke" ? "_corrupt" : "") + ".txt"));
    txt << text.str();
  }
  std::cout << (ok ? "all oracle checks passed\n" : "oracle checks FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge partition models: inference, evaluation and oracles"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Cross-validated experiment over models and truncation levels");
  run->add_option("dataset", ra.dataset, "Edge-list file (default: synthetic data)");
  run->add_option("--config", ra.config, "key=value config file; flags override it");
  run->add_option("--synthetic", ra.synthetic, "Synthetic spec: 'blocks' or rows=..;cols=..;block=r0:r1:c0:c1;...");
  run->add_option("--model", ra.model, "epm, cepm, depm or idepm");
  run->add_option("--T", ra.T, "Truncation level(s), comma separated");
  run->add_option("--iters", ra.iters, "Gibbs iterations per chain");
  run->add_option("--retain", ra.retain, "Final iterations kept for the estimates");
  run->add_option("--folds", ra.folds, "Cross-validation folds");
  run->add_option("--max-folds", ra.max_folds, "Run only the first n folds");
  run->add_option("--seed", ra.seed, "Master seed");
  run->add_option("--jobs", ra.jobs, "Concurrent chains");
  run->add_option("--e0", ra.e0, "Gamma prior shape for hyperparameters");
  run->add_option("--f0", ra.f0, "Gamma prior rate for hyperparameters");
  run->add_option("--C1", ra.C1, "CEPM row constant (default I)");
  run->add_option("--C2", ra.C2, "CEPM column constant (default J)");
  run->add_option("--tdll", ra.tdll, "mean_probability or mean_log");
  run->add_option("--out", ra.out, "Output directory (default $EPM_OUT_DIR or epm_out)");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Closed-form and sampler-correctness checks");
  oracle->add_option("suites", oa.suites, "expectations, moments, marginals, geweke or all");
  oracle->add_option("--n", oa.n, "Monte Carlo draws per check");
  oracle->add_option("--rounds", oa.rounds, "Geweke rounds");
  oracle->add_flag("--corrupt", oa.corrupt, "Geweke with a deliberately wrong c0 update");
  oracle->add_option("--seed", oa.seed, "Seed");
  oracle->add_option("--out", oa.out, "Report directory");

  std::string gen_spec = "blocks", gen_out = "synthetic.txt";
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Write a synthetic block dataset and its metadata");
  gen->add_option("--synthetic", gen_spec, "Synthetic spec");
  gen->add_option("--seed", gen_seed, "Override the spec seed");
  gen->add_option("--out", gen_out, "Edge-list path; metadata goes to <path>.meta.json");

  std::string conv_in, conv_out;
  double threshold = 3.0;
  auto* conv = app.add_subcommand("convert", "Binarize a ratings file into an edge list");
  conv->add_option("input", conv_in, "user item rating per line")->required();
  conv->add_option("output", conv_out, "Edge-list path")->required();
  conv->add_option("--threshold", threshold, "x = 1 iff rating > threshold");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(*run, ra);
    if (*oracle) return cmd_oracle(oa);
    if (*gen) {
      SyntheticSpec spec = SyntheticSpec::parse(gen_spec);
      if (gen->count("--seed")) spec.seed = gen_seed;
      const auto data = gen_dataset(spec, gen_out);
      std::cout << "wrote " << gen_out << ": " << data.matrix.rows() << " x " << data.matrix.cols()
                << ", " << data.matrix.nnz() << " ones\n";
      return 0;
    }
    if (*conv) {
      LoadStats stats;
      const auto m = convert_ratings(conv_in, conv_out, threshold, &stats);
      for (const auto& w : stats.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "wrote " << conv_out << ": " << m.rows() << " x " << m.cols() << ", " << m.nnz()
                << " ones\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
