#include "epm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "epm/idepm.hpp"
#include "epm/truncated.hpp"

namespace epm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) {
    throw std::invalid_argument("config: bad value for " + key + ": '" + value + "'");
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

// Predictions of the most recent `capacity` sweeps.
class Window {
 public:
  Window(std::size_t capacity, std::size_t entries) : capacity_(capacity), entries_(entries) {}

  void push(std::vector<double> probs) {
    buf_.push_back(std::move(probs));
    if (buf_.size() > capacity_) buf_.pop_front();
  }

  PredictiveEnsemble ensemble() const {
    PredictiveEnsemble ens(entries_);
    for (const auto& p : buf_) ens.add_sample(p);
    return ens;
  }

 private:
  std::size_t capacity_;
  std::size_t entries_;
  std::deque<std::vector<double>> buf_;
};

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "dataset") dataset = value;
  else if (key == "synthetic") synthetic = value;
  else if (key == "model") model = value;
  else if (key == "T") truncations = parse_int_list(key, value);
  else if (key == "iterations") iterations = parse_number<int>(key, value);
  else if (key == "retained") retained = parse_number<int>(key, value);
  else if (key == "folds") folds = parse_number<int>(key, value);
  else if (key == "max_folds") max_folds = parse_number<int>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "e0") e0 = parse_number<double>(key, value);
  else if (key == "f0") f0 = parse_number<double>(key, value);
  else if (key == "C1") C1 = value.empty() ? std::nullopt : std::optional(parse_number<double>(key, value));
  else if (key == "C2") C2 = value.empty() ? std::nullopt : std::optional(parse_number<double>(key, value));
  else if (key == "output_dir") output_dir = value;
  else if (key == "jobs") jobs = parse_number<int>(key, value);
  else if (key == "tdll") {
    if (value == "mean_probability") tdll_mode = TdllMode::mean_probability;
    else if (value == "mean_log") tdll_mode = TdllMode::mean_log;
    else throw std::invalid_argument("config: tdll must be mean_probability or mean_log");
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "dataset=" << dataset << '\n';
  os << "synthetic=" << synthetic << '\n';
  os << "model=" << model << '\n';
  os << "T=";
  for (std::size_t i = 0; i < truncations.size(); ++i) os << (i ? "," : "") << truncations[i];
  os << '\n';
  os << "iterations=" << iterations << '\n';
  os << "retained=" << retained << '\n';
  os << "folds=" << folds << '\n';
  os << "max_folds=" << max_folds << '\n';
  os << "seed=" << seed << '\n';
  os << "e0=" << fmt(e0) << '\n';
  os << "f0=" << fmt(f0) << '\n';
  os << "C1=" << (C1 ? fmt(*C1) : "") << '\n';
  os << "C2=" << (C2 ? fmt(*C2) : "") << '\n';
  os << "output_dir=" << output_dir << '\n';
  os << "jobs=" << jobs << '\n';
  os << "tdll=" << (tdll_mode == TdllMode::mean_log ? "mean_log" : "mean_probability") << '\n';
  return os.str();
}

void ExperimentConfig::validate() const {
  if (model != "idepm") parse_variant(model);
  if (!is_idepm()) {
    if (truncations.empty()) throw std::invalid_argument("config: T list is empty");
    for (int t : truncations) {
      if (t < 1) throw std::invalid_argument("config: T must be positive");
    }
  }
  if (iterations < 1) throw std::invalid_argument("config: iterations must be positive");
  if (retained < 1 || retained > iterations) {
    throw std::invalid_argument("config: need 1 <= retained <= iterations");
  }
  if (folds < 2) throw std::invalid_argument("config: folds must be at least 2");
  if (max_folds < 0 || max_folds > folds) throw std::invalid_argument("config: max_folds out of range");
  if (!(e0 > 0.0 && f0 > 0.0)) throw std::invalid_argument("config: e0 and f0 must be positive");
  if ((C1 && !(*C1 > 0.0)) || (C2 && !(*C2 > 0.0))) {
    throw std::invalid_argument("config: C1 and C2 must be positive");
  }
  if (jobs < 1) throw std::invalid_argument("config: jobs must be positive");
  if (dataset.empty()) SyntheticSpec::parse(synthetic).validate();
}

ChainResult run_chain(const BinaryMatrix& train, std::span<const TestEntry> test,
                      const ExperimentConfig& cfg, int T, Rng rng) {
  using clock = std::chrono::steady_clock;
  ChainResult res;
  res.model = cfg.model;
  res.T = cfg.is_idepm() ? 0 : T;
  res.report.trace.reserve(static_cast<std::size_t>(cfg.iterations));

  const bool scored = !test.empty();
  Window window(static_cast<std::size_t>(cfg.retained), test.size());
  std::vector<std::uint8_t> labels;
  for (const auto& e : test) labels.push_back(e.value);

  double elapsed = 0.0;
  double k_sum = 0.0;
  auto record = [&](int it, int k, std::vector<double> probs) {
    TraceRow row;
    row.iteration = it + 1;
    row.elapsed_s = elapsed;
    row.active_atoms = k;
    row.tdll_sample = row.tdll_running = kNaN;
    if (scored) {
      PredictiveEnsemble one(test.size());
      one.add_sample(probs);
      row.tdll_sample = tdll(one, test, cfg.tdll_mode);
      window.push(std::move(probs));
      row.tdll_running = tdll(window.ensemble(), test, cfg.tdll_mode);
    }
    if (it >= cfg.iterations - cfg.retained) k_sum += k;
    res.report.trace.push_back(row);
  };

  if (cfg.is_idepm()) {
    IdepmHypers h;
    h.e0 = cfg.e0;
    h.f0 = cfg.f0;
    CollapsedState s = init_collapsed(train, h, std::move(rng));
    for (int it = 0; it < cfg.iterations; ++it) {
      const auto t0 = clock::now();
      collapsed_sweep(s, train);
      elapsed += std::chrono::duration<double>(clock::now() - t0).count();
      record(it, s.active_atoms(), scored ? predict(s, test) : std::vector<double>{});
    }
  } else {
    const Variant v = parse_variant(cfg.model);
    Hyperparameters h = Hyperparameters::defaults(v, train.rows(), train.cols());
    h.e0 = cfg.e0;
    h.f0 = cfg.f0;
    if (v == Variant::cepm) {
      if (cfg.C1) h.C1 = *cfg.C1;
      if (cfg.C2) h.C2 = *cfg.C2;
      h.b1 = h.C1 * h.a1;
      h.b2 = h.C2 * h.a2;
    }
    TruncatedState s = init_state(train, T, h, std::move(rng));
    for (int it = 0; it < cfg.iterations; ++it) {
      const auto t0 = clock::now();
      gibbs_sweep(s, train);
      elapsed += std::chrono::duration<double>(clock::now() - t0).count();
      record(it, count_active_atoms(s), scored ? predict(s, test) : std::vector<double>{});
    }
  }

  res.seconds = elapsed;
  res.report.label = trace_file_name(cfg.model, res.T, -1);
  res.report.k_mean = k_sum / cfg.retained;
  res.report.tdll = kNaN;
  res.report.tdauc_pr = kNaN;
  if (scored) {
    const PredictiveEnsemble ens = window.ensemble();
    res.report.tdll = tdll(ens, test, cfg.tdll_mode);
    if (std::any_of(labels.begin(), labels.end(), [](auto v) { return v != 0; })) {
      const auto m = ens.mean();
      res.report.tdauc_pr = pr_auc(m, labels);
    }
  }
  return res;
}

BinaryMatrix load_dataset(const ExperimentConfig& cfg) {
  if (!cfg.dataset.empty()) return load_edge_list_file(cfg.dataset);
  return make_synthetic_blocks(SyntheticSpec::parse(cfg.synthetic)).matrix;
}

std::string trace_file_name(const std::string& model, int T, int fold) {
  std::string name = "trace_" + model;
  if (model != "idepm") name += "_T" + std::to_string(T);
  if (fold >= 0) name += "_fold" + std::to_string(fold);
  return name + ".csv";
}

std::pair<double, double> mean_se(const std::vector<double>& values) {
  if (values.empty()) return {kNaN, kNaN};
  double m = 0.0;
  for (double v : values) m += v;
  m /= static_cast<double>(values.size());
  if (values.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double n = static_cast<double>(values.size());
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

double convergence_time(const std::vector<TraceRow>& trace, int window, double tol, int tail) {
  const int n = static_cast<int>(trace.size());
  if (n == 0 || std::isnan(trace.back().tdll_sample)) return kNaN;
  tail = std::min(tail, n);
  double target = 0.0;
  for (int i = n - tail; i < n; ++i) target += trace[i].tdll_sample;
  target /= tail;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += trace[i].tdll_sample;
    if (i >= window) sum -= trace[i - window].tdll_sample;
    if (i + 1 < window) continue;
    if (std::abs(sum / window - target) <= tol) return trace[i].elapsed_s;
  }
  return trace.back().elapsed_s;
}

std::vector<ChainResult> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const BinaryMatrix data = load_dataset(cfg);
  const Rng root(cfg.seed);
  Rng fold_rng = root.split(1);
  const auto folds = make_cv_folds(data, cfg.folds, fold_rng);
  const int n_folds = cfg.max_folds > 0 ? cfg.max_folds : cfg.folds;
  const std::vector<int> ts = cfg.is_idepm() ? std::vector<int>{0} : cfg.truncations;

  struct Job {
    int T;
    int fold;
  };
  std::vector<Job> jobs;
  for (int t : ts) {
    for (int f = 0; f < n_folds; ++f) jobs.push_back({t, f});
  }
  std::vector<ChainResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      try {
        const auto& job = jobs[j];
        const auto& split = folds[static_cast<std::size_t>(job.fold)];
        Rng rng = root.split(2).split(static_cast<std::uint64_t>(job.fold)).split(
            static_cast<std::uint64_t>(job.T));
        results[j] = run_chain(split.train, split.test, cfg, job.T, std::move(rng));
        results[j].fold = job.fold;
        results[j].report.label = trace_file_name(cfg.model, results[j].T, job.fold);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);

  if (cfg.output_dir.empty()) return results;
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  for (const auto& r : results) {
    std::ofstream out(dir / r.report.label);
    write_trace_csv(out, r.report);
    if (!out) throw std::runtime_error("cannot write " + (dir / r.report.label).string());
  }
  {
    std::ofstream out(dir / "summary.csv");
    out << "model,T,fold,K_mean,TDLL,TDAUC_PR,seconds\n";
    for (std::size_t b = 0; b < results.size(); b += static_cast<std::size_t>(n_folds)) {
      std::vector<double> k, ll, auc, sec;
      for (int f = 0; f < n_folds; ++f) {
        const auto& r = results[b + static_cast<std::size_t>(f)];
        out << r.model << ',' << r.T << ',' << r.fold << ',' << fmt6(r.report.k_mean) << ','
            << fmt6(r.report.tdll) << ',' << fmt6(r.report.tdauc_pr) << ',' << fmt6(r.seconds)
            << '\n';
        k.push_back(r.report.k_mean);
        ll.push_back(r.report.tdll);
        auc.push_back(r.report.tdauc_pr);
        sec.push_back(r.seconds);
      }
      const auto& r0 = results[b];
      const auto [km, kse] = mean_se(k);
      const auto [lm, lse] = mean_se(ll);
      const auto [am, ase] = mean_se(auc);
      const auto [sm, sse] = mean_se(sec);
      out << r0.model << ',' << r0.T << ",mean," << fmt6(km) << ',' << fmt6(lm) << ','
          << fmt6(am) << ',' << fmt6(sm) << '\n';
      out << r0.model << ',' << r0.T << ",se," << fmt6(kse) << ',' << fmt6(lse) << ','
          << fmt6(ase) << ',' << fmt6(sse) << '\n';
    }
  }
  {
    std::ofstream out(dir / "config.txt");
    out << cfg.serialize();
  }
  {
    nlohmann::ordered_json meta;
    meta["rows"] = data.rows();
    meta["cols"] = data.cols();
    meta["ones"] = data.nnz();
    meta["density"] = data.density();
    meta["source"] = cfg.dataset.empty() ? "synthetic:" + cfg.synthetic : cfg.dataset;
    meta["folds_run"] = n_folds;
    std::ofstream out(dir / "metadata.json");
    out << meta.dump(2) << '\n';
  }
  return results;
}

SyntheticData gen_dataset(const SyntheticSpec& spec, const std::string& path) {
  spec.validate();
  SyntheticData data = make_synthetic_blocks(spec);
  save_edge_list_file(path, data.matrix);
  std::ofstream meta(path + ".meta.json");
  meta << synthetic_metadata_json(data) << '\n';
  if (!meta) throw std::runtime_error("cannot write " + path + ".meta.json");
  return data;
}

BinaryMatrix convert_ratings(const std::string& in_path, const std::string& out_path,
                             double threshold, LoadStats* stats) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  BinaryMatrix m = load_ratings(in, threshold, stats);
  save_edge_list_file(out_path, m);
  return m;
}

}  // namespace epm
