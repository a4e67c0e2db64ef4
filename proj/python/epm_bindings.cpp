#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "epm/experiment.hpp"
#include "epm/marginal.hpp"
#include "epm/oracle.hpp"

namespace py = pybind11;
using namespace epm;

namespace {

std::vector<TestEntry> to_entries(const std::vector<std::tuple<int, int, int>>& test) {
  std::vector<TestEntry> out;
  out.reserve(test.size());
  for (const auto& [i, j, v] : test) {
    out.push_back({i, j, static_cast<std::uint8_t>(v != 0)});
  }
  return out;
}

py::array_t<double> trace_array(const std::vector<TraceRow>& trace) {
  py::array_t<double> a({static_cast<py::ssize_t>(trace.size()), py::ssize_t{5}});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t r = 0; r < trace.size(); ++r) {
    const auto& t = trace[r];
    const auto i = static_cast<py::ssize_t>(r);
    m(i, 0) = t.iteration;
    m(i, 1) = t.elapsed_s;
    m(i, 2) = t.active_atoms;
    m(i, 3) = t.tdll_running;
    m(i, 4) = t.tdll_sample;
  }
  return a;
}

py::dict chain_dict(const ChainResult& r) {
  py::dict d;
  d["model"] = r.model;
  d["T"] = r.T;
  d["fold"] = r.fold;
  d["k_mean"] = r.report.k_mean;
  d["tdll"] = r.report.tdll;
  d["tdauc_pr"] = r.report.tdauc_pr;
  d["seconds"] = r.seconds;
  d["trace"] = trace_array(r.report.trace);
  return d;
}

py::list checks_list(const std::vector<ExpectationCheck>& checks) {
  py::list out;
  for (const auto& c : checks) {
    py::dict d;
    d["name"] = c.name;
    d["analytic"] = c.analytic;
    d["estimate"] = c.estimate;
    d["se"] = c.se;
    d["z"] = c.z();
    d["pass"] = c.pass;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge partition models for binary matrices";

  py::class_<BinaryMatrix>(m, "BinaryMatrix")
      .def(py::init<int, int>())
      .def(py::init([](int rows, int cols, const std::vector<std::pair<int, int>>& ones) {
             std::vector<Cell> cells;
             cells.reserve(ones.size());
             for (const auto& [i, j] : ones) cells.push_back({i, j});
             return BinaryMatrix(rows, cols, std::move(cells));
           }),
           py::arg("rows"), py::arg("cols"), py::arg("ones"))
      .def_static("from_dense",
                  [](py::array_t<double, py::array::c_style | py::array::forcecast> a) {
                    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
                    auto v = a.unchecked<2>();
                    std::vector<Cell> cells;
                    for (py::ssize_t i = 0; i < v.shape(0); ++i)
                      for (py::ssize_t j = 0; j < v.shape(1); ++j)
                        if (v(i, j) != 0.0) cells.push_back({static_cast<int>(i), static_cast<int>(j)});
                    return BinaryMatrix(static_cast<int>(v.shape(0)), static_cast<int>(v.shape(1)),
                                        std::move(cells));
                  })
      .def("to_dense",
           [](const BinaryMatrix& x) {
             py::array_t<std::uint8_t> a({x.rows(), x.cols()});
             std::fill(a.mutable_data(), a.mutable_data() + a.size(), 0);
             auto v = a.mutable_unchecked<2>();
             for (const auto& c : x.ones()) v(c.row, c.col) = 1;
             return a;
           })
      .def_property_readonly("rows", &BinaryMatrix::rows)
      .def_property_readonly("cols", &BinaryMatrix::cols)
      .def_property_readonly("nnz", &BinaryMatrix::nnz)
      .def_property_readonly("density", &BinaryMatrix::density)
      .def("ones",
           [](const BinaryMatrix& x) {
             std::vector<std::pair<int, int>> out;
             for (const auto& c : x.ones()) out.emplace_back(c.row, c.col);
             return out;
           })
      .def("__getitem__", [](const BinaryMatrix& x, std::pair<int, int> ij) { return x.at(ij.first, ij.second); })
      .def("__eq__", [](const BinaryMatrix& a, const BinaryMatrix& b) { return a == b; })
      .def("__repr__", [](const BinaryMatrix& x) {
        return "BinaryMatrix(" + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + ", nnz=" +
               std::to_string(x.nnz()) + ")";
      });

  m.def("load_edge_list", [](const std::string& path) { return load_edge_list_file(path); });
  m.def("save_edge_list", &save_edge_list_file, py::arg("path"), py::arg("matrix"));
  m.def(
      "synthetic",
      [](const std::string& spec) {
        return make_synthetic_blocks(spec == "blocks" ? SyntheticSpec::standard() : SyntheticSpec::parse(spec)).matrix;
      },
      py::arg("spec") = "blocks", "Block-structured synthetic matrix from a spec string.");

  m.def(
      "cv_folds",
      [](const BinaryMatrix& x, int folds, std::uint64_t seed) {
        Rng rng(seed);
        py::list out;
        for (auto& f : make_cv_folds(x, folds, rng)) {
          std::vector<std::tuple<int, int, int>> test;
          for (const auto& e : f.test) test.emplace_back(e.row, e.col, e.value);
          out.append(py::make_tuple(std::move(f.train), test));
        }
        return out;
      },
      py::arg("matrix"), py::arg("folds") = 10, py::arg("seed") = 1);

  m.def(
      "tdll",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> probs,
         const std::vector<std::tuple<int, int, int>>& test, const std::string& mode) {
        if (probs.ndim() != 2 || static_cast<std::size_t>(probs.shape(1)) != test.size())
          throw std::invalid_argument("probs must be samples x entries");
        PredictiveEnsemble ens(test.size());
        for (py::ssize_t s = 0; s < probs.shape(0); ++s) {
          ens.add_sample({probs.data(s, 0), test.size()});
        }
        const auto entries = to_entries(test);
        return tdll(ens, entries, mode == "mean_log" ? TdllMode::mean_log : TdllMode::mean_probability);
      },
      py::arg("probs"), py::arg("test"), py::arg("mode") = "mean_probability");

  m.def(
      "pr_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        std::vector<std::uint8_t> l(labels.begin(), labels.end());
        return pr_auc(scores, l);
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "log_marginal_likelihood",
      [](int rows, int cols, const std::vector<std::vector<std::tuple<int, int, std::int64_t>>>& atoms,
         double alpha1, double alpha2, double gamma0, double c0, std::int64_t T) {
        CountTable t{rows, cols, {}};
        for (const auto& a : atoms) {
          auto& dst = t.atoms.emplace_back();
          for (const auto& [i, j, n] : a) dst.push_back({i, j, static_cast<count_t>(n)});
        }
        IdepmHypers h;
        h.alpha1 = alpha1;
        h.alpha2 = alpha2;
        h.gamma0 = gamma0;
        h.c0 = c0;
        return T > 0 ? log_marginal_likelihood_truncated(t, T, h) : log_marginal_likelihood(t, h);
      },
      py::arg("rows"), py::arg("cols"), py::arg("atoms"), py::arg("alpha1") = 1.0, py::arg("alpha2") = 1.0,
      py::arg("gamma0") = 1.0, py::arg("c0") = 1.0, py::arg("T") = 0);

  m.def(
      "run_chain",
      [](const BinaryMatrix& train, const std::vector<std::tuple<int, int, int>>& test,
         const std::string& config, int T, std::uint64_t seed) {
        auto cfg = ExperimentConfig::parse(config);
        cfg.validate();
        const auto entries = to_entries(test);
        ChainResult r;
        {
          py::gil_scoped_release release;
          r = run_chain(train, entries, cfg, T, Rng(seed));
        }
        return chain_dict(r);
      },
      py::arg("train"), py::arg("test"), py::arg("config") = "", py::arg("T") = 128, py::arg("seed") = 1);

  m.def(
      "run_experiment",
      [](const std::string& config) {
        auto cfg = ExperimentConfig::parse(config);
        std::vector<ChainResult> results;
        {
          py::gil_scoped_release release;
          results = run_experiment(cfg);
        }
        py::list out;
        for (const auto& r : results) out.append(chain_dict(r));
        return out;
      },
      py::arg("config"));

  m.def("canonical_config", [](const std::string& config) { return ExperimentConfig::parse(config).serialize(); });

  m.def(
      "expectation_suite",
      [](std::int64_t n, std::uint64_t seed, int settings) {
        Rng rng(seed);
        return checks_list(expectation_suite(n, rng, settings));
      },
      py::arg("n"), py::arg("seed") = 1, py::arg("settings") = 5);
  m.def(
      "moment_suite",
      [](std::int64_t n, std::uint64_t seed) {
        Rng rng(seed);
        return checks_list(moment_suite(n, rng));
      },
      py::arg("n"), py::arg("seed") = 1);
}
