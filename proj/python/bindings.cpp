#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cogload/baseline.hpp"
#include "cogload/cli.hpp"
#include "cogload/data.hpp"
#include "cogload/decode.hpp"
#include "cogload/encoder.hpp"
#include "cogload/error.hpp"
#include "cogload/eval.hpp"
#include "cogload/quant.hpp"

namespace py = pybind11;
using namespace cogload;

namespace {

std::vector<std::vector<int>> raster_rows(const SpikeRaster& r) {
  std::vector<std::vector<int>> rows(r.units(), std::vector<int>(r.steps(), 0));
  for (std::size_t u = 0; u < r.units(); ++u) {
    for (std::size_t t = 0; t < r.steps(); ++t) rows[u][t] = r.at(u, t) ? 1 : 0;
  }
  return rows;
}

MatrixD to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  MatrixD m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DataError("ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_cogload, m) {
  m.doc() = "Spiking cognitive-load classification core";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  m.def(
      "encode",
      [](const std::vector<double>& x, double tau, double gain) {
        LifEncoderParams p;
        p.tau = tau;
        p.gain = gain;
        return raster_rows(encode(x, p));
      },
      py::arg("features"), py::arg("tau") = 31.0, py::arg("gain") = kDefaultEncoderGain);

  m.def(
      "quantize_int3",
      [](const std::vector<std::vector<double>>& w) {
        const auto q = quantize_int3(to_matrix(w));
        std::vector<std::vector<int>> rows(q.w_int.rows());
        for (std::size_t r = 0; r < q.w_int.rows(); ++r) {
          const auto row = q.w_int.row(r);
          rows[r].assign(row.begin(), row.end());
        }
        return py::make_tuple(rows, q.scale);
      },
      py::arg("w"));

  m.def(
      "classify_burst",
      [](const std::vector<double>& rates0, const std::vector<double>& rates1,
         std::pair<int, int> totals, double zero, double diff, double offset, double step,
         double limit) {
        RateWindows rw;
        rw.rates = {rates0, rates1};
        rw.total_spikes = {totals.first, totals.second};
        DecoderThresholds th{zero, diff, offset, step, limit};
        th.validate();
        return classify_burst(rw, th);
      },
      py::arg("rates0"), py::arg("rates1"), py::arg("total_spikes") = std::pair<int, int>{0, 0},
      py::arg("zero") = 1.0, py::arg("diff") = 20.0, py::arg("offset") = 10.0,
      py::arg("offset_step") = 10.0, py::arg("limit") = 100.0);

  m.def(
      "metrics",
      [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
        const auto r = compute_metrics(y_true, y_pred);
        py::dict d;
        d["accuracy"] = r.accuracy;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        d["f1"] = r.f1;
        d["confusion"] = r.confusion;
        return d;
      },
      py::arg("y_true"), py::arg("y_pred"));

  m.def(
      "synthetic",
      [](std::size_t n, double separation, std::uint64_t seed) {
        const auto ds = generate_synthetic(n, separation, seed);
        std::vector<std::vector<double>> x;
        for (const auto& r : ds.records) x.emplace_back(r.features.begin(), r.features.end());
        return py::make_tuple(x, ds.labels());
      },
      py::arg("n"), py::arg("separation"), py::arg("seed"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
