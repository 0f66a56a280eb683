/* Copyright 2026 The airgraph Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>
#include <string>
#include <vector>

#include "airgraph/cli.hpp"
#include "airgraph/config.hpp"
#include "airgraph/dataio.hpp"
#include "airgraph/error.hpp"
#include "airgraph/featurize.hpp"
#include "airgraph/geograph.hpp"
#include "airgraph/metrics.hpp"

namespace py = pybind11;
using namespace airgraph;

namespace {

py::array_t<double> to_numpy(const num::Tensor<double>& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<double> out(shape);
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

std::vector<double> flat(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the airgraph PM2.5 forecasting toolkit";
  m.attr("__version__") = cfg::kVersion;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<TrainingAborted>(m, "TrainingAborted", base.ptr());

  py::class_<geo::City>(m, "City")
      .def(py::init([](std::size_t id, std::string name, double lat, double lon, double altitude) {
             return geo::City{id, std::move(name), lat, lon, altitude};
           }),
           py::arg("id"), py::arg("name"), py::arg("lat"), py::arg("lon"), py::arg("altitude") = 0.0)
      .def_readwrite("id", &geo::City::id)
      .def_readwrite("name", &geo::City::name)
      .def_readwrite("lat", &geo::City::lat)
      .def_readwrite("lon", &geo::City::lon)
      .def_readwrite("altitude", &geo::City::altitude)
      .def("__repr__", [](const geo::City& c) {
        std::ostringstream s;
        s << "City(" << c.id << ", '" << c.name << "', " << c.lat << ", " << c.lon << ", " << c.altitude << ")";
        return s.str();
      });

  py::class_<geo::ElevationGrid>(m, "ElevationGrid")
      .def(py::init([](double lat0, double lon0, double dlat, double dlon,
                       const py::array_t<double, py::array::c_style | py::array::forcecast>& heights) {
             if (heights.ndim() != 2) throw ShapeError("heights must be a 2-D array");
             return geo::ElevationGrid(lat0, lon0, dlat, dlon, heights.shape(0), heights.shape(1), flat(heights));
           }),
           py::arg("lat0"), py::arg("lon0"), py::arg("dlat"), py::arg("dlon"), py::arg("heights"))
      .def("height_at", &geo::ElevationGrid::height_at, py::arg("lat"), py::arg("lon"))
      .def_property_readonly("shape", [](const geo::ElevationGrid& g) { return py::make_tuple(g.nrows(), g.ncols()); });

  py::class_<geo::GraphTopology>(m, "GraphTopology")
      .def_property_readonly("num_nodes", &geo::GraphTopology::num_nodes)
      .def_property_readonly("num_edges", &geo::GraphTopology::num_edges)
      .def_property_readonly("edges", [](const geo::GraphTopology& t) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& e : t.edges) out.emplace_back(e.src, e.dst);
        return out;
      })
      .def_readonly("dist_km", &geo::GraphTopology::dist_km)
      .def_readonly("bearing_deg", &geo::GraphTopology::bearing_deg);

  m.def("haversine_km", py::overload_cast<double, double, double, double>(&geo::haversine_km),
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));
  m.def("bearing_deg", &geo::bearing_deg, py::arg("a"), py::arg("b"));
  m.def("ridge_height", &geo::ridge_height, py::arg("grid"), py::arg("a"), py::arg("b"),
        py::arg("n_samples") = geo::kDefaultRidgeSamples);
  m.def("build_adjacency", &geo::build_adjacency, py::arg("cities"), py::arg("grid"),
        py::arg("d_theta_km") = geo::kDefaultDistanceThresholdKm,
        py::arg("m_theta_m") = geo::kDefaultRidgeThresholdM,
        py::arg("n_samples") = geo::kDefaultRidgeSamples);

  m.def(
      "advection_coefficient",
      [](double u, double v, double dist_km, double bearing, const std::string& convention) {
        return feat::advection_coefficient(u, v, dist_km, bearing, feat::parse_wind_convention(convention))
            .coefficient;
      },
      py::arg("u_ms"), py::arg("v_ms"), py::arg("dist_km"), py::arg("edge_bearing_deg"),
      py::arg("convention") = "toward");

  m.def(
      "rmse_mae",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pred,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& truth) {
        const auto r = metrics::rmse_mae(flat(pred), flat(truth));
        return py::make_tuple(r.rmse, r.mae);
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "csi_pod_far",
      [](std::uint64_t hits, std::uint64_t misses, std::uint64_t false_alarms, std::uint64_t correct_negatives) {
        const auto s = metrics::csi_pod_far({hits, misses, false_alarms, correct_negatives});
        py::dict d;
        d["csi"] = s.csi;
        d["pod"] = s.pod;
        d["far"] = s.far;
        return d;
      },
      py::arg("hits"), py::arg("misses"), py::arg("false_alarms"), py::arg("correct_negatives"));

  m.def(
      "load_dataset",
      [](const std::filesystem::path& dir) {
        const io::Dataset ds = io::load_dataset(dir);
        py::dict d;
        d["name"] = ds.manifest.name;
        d["t0"] = ds.manifest.t0;
        d["step_seconds"] = ds.manifest.step_seconds;
        d["meteo_features"] = ds.manifest.meteo_features;
        d["cities"] = ds.cities;
        d["pm25"] = to_numpy(ds.pm25);
        d["meteo"] = to_numpy(ds.meteo);
        return d;
      },
      py::arg("directory"), "Reads and verifies a dataset directory; arrays are [T, N] and [T, N, 8].");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "airgraph");
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one command-line invocation; returns (exit_code, stdout, stderr).");
}
