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

// Dataset directories, the KNT1 tensor format and split definitions.
//
// A dataset directory holds:
//   manifest.json   name, sizes, t0, step, feature names, sha256 per file
//   nodes.csv       id,name,lat,lon,altitude
//   elevation.grid  "lat0 lon0 dlat dlon nrows ncols" then nrows rows
//   meteo.knt       [T, N, 8] raw meteorology
//   pm25.knt        [T, N] concentrations in ug/m3 (NaN = missing)
//
// KNT1: "KNT1", u32 dtype (0 = f32, 1 = f64), u32 rank, rank x u64 dims,
// row-major payload. Everything little-endian.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "airgraph/featurize.hpp"
#include "airgraph/geograph.hpp"
#include "airgraph/tensor.hpp"

namespace airgraph::io {

enum class Dtype : std::uint32_t { kF32 = 0, kF64 = 1 };

struct KntBlob {
  Dtype dtype = Dtype::kF64;
  num::Shape shape;
  std::vector<double> values;  // widened from f32 when needed (exact)
};

std::string encode_knt(const num::Tensor<double>& tensor, Dtype dtype = Dtype::kF64);
std::string encode_knt(const num::Tensor<float>& tensor);
KntBlob decode_knt(std::string_view bytes, std::string_view what = "tensor");

void write_knt(const std::filesystem::path& path, const num::Tensor<double>& tensor,
               Dtype dtype = Dtype::kF64);
KntBlob read_knt(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

inline constexpr int kDatasetFormatVersion = 1;

struct DatasetManifest {
  std::string name;
  std::size_t n_cities = 0;
  std::size_t n_timesteps = 0;
  std::int64_t t0 = 0;  // epoch seconds, UTC
  std::int64_t step_seconds = feat::kStepSeconds;
  std::vector<std::string> meteo_features;
  std::map<std::string, std::string> checksums;  // file name -> sha256 hex

  std::int64_t end_epoch() const {
    return t0 + static_cast<std::int64_t>(n_timesteps) * step_seconds;
  }
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<geo::City> cities;
  geo::ElevationGrid grid;
  num::Tensor<double> meteo;  // [T, N, 8]
  num::Tensor<double> pm25;   // [T, N]
};

// Fills manifest sizes and checksums from the payload.
void save_dataset(const std::filesystem::path& dir, Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

// Forward-fills runs of at most `max_gap` missing (NaN) values per city;
// longer gaps stay NaN. Returns the number of values filled.
std::size_t fill_short_gaps(num::Tensor<double>& pm25, std::size_t max_gap = 2);

// "YYYY-MM-DD" with optional "THH:MM[:SS]" and optional trailing "Z".
std::int64_t parse_iso8601_utc(std::string_view text);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

using EpochInterval = std::pair<std::int64_t, std::int64_t>;  // [start, end)

struct SplitSpec {
  std::vector<EpochInterval> train;
  std::vector<EpochInterval> validate;
  std::vector<EpochInterval> test;
};

struct ResolvedSplits {
  std::vector<feat::IndexRange> train;
  std::vector<feat::IndexRange> validate;
  std::vector<feat::IndexRange> test;
};

SplitSpec read_splits_json(const std::filesystem::path& path);
void write_splits_json(const std::filesystem::path& path, const SplitSpec& splits);

// Epoch ranges to step ranges, inclusive start and exclusive end (both
// rounded up to the next step). Throws DataError for empty, out-of-range or
// overlapping intervals.
ResolvedSplits resolve_splits(const DatasetManifest& manifest, const SplitSpec& splits);

// Contiguous train:validate:test split by step count.
SplitSpec ratio_splits(const DatasetManifest& manifest, double train, double validate, double test);

}  // namespace airgraph::io
