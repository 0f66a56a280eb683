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

#include "airgraph/dataio.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "airgraph/error.hpp"
#include "airgraph/textio.hpp"

namespace airgraph::io {

namespace {

using Kind = DataError::Kind;

constexpr char kMagic[4] = {'K', 'N', 'T', '1'};

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename U>
U get_le(std::string_view bytes, std::size_t offset) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

std::string knt_header(Dtype dtype, const num::Shape& shape) {
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dtype));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t d : shape) put_le<std::uint64_t>(out, d);
  return out;
}

const char* kFiles[] = {"nodes.csv", "elevation.grid", "meteo.knt", "pm25.knt"};

}  // namespace

std::string encode_knt(const num::Tensor<double>& tensor, Dtype dtype) {
  std::string out = knt_header(dtype, tensor.shape());
  for (double v : tensor.data()) {
    if (dtype == Dtype::kF64) {
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    } else {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

std::string encode_knt(const num::Tensor<float>& tensor) {
  std::string out = knt_header(Dtype::kF32, tensor.shape());
  for (float v : tensor.data()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

KntBlob decode_knt(std::string_view bytes, std::string_view what) {
  const std::string name(what);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError(Kind::kHeaderInconsistency, name + ": missing KNT1 header");
  }
  KntBlob blob;
  const std::uint32_t dtype = get_le<std::uint32_t>(bytes, 4);
  if (dtype > 1) throw DataError(Kind::kHeaderInconsistency, name + ": unknown dtype code");
  blob.dtype = static_cast<Dtype>(dtype);
  const std::uint32_t rank = get_le<std::uint32_t>(bytes, 8);
  std::size_t offset = 12;
  if (rank > 16 || bytes.size() < offset + 8ull * rank) {
    throw DataError(Kind::kHeaderInconsistency, name + ": truncated shape header");
  }
  std::size_t count = 1;
  for (std::uint32_t r = 0; r < rank; ++r) {
    const std::uint64_t d = get_le<std::uint64_t>(bytes, offset);
    offset += 8;
    if (d != 0 && count > (std::size_t{1} << 40) / d) {
      throw DataError(Kind::kHeaderInconsistency, name + ": implausible shape");
    }
    blob.shape.push_back(static_cast<std::size_t>(d));
    count *= static_cast<std::size_t>(d);
  }
  const std::size_t width = blob.dtype == Dtype::kF64 ? 8 : 4;
  if (bytes.size() != offset + count * width) {
    throw DataError(Kind::kHeaderInconsistency,
                    name + ": payload holds " + std::to_string(bytes.size() - offset) +
                        " bytes, header " + num::shape_str(blob.shape) + " needs " +
                        std::to_string(count * width));
  }
  blob.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (width == 8) {
      blob.values[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, offset + 8 * i));
    } else {
      blob.values[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset + 4 * i));
    }
  }
  return blob;
}

void write_knt(const std::filesystem::path& path, const num::Tensor<double>& tensor, Dtype dtype) {
  text::write_file_atomic(path, encode_knt(tensor, dtype));
}

KntBlob read_knt(const std::filesystem::path& path) {
  return decode_knt(text::read_file(path), path.string());
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

void save_dataset(const std::filesystem::path& dir, Dataset& ds) {
  std::filesystem::create_directories(dir);
  const std::size_t n = ds.cities.size();
  if (ds.meteo.rank() != 3 || ds.meteo.dim(1) != n || ds.meteo.dim(2) != feat::kMeteoFeatures) {
    throw ShapeError("save_dataset: meteorology shape " + num::shape_str(ds.meteo.shape()) +
                     " does not fit " + std::to_string(n) + " cities");
  }
  if (ds.pm25.rank() != 2 || ds.pm25.dim(0) != ds.meteo.dim(0) || ds.pm25.dim(1) != n) {
    throw ShapeError("save_dataset: pm25 shape " + num::shape_str(ds.pm25.shape()) +
                     " does not match meteorology");
  }
  geo::write_nodes_csv(dir / "nodes.csv", ds.cities);
  geo::write_elevation_grid(dir / "elevation.grid", ds.grid);
  write_knt(dir / "meteo.knt", ds.meteo);
  write_knt(dir / "pm25.knt", ds.pm25);

  DatasetManifest& m = ds.manifest;
  m.n_cities = n;
  m.n_timesteps = ds.meteo.dim(0);
  m.meteo_features.assign(feat::meteo_feature_names().begin(), feat::meteo_feature_names().end());
  m.checksums.clear();
  for (const char* f : kFiles) m.checksums[f] = sha256_hex(text::read_file(dir / f));

  nlohmann::json j;
  j["format_version"] = kDatasetFormatVersion;
  j["name"] = m.name;
  j["n_cities"] = m.n_cities;
  j["n_timesteps"] = m.n_timesteps;
  j["t0"] = m.t0;
  j["t0_iso"] = format_iso8601_utc(m.t0);
  j["step_seconds"] = m.step_seconds;
  j["meteo_features"] = m.meteo_features;
  j["checksums"] = m.checksums;
  text::write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(Kind::kHeaderInconsistency, manifest_path.string() + ": " + e.what());
  }
  Dataset ds;
  DatasetManifest& m = ds.manifest;
  try {
    if (j.at("format_version").get<int>() != kDatasetFormatVersion) {
      throw DataError(Kind::kVersionMismatch,
                      manifest_path.string() + ": unsupported dataset format version " +
                          j.at("format_version").dump());
    }
    m.name = j.at("name").get<std::string>();
    m.n_cities = j.at("n_cities").get<std::size_t>();
    m.n_timesteps = j.at("n_timesteps").get<std::size_t>();
    m.t0 = j.at("t0").get<std::int64_t>();
    m.step_seconds = j.at("step_seconds").get<std::int64_t>();
    m.meteo_features = j.at("meteo_features").get<std::vector<std::string>>();
    m.checksums = j.at("checksums").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(Kind::kHeaderInconsistency, manifest_path.string() + ": " + e.what());
  }
  if (m.step_seconds != feat::kStepSeconds) {
    throw DataError(Kind::kValidation, manifest_path.string() + ": step_seconds must be 10800");
  }

  std::map<std::string, std::string> bodies;
  for (const char* f : kFiles) bodies[f] = text::read_file(dir / f);

  // Structure first, so a truncated file reports as such rather than as a
  // checksum failure.
  const KntBlob meteo = decode_knt(bodies["meteo.knt"], (dir / "meteo.knt").string());
  const KntBlob pm25 = decode_knt(bodies["pm25.knt"], (dir / "pm25.knt").string());
  const num::Shape meteo_shape{m.n_timesteps, m.n_cities, feat::kMeteoFeatures};
  const num::Shape pm25_shape{m.n_timesteps, m.n_cities};
  if (meteo.shape != meteo_shape) {
    throw DataError(Kind::kHeaderInconsistency,
                    "meteo.knt: shape " + num::shape_str(meteo.shape) + " but manifest implies " +
                        num::shape_str(meteo_shape));
  }
  if (pm25.shape != pm25_shape) {
    throw DataError(Kind::kHeaderInconsistency,
                    "pm25.knt: shape " + num::shape_str(pm25.shape) + " but manifest implies " +
                        num::shape_str(pm25_shape));
  }
  for (const char* f : kFiles) {
    const auto it = m.checksums.find(f);
    if (it == m.checksums.end()) {
      throw DataError(Kind::kHeaderInconsistency, manifest_path.string() + ": no checksum for " + f);
    }
    if (sha256_hex(bodies[f]) != it->second) {
      throw DataError(Kind::kChecksumMismatch, (dir / f).string() + ": checksum mismatch");
    }
  }

  ds.cities = geo::read_nodes_csv(dir / "nodes.csv");
  if (ds.cities.size() != m.n_cities) {
    throw DataError(Kind::kValidation, "nodes.csv has " + std::to_string(ds.cities.size()) +
                                           " rows but the manifest declares " +
                                           std::to_string(m.n_cities) + " cities");
  }
  ds.grid = geo::read_elevation_grid(dir / "elevation.grid");
  ds.meteo = num::Tensor<double>(meteo.shape, meteo.values);
  ds.pm25 = num::Tensor<double>(pm25.shape, pm25.values);
  return ds;
}

std::size_t fill_short_gaps(num::Tensor<double>& pm25, std::size_t max_gap) {
  const std::size_t steps = pm25.dim(0), cities = pm25.dim(1);
  auto x = pm25.mutable_data();
  std::size_t filled = 0;
  for (std::size_t c = 0; c < cities; ++c) {
    std::size_t t = 0;
    while (t < steps) {
      if (!std::isnan(x[t * cities + c])) {
        ++t;
        continue;
      }
      std::size_t end = t;
      while (end < steps && std::isnan(x[end * cities + c])) ++end;
      if (t > 0 && end - t <= max_gap) {
        const double last = x[(t - 1) * cities + c];
        for (std::size_t k = t; k < end; ++k) x[k * cities + c] = last;
        filled += end - t;
      }
      t = end;
    }
  }
  return filled;
}

std::int64_t parse_iso8601_utc(std::string_view s) {
  const std::string text(s);
  const auto bad = [&]() -> std::int64_t {
    throw ConfigError("cannot parse '" + text + "' as an ISO-8601 UTC date");
  };
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return bad();
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  try {
    y = static_cast<int>(text::parse_int(s.substr(0, 4), "year"));
    mo = static_cast<int>(text::parse_int(s.substr(5, 2), "month"));
    d = static_cast<int>(text::parse_int(s.substr(8, 2), "day"));
    std::string_view rest = s.substr(10);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    if (!rest.empty()) {
      if ((rest[0] != 'T' && rest[0] != ' ') || (rest.size() != 6 && rest.size() != 9) ||
          rest[3] != ':') {
        return bad();
      }
      hh = static_cast<int>(text::parse_int(rest.substr(1, 2), "hour"));
      mm = static_cast<int>(text::parse_int(rest.substr(4, 2), "minute"));
      if (rest.size() == 9) {
        if (rest[6] != ':') return bad();
        ss = static_cast<int>(text::parse_int(rest.substr(7, 2), "second"));
      }
    }
  } catch (const DataError&) {
    return bad();
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59 || hh < 0 || mm < 0 || ss < 0) return bad();
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
  using namespace std::chrono;
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t secs = epoch_seconds % 86400;
  if (secs < 0) {
    secs += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

namespace {

std::vector<EpochInterval> parse_intervals(const nlohmann::json& j, const std::string& key,
                                           const std::string& file) {
  if (!j.contains(key)) throw DataError(Kind::kValidation, file + ": missing split '" + key + "'");
  std::vector<EpochInterval> out;
  for (const auto& pair : j.at(key)) {
    if (!pair.is_array() || pair.size() != 2) {
      throw DataError(Kind::kHeaderInconsistency, file + ": split '" + key +
                                                      "' entries must be [start, end] pairs");
    }
    out.emplace_back(parse_iso8601_utc(pair[0].get<std::string>()),
                     parse_iso8601_utc(pair[1].get<std::string>()));
  }
  return out;
}

nlohmann::json dump_intervals(const std::vector<EpochInterval>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [a, b] : v) out.push_back({format_iso8601_utc(a), format_iso8601_utc(b)});
  return out;
}

}  // namespace

SplitSpec read_splits_json(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(Kind::kHeaderInconsistency, path.string() + ": " + e.what());
  }
  SplitSpec s;
  s.train = parse_intervals(j, "train", path.string());
  s.validate = parse_intervals(j, "validate", path.string());
  s.test = parse_intervals(j, "test", path.string());
  return s;
}

void write_splits_json(const std::filesystem::path& path, const SplitSpec& splits) {
  nlohmann::json j;
  j["train"] = dump_intervals(splits.train);
  j["validate"] = dump_intervals(splits.validate);
  j["test"] = dump_intervals(splits.test);
  text::write_file_atomic(path, j.dump(2) + "\n");
}

ResolvedSplits resolve_splits(const DatasetManifest& m, const SplitSpec& splits) {
  const auto to_index = [&](std::int64_t epoch) {
    const std::int64_t rel = epoch - m.t0;
    return static_cast<std::size_t>((rel + m.step_seconds - 1) / m.step_seconds);
  };
  const auto resolve = [&](const std::vector<EpochInterval>& in, const char* name) {
    if (in.empty()) throw DataError(Kind::kValidation, std::string("split '") + name + "' is empty");
    std::vector<feat::IndexRange> out;
    for (const auto& [start, end] : in) {
      if (start < m.t0 || end > m.end_epoch()) {
        throw DataError(Kind::kValidation, std::string("split '") + name + "' interval [" +
                                               format_iso8601_utc(start) + ", " +
                                               format_iso8601_utc(end) +
                                               ") lies outside the dataset");
      }
      const feat::IndexRange r{to_index(start), to_index(end)};
      if (r.begin >= r.end) {
        throw DataError(Kind::kValidation, std::string("split '") + name + "' has an empty interval");
      }
      out.push_back(r);
    }
    return out;
  };
  ResolvedSplits r;
  r.train = resolve(splits.train, "train");
  r.validate = resolve(splits.validate, "validate");
  r.test = resolve(splits.test, "test");

  std::vector<feat::IndexRange> all;
  for (const auto* v : {&r.train, &r.validate, &r.test}) all.insert(all.end(), v->begin(), v->end());
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.begin < b.begin; });
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].begin < all[i - 1].end) {
      throw DataError(Kind::kValidation, "split intervals overlap");
    }
  }
  return r;
}

SplitSpec ratio_splits(const DatasetManifest& m, double train, double validate, double test) {
  if (!(train > 0 && validate > 0 && test > 0)) throw ConfigError("split ratios must be positive");
  const double total = train + validate + test;
  const auto steps = static_cast<double>(m.n_timesteps);
  const auto a = static_cast<std::int64_t>(std::llround(steps * train / total));
  const auto b = static_cast<std::int64_t>(std::llround(steps * (train + validate) / total));
  const auto at = [&](std::int64_t idx) { return m.t0 + idx * m.step_seconds; };
  SplitSpec s;
  s.train = {{at(0), at(a)}};
  s.validate = {{at(a), at(b)}};
  s.test = {{at(b), m.end_epoch()}};
  return s;
}

}  // namespace airgraph::io
