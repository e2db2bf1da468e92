/**
 * Copyright 2026 The aciq-toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

#include "aciq/bit_allocation.hpp"
#include "aciq/csv.hpp"
#include "aciq/pipeline.hpp"
#include "aciq/simulation.hpp"
#include "json.hpp"

// CSV and JSON renderings of every result the command-line tool emits.

namespace aciq {

enum class ReportFormat { kCsv, kJson };

using nlohmann::ordered_json;

inline ordered_json to_json(const QuantizeReport& r) {
  ordered_json j;
  j["role"] = to_string(r.role);
  j["methods"] = r.config.methods.name();
  j["weight_bits"] = r.config.weight_bits;
  j["activation_bits"] = r.config.activation_bits;
  j["family"] = to_string(r.config.family);
  j["mode"] = to_string(r.config.mode);
  j["seed"] = r.config.seed;
  j["quota_bins"] = r.quota_bins;
  j["used_bins"] = r.used_bins;
  j["total_mse"] = r.total_mse;
  j["per_channel_mean_mse"] = r.per_channel_mean_mse();
  j["channels"] = ordered_json::array();
  for (const auto& c : r.channels) {
    ordered_json cj;
    cj["channel"] = c.channel;
    cj["bits"] = c.bits;
    cj["alpha"] = c.alpha;
    cj["mu"] = c.mu;
    cj["xi"] = c.xi;
    cj["mse"] = c.mse;
    cj["count"] = c.count;
    cj["passthrough"] = c.passthrough;
    j["channels"].push_back(std::move(cj));
  }
  j["warnings"] = r.warnings;
  return j;
}

// Per-channel rows followed by a "total" row.
inline std::string to_csv(const QuantizeReport& r) {
  CsvTable t({"channel", "bits", "alpha", "mu", "xi", "mse", "count"});
  for (const auto& c : r.channels)
    t.add_row({std::to_string(c.channel), std::to_string(c.bits), format_number(c.alpha), format_number(c.mu),
               format_number(c.xi), format_number(c.mse), std::to_string(c.count)});
  std::size_t count = 0;
  for (const auto& c : r.channels) count += c.count;
  t.add_row({"total", "", "", "", "", format_number(r.total_mse), std::to_string(count)});
  return t.str();
}

inline std::string to_csv(const MseCurve& curve) {
  CsvTable t({"alpha", "analytic", "empirical"});
  for (std::size_t i = 0; i < curve.alphas.size(); ++i)
    t.add_row({format_number(curve.alphas[i]), format_number(curve.analytic[i]), format_number(curve.empirical[i])});
  return t.str();
}

inline ordered_json to_json(const MseCurve& curve) {
  ordered_json j;
  j["family"] = to_string(curve.family);
  j["mode"] = to_string(curve.mode);
  j["bits"] = curve.bits;
  j["n_samples"] = curve.n_samples;
  j["seed"] = curve.seed;
  j["alpha"] = curve.alphas;
  j["analytic"] = curve.analytic;
  j["empirical"] = curve.empirical;
  return j;
}

inline std::string to_csv(const std::vector<CompareRow>& rows) {
  CsvTable t({"combination", "weights_mse", "activations_mse", "total_mse", "per_channel_mean_mse"});
  for (const auto& r : rows)
    t.add_row({r.methods.name(), format_number(r.weights_mse), format_number(r.activations_mse),
               format_number(r.total_mse), format_number(r.per_channel_mean_mse)});
  return t.str();
}

inline ordered_json to_json(const std::vector<CompareRow>& rows) {
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json rj;
    rj["combination"] = r.methods.name();
    rj["mask"] = r.methods.mask();
    rj["weights_mse"] = r.weights_mse;
    rj["activations_mse"] = r.activations_mse;
    rj["total_mse"] = r.total_mse;
    rj["per_channel_mean_mse"] = r.per_channel_mean_mse;
    j.push_back(std::move(rj));
  }
  return j;
}

inline std::string to_csv(const std::vector<KldCompareRow>& rows) {
  CsvTable t({"method", "threshold", "mse", "micros"});
  for (const auto& r : rows)
    t.add_row({r.method, format_number(r.threshold), format_number(r.mse), format_fixed(r.micros, 3)});
  return t.str();
}

inline ordered_json to_json(const std::vector<KldCompareRow>& rows) {
  ordered_json j = ordered_json::array();
  for (const auto& r : rows) j.push_back({{"method", r.method}, {"threshold", r.threshold}, {"mse", r.mse}, {"micros", r.micros}});
  return j;
}

inline std::string to_csv(const BitAllocation& a) {
  CsvTable t({"channel", "alpha", "fractional_bins", "bits"});
  for (std::size_t i = 0; i < a.bits.size(); ++i)
    t.add_row({std::to_string(i), format_number(a.alphas[i]), format_number(a.fractional_bins[i]),
               std::to_string(a.bits[i])});
  return t.str();
}

inline ordered_json to_json(const BitAllocation& a) {
  ordered_json j;
  j["quota_bins"] = a.quota_bins;
  j["used_bins"] = a.used_bins();
  j["quota_drift"] = a.quota_drift();
  j["alphas"] = a.alphas;
  j["fractional_bins"] = a.fractional_bins;
  j["bits"] = a.bits;
  return j;
}

inline std::string to_csv(const TwoChannelExperiment& e) {
  CsvTable t({"bins_i", "bins_j", "mse"});
  for (const auto& row : e.mse_table)
    t.add_row({std::to_string(row.bins_i), std::to_string(row.bins_j), format_number(row.mse)});
  return t.str();
}

inline ordered_json to_json(const TwoChannelExperiment& e) {
  ordered_json j;
  j["best_split"] = {e.best_split.first, e.best_split.second};
  j["predicted_split"] = {e.predicted_split.first, e.predicted_split.second};
  j["mse_table"] = ordered_json::array();
  for (const auto& row : e.mse_table) j["mse_table"].push_back({row.bins_i, row.bins_j, row.mse});
  return j;
}

template <typename T>
std::string render(const T& value, ReportFormat format) {
  if (format == ReportFormat::kCsv) return to_csv(value);
  return to_json(value).dump(2) + "\n";
}

}  // namespace aciq
