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

// aciq: command-line front end for the analytical clipping toolkit.
//
// Exit codes: 0 success, 2 usage, 3 I/O or malformed file, 4 numeric or
// degenerate input.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aciq/aciq.hpp"

namespace {

using namespace aciq;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return kExitUsage;
    case ErrorCode::kIo:
    case ErrorCode::kBadMagic:
    case ErrorCode::kBadHeader:
    case ErrorCode::kPayloadMismatch: return kExitIo;
    case ErrorCode::kDegenerate:
    case ErrorCode::kNonFinite: return kExitNumeric;
  }
  return kExitNumeric;
}

struct CommonOptions {
  std::string family = "laplace";
  int bits = 4;
  std::string mode = "symmetric";
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string format = "csv";

  Family parsed_family() const { return family == "gaussian" ? Family::kGaussian : Family::kLaplace; }
  ClipMode parsed_mode() const { return mode == "relu" ? ClipMode::kFusedRelu : ClipMode::kSymmetric; }
  ReportFormat parsed_format() const { return format == "json" ? ReportFormat::kJson : ReportFormat::kCsv; }
};

void add_family(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--family", o.family, "Prior family")->check(CLI::IsMember({"laplace", "gaussian"}));
}
void add_bits(CLI::App* cmd, CommonOptions& o, bool required = false) {
  auto* opt = cmd->add_option("--bits", o.bits, "Bit-width M")->check(CLI::Range(kMinBits, kMaxBits));
  if (required) opt->required();
}
void add_mode(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--mode", o.mode, "Quantizer range")->check(CLI::IsMember({"symmetric", "relu"}));
}
void add_seed(CLI::App* cmd, CommonOptions& o) { cmd->add_option("--seed", o.seed, "RNG seed (default 42)"); }
void add_output(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::kIo, "failed writing to stdout");
  } else {
    write_file(path, text);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "cannot parse number '" + token + "'");
    }
  }
  return out;
}

void print_warnings(const QuantizeReport& report) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytical clipping, per-channel bit allocation and bias correction for low-bit quantization"};
  app.require_subcommand(1);

  // optimal-alpha
  CommonOptions alpha_opts;
  double alpha_scale = 1.0;
  auto* cmd_alpha = app.add_subcommand("optimal-alpha", "Print the MSE-optimal clipping value");
  add_family(cmd_alpha, alpha_opts);
  add_bits(cmd_alpha, alpha_opts, true);
  add_mode(cmd_alpha, alpha_opts);
  cmd_alpha->add_option("--scale", alpha_scale, "Laplace b or Gaussian sigma")->check(CLI::PositiveNumber);

  // mse-curve
  CommonOptions curve_opts;
  double curve_scale = 1.0, alpha_min = 0.5, alpha_max = 10.0, alpha_step = 0.1;
  std::size_t curve_n = 10000;
  auto* cmd_curve = app.add_subcommand("mse-curve", "Analytic vs. simulated MSE over a clipping grid");
  add_family(cmd_curve, curve_opts);
  add_bits(cmd_curve, curve_opts);
  add_mode(cmd_curve, curve_opts);
  add_seed(cmd_curve, curve_opts);
  add_output(cmd_curve, curve_opts);
  cmd_curve->add_option("--scale", curve_scale, "Laplace b or Gaussian sigma")->check(CLI::PositiveNumber);
  cmd_curve->add_option("--alpha-min", alpha_min)->check(CLI::PositiveNumber);
  cmd_curve->add_option("--alpha-max", alpha_max)->check(CLI::PositiveNumber);
  cmd_curve->add_option("--alpha-step", alpha_step)->check(CLI::PositiveNumber);
  cmd_curve->add_option("--n", curve_n, "Samples (>= 1000)")->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));

  // quantize
  CommonOptions quant_opts;
  std::string quant_input, quant_output, quant_role, quant_methods = "none";
  std::optional<int> weight_bits, activation_bits;
  bool quant_repair = false;
  auto* cmd_quant = app.add_subcommand("quantize", "Run the weights or activations pipeline on a tensor file");
  cmd_quant->add_option("--input", quant_input, "Input tensor file")->required();
  cmd_quant->add_option("--role", quant_role, "Tensor role")->required()->check(CLI::IsMember({"weights", "activations"}));
  cmd_quant->add_option("--methods", quant_methods, "Comma list of aciq,bit_alloc_w,bit_alloc_a,bias_corr (or all/none)");
  cmd_quant->add_option("--output", quant_output, "Quantized tensor file");
  cmd_quant->add_option("--weight-bits", weight_bits)->check(CLI::Range(kMinBits, kMaxBits));
  cmd_quant->add_option("--activation-bits", activation_bits)->check(CLI::Range(kMinBits, kMaxBits));
  cmd_quant->add_flag("--repair-quota", quant_repair, "Enforce the bin quota after rounding");
  add_family(cmd_quant, quant_opts);
  add_bits(cmd_quant, quant_opts);
  add_mode(cmd_quant, quant_opts);
  add_seed(cmd_quant, quant_opts);
  add_output(cmd_quant, quant_opts);

  // compare
  CommonOptions cmp_opts;
  std::string cmp_input, cmp_methods = "all";
  bool cmp_full = false;
  std::size_t synth_channels = 64, synth_size = 1024;
  auto* cmd_cmp = app.add_subcommand("compare", "MSE of every method combination");
  cmd_cmp->add_option("--input", cmp_input, "Input tensor file (synthetic Laplace tensor when omitted)");
  cmd_cmp->add_option("--methods", cmp_methods, "Methods whose subsets are compared");
  cmd_cmp->add_flag("--full-matrix", cmp_full, "All 16 combinations");
  cmd_cmp->add_option("--channels", synth_channels, "Synthetic tensor channels")->check(CLI::PositiveNumber);
  cmd_cmp->add_option("--per-channel", synth_size, "Synthetic values per channel")->check(CLI::PositiveNumber);
  add_family(cmd_cmp, cmp_opts);
  add_bits(cmd_cmp, cmp_opts);
  add_mode(cmd_cmp, cmp_opts);
  add_seed(cmd_cmp, cmp_opts);
  add_output(cmd_cmp, cmp_opts);

  // kld-compare
  CommonOptions kld_opts;
  std::string kld_input;
  double kld_scale = 1.0;
  std::size_t kld_n = 10000, kld_bins = kDefaultHistogramBins;
  auto* cmd_kld = app.add_subcommand("kld-compare", "ACIQ vs. KLD vs. max|x| thresholds");
  cmd_kld->add_option("--input", kld_input, "Input tensor file (samples from --family/--scale when omitted)");
  cmd_kld->add_option("--scale", kld_scale)->check(CLI::PositiveNumber);
  cmd_kld->add_option("--n", kld_n)->check(CLI::PositiveNumber);
  cmd_kld->add_option("--bins", kld_bins, "Histogram bins")->check(CLI::PositiveNumber);
  add_family(cmd_kld, kld_opts);
  add_bits(cmd_kld, kld_opts);
  add_seed(cmd_kld, kld_opts);
  add_output(cmd_kld, kld_opts);

  // alloc-bits
  CommonOptions alloc_opts;
  std::string alloc_alphas, alloc_input;
  BitAllocationOptions alloc_cfg;
  auto* cmd_alloc = app.add_subcommand("alloc-bits", "Per-channel bit-widths under an average-bit budget");
  auto* alphas_opt = cmd_alloc->add_option("--alphas", alloc_alphas, "Comma list of channel ranges");
  auto* input_opt = cmd_alloc->add_option("--input", alloc_input, "Tensor file; ranges are per-channel max|x|");
  alphas_opt->excludes(input_opt);
  cmd_alloc->add_option("--min-bits", alloc_cfg.min_bits)->check(CLI::Range(kMinBits, kMaxBits));
  cmd_alloc->add_option("--max-bits", alloc_cfg.max_bits)->check(CLI::Range(kMinBits, kMaxBits));
  cmd_alloc->add_flag("--repair-quota", alloc_cfg.repair_quota);
  add_bits(cmd_alloc, alloc_opts);
  add_output(cmd_alloc, alloc_opts);

  // bias-correct
  CommonOptions bias_opts;
  std::string bias_input, bias_output;
  auto* cmd_bias = app.add_subcommand("bias-correct", "Min/max-quantize weights and apply bias correction");
  cmd_bias->add_option("--input", bias_input)->required();
  cmd_bias->add_option("--output", bias_output, "Corrected tensor file");
  add_bits(cmd_bias, bias_opts);
  add_output(cmd_bias, bias_opts);

  // two-channel-experiment
  CommonOptions two_opts;
  double alpha_i = 1.0, alpha_j = 8.0;
  std::size_t two_quota = 32, two_n = 100000;
  auto* cmd_two = app.add_subcommand("two-channel-experiment", "Empirical best bin split for two channels");
  cmd_two->add_option("--alpha-i", alpha_i)->check(CLI::PositiveNumber);
  cmd_two->add_option("--alpha-j", alpha_j)->check(CLI::PositiveNumber);
  cmd_two->add_option("--quota", two_quota)->check(CLI::Range(std::size_t{4}, std::size_t{1} << 16));
  cmd_two->add_option("--n", two_n)->check(CLI::PositiveNumber);
  add_seed(cmd_two, two_opts);
  add_output(cmd_two, two_opts);

  // synth-tensor
  CommonOptions synth_opts;
  std::string synth_out;
  double synth_lo = 0.25, synth_hi = 4.0;
  std::size_t synth_c = 64, synth_n = 1024;
  auto* cmd_synth = app.add_subcommand("synth-tensor", "Write a Laplace tensor with per-channel scales");
  cmd_synth->add_option("--output", synth_out)->required();
  cmd_synth->add_option("--channels", synth_c)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--per-channel", synth_n)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--scale-min", synth_lo)->check(CLI::PositiveNumber);
  cmd_synth->add_option("--scale-max", synth_hi)->check(CLI::PositiveNumber);
  add_seed(cmd_synth, synth_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_alpha) {
      const AciqSetting setting(DistributionModel(alpha_opts.parsed_family(), alpha_scale), alpha_opts.bits,
                                alpha_opts.parsed_mode());
      std::cout << format_fixed(optimal_alpha(setting), 4) << "\n";
    } else if (*cmd_curve) {
      if (alpha_max < alpha_min) throw Error(ErrorCode::kInvalidArgument, "--alpha-max is below --alpha-min");
      const auto grid = alpha_range(alpha_min, alpha_max, alpha_step);
      const auto curve = mse_curve(DistributionModel(curve_opts.parsed_family(), curve_scale), curve_opts.bits,
                                   curve_opts.parsed_mode(), grid, curve_n, curve_opts.seed);
      std::cerr << "seed=" << curve_opts.seed << "\n";
      emit(render(curve, curve_opts.parsed_format()), curve_opts.out);
    } else if (*cmd_quant) {
      PipelineConfig cfg;
      cfg.methods = MethodSet::parse(quant_methods);
      cfg.weight_bits = weight_bits.value_or(quant_opts.bits);
      cfg.activation_bits = activation_bits.value_or(quant_opts.bits);
      cfg.family = quant_opts.parsed_family();
      cfg.mode = quant_opts.parsed_mode();
      cfg.seed = quant_opts.seed;
      cfg.allocation.repair_quota = quant_repair;
      const auto input = read_tensor(quant_input);
      const auto result = quantize_tensor(input, cfg, quant_role == "weights" ? Role::kWeights : Role::kActivations);
      print_warnings(result.report);
      std::cerr << "seed=" << quant_opts.seed << "\n";
      if (!quant_output.empty()) write_tensor(result.output, quant_output);
      emit(render(result.report, quant_opts.parsed_format()), quant_opts.out);
    } else if (*cmd_cmp) {
      PipelineConfig cfg;
      cfg.weight_bits = cfg.activation_bits = cmp_opts.bits;
      cfg.family = cmp_opts.parsed_family();
      cfg.mode = cmp_opts.parsed_mode();
      cfg.seed = cmp_opts.seed;
      const ChannelTensor input = cmp_input.empty()
                                      ? synthetic_laplace_tensor(synth_channels, synth_size, 0.25, 4.0, cmp_opts.seed)
                                      : read_tensor(cmp_input);
      const MethodSet enabled = cmp_full ? MethodSet::all() : MethodSet::parse(cmp_methods);
      const auto rows = compare_methods(input, cfg, method_combinations(enabled));
      std::cerr << "seed=" << cmp_opts.seed << "\n";
      emit(render(rows, cmp_opts.parsed_format()), cmp_opts.out);
    } else if (*cmd_kld) {
      const std::vector<double> samples =
          kld_input.empty() ? sample(DistributionModel(kld_opts.parsed_family(), kld_scale), kld_n, kld_opts.seed)
                            : read_tensor(kld_input).data();
      const auto rows = kld_compare(samples, kld_opts.bits, kld_opts.parsed_family(), kld_bins);
      std::cerr << "seed=" << kld_opts.seed << "\n";
      emit(render(rows, kld_opts.parsed_format()), kld_opts.out);
    } else if (*cmd_alloc) {
      std::vector<double> alphas;
      if (!alloc_input.empty()) {
        const auto t = read_tensor(alloc_input);
        for (std::size_t c = 0; c < t.channel_count(); ++c) {
          double m = 0.0;
          for (double v : t.channel(c)) m = std::max(m, std::abs(v));
          alphas.push_back(m);
        }
      } else {
        alphas = parse_list(alloc_alphas);
      }
      if (alphas.empty()) throw Error(ErrorCode::kInvalidArgument, "alloc-bits needs --alphas or --input");
      emit(render(allocate_bits(alphas, alloc_opts.bits, alloc_cfg), alloc_opts.parsed_format()), alloc_opts.out);
    } else if (*cmd_bias) {
      PipelineConfig cfg;
      cfg.methods = MethodSet().with(Method::kBiasCorrection);
      cfg.weight_bits = bias_opts.bits;
      const auto result = quantize_tensor(read_tensor(bias_input), cfg, Role::kWeights);
      print_warnings(result.report);
      if (!bias_output.empty()) write_tensor(result.output, bias_output);
      emit(render(result.report, bias_opts.parsed_format()), bias_opts.out);
    } else if (*cmd_two) {
      const auto e = two_channel_bin_experiment(alpha_i, alpha_j, two_quota, two_n, two_opts.seed);
      std::cerr << "best_split=" << e.best_split.first << "," << e.best_split.second
                << " predicted_split=" << format_number(e.predicted_split.first) << ","
                << format_number(e.predicted_split.second) << " seed=" << two_opts.seed << "\n";
      emit(render(e, two_opts.parsed_format()), two_opts.out);
    } else if (*cmd_synth) {
      if (synth_hi < synth_lo) throw Error(ErrorCode::kInvalidArgument, "--scale-max is below --scale-min");
      write_tensor(synthetic_laplace_tensor(synth_c, synth_n, synth_lo, synth_hi, synth_opts.seed), synth_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kExitOk;
}
