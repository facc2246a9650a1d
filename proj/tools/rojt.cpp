// Command-line front end for the ring-oscillator jitter toolkit.
//
// Subcommands
//   simulate   config JSON -> per-pair packed bit files + JSON metadata
//   measure    stream directory -> measurement records (JSON, optional CSV)
//   recover    records JSON -> per-oscillator volatility solution
//   diagnose   normal-approximation quality sweep -> CSV artifacts
//
// Every command is deterministic given its inputs (configs carry a
// mandatory seed). Exit codes: 0 success, including results that carry
// quality flags; 2 usage, configuration, or file error; 3 estimation
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "rojt/diagnostics.hpp"
#include "rojt/io.hpp"
#include "rojt/measurement.hpp"
#include "rojt/recovery.hpp"
#include "rojt/simulator.hpp"

namespace fs = std::filesystem;

namespace {

std::string pair_stem(std::pair<int, int> p) {
  return "pair_" + std::to_string(p.first) + "_" + std::to_string(p.second);
}

std::string pair_label(std::pair<int, int> p) {
  return "(" + std::to_string(p.first) + ", " + std::to_string(p.second) + ")";
}

// Short human-readable number for tables; files use full precision.
std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string join_flags(const std::vector<std::string>& flags) {
  if (flags.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ",";
    out += flags[i];
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw rojt::io_error("cannot open for write: " + path.string());
  out << text;
  if (!out) throw rojt::io_error("write failed: " + path.string());
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  bool csv = false;
};

int run_simulate(const SimulateArgs& a) {
  auto cfg = rojt::parse_simulation_config(rojt::load_json_file(a.config_path));
  if (a.seed_override) cfg.seed = *a.seed_override;
  fs::create_directories(a.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const auto streams = rojt::simulate_topology(cfg);
  for (const auto& bs : streams) {
    const std::string stem = pair_stem(bs.pair);
    const std::string bits_name = stem + ".bits";
    rojt::write_bits_file((fs::path(a.out_dir) / bits_name).string(), bs.bits);

    std::string phases_name;
    if (!bs.true_phases.empty()) {
      phases_name = stem + ".phases";
      rojt::write_phases_file((fs::path(a.out_dir) / phases_name).string(),
                              bs.true_phases);
    }
    if (a.csv)
      rojt::write_bits_csv((fs::path(a.out_dir) / (stem + ".csv")).string(),
                           bs.bits);

    std::optional<std::pair<int, int>> delays;
    if (!cfg.delay_elements.empty())
      delays = {{cfg.delay_elements[static_cast<std::size_t>(bs.pair.first)],
                 cfg.delay_elements[static_cast<std::size_t>(bs.pair.second)]}};
    const auto meta = rojt::stream_metadata_json(
        bs, cfg.oscillators[static_cast<std::size_t>(bs.pair.first)],
        cfg.oscillators[static_cast<std::size_t>(bs.pair.second)], cfg.seed,
        bits_name, phases_name, delays);
    write_text(fs::path(a.out_dir) / (stem + ".json"), meta.dump(2) + "\n");

    std::cout << "pair " << pair_label(bs.pair) << ": " << bs.n_bits()
              << " bits -> " << (fs::path(a.out_dir) / bits_name).string()
              << (phases_name.empty() ? "" : " (+phases)") << "\n";
  }
  std::cout << "simulated " << streams.size() << " stream(s) in "
            << num(elapsed_s(t0)) << " s\n";
  return 0;
}

// ---- measure ----------------------------------------------------------------

struct MeasureArgs {
  std::string dir;
  std::string method = "bit-mle";
  std::string ratio_source = "measured";
  std::string out_path;
  std::string csv_path;
};

int run_measure(const MeasureArgs& a) {
  if (!fs::is_directory(a.dir))
    throw rojt::config_error("measure: not a directory: " + a.dir);
  std::vector<fs::path> metas;
  for (const auto& entry : fs::directory_iterator(a.dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("pair_", 0) == 0 && name.size() > 5 &&
        name.substr(name.size() - 5) == ".json")
      metas.push_back(entry.path());
  }
  std::sort(metas.begin(), metas.end());
  if (metas.empty())
    throw rojt::config_error("measure: no stream metadata (pair_*.json) in " +
                             a.dir);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<rojt::MeasurementRecord<double>> records;
  for (const auto& meta_path : metas) {
    const auto j = rojt::load_json_file(meta_path.string());
    rojt::BitStream<double> bs;
    bs.pair = {j.at("pair").at(0).get<int>(), j.at("pair").at(1).get<int>()};
    const auto n = j.at("n_bits").get<std::int64_t>();
    bs.sampler_period = j.at("sampler_period_s").get<double>();
    bs.sampled_duty = j.at("sampled_duty").get<double>();
    bs.seed = j.at("subseed").get<std::uint64_t>();
    bs.mode = j.at("mode").get<std::string>() == "normal_approx"
                  ? rojt::SimulationMode::normal_approx
                  : rojt::SimulationMode::exact_ig;
    const fs::path base = meta_path.parent_path();
    bs.bits = rojt::read_bits_file(
        (base / j.at("bits_file").get<std::string>()).string(), n);

    rojt::MeasurementRecord<double> rec;
    try {
      if (a.method == "phase-oracle") {
        if (!j.contains("phases_file"))
          throw rojt::config_error(
              meta_path.filename().string() +
              ": no recorded phases; re-run simulate with record_phases");
        bs.true_phases = rojt::read_phases_file(
            (base / j.at("phases_file").get<std::string>()).string(), n);
        rec = rojt::estimate_from_phases(bs);
      } else if (a.ratio_source == "configured") {
        const auto sampler = rojt::oscillator_from_json(j.at("sampler"));
        const auto sampled = rojt::oscillator_from_json(j.at("sampled"));
        const rojt::RatioEstimate<double> ratio{
            sampled.frequency / sampler.frequency, true, 0.0};
        rec = rojt::estimate_total_jitter(bs, ratio, {});
      } else {
        std::optional<std::pair<int, int>> delays;
        if (j.contains("delay_elements"))
          delays = {{j.at("delay_elements").at(0).get<int>(),
                     j.at("delay_elements").at(1).get<int>()}};
        rec = rojt::measure_stream(bs, delays, {});
      }
    } catch (const rojt::estimation_error& e) {
      throw rojt::estimation_error("pair " + pair_label(bs.pair) + ": " +
                                   e.what());
    }
    std::cout << "pair " << pair_label(rec.pair) << ": ratio "
              << num(rec.ratio) << ", sigma' " << num(rec.total_jitter.value)
              << " over T_ref " << num(rec.total_jitter.reference_period)
              << " s, flags: " << join_flags(rec.flags) << "\n";
    records.push_back(std::move(rec));
  }

  const std::string out = a.out_path.empty()
                              ? (fs::path(a.dir) / "records.json").string()
                              : a.out_path;
  rojt::write_records_json(out, records);
  if (!a.csv_path.empty()) rojt::write_records_csv(a.csv_path, records);
  std::cout << "measured " << records.size() << " stream(s) in "
            << num(elapsed_s(t0)) << " s -> " << out << "\n";
  return 0;
}

// ---- recover ----------------------------------------------------------------

struct RecoverArgs {
  std::string records_path;
  int method = 2;
  bool compare = false;
  std::string ratios_from = "records";
  std::string config_path;
  int n_oscillators = 0;
  std::string out_path;
};

// Per-pair closed form under the equal-quality-factor hypothesis
// (sigma_i^2 f_i constant across rings): each record of a pair (0, i)
// yields both volatilities of that pair. The sampler estimates from all
// pairs are averaged; their spread is reported as the residual. The
// condition figures apply to the linear system of the other method only
// and are reported as zero here.
rojt::VolatilitySolution<double> method1_solution(
    const std::vector<rojt::MeasurementRecord<double>>& records,
    const rojt::FrequencyRatios<double>& ratios) {
  const int m = static_cast<int>(ratios.values.size());
  rojt::VolatilitySolution<double> out;
  out.method = rojt::RecoveryMethod::method1;
  out.sigma_sq_T0.assign(static_cast<std::size_t>(m), 0.0);

  std::vector<double> sampler_estimates;
  for (int i = 1; i < m; ++i) {
    const rojt::MeasurementRecord<double>* found = nullptr;
    for (const auto& rec : records)
      if (rec.pair == std::pair<int, int>{0, i}) {
        found = &rec;
        break;
      }
    if (!found)
      throw std::invalid_argument("recover: missing record for pair (0, " +
                                  std::to_string(i) + ")");
    const auto res = rojt::recover_method1(
        *found, ratios.values[static_cast<std::size_t>(i)]);
    out.sigma_sq_T0[static_cast<std::size_t>(i)] = res.sigma_sq_T0_sampled;
    sampler_estimates.push_back(res.sigma_sq_T0_sampler);
  }

  double mean = 0.0;
  for (const double v : sampler_estimates) mean += v;
  mean /= static_cast<double>(sampler_estimates.size());
  out.sigma_sq_T0[0] = mean;
  for (const double v : sampler_estimates)
    out.residual_inf = std::max(out.residual_inf, std::abs(v - mean));
  return out;
}

void print_solution(const rojt::VolatilitySolution<double>& sol) {
  std::cout << "method: " << rojt::to_string(sol.method) << "\n";
  std::cout << "  osc  sigma^2(T0)    sigma(T0)\n";
  for (std::size_t i = 0; i < sol.sigma_sq_T0.size(); ++i) {
    const double v = sol.sigma_sq_T0[i];
    std::cout << "  " << std::setw(3) << i << "  " << std::setw(13)
              << std::left << num(v) << std::right << "  "
              << (v >= 0.0 ? num(std::sqrt(v)) : "n/a (negative variance)")
              << "\n";
  }
  if (sol.method != rojt::RecoveryMethod::method1)
    std::cout << "condition number kappa_inf = " << num(sol.kappa_inf)
              << " (bound " << num(sol.kappa_bound) << ")\n";
  std::cout << "max residual: " << num(sol.residual_inf) << "\n";
  std::cout << "flags: " << join_flags(sol.flags) << "\n";
}

int run_recover(const RecoverArgs& a) {
  const auto records = rojt::read_records_json(a.records_path);
  if (records.empty())
    throw rojt::config_error("recover: no records in " + a.records_path);

  int n_osc = a.n_oscillators;
  if (n_osc == 0)
    for (const auto& r : records)
      n_osc = std::max(n_osc, std::max(r.pair.first, r.pair.second) + 1);

  rojt::FrequencyRatios<double> ratios;
  if (a.ratios_from == "config") {
    if (a.config_path.empty())
      throw rojt::config_error(
          "recover: --ratios-from config requires --config");
    const auto cfg =
        rojt::parse_simulation_config(rojt::load_json_file(a.config_path));
    std::vector<double> freqs;
    for (const auto& osc : cfg.oscillators) freqs.push_back(osc.frequency);
    ratios = rojt::FrequencyRatios<double>::from_frequencies(
        freqs, rojt::FrequencyRatios<double>::Source::configured);
    n_osc = static_cast<int>(freqs.size());
  } else {
    ratios = rojt::FrequencyRatios<double>::from_records(
        records, static_cast<std::size_t>(n_osc));
  }

  std::optional<rojt::VolatilitySolution<double>> sol1, sol2;
  if (a.compare || a.method == 1) sol1 = method1_solution(records, ratios);
  if (a.compare || a.method == 2)
    sol2 = rojt::recover_method2_general(records, ratios);

  if (a.compare) {
    print_solution(*sol1);
    std::cout << "\n";
    print_solution(*sol2);
    std::cout << "\n  osc  sigma^2(T0) m1  sigma^2(T0) m2  rel. difference\n";
    double max_rel = 0.0;
    for (std::size_t i = 0; i < sol2->sigma_sq_T0.size(); ++i) {
      const double v1 = sol1->sigma_sq_T0[i];
      const double v2 = sol2->sigma_sq_T0[i];
      const double rel = (v1 - v2) / std::max(std::abs(v2), 1e-300);
      max_rel = std::max(max_rel, std::abs(rel));
      std::cout << "  " << std::setw(3) << i << "  " << std::setw(14)
                << std::left << num(v1) << "  " << std::setw(14) << num(v2)
                << std::right << "  " << num(100.0 * rel) << "%\n";
    }
    if (max_rel > 0.10)
      std::cout << "methods disagree by " << num(100.0 * max_rel)
                << "%: the equal-quality-factor hypothesis does not hold for "
                   "these oscillators\n";
    if (!a.out_path.empty()) {
      rojt::json j{{"method1", rojt::solution_to_json(*sol1)},
                   {"method2", rojt::solution_to_json(*sol2)}};
      write_text(a.out_path, j.dump(2) + "\n");
      std::cout << "wrote " << a.out_path << "\n";
    }
    return 0;
  }

  const auto& sol = a.method == 1 ? *sol1 : *sol2;
  print_solution(sol);
  const std::string out =
      a.out_path.empty()
          ? (fs::path(a.records_path).parent_path() / "solution.json").string()
          : a.out_path;
  write_text(out, rojt::solution_to_json(sol).dump(2) + "\n");
  std::cout << "wrote " << out << "\n";
  return 0;
}

// ---- diagnose ---------------------------------------------------------------

struct DiagnoseArgs {
  std::string out_dir = ".";
  std::vector<double> levels;
  double f_ratio = 1.0;
  std::vector<double> density_levels;
  int density_points = 801;
};

int run_diagnose(const DiagnoseArgs& a) {
  fs::create_directories(a.out_dir);

  std::vector<double> levels = a.levels;
  if (levels.empty())
    for (int k = 0; k <= 8; ++k)
      levels.push_back(std::pow(10.0, -3.0 + 0.25 * k));
  std::sort(levels.begin(), levels.end());

  const auto sweep = rojt::discrepancy_sweep(levels, a.f_ratio);
  rojt::write_discrepancy_csv(
      (fs::path(a.out_dir) / "jitter_discrepancy.csv").string(), sweep);
  std::cout << "  jitter level   TV(exact, normal)\n";
  for (const auto& p : sweep)
    std::cout << "  " << std::setw(12) << std::left << num(p.jitter_level)
              << std::right << "  " << num(p.tv) << "\n";

  if (sweep.size() >= 2) {
    // least-squares slope of log TV against log level
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : sweep) {
      const double x = std::log(p.jitter_level);
      const double y = std::log(p.tv);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(sweep.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::cout << "log-log slope: " << num(slope)
              << " (tends to 1 as the level goes to 0)\n";
  }

  std::vector<double> density_levels =
      a.density_levels.empty() ? std::vector<double>{0.001} : a.density_levels;
  for (const double level : density_levels) {
    if (!(level > 0.0))
      throw rojt::config_error("diagnose: density levels must be > 0");
    const double f0 = 1.0;
    const double f1 = a.f_ratio;
    const auto exact = rojt::nig_of_pair(f0, level * std::sqrt(f0), f1,
                                         level * std::sqrt(f1));
    const auto approx = rojt::normal_approx_params(
        f0, level * std::sqrt(f0), f1, level * std::sqrt(f1));
    const auto pts =
        rojt::density_comparison(exact, approx, a.density_points);
    char name[48];
    std::snprintf(name, sizeof name, "density_%g.csv", level);
    rojt::write_density_csv((fs::path(a.out_dir) / name).string(), pts);
  }
  std::cout << "wrote " << (fs::path(a.out_dir) / "jitter_discrepancy.csv").string()
            << " and " << density_levels.size() << " density file(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ring-oscillator jitter toolkit: simulate sampled oscillator pairs, "
      "measure differential jitter from bit streams, recover per-oscillator "
      "volatilities, diagnose the normal approximation"};
  app.require_subcommand(1);

  SimulateArgs sa;
  MeasureArgs ma;
  RecoverArgs ra;
  DiagnoseArgs da;
  std::uint64_t seed_value = 0;

  auto* sim = app.add_subcommand(
      "simulate", "generate per-pair bit streams from a config JSON");
  sim->add_option("--config", sa.config_path, "simulation config JSON")
      ->required();
  sim->add_option("--out-dir", sa.out_dir, "output directory (default: .)");
  auto* seed_opt =
      sim->add_option("--seed", seed_value, "override the config seed");
  sim->add_flag("--csv", sa.csv, "also write an index,bit CSV per pair");

  auto* mea = app.add_subcommand(
      "measure", "estimate ratio and total jitter for each recorded stream");
  mea->add_option("--dir", ma.dir, "directory holding pair_*.json metadata")
      ->required();
  mea->add_option("--method", ma.method, "bit-mle | phase-oracle")
      ->check(CLI::IsMember({"bit-mle", "phase-oracle"}));
  mea->add_option("--ratio-source", ma.ratio_source,
                  "measured: estimate from the bits; configured: take the "
                  "ratio from the recorded oscillator parameters")
      ->check(CLI::IsMember({"measured", "configured"}));
  mea->add_option("--out", ma.out_path,
                  "records JSON path (default: <dir>/records.json)");
  mea->add_option("--csv", ma.csv_path, "also write a records CSV here");

  auto* rec = app.add_subcommand(
      "recover", "solve for per-oscillator volatilities from records");
  rec->add_option("--records", ra.records_path, "measurement records JSON")
      ->required();
  rec->add_option("--method", ra.method,
                  "1: per-pair equal-quality-factor closed form; 2: linear "
                  "system across all pairs (default)")
      ->check(CLI::Range(1, 2));
  rec->add_flag("--compare-methods", ra.compare,
                "run both methods and report their divergence");
  rec->add_option("--ratios-from", ra.ratios_from,
                  "records: use measured ratios; config: use configured "
                  "frequencies (requires --config)")
      ->check(CLI::IsMember({"records", "config"}));
  rec->add_option("--config", ra.config_path,
                  "simulation config (for --ratios-from config)");
  rec->add_option("--n-oscillators", ra.n_oscillators,
                  "number of oscillators (default: inferred from records)")
      ->check(CLI::Range(2, 1 << 20));
  rec->add_option("--out", ra.out_path,
                  "solution JSON path (default: next to the records)");

  auto* dia = app.add_subcommand(
      "diagnose", "tabulate the gap between the exact increment law and its "
                  "normal approximation");
  dia->add_option("--out-dir", da.out_dir, "output directory (default: .)");
  dia->add_option("--levels", da.levels,
                  "per-cycle jitter levels sigma/sqrt(f) to sweep "
                  "(default: 9 points, 1e-3 .. 1e-1)")
      ->delimiter(',');
  dia->add_option("--f-ratio", da.f_ratio,
                  "sampled/sampler frequency ratio (default: 1)");
  dia->add_option("--density-levels", da.density_levels,
                  "levels at which to tabulate both densities "
                  "(default: 0.001)")
      ->delimiter(',');
  dia->add_option("--density-points", da.density_points,
                  "grid points per density file (default: 801)")
      ->check(CLI::Range(2, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) {
      if (seed_opt->count()) sa.seed_override = seed_value;
      return run_simulate(sa);
    }
    if (*mea) return run_measure(ma);
    if (*rec) return run_recover(ra);
    return run_diagnose(da);
  } catch (const rojt::estimation_error& e) {
    std::cerr << "estimation failure: " << e.what() << "\n";
    return 3;
  } catch (const rojt::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rojt::io_error& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
