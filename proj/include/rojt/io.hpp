// File formats and configuration parsing.
//
// Formats, all stable across platforms:
//   run config      JSON; every physical quantity carries an explicit unit
//                   tag (a bare number for a dimensionful field is a
//                   config_error naming the field)
//   bit stream      packed binary, LSB-first within each byte, count in
//                   the JSON metadata sidecar
//   phases          raw little-endian float64 array
//   bit CSV         header "index,bit"
//   records CSV     header "i,j,ratio,sigma_prime,T_ref,n_bits,method"
//   records JSON    array of measurement records, sigma_prime paired with
//                   its reference period
//   solution JSON   sigma_i^2(T_0) plus conditioning figures and flags
//   densities CSV   header "phase,pdfexact,pdfapprox"
//   sweep CSV       header "jitter,discrepancy"

#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rojt/diagnostics.hpp"
#include "rojt/measurement.hpp"
#include "rojt/oscillator.hpp"
#include "rojt/recovery.hpp"
#include "rojt/simulator.hpp"

namespace rojt {

using nlohmann::json;

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// ---- packed bits ----------------------------------------------------------

inline std::vector<std::uint8_t> pack_bits(
    const std::vector<std::uint8_t>& bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return bytes;
}

inline std::vector<std::uint8_t> unpack_bits(
    const std::vector<std::uint8_t>& bytes, std::int64_t n_bits) {
  if (n_bits < 0 ||
      static_cast<std::size_t>((n_bits + 7) / 8) > bytes.size())
    throw io_error("unpack_bits: byte buffer shorter than bit count");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_bits));
  for (std::size_t i = 0; i < bits.size(); ++i)
    bits[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  return bits;
}

inline void write_bits_file(const std::string& path,
                            const std::vector<std::uint8_t>& bits) {
  const auto bytes = pack_bits(bits);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed: " + path);
}

inline std::vector<std::uint8_t> read_bits_file(const std::string& path,
                                                std::int64_t n_bits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes(
      static_cast<std::size_t>((n_bits + 7) / 8));
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw io_error("file shorter than expected: " + path);
  return unpack_bits(bytes, n_bits);
}

inline void write_phases_file(const std::string& path,
                              const std::vector<double>& phases) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(phases.data()),
            static_cast<std::streamsize>(phases.size() * sizeof(double)));
  if (!out) throw io_error("write failed: " + path);
}

inline std::vector<double> read_phases_file(const std::string& path,
                                            std::int64_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::vector<double> phases(static_cast<std::size_t>(count));
  in.read(reinterpret_cast<char*>(phases.data()),
          static_cast<std::streamsize>(phases.size() * sizeof(double)));
  if (in.gcount() !=
      static_cast<std::streamsize>(phases.size() * sizeof(double)))
    throw io_error("file shorter than expected: " + path);
  return phases;
}

// ---- CSV ------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::ofstream open_text(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

}  // namespace detail

inline void write_bits_csv(const std::string& path,
                           const std::vector<std::uint8_t>& bits) {
  auto out = detail::open_text(path);
  out << "index,bit\n";
  for (std::size_t i = 0; i < bits.size(); ++i)
    out << i << ',' << static_cast<int>(bits[i]) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline void write_records_csv(const std::string& path,
                              const std::vector<MeasurementRecord<double>>& recs) {
  auto out = detail::open_text(path);
  out << "i,j,ratio,sigma_prime,T_ref,n_bits,method\n";
  for (const auto& r : recs) {
    out << r.pair.first << ',' << r.pair.second << ','
        << detail::fmt(r.ratio) << ',' << detail::fmt(r.total_jitter.value)
        << ',' << detail::fmt(r.total_jitter.reference_period) << ','
        << r.n_bits << ',' << to_string(r.method) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

inline void write_density_csv(const std::string& path,
                              const std::vector<DensityPoint>& points) {
  auto out = detail::open_text(path);
  out << "phase,pdfexact,pdfapprox\n";
  for (const auto& p : points)
    out << detail::fmt(p.x) << ',' << detail::fmt(p.pdf_exact) << ','
        << detail::fmt(p.pdf_approx) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline void write_discrepancy_csv(const std::string& path,
                                  const std::vector<DiscrepancyPoint>& points) {
  auto out = detail::open_text(path);
  out << "jitter,discrepancy\n";
  for (const auto& p : points)
    out << detail::fmt(p.jitter_level) << ',' << detail::fmt(p.tv) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

// ---- config ---------------------------------------------------------------

namespace detail {

inline double require_number(const json& j, const std::string& context) {
  if (!j.is_number())
    throw config_error(context + ": expected a number");
  return j.get<double>();
}

inline double parse_frequency_hz(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("value") || !j.contains("unit"))
    throw config_error(context +
                       ": must be an object {\"value\": ..., \"unit\": ...}");
  const double v = require_number(j["value"], context + ".value");
  const std::string unit = j["unit"].get<std::string>();
  double scale = 0.0;
  if (unit == "Hz") scale = 1.0;
  else if (unit == "kHz") scale = 1e3;
  else if (unit == "MHz") scale = 1e6;
  else if (unit == "GHz") scale = 1e9;
  else
    throw config_error(context + ".unit: unknown frequency unit '" + unit +
                       "' (Hz, kHz, MHz, GHz)");
  return v * scale;
}

inline double parse_period_s(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("value") || !j.contains("unit"))
    throw config_error(context +
                       ": must be an object {\"value\": ..., \"unit\": ...}");
  const double v = require_number(j["value"], context + ".value");
  const std::string unit = j["unit"].get<std::string>();
  double scale = 0.0;
  if (unit == "s") scale = 1.0;
  else if (unit == "ms") scale = 1e-3;
  else if (unit == "us") scale = 1e-6;
  else if (unit == "ns") scale = 1e-9;
  else
    throw config_error(context + ".unit: unknown period unit '" + unit +
                       "' (s, ms, us, ns)");
  return v * scale;
}

}  // namespace detail

// Full simulation config. Volatilities accept two unit tags:
//   {"value": v, "unit": "per_sqrt_s"}                the model rate sigma
//   {"value": v, "unit": "accumulated",
//    "reference": "T0"}                               sigma(T_ref), converted
// where "T<k>" means the nominal period of oscillator k; a reference can
// also be given directly as {"value": ..., "unit": "ms"}.
inline SimulationConfig<double> parse_simulation_config(const json& j) {
  SimulationConfig<double> cfg;
  if (!j.contains("oscillators") || !j["oscillators"].is_array() ||
      j["oscillators"].size() < 2)
    throw config_error("oscillators: need an array of at least two");

  // periods first: accumulated volatilities may reference any oscillator
  std::vector<double> period_s;
  std::vector<int> delays;
  bool any_delay = false;
  for (std::size_t i = 0; i < j["oscillators"].size(); ++i) {
    const auto& osc = j["oscillators"][i];
    const std::string ctx = "oscillators[" + std::to_string(i) + "]";
    const bool has_f = osc.contains("frequency");
    const bool has_T = osc.contains("period");
    if (has_f == has_T)
      throw config_error(ctx + ": give exactly one of frequency or period");
    const double T =
        has_T ? detail::parse_period_s(osc["period"], ctx + ".period")
              : 1.0 / detail::parse_frequency_hz(osc["frequency"],
                                                 ctx + ".frequency");
    if (!(T > 0.0)) throw config_error(ctx + ": period must be positive");
    period_s.push_back(T);
    if (osc.contains("delay_elements")) {
      any_delay = true;
      delays.push_back(osc["delay_elements"].get<int>());
    } else {
      delays.push_back(0);
    }
  }

  for (std::size_t i = 0; i < j["oscillators"].size(); ++i) {
    const auto& osc = j["oscillators"][i];
    const std::string ctx = "oscillators[" + std::to_string(i) + "]";
    if (!osc.contains("volatility"))
      throw config_error(ctx + ".volatility: missing");
    const auto& vol = osc["volatility"];
    if (!vol.is_object() || !vol.contains("unit"))
      throw config_error(
          ctx + ".volatility.unit: missing (per_sqrt_s or accumulated)");
    if (!vol.contains("value"))
      throw config_error(ctx + ".volatility.value: missing");
    const double value =
        detail::require_number(vol["value"], ctx + ".volatility.value");
    const std::string unit = vol["unit"].get<std::string>();
    double sigma = 0.0;
    if (unit == "per_sqrt_s") {
      sigma = value;
    } else if (unit == "accumulated") {
      if (!vol.contains("reference"))
        throw config_error(ctx +
                           ".volatility.reference: required with unit "
                           "\"accumulated\"");
      const auto& ref = vol["reference"];
      double T_ref = 0.0;
      if (ref.is_string()) {
        const std::string s = ref.get<std::string>();
        if (s.size() < 2 || s[0] != 'T')
          throw config_error(ctx + ".volatility.reference: expected "
                                   "\"T<k>\" or a period object");
        const std::size_t k = std::stoul(s.substr(1));
        if (k >= period_s.size())
          throw config_error(ctx + ".volatility.reference: no oscillator " +
                             s.substr(1));
        T_ref = period_s[k];
      } else {
        T_ref = detail::parse_period_s(ref, ctx + ".volatility.reference");
      }
      sigma = de_accumulate(AccumulatedVolatility<double>{value, T_ref});
    } else {
      throw config_error(ctx + ".volatility.unit: unknown unit '" + unit +
                         "' (per_sqrt_s or accumulated)");
    }

    const double duty =
        osc.contains("duty_cycle")
            ? detail::require_number(osc["duty_cycle"], ctx + ".duty_cycle")
            : 0.5;
    const double phase = osc.contains("initial_phase")
                             ? detail::require_number(osc["initial_phase"],
                                                      ctx + ".initial_phase")
                             : 0.0;
    try {
      cfg.oscillators.emplace_back(phase, 1.0 / period_s[i], sigma, duty);
    } catch (const std::invalid_argument& e) {
      throw config_error(ctx + ": " + e.what());
    }
  }
  if (any_delay) cfg.delay_elements = delays;

  if (!j.contains("pairs") || !j["pairs"].is_array() || j["pairs"].empty())
    throw config_error("pairs: need a non-empty array of [i, j] pairs");
  for (const auto& p : j["pairs"]) {
    if (!p.is_array() || p.size() != 2)
      throw config_error("pairs: each entry must be [sampler, sampled]");
    cfg.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
  }

  if (!j.contains("n_bits")) throw config_error("n_bits: missing");
  cfg.n_bits = j["n_bits"].get<std::int64_t>();
  if (cfg.n_bits < 1) throw config_error("n_bits: must be >= 1");

  const std::string mode =
      j.contains("mode") ? j["mode"].get<std::string>() : "exact_ig";
  if (mode == "exact_ig") cfg.mode = SimulationMode::exact_ig;
  else if (mode == "normal_approx") cfg.mode = SimulationMode::normal_approx;
  else
    throw config_error("mode: unknown mode '" + mode +
                       "' (exact_ig or normal_approx)");

  if (!j.contains("seed")) throw config_error("seed: missing (reproducibility is mandatory)");
  cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.record_phases =
      j.contains("record_phases") && j["record_phases"].get<bool>();
  return cfg;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error(path + ": " + e.what());
  }
  return j;
}

// ---- stream metadata sidecar ------------------------------------------------

inline json oscillator_to_json(const OscillatorParams<double>& o) {
  return json{{"initial_phase", o.initial_phase},
              {"frequency_hz", o.frequency},
              {"volatility_per_sqrt_s", o.volatility},
              {"duty_cycle", o.duty_cycle}};
}

inline OscillatorParams<double> oscillator_from_json(const json& j) {
  return OscillatorParams<double>(
      j.at("initial_phase").get<double>(), j.at("frequency_hz").get<double>(),
      j.at("volatility_per_sqrt_s").get<double>(),
      j.at("duty_cycle").get<double>());
}

inline json stream_metadata_json(const BitStream<double>& stream,
                                 const OscillatorParams<double>& sampler,
                                 const OscillatorParams<double>& sampled,
                                 std::uint64_t master_seed,
                                 const std::string& bits_file,
                                 const std::string& phases_file,
                                 std::optional<std::pair<int, int>> delays) {
  json j{{"pair", {stream.pair.first, stream.pair.second}},
         {"n_bits", stream.n_bits()},
         {"mode", to_string(stream.mode)},
         {"master_seed", master_seed},
         {"subseed", stream.seed},
         {"sampler_period_s", stream.sampler_period},
         {"sampled_duty", stream.sampled_duty},
         {"bits_file", bits_file},
         {"sampler", oscillator_to_json(sampler)},
         {"sampled", oscillator_to_json(sampled)}};
  if (!phases_file.empty()) j["phases_file"] = phases_file;
  if (delays) j["delay_elements"] = {delays->first, delays->second};
  return j;
}

// ---- measurement records ----------------------------------------------------

inline json record_to_json(const MeasurementRecord<double>& r) {
  return json{{"pair", {r.pair.first, r.pair.second}},
              {"ratio", r.ratio},
              {"sigma_prime",
               {{"value", r.total_jitter.value},
                {"reference_period_s", r.total_jitter.reference_period}}},
              {"n_bits", r.n_bits},
              {"method", to_string(r.method)},
              {"flags", r.flags}};
}

inline MeasurementRecord<double> record_from_json(const json& j) {
  MeasurementRecord<double> r;
  r.pair = {j.at("pair")[0].get<int>(), j.at("pair")[1].get<int>()};
  r.ratio = j.at("ratio").get<double>();
  r.total_jitter = {j.at("sigma_prime").at("value").get<double>(),
                    j.at("sigma_prime").at("reference_period_s").get<double>()};
  r.n_bits = j.at("n_bits").get<std::int64_t>();
  const std::string method = j.at("method").get<std::string>();
  if (method == "bit_mle") r.method = MeasurementMethod::bit_mle;
  else if (method == "phase_oracle") r.method = MeasurementMethod::phase_oracle;
  else throw config_error("record: unknown method '" + method + "'");
  if (j.contains("flags"))
    r.flags = j["flags"].get<std::vector<std::string>>();
  return r;
}

inline void write_records_json(const std::string& path,
                               const std::vector<MeasurementRecord<double>>& recs) {
  json arr = json::array();
  for (const auto& r : recs) arr.push_back(record_to_json(r));
  auto out = detail::open_text(path);
  out << arr.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline std::vector<MeasurementRecord<double>> read_records_json(
    const std::string& path) {
  const json arr = load_json_file(path);
  if (!arr.is_array()) throw config_error(path + ": expected a JSON array");
  std::vector<MeasurementRecord<double>> recs;
  for (const auto& j : arr) recs.push_back(record_from_json(j));
  return recs;
}

// ---- recovery solution ------------------------------------------------------

inline json solution_to_json(const VolatilitySolution<double>& s) {
  return json{{"sigma_sq_T0", s.sigma_sq_T0},
              {"kappa_inf", s.kappa_inf},
              {"kappa_bound", s.kappa_bound},
              {"residual_inf", s.residual_inf},
              {"method", to_string(s.method)},
              {"flags", s.flags}};
}

}  // namespace rojt
