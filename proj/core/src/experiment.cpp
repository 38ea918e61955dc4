#include "vpsc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "vpsc/baselines.hpp"
#include "vpsc/errors.hpp"

#ifndef VPSC_VERSION_STRING
#define VPSC_VERSION_STRING "0.0.0"
#endif

namespace vpsc {
namespace {

using json = nlohmann::json;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// splitmix64 finaliser; derives channel seeds from (seed, point).
std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kAutocorrStream = 0xac;
constexpr std::uint64_t kSpectrumStream = 0x5f;
constexpr std::uint64_t kSyncStream = 0x5c;
constexpr std::uint64_t kDelayPointBase = 1000;

std::vector<int> random_symbols(std::mt19937_64& rng, std::size_t count) {
  std::vector<int> out(count);
  for (auto& s : out) s = static_cast<int>(rng() & 15u);
  return out;
}

std::vector<double> modulate_stream(const std::vector<int>& symbols, const ModemConfig& modem) {
  std::vector<double> out;
  out.reserve(symbols.size() * modem.samples_per_symbol());
  for (int s : symbols) {
    const auto frame = modulate(bits_of_index(s), modem);
    out.insert(out.end(), frame.samples.begin(), frame.samples.end());
  }
  return out;
}

double signal_amplitude(const ModemConfig& modem) { return 1.01 * std::sqrt(18.0) * modem.scale; }

ChannelConfig link_channel(const ExperimentSpec& spec, double snr_db, double delay_scale, std::uint64_t rng_seed) {
  ChannelConfig ch = spec.channel;
  const auto n = static_cast<double>(spec.frame_length());
  ch.snr_db = snr_db == kInfiniteSnr ? kInfiniteSnr : snr_db + 10.0 * std::log10(8.0 / n);
  ch.reference_power = reference_power(spec.modem);
  ch.delay_scale = delay_scale;
  ch.rng_seed = rng_seed;
  ch.f_s = spec.modem.f_s;
  ch.bulk_delay = 0;
  return ch;
}

// Per-frame encrypt/decrypt for one cipher under one key.
class LinkCipher {
 public:
  LinkCipher(const ExperimentSpec& spec, CipherKind kind, double sigma, std::uint64_t seed, std::uint64_t key_index,
             const BandMask& mask)
      : kind_(kind), n_(spec.frame_length()) {
    const auto material = key_material(spec, seed, key_index);
    sync_ = SyncConfig::for_frames(material, n_, spec.modem.f_s);
    const double a = signal_amplitude(spec.modem);
    range_ = AlmRange{-a, a};
    mask_ = mask;
    if (kind == CipherKind::vpsc) cipher_ = vpsc_cipher_config(spec, sigma, mask);
    if (kind == CipherKind::rsa) rsa_ = make_rsa_key(material, Quantizer{-a, a, spec.quantizer_levels});
  }

  const CipherConfig& cipher() const { return cipher_; }

  SignalFrame encrypt(const SignalFrame& s, std::uint64_t f) const {
    switch (kind_) {
      case CipherKind::none: return s;
      case CipherKind::vpsc: return encrypt_frame(s, key_frame(sync_, f, n_, cipher_.phi_effective()), cipher_);
      case CipherKind::fcs: return fcs_encrypt(s, fcs_key(sync_, f, n_, mask_));
      case CipherKind::alm: return alm_encrypt(s, alm_key(sync_, f, n_), range_);
      case CipherKind::rsa: return rsa_encrypt(s, rsa_);
    }
    return s;
  }

  SignalFrame decrypt(const SignalFrame& c, std::uint64_t f) const {
    switch (kind_) {
      case CipherKind::none: return c;
      case CipherKind::vpsc: return decrypt_frame(c, key_frame(sync_, f, n_, cipher_.phi_effective()), cipher_);
      case CipherKind::fcs: return fcs_decrypt(c, fcs_key(sync_, f, n_, mask_));
      case CipherKind::alm: return alm_decrypt(c, alm_key(sync_, f, n_), range_);
      case CipherKind::rsa: return rsa_decrypt(c, rsa_);
    }
    return c;
  }

 private:
  CipherKind kind_;
  std::size_t n_;
  SyncConfig sync_;
  CipherConfig cipher_;
  BandMask mask_;
  AlmRange range_;
  RsaSampleKey rsa_;
};

std::vector<double> encrypt_stream(const LinkCipher& lc, const std::vector<double>& plain, std::size_t n) {
  std::vector<double> out;
  out.reserve(plain.size());
  for (std::size_t f = 0; f * n < plain.size(); ++f) {
    SignalFrame frame(std::vector<double>(plain.begin() + static_cast<long>(f * n),
                                          plain.begin() + static_cast<long>((f + 1) * n)));
    const auto c = lc.encrypt(frame, f);
    out.insert(out.end(), c.samples.begin(), c.samples.end());
  }
  return out;
}

// JSON helpers. Infinite SNRs travel as the strings "inf" / "-inf".
double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return kInfiniteSnr;
    if (s == "-inf" || s == "-Infinity") return -kInfiniteSnr;
  }
  throw Error(ErrorKind::spec, "expected a number or \"inf\", got " + j.dump());
}

json number_to(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_number_if(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = number_from(j.at(key));
}

void read_numbers_if(const json& j, const char* key, std::vector<double>& out) {
  if (!j.contains(key)) return;
  out.clear();
  for (const auto& v : j.at(key)) out.push_back(number_from(v));
}

json numbers_to(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number_to(x));
  return a;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string_view library_version() noexcept { return VPSC_VERSION_STRING; }

std::string_view to_string(CipherKind kind) noexcept {
  switch (kind) {
    case CipherKind::none: return "none";
    case CipherKind::vpsc: return "vpsc";
    case CipherKind::fcs: return "fcs";
    case CipherKind::alm: return "alm";
    case CipherKind::rsa: return "rsa";
  }
  return "unknown";
}

CipherKind parse_cipher_kind(std::string_view name) {
  for (auto k : {CipherKind::none, CipherKind::vpsc, CipherKind::fcs, CipherKind::alm, CipherKind::rsa}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorKind::spec, "unknown cipher '" + std::string(name) + "'");
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::spec, what); };
  if (ciphers.empty()) fail("cipher list is empty");
  if (symbol_count < 1) fail("symbol_count must be >= 1");
  if (snr_db.empty()) fail("snr sweep is empty");
  if (delay_scales.empty()) fail("delay_scale sweep is empty");
  if (seeds.empty()) fail("seed list is empty");
  if (quantizer_levels < 2) fail("quantizer needs at least two levels");
  if (autocorr.keys < 1 || autocorr.frames < 1) fail("autocorrelation needs at least one key and frame");
  if (spectrum.frames < 1) fail("spectrum needs at least one frame");
  if (sync.capture_frames < 3) fail("sync capture must span at least three frames");
  if (sync.capture_offset_frames + sync.capture_frames > sync.stream_frames) {
    fail("sync capture runs past the end of the transmitted stream");
  }
  for (double s : snr_db) {
    if (std::isnan(s)) fail("snr sweep contains NaN");
  }
  try {
    modem.validate();
    require_frame_length(frame_length());
    if (parse_hex(secret_seed).empty()) fail("secret seed is empty");
    for (double scale : delay_scales) {
      ChannelConfig ch = channel;
      ch.delay_scale = scale;
      ch.validate();
    }
    if (vpsc.phi && !(*vpsc.phi > 0.0)) fail("phi must be positive");
    if (!(vpsc.lambda_sigmas >= 0.0) || !(vpsc.lambda_floor >= 0.0)) fail("lambda settings must be >= 0");
    if (vpsc.psi_multiplier == 0) fail("psi multiplier must be positive");
    band_hz(frame_length(), modem.f_s, spectrum.band_lo_hz, spectrum.band_hi_hz);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::spec) throw;
    throw Error(ErrorKind::spec, e.what());
  }
}

ExperimentSpec parse_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::spec, std::string("spec is not valid JSON: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    if (j.contains("ciphers")) {
      spec.ciphers.clear();
      for (const auto& c : j.at("ciphers")) spec.ciphers.push_back(parse_cipher_kind(c.get<std::string>()));
    }
    if (j.contains("vpsc")) {
      const auto& v = j.at("vpsc");
      if (v.contains("mode")) spec.vpsc.mode = parse_mitigation_mode(v.at("mode").get<std::string>());
      read_number_if(v, "lambda_sigmas", spec.vpsc.lambda_sigmas);
      read_number_if(v, "lambda_floor", spec.vpsc.lambda_floor);
      read_if(v, "psi_multiplier", spec.vpsc.psi_multiplier);
      if (v.contains("phi") && !v.at("phi").is_null()) spec.vpsc.phi = number_from(v.at("phi"));
    }
    if (j.contains("modem")) {
      const auto& m = j.at("modem");
      read_number_if(m, "f_c", spec.modem.f_c);
      read_number_if(m, "f_s", spec.modem.f_s);
      read_number_if(m, "t_sym", spec.modem.t_sym);
      read_number_if(m, "scale", spec.modem.scale);
      read_number_if(m, "guard_hz", spec.modem.guard_hz);
    }
    if (j.contains("channel")) {
      const auto& c = j.at("channel");
      read_number_if(c, "delay_scale", spec.channel.delay_scale);
      read_if(c, "rng_seed", spec.channel.rng_seed);
      read_if(c, "freeze_fading", spec.channel.freeze_fading);
      read_if(c, "max_delay", spec.channel.max_delay);
      if (c.contains("taps")) {
        spec.channel.taps.clear();
        for (const auto& t : c.at("taps")) {
          Tap tap;
          read_number_if(t, "delay", tap.delay);
          read_number_if(t, "mean_power", tap.mean_power);
          read_number_if(t, "doppler_hz", tap.doppler_hz);
          spec.channel.taps.push_back(tap);
        }
      }
    }
    read_if(j, "multipath", spec.multipath);
    read_numbers_if(j, "snr_db", spec.snr_db);
    read_numbers_if(j, "delay_scales", spec.delay_scales);
    read_number_if(j, "delay_snr_db", spec.delay_snr_db);
    read_if(j, "symbol_count", spec.symbol_count);
    read_if(j, "seeds", spec.seeds);
    read_if(j, "secret_seed", spec.secret_seed);
    read_if(j, "quantizer_levels", spec.quantizer_levels);
    read_if(j, "constellation_points", spec.constellation_points);
    if (j.contains("autocorr")) {
      const auto& a = j.at("autocorr");
      read_if(a, "frames", spec.autocorr.frames);
      read_if(a, "keys", spec.autocorr.keys);
      read_if(a, "max_lag", spec.autocorr.max_lag);
      read_number_if(a, "sine_hz", spec.autocorr.sine_hz);
    }
    if (j.contains("spectrum")) {
      const auto& s = j.at("spectrum");
      read_if(s, "frames", spec.spectrum.frames);
      read_number_if(s, "band_lo_hz", spec.spectrum.band_lo_hz);
      read_number_if(s, "band_hi_hz", spec.spectrum.band_hi_hz);
    }
    if (j.contains("sync")) {
      const auto& s = j.at("sync");
      read_if(s, "delays", spec.sync.delays);
      read_numbers_if(s, "snr_db", spec.sync.snr_db);
      read_if(s, "n_keys", spec.sync.n_keys);
      read_if(s, "wrong_seed_trials", spec.sync.wrong_seed_trials);
      read_if(s, "stream_frames", spec.sync.stream_frames);
      read_if(s, "capture_offset_frames", spec.sync.capture_offset_frames);
      read_if(s, "capture_frames", spec.sync.capture_frames);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::spec, std::string("malformed spec field: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::spec) throw;
    throw Error(ErrorKind::spec, e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["ciphers"] = json::array();
  for (auto c : spec.ciphers) j["ciphers"].push_back(std::string(to_string(c)));
  j["vpsc"] = {{"mode", std::string(to_string(spec.vpsc.mode))},
               {"lambda_sigmas", spec.vpsc.lambda_sigmas},
               {"lambda_floor", spec.vpsc.lambda_floor},
               {"psi_multiplier", spec.vpsc.psi_multiplier},
               {"phi", spec.vpsc.phi ? json(*spec.vpsc.phi) : json(nullptr)}};
  j["modem"] = {{"f_c", spec.modem.f_c},
                {"f_s", spec.modem.f_s},
                {"t_sym", spec.modem.t_sym},
                {"scale", spec.modem.scale},
                {"guard_hz", spec.modem.guard_hz}};
  json taps = json::array();
  for (const auto& t : spec.channel.taps) {
    taps.push_back({{"delay", t.delay}, {"mean_power", t.mean_power}, {"doppler_hz", t.doppler_hz}});
  }
  j["channel"] = {{"taps", taps},
                  {"delay_scale", spec.channel.delay_scale},
                  {"rng_seed", spec.channel.rng_seed},
                  {"freeze_fading", spec.channel.freeze_fading},
                  {"max_delay", spec.channel.max_delay}};
  j["multipath"] = spec.multipath;
  j["snr_db"] = numbers_to(spec.snr_db);
  j["delay_scales"] = numbers_to(spec.delay_scales);
  j["delay_snr_db"] = number_to(spec.delay_snr_db);
  j["symbol_count"] = spec.symbol_count;
  j["seeds"] = spec.seeds;
  j["secret_seed"] = spec.secret_seed;
  j["quantizer_levels"] = spec.quantizer_levels;
  j["constellation_points"] = spec.constellation_points;
  j["autocorr"] = {{"frames", spec.autocorr.frames},
                   {"keys", spec.autocorr.keys},
                   {"max_lag", spec.autocorr.max_lag},
                   {"sine_hz", spec.autocorr.sine_hz}};
  j["spectrum"] = {{"frames", spec.spectrum.frames},
                   {"band_lo_hz", spec.spectrum.band_lo_hz},
                   {"band_hi_hz", spec.spectrum.band_hi_hz}};
  j["sync"] = {{"delays", spec.sync.delays},
               {"snr_db", numbers_to(spec.sync.snr_db)},
               {"n_keys", spec.sync.n_keys},
               {"wrong_seed_trials", spec.sync.wrong_seed_trials},
               {"stream_frames", spec.sync.stream_frames},
               {"capture_offset_frames", spec.sync.capture_offset_frames},
               {"capture_frames", spec.sync.capture_frames}};
  return j.dump(2);
}

double reference_power(const ModemConfig& modem) noexcept {
  // E[I^2] = E[Q^2] = 5 and each carries half its square on average.
  return 5.0 * modem.scale * modem.scale;
}

double noise_sigma(const ModemConfig& modem, double ebn0_db) {
  if (ebn0_db == kInfiniteSnr) return 0.0;
  const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
  const auto n = static_cast<double>(modem.samples_per_symbol());
  return std::sqrt(reference_power(modem) * n / (8.0 * ebn0));
}

double max_symbol_magnitude(const ModemConfig& modem) {
  double best = 0.0;
  for (int s = 0; s < 16; ++s) {
    const auto spec = analyze(modulate(bits_of_index(s), modem));
    best = std::max(best, *std::max_element(spec.magnitudes.begin(), spec.magnitudes.end()));
  }
  return best;
}

CipherConfig vpsc_cipher_config(const ExperimentSpec& spec, double sigma, const BandMask& mask) {
  CipherConfig cfg;
  cfg.n = spec.frame_length();
  cfg.phi = spec.vpsc.phi ? *spec.vpsc.phi : 1.01 * max_symbol_magnitude(spec.modem);
  const double sigma0 = sigma * std::sqrt(static_cast<double>(cfg.n) / 2.0);
  cfg.lambda = std::max(spec.vpsc.lambda_sigmas * sigma0, spec.vpsc.lambda_floor * cfg.phi);
  cfg.psi_multiplier = spec.vpsc.psi_multiplier;
  cfg.set_psi_from_noise(sigma0);
  cfg.mode = spec.vpsc.mode;
  cfg.band_mask = mask;
  return cfg;
}

std::vector<std::uint8_t> key_material(const ExperimentSpec& spec, std::uint64_t seed, std::uint64_t key_index) {
  auto bytes = parse_hex(spec.secret_seed);
  for (std::uint64_t v : {seed, key_index}) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  return bytes;
}

BerRecord simulate_link(const ExperimentSpec& spec, CipherKind cipher, double snr_db, double delay_scale,
                        bool multipath_on, std::uint64_t seed, std::uint64_t point_index,
                        std::vector<ConstellationPoint>* constellation) {
  const std::size_t n = spec.frame_length();
  auto rng = make_rng(seed, point_index);
  const auto symbols = random_symbols(rng, spec.symbol_count);
  const auto plain = modulate_stream(symbols, spec.modem);

  const double sigma = noise_sigma(spec.modem, snr_db);
  const LinkCipher lc(spec, cipher, sigma, seed, 0, {});
  auto rx = encrypt_stream(lc, plain, n);

  const auto ch = link_channel(spec, snr_db, delay_scale, mix(seed, point_index));
  if (multipath_on) rx = multipath(rx, ch);
  rx = awgn(rx, ch);

  BerRecord rec;
  rec.cipher = cipher;
  rec.snr_db = snr_db;
  rec.delay_scale = delay_scale;
  rec.multipath = multipath_on;
  for (std::size_t f = 0; f < symbols.size(); ++f) {
    SignalFrame frame(std::vector<double>(rx.begin() + static_cast<long>(f * n),
                                          rx.begin() + static_cast<long>((f + 1) * n)));
    const auto decrypted = lc.decrypt(frame, f);
    const auto got = demodulate(decrypted, spec.modem);
    const auto sent = bits_of_index(symbols[f]);
    for (std::size_t b = 0; b < 4; ++b) rec.bit_errors += got[b] != sent[b] ? 1 : 0;
    rec.bits_total += 4;
    if (constellation && f < spec.constellation_points) {
      const auto [i, q] = estimate_point(decrypted.view(), spec.modem);
      constellation->push_back({cipher, snr_db, delay_scale, symbols[f], i, q});
    }
  }
  return rec;
}

BerReport run_ber_experiment(const ExperimentSpec& spec) {
  spec.validate();
  BerReport report;
  for (std::size_t p = 0; p < spec.snr_db.size(); ++p) {
    for (auto cipher : spec.ciphers) {
      BerRecord total;
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        auto rec = simulate_link(spec, cipher, spec.snr_db[p], spec.channel.delay_scale, spec.multipath,
                                 spec.seeds[s], p, s == 0 ? &report.constellation : nullptr);
        total.cipher = rec.cipher;
        total.snr_db = rec.snr_db;
        total.delay_scale = rec.delay_scale;
        total.multipath = rec.multipath;
        total.bit_errors += rec.bit_errors;
        total.bits_total += rec.bits_total;
      }
      report.records.push_back(total);
    }
  }
  return report;
}

BerReport run_ber_delay_experiment(const ExperimentSpec& spec) {
  spec.validate();
  BerReport report;
  for (std::size_t p = 0; p < spec.delay_scales.size(); ++p) {
    for (auto cipher : spec.ciphers) {
      BerRecord total;
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        auto rec = simulate_link(spec, cipher, spec.delay_snr_db, spec.delay_scales[p], true, spec.seeds[s],
                                 kDelayPointBase + p, s == 0 ? &report.constellation : nullptr);
        total.cipher = rec.cipher;
        total.snr_db = rec.snr_db;
        total.delay_scale = rec.delay_scale;
        total.multipath = true;
        total.bit_errors += rec.bit_errors;
        total.bits_total += rec.bits_total;
      }
      report.records.push_back(total);
    }
  }
  return report;
}

std::vector<AutocorrTrace> run_autocorrelation_analysis(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t n = spec.frame_length();
  auto rng = make_rng(spec.seeds.front(), kAutocorrStream);
  const auto qam = modulate_stream(random_symbols(rng, spec.autocorr.frames), spec.modem);

  std::vector<double> sine(qam.size());
  const double w = kTwoPi * spec.autocorr.sine_hz / spec.modem.f_s;
  for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = 3.0 * spec.modem.scale * std::sin(w * static_cast<double>(i));

  auto trace_of = [&](CipherKind kind, const std::string& input, std::size_t key, const std::vector<double>& x) {
    AutocorrTrace t;
    t.cipher = kind;
    t.input = input;
    t.key = key;
    const auto r = autocorrelation(x);
    const std::size_t max_lag = std::min(spec.autocorr.max_lag, r.size() - 1);
    t.normalized.resize(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) t.normalized[k] = r[k] / r[0];
    for (std::size_t k = 1; k <= max_lag; ++k) t.max_off_peak = std::max(t.max_off_peak, std::abs(t.normalized[k]));
    return t;
  };

  std::vector<AutocorrTrace> traces;
  for (auto kind : spec.ciphers) {
    if (kind == CipherKind::none) {
      traces.push_back(trace_of(kind, "qam", 0, qam));
      continue;
    }
    for (std::size_t key = 0; key < spec.autocorr.keys; ++key) {
      const LinkCipher lc(spec, kind, 0.0, spec.seeds.front(), key, kind == CipherKind::vpsc ? full_band(n) : BandMask{});
      traces.push_back(trace_of(kind, "qam", key, encrypt_stream(lc, qam, n)));
      if (kind == CipherKind::rsa) traces.push_back(trace_of(kind, "sine", key, encrypt_stream(lc, sine, n)));
    }
  }
  return traces;
}

std::vector<SpectrumReport> run_spectrum_report(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t n = spec.frame_length();
  const auto mask = band_hz(n, spec.modem.f_s, spec.spectrum.band_lo_hz, spec.spectrum.band_hi_hz);
  auto rng = make_rng(spec.seeds.front(), kSpectrumStream);
  const auto plain = modulate_stream(random_symbols(rng, spec.spectrum.frames), spec.modem);

  std::vector<CipherKind> kinds{CipherKind::none};
  for (auto k : spec.ciphers) {
    if (k != CipherKind::none) kinds.push_back(k);
  }

  std::vector<SpectrumReport> reports;
  for (auto kind : kinds) {
    const LinkCipher lc(spec, kind, 0.0, spec.seeds.front(), 0, mask);
    const auto stream = kind == CipherKind::none ? plain : encrypt_stream(lc, plain, n);
    SpectrumReport rep;
    rep.cipher = kind;
    rep.psd.assign(n / 2 + 1, 0.0);
    double band_magnitude = 0.0;
    std::size_t band_count = 0;
    const auto frames = stream.size() / n;
    for (std::size_t f = 0; f < frames; ++f) {
      const auto spec_f = analyze(std::span<const double>(stream.data() + f * n, n));
      for (std::size_t k = 0; k < n; ++k) {
        const double p = spec_f.magnitudes[k] * spec_f.magnitudes[k];
        (mask[k] ? rep.in_band_power : rep.out_of_band_power) += p;
        if (k <= n / 2) rep.psd[k] += p / static_cast<double>(n * frames);
        if (mask[k]) {
          band_magnitude += spec_f.magnitudes[k];
          ++band_count;
        }
      }
    }
    const double total = rep.in_band_power + rep.out_of_band_power;
    rep.out_of_band_fraction = total > 0.0 ? rep.out_of_band_power / total : 0.0;
    rep.mean_band_magnitude = band_count ? band_magnitude / static_cast<double>(band_count) : 0.0;
    if (kind == CipherKind::vpsc) rep.expected_band_magnitude = lc.cipher().phi_effective() / 2.0 + lc.cipher().lambda;
    reports.push_back(std::move(rep));
  }
  return reports;
}

SyncScenario make_sync_scenario(const ExperimentSpec& spec, std::size_t injected, double snr_db, std::uint64_t seed) {
  const std::size_t n = spec.frame_length();
  SyncScenario sc;
  sc.tx_sync = SyncConfig::for_frames(key_material(spec, seed, 0), n, spec.modem.f_s);
  sc.cipher = vpsc_cipher_config(spec, noise_sigma(spec.modem, snr_db), full_band(n));

  auto rng = make_rng(seed, kSyncStream);
  const auto plain = modulate_stream(random_symbols(rng, spec.sync.stream_frames), spec.modem);
  std::vector<double> tx;
  tx.reserve(plain.size());
  for (std::size_t f = 0; f < spec.sync.stream_frames; ++f) {
    SignalFrame frame(std::vector<double>(plain.begin() + static_cast<long>(f * n),
                                          plain.begin() + static_cast<long>((f + 1) * n)));
    const auto c = encrypt_frame(frame, key_frame(sc.tx_sync, f, n, sc.cipher.phi_effective()), sc.cipher);
    tx.insert(tx.end(), c.samples.begin(), c.samples.end());
  }
  auto ch = link_channel(spec, snr_db, 1.0, mix(seed, 0x5c00 + injected));
  auto rx = awgn(delay(tx, injected), ch);

  const std::size_t head = spec.sync.capture_offset_frames * n;
  const std::size_t len = spec.sync.capture_frames * n;
  sc.capture.f_s = spec.modem.f_s;
  // The receiver clock ignores the propagation delay.
  sc.capture.t_rx_head = static_cast<double>(head) / spec.modem.f_s;
  sc.capture.samples.assign(len, 0.0);
  for (std::size_t i = 0; i < len && head + i < rx.size(); ++i) sc.capture.samples[i] = rx[head + i];
  return sc;
}

std::vector<SyncTrialRecord> run_sync_trials(const ExperimentSpec& spec) {
  spec.validate();
  SyncOptions opts;
  opts.n_keys = spec.sync.n_keys;
  std::vector<SyncTrialRecord> out;
  std::size_t trial = 0;

  auto run = [&](std::uint64_t seed, std::size_t injected, double snr, bool wrong) {
    const auto sc = make_sync_scenario(spec, injected, snr, seed);
    SyncConfig rx_sync = sc.tx_sync;
    if (wrong) rx_sync.secret_seed = key_material(spec, seed, 1);
    SyncTrialRecord rec;
    rec.trial = trial++;
    rec.seed = seed;
    rec.injected = injected;
    rec.snr_db = snr;
    rec.wrong_seed = wrong;
    const auto res = scan_alignment(sc.capture, rx_sync, sc.cipher, opts);
    rec.detected = res.detected;
    rec.inferred = res.lag;
    rec.error = res.lag - static_cast<long>(injected);
    rec.peak_ratio = res.stats.ratio();
    if (wrong) {
      rec.status = res.detected ? "false_positive" : "sync_failure";
    } else {
      rec.status = res.detected ? "ok" : "sync_failure";
    }
    out.push_back(std::move(rec));
  };

  for (auto seed : spec.seeds) {
    for (double snr : spec.sync.snr_db) {
      for (auto injected : spec.sync.delays) run(seed, injected, snr, false);
    }
  }
  for (std::size_t t = 0; t < spec.sync.wrong_seed_trials; ++t) {
    const auto& d = spec.sync.delays;
    const auto& s = spec.sync.snr_db;
    run(spec.seeds.front() + 1 + t, d.empty() ? 0 : d[t % d.size()], s.empty() ? kInfiniteSnr : s[t % s.size()], true);
  }
  return out;
}

void write_ber_csv(const std::filesystem::path& path, const std::vector<BerRecord>& records) {
  auto out = open_csv(path);
  out << "cipher,snr_db,delay_scale,multipath,bit_errors,bits_total,ber\n";
  for (const auto& r : records) {
    out << to_string(r.cipher) << ',' << format_number(r.snr_db) << ',' << format_number(r.delay_scale) << ','
        << (r.multipath ? 1 : 0) << ',' << r.bit_errors << ',' << r.bits_total << ',' << format_number(r.ber())
        << '\n';
  }
}

void write_constellation_csv(const std::filesystem::path& path, const std::vector<ConstellationPoint>& points) {
  auto out = open_csv(path);
  out << "cipher,snr_db,delay_scale,sent,i,q\n";
  for (const auto& p : points) {
    out << to_string(p.cipher) << ',' << format_number(p.snr_db) << ',' << format_number(p.delay_scale) << ','
        << p.sent << ',' << format_number(p.i) << ',' << format_number(p.q) << '\n';
  }
}

void write_autocorr_csv(const std::filesystem::path& path, const std::vector<AutocorrTrace>& traces) {
  auto out = open_csv(path);
  out << "cipher,input,key,lag,r_normalized\n";
  for (const auto& t : traces) {
    for (std::size_t k = 0; k < t.normalized.size(); ++k) {
      out << to_string(t.cipher) << ',' << t.input << ',' << t.key << ',' << k << ','
          << format_number(t.normalized[k]) << '\n';
    }
  }
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumReport>& reports,
                        const ExperimentSpec& spec) {
  auto out = open_csv(path);
  out << "cipher,bin,freq_hz,psd\n";
  const auto n = static_cast<double>(spec.frame_length());
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.psd.size(); ++k) {
      out << to_string(r.cipher) << ',' << k << ',' << format_number(static_cast<double>(k) * spec.modem.f_s / n)
          << ',' << format_number(r.psd[k]) << '\n';
    }
  }
}

void write_spectrum_summary_csv(const std::filesystem::path& path, const std::vector<SpectrumReport>& reports) {
  auto out = open_csv(path);
  out << "cipher,in_band_power,out_of_band_power,out_of_band_fraction,mean_band_magnitude,expected_band_magnitude\n";
  for (const auto& r : reports) {
    out << to_string(r.cipher) << ',' << format_number(r.in_band_power) << ',' << format_number(r.out_of_band_power)
        << ',' << format_number(r.out_of_band_fraction) << ',' << format_number(r.mean_band_magnitude) << ','
        << format_number(r.expected_band_magnitude) << '\n';
  }
}

void write_sync_csv(const std::filesystem::path& path, const std::vector<SyncTrialRecord>& records) {
  auto out = open_csv(path);
  out << "trial,seed,injected_samples,snr_db,wrong_seed,status,inferred_samples,error_samples,peak_ratio\n";
  for (const auto& r : records) {
    out << r.trial << ',' << r.seed << ',' << r.injected << ',' << format_number(r.snr_db) << ','
        << (r.wrong_seed ? 1 : 0) << ',' << r.status << ',' << r.inferred << ',' << r.error << ','
        << format_number(r.peak_ratio) << '\n';
  }
}

void write_manifest(const std::filesystem::path& path, const ExperimentSpec& spec, std::string_view experiment,
                    const std::vector<std::string>& files) {
  json j;
  j["experiment"] = std::string(experiment);
  j["library_version"] = std::string(library_version());
  j["seeds"] = spec.seeds;
  j["files"] = files;
  j["spec"] = json::parse(spec_to_json(spec));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace vpsc
