#include "mdlamp/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mdlamp/quantum.hpp"

namespace mdlamp {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' is not a number: '" + v + "'");
  }
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

KeyValueFile KeyValueFile::parse_string(std::string_view text) {
  KeyValueFile kv;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    std::string_view body = raw.substr(0, raw.find('#'));
    std::string line = trim(body);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key at line " +
                                  std::to_string(line_no));
    if (!kv.entries_.emplace(key, value).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::string KeyValueFile::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw std::invalid_argument("config: missing required key '" + key + "'");
  return it->second;
}

std::string KeyValueFile::get_or(const std::string& key,
                                 std::string fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
  return to_double(key, get(key));
}

double KeyValueFile::get_double_or(const std::string& key,
                                   double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueFile::get_int(const std::string& key) const {
  double v = get_double(key);
  auto n = static_cast<std::int64_t>(v);
  if (static_cast<double>(n) != v)
    throw std::invalid_argument("config: key '" + key + "' must be an integer");
  return n;
}

std::int64_t KeyValueFile::get_int_or(const std::string& key,
                                      std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueFile::get_u64_or(const std::string& key,
                                       std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("config: key '" + key +
                                "' is not an unsigned integer");
  return out;
}

bool KeyValueFile::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument("config: key '" + key + "' must be true/false");
}

std::vector<double> KeyValueFile::get_double_list(const std::string& key) const {
  std::string v = get(key);
  if (trim(v).empty()) return {};  // empty list: an empty sweep is valid
  std::vector<double> out;
  for (const std::string& piece : split(v, ','))
    out.push_back(to_double(key, piece));
  return out;
}

void KeyValueFile::require_known_keys(
    const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

std::vector<double> parse_value_grid(const std::string& text) {
  if (trim(text).empty()) return {};
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts = split(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("config: grid must be start:stop:count");
    double start = to_double("grid", parts[0]);
    double stop = to_double("grid", parts[1]);
    std::int64_t count = static_cast<std::int64_t>(to_double("grid", parts[2]));
    if (count < 1) throw std::invalid_argument("config: grid count must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
      out.push_back(count == 1 ? start
                               : start + (stop - start) *
                                             static_cast<double>(i) /
                                             static_cast<double>(count - 1));
    return out;
  }
  std::vector<double> out;
  for (const std::string& piece : split(text, ','))
    out.push_back(to_double("grid", piece));
  return out;
}

namespace {

MdlParams params_from(const KeyValueFile& kv, const std::string& prefix) {
  if (kv.has(prefix + ".sv_mu")) {
    if (kv.has(prefix + ".mu_min") || kv.has(prefix + ".mu_max"))
      throw std::invalid_argument(
          "config: give either sv_mu or the (mu_min, mu_max) pair, not both");
    return sv_to_mdl(SvParams(kv.get_double(prefix + ".sv_mu")));
  }
  return MdlParams(kv.get_double(prefix + ".mu_min"),
                   kv.get_double(prefix + ".mu_max"));
}

SourceModel source_from(const KeyValueFile& kv, const MdlParams& params) {
  std::string kind = kv.get("source.kind");
  if (kind == "iid") {
    if (kv.has("source.p")) {
      std::vector<double> p = kv.get_double_list("source.p");
      if (p.size() != 4)
        throw std::invalid_argument("config: source.p needs 4 entries");
      InputDistribution dist;
      dist.p = {p[0], p[1], p[2], p[3]};
      return SourceModel::make_iid(params, dist);
    }
    return SourceModel::make_uniform_iid(params);
  }
  if (kind == "extremal") {
    std::string fav = kv.get_or("source.favored", "00");
    if (fav.size() != 2 || (fav[0] != '0' && fav[0] != '1') ||
        (fav[1] != '0' && fav[1] != '1'))
      throw std::invalid_argument("config: source.favored must be two bits");
    return SourceModel::make_extremal(params, fav[0] - '0', fav[1] - '0');
  }
  if (kind == "history_toggle") return SourceModel::make_history_toggle(params);
  if (kind == "scripted") {
    std::int64_t bits = kv.get_int("source.script_bits");
    return SourceModel::make_scripted(
        params, BitString::from_hex(kv.get("source.script"),
                                    static_cast<std::size_t>(bits)));
  }
  throw std::invalid_argument("config: unknown source.kind '" + kind + "'");
}

DeviceModel device_from(const KeyValueFile& kv, const MdlParams& params) {
  std::string kind = kv.get("device.kind");
  if (kind == "honest") {
    double q = kv.get_double_or("device.depolarize", 0.0);
    if (kv.has("device.angles")) {
      std::vector<double> a = kv.get_double_list("device.angles");
      if (a.size() != 4)
        throw std::invalid_argument("config: device.angles needs 4 entries");
      // Best state for the given measurements: top eigenvector of the
      // violation operator.
      std::array<Measurement, 4> meas{Measurement{a[0]}, Measurement{a[1]},
                                      Measurement{a[2]}, Measurement{a[3]}};
      Eigen::Matrix4cd op =
          bell_operator(BellCoefficients::s_mu_tilde(params), meas);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(op);
      Eigen::Index top;
      es.eigenvalues().maxCoeff(&top);
      QuantumStrategy strategy{DensityOperator::pure(es.eigenvectors().col(top)),
                               {meas[0], meas[1]},
                               {meas[2], meas[3]}};
      return DeviceModel::honest_quantum(strategy, q);
    }
    OptimizerConfig opt;
    opt.restarts = static_cast<int>(kv.get_int_or("device.restarts", 32));
    return DeviceModel::honest_quantum(optimize_s_tilde(params, opt).strategy,
                                       q);
  }
  if (kind == "deterministic") {
    std::vector<double> t = kv.get_double_list("device.table");
    if (t.size() != 4)
      throw std::invalid_argument(
          "config: device.table needs 4 bits a0,a1,b0,b1");
    return DeviceModel::deterministic(
        {static_cast<int>(t[0]), static_cast<int>(t[1])},
        {static_cast<int>(t[2]), static_cast<int>(t[3])});
  }
  if (kind == "scripted") {
    std::int64_t nrounds = kv.get_int("device.script_rounds");
    BitString bits = BitString::from_hex(kv.get("device.script"),
                                         static_cast<std::size_t>(2 * nrounds));
    std::vector<std::array<std::uint8_t, 2>> rounds;
    rounds.reserve(static_cast<std::size_t>(nrounds));
    for (std::int64_t i = 0; i < nrounds; ++i)
      rounds.push_back({static_cast<std::uint8_t>(bits.bit(2 * i)),
                        static_cast<std::uint8_t>(bits.bit(2 * i + 1))});
    return DeviceModel::scripted(std::move(rounds));
  }
  throw std::invalid_argument("config: unknown device.kind '" + kind + "'");
}

const std::vector<std::string> kSimulateKeys = {
    "seed",
    "source.kind", "source.sv_mu", "source.mu_min", "source.mu_max",
    "source.p", "source.favored", "source.script", "source.script_bits",
    "device.kind", "device.depolarize", "device.angles", "device.restarts",
    "device.table", "device.script", "device.script_rounds",
    "eat.n", "eat.s_exp", "eat.delta_est", "eat.eps_s", "eat.eps_ea",
    "extractor.d", "extractor.eps_ext",
    "output.transcript",
};

const std::vector<std::string> kRateKeys = {
    "mu_min", "mu_max", "n", "delta_est", "eps_s", "eps_ea", "s_exp",
};

const std::vector<std::string> kOptimizeKeys = {
    "mu_min", "mu_max", "sv_mu", "restarts", "seed",
};

}  // namespace

SimulateConfig parse_simulate_config(const KeyValueFile& kv) {
  kv.require_known_keys(kSimulateKeys);
  MdlParams params = params_from(kv, "source");
  SourceModel source = source_from(kv, params);
  DeviceModel device = device_from(kv, params);
  EatParams eat(kv.get_double("eat.n"), kv.get_double("eat.s_exp"),
                kv.get_double("eat.delta_est"), kv.get_double("eat.eps_s"),
                kv.get_double("eat.eps_ea"));
  ExtractorConfig ext;
  ext.d = kv.get_int_or("extractor.d", 0);
  ext.eps_ext = kv.get_double("extractor.eps_ext");
  return SimulateConfig{kv.get_u64_or("seed", 0),
                        std::move(source),
                        std::move(device),
                        eat,
                        ext,
                        kv.get_bool_or("output.transcript", true)};
}

RateConfig parse_rate_config(const KeyValueFile& kv) {
  kv.require_known_keys(kRateKeys);
  std::vector<double> mins = kv.get_double_list("mu_min");
  std::vector<double> maxs = kv.get_double_list("mu_max");
  if (mins.size() != maxs.size())
    throw std::invalid_argument(
        "config: mu_min and mu_max lists must have equal length");
  RateConfig rc{{},
                parse_value_grid(kv.get("s_exp")),
                kv.get_double("n"),
                kv.get_double("delta_est"),
                kv.get_double("eps_s"),
                kv.get_double("eps_ea")};
  rc.mu.reserve(mins.size());
  for (std::size_t i = 0; i < mins.size(); ++i)
    rc.mu.emplace_back(mins[i], maxs[i]);
  return rc;
}

OptimizeConfig parse_optimize_config(const KeyValueFile& kv) {
  kv.require_known_keys(kOptimizeKeys);
  MdlParams params = kv.has("sv_mu")
                         ? sv_to_mdl(SvParams(kv.get_double("sv_mu")))
                         : MdlParams(kv.get_double("mu_min"),
                                     kv.get_double("mu_max"));
  OptimizerConfig opt;
  opt.restarts = static_cast<int>(kv.get_int_or("restarts", 32));
  opt.seed = kv.get_u64_or("seed", OptimizerConfig{}.seed);
  return OptimizeConfig{params, opt};
}

}  // namespace mdlamp
