// mdlamp: measurement-dependent-locality randomness amplification toolkit.
//
// Subcommands:
//   rate      entropy-rate sweep over (mu, S_exp) grid points -> CSV
//   optimize  maximal quantum MDL violation for given source parameters
//   simulate  full protocol execution -> transcript/summary CSV + key file
//   extract   raw two-source extraction on packed bitstream files
//
// Exit codes: 0 success (an aborted protocol run is still a success),
// 2 usage/schema errors, 3 runtime/I/O errors.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mdlamp/config.hpp"
#include "mdlamp/protocol.hpp"
#include "mdlamp/quantum.hpp"
#include "mdlamp/rates.hpp"

namespace fs = std::filesystem;
using namespace mdlamp;

namespace {

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed: '" + path.string() + "'");
}

void write_bitstring(const fs::path& path, const BitString& bits,
                     std::int64_t m_hint) {
  std::vector<std::uint8_t> bytes = bits.packed();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: '" + path.string() + "'");
  write_text(path.string() + ".hdr",
             std::to_string(bits.size()) + " " + std::to_string(m_hint) + "\n");
}

BitString read_bitstring(const fs::path& path) {
  std::ifstream hdr(path.string() + ".hdr");
  if (!hdr)
    throw std::runtime_error("missing sidecar '" + path.string() + ".hdr'");
  std::int64_t nbits = -1, m_hint = 0;
  hdr >> nbits >> m_hint;
  if (nbits < 0)
    throw std::runtime_error("bad sidecar '" + path.string() + ".hdr'");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return BitString::from_packed(bytes, static_cast<std::size_t>(nbits));
}

int cmd_rate(const std::string& config_path, const std::string& out_dir) {
  RateConfig rc = parse_rate_config(KeyValueFile::parse_file(config_path));
  std::string csv =
      "mu_min,mu_max,n,delta_est,eps_s,eps_ea,s_exp,eta_opt,s_t_star,status\n";
  for (const auto& [mu_min, mu_max] : rc.mu) {
    for (double s_exp : rc.s_exp) {
      std::string prefix = fmt(mu_min) + "," + fmt(mu_max) + "," +
                           fmt(rc.n, "%.15g") + "," + fmt(rc.delta_est) + "," +
                           fmt(rc.eps_s) + "," + fmt(rc.eps_ea) + "," +
                           fmt(s_exp) + ",";
      try {
        MdlParams params(mu_min, mu_max);
        RateResult r = eta_opt(
            EatParams(rc.n, s_exp, rc.delta_est, rc.eps_s, rc.eps_ea), params);
        csv += prefix + fmt(r.eta_opt) + "," + fmt(r.s_t_star) + ",ok\n";
      } catch (const std::exception&) {
        csv += prefix + ",,infeasible\n";
      }
    }
  }
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "rate.csv", csv);
  std::fputs(csv.c_str(), stdout);
  return 0;
}

int cmd_optimize(const std::string& config_path) {
  OptimizeConfig oc = parse_optimize_config(KeyValueFile::parse_file(config_path));
  OptimizeResult res = optimize_s_tilde(oc.params, oc.optimizer);
  MdlParams p = oc.params;

  std::printf("maximal quantum MDL violation for mu = (%s, %s)\n",
              fmt(p.mu_min).c_str(), fmt(p.mu_max).c_str());
  std::printf("  s_tilde_star   = %s\n", fmt(res.value, "%.12g").c_str());
  std::printf("  angles (A0 A1 B0 B1) = %s %s %s %s\n",
              fmt(res.angles[0]).c_str(), fmt(res.angles[1]).c_str(),
              fmt(res.angles[2]).c_str(), fmt(res.angles[3]).c_str());
  Eigen::SelfAdjointEigenSolver<Matrix> es(res.strategy.state.matrix(),
                                           Eigen::EigenvaluesOnly);
  std::printf("  state spectrum = %s %s %s %s\n",
              fmt(es.eigenvalues()(0)).c_str(), fmt(es.eigenvalues()(1)).c_str(),
              fmt(es.eigenvalues()(2)).c_str(), fmt(es.eigenvalues()(3)).c_str());
  std::printf("  max entropy bound (bits/round) = %s\n",
              fmt(g_mu(res.value, p)).c_str());
  std::printf("  converged = %s, best restart = %d\n",
              res.converged ? "true" : "false", res.best_restart);

  // machine-readable block
  std::printf("---\n");
  std::printf("mu_min=%s\n", fmt(p.mu_min, "%.17g").c_str());
  std::printf("mu_max=%s\n", fmt(p.mu_max, "%.17g").c_str());
  std::printf("s_tilde_star=%s\n", fmt(res.value, "%.17g").c_str());
  std::printf("theta_a0=%s\n", fmt(res.angles[0], "%.17g").c_str());
  std::printf("theta_a1=%s\n", fmt(res.angles[1], "%.17g").c_str());
  std::printf("theta_b0=%s\n", fmt(res.angles[2], "%.17g").c_str());
  std::printf("theta_b1=%s\n", fmt(res.angles[3], "%.17g").c_str());
  std::printf("max_entropy=%s\n", fmt(g_mu(res.value, p), "%.17g").c_str());
  std::printf("converged=%s\n", res.converged ? "true" : "false");
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed_override, bool have_seed_override) {
  SimulateConfig sc = parse_simulate_config(KeyValueFile::parse_file(config_path));
  std::uint64_t seed = have_seed_override ? seed_override : sc.seed;

  RunOptions options;
  options.keep_transcript = sc.write_transcript;
  ProtocolOutcome out = run(sc.device, sc.source, sc.eat, sc.ext,
                            CounterRng(seed), options);

  fs::create_directories(out_dir);
  if (sc.write_transcript) {
    std::string csv = "i,x,y,a,b,c\n";
    csv.reserve(csv.size() + out.rounds.size() * 24);
    for (const RoundRecord& r : out.rounds) {
      csv += std::to_string(r.index);
      csv += ',';
      csv += static_cast<char>('0' + r.x);
      csv += ',';
      csv += static_cast<char>('0' + r.y);
      csv += ',';
      csv += static_cast<char>('0' + r.a);
      csv += ',';
      csv += static_cast<char>('0' + r.b);
      csv += ',';
      csv += fmt(r.c);
      csv += '\n';
    }
    write_text(fs::path(out_dir) / "transcript.csv", csv);
  }

  std::string summary = "c_bar,aborted,m,secrecy_eps,eta_opt,s_t_star\n";
  summary += fmt(out.c_bar, "%.15g") + "," +
             (out.aborted ? "true" : "false") + "," +
             std::to_string(out.output_bits) + "," + fmt(out.secrecy_eps) +
             "," + fmt(out.rate.eta_opt) + "," + fmt(out.rate.s_t_star) + "\n";
  write_text(fs::path(out_dir) / "summary.csv", summary);

  if (out.key)
    write_bitstring(fs::path(out_dir) / "key.bin", *out.key, out.output_bits);

  std::printf("rounds=%zu c_bar=%s aborted=%s m=%lld key=%s\n",
              out.rounds.size(), fmt(out.c_bar).c_str(),
              out.aborted ? "true" : "false",
              static_cast<long long>(out.output_bits),
              out.key ? "written" : "none");
  return 0;
}

int cmd_extract(const std::string& x_path, const std::string& z_path,
                std::int64_t m, const std::string& out_dir) {
  BitString x = read_bitstring(x_path);
  BitString z = read_bitstring(z_path);
  BitString key = conv_extract(x, z, m);
  fs::create_directories(out_dir);
  write_bitstring(fs::path(out_dir) / "key.bin", key, m);
  std::printf("extracted %lld bits\n", static_cast<long long>(m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomness amplification from a weak public source"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed_override = 0;
  bool have_seed = false;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config)
      sub->add_option("--config", config_path, "run-config file")->required();
    sub->add_option("--out", out_dir, "output directory");
  };

  CLI::App* rate = app.add_subcommand("rate", "entropy-rate sweep -> CSV");
  add_common(rate, true);

  CLI::App* optimize =
      app.add_subcommand("optimize", "maximal quantum MDL violation");
  optimize->add_option("--config", config_path, "run-config file")->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "execute the protocol end to end");
  add_common(simulate, true);
  simulate->add_option("--seed", seed_override, "master seed (overrides config)")
      ->each([&](const std::string&) { have_seed = true; });

  std::string x_path, z_path;
  std::int64_t m = 0;
  CLI::App* extract = app.add_subcommand("extract", "raw extraction on files");
  extract->add_option("--x", x_path, "first input bitstream")->required();
  extract->add_option("--z", z_path, "second input bitstream")->required();
  extract->add_option("--m", m, "output length in bits")->required();
  extract->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError&) {
    std::fprintf(stderr, "usage error; see --help\n");
    return 2;
  }

  try {
    if (rate->parsed()) return cmd_rate(config_path, out_dir);
    if (optimize->parsed()) return cmd_optimize(config_path);
    if (simulate->parsed())
      return cmd_simulate(config_path, out_dir, seed_override, have_seed);
    if (extract->parsed()) return cmd_extract(x_path, z_path, m, out_dir);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
