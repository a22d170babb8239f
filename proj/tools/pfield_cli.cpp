// pfield: simulate | verify | renewal | sample-fbs
//
// Exit codes: 0 ok, 1 a verification check failed, 2 bad configuration,
// 3 runtime failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pfield/config.hpp"
#include "pfield/fbs.hpp"
#include "pfield/fields.hpp"
#include "pfield/renewal.hpp"
#include "pfield/stats.hpp"

using nlohmann::json;
using namespace pfield;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  std::string seed;
  std::size_t parallelism = 0;
  std::string out;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::size_t env_threads() {
  const char* v = std::getenv("PARTITION_FIELDS_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("PARTITION_FIELDS_THREADS: must be a positive integer");
  return static_cast<std::size_t>(n);
}

RunConfig load_config(const std::string& command, const Flags& flags) {
  std::ifstream f(flags.config);
  if (!f) throw ConfigError("--config: cannot read '" + flags.config + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected an object");
  if (!j.contains("command")) j["command"] = command;
  if (j["command"] != command) {
    throw ConfigError("command: config names '" + j["command"].dump() + "' but subcommand is '" + command + "'");
  }
  RunConfig cfg = parse_run_config(j);
  if (!flags.seed.empty()) {
    try {
      cfg.seed = Seed128::from_hex(flags.seed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--seed: ") + e.what());
    }
  }
  if (!flags.out.empty()) cfg.output = flags.out;
  if (flags.parallelism > 0) {
    cfg.parallelism = flags.parallelism;
  } else if (cfg.parallelism == 0) {
    cfg.parallelism = env_threads();
  }
  if (cfg.parallelism == 0) cfg.parallelism = 1;
  return cfg;
}

std::string sample_csv(const FieldSample& s, const CornerGrid& grid) {
  std::string out = "t1,t2,raw,normalized\n";
  for (std::size_t a = 0; a < s.m1; ++a) {
    for (std::size_t b = 0; b < s.m2; ++b) {
      out += format_double(grid.t1[a]) + "," + (s.two_d ? format_double(grid.t2[b]) : std::string()) + "," +
             format_double(s.raw_at(a, b)) + "," + format_double(s.normalized_at(a, b)) + "\n";
    }
  }
  return out;
}

json sample_json(const FieldSample& s) {
  return {{"corner1", s.corner1}, {"corner2", s.corner2}, {"raw", s.raw}, {"normalized", s.normalized}};
}

int cmd_simulate(const RunConfig& cfg) {
  const ModelSpec& spec = *cfg.model;
  std::vector<FieldSample> samples(cfg.R);
  parallel_for(cfg.R, cfg.parallelism, [&](std::size_t r) {
    samples[r] = simulate(spec, cfg.grid, split_seed(cfg.seed, r));
  });
  json meta;
  meta["tool"] = version_string();
  meta["config"] = to_json(cfg);
  meta["seed_scheme"] = kSeedScheme;
  json reps = json::array();
  for (std::size_t r = 0; r < cfg.R; ++r) {
    const FieldSample& s = samples[r];
    json e = {{"index", r},
              {"seed", s.seed.to_hex()},
              {"normalization", s.normalization},
              {"sigma", s.sigma},
              {"truncation_error_bound", s.truncation_error_bound}};
    if (cfg.format == "csv") {
      const std::string file = cfg.R == 1 ? cfg.output + ".csv" : cfg.output + "_r" + std::to_string(r) + ".csv";
      write_file(file, sample_csv(s, cfg.grid));
      e["file"] = file;
    } else {
      e["sample"] = sample_json(s);
    }
    reps.push_back(e);
  }
  meta["replicates"] = reps;
  write_file(cfg.output + ".json", meta.dump(2) + "\n");
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const VerifyResult res = run_verify(cfg);
  write_file(cfg.output + ".json", res.report.dump(2) + "\n");
  write_file(cfg.output + ".csv", checks_csv(res.checks));
  for (const CheckRow& c : res.checks) {
    std::cout << (c.pass ? "PASS " : (c.gating ? "FAIL " : "note ")) << c.test
              << " analytic=" << format_double(c.analytic) << " estimate=" << format_double(c.estimate)
              << " se=" << format_double(c.se) << "\n";
  }
  std::cout << "suite " << res.suite << ": " << (res.all_pass() ? "pass" : "FAIL") << "\n";
  return res.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_renewal(const RunConfig& cfg) {
  const RenewalRequest& req = *cfg.renewal;
  const PowerLawPmf pmf = make_hs_pmf(req.alpha);
  const RenewalSequence rs = renewal_sequence(pmf, static_cast<std::size_t>(req.kmax));
  std::string q = "k,q_k\n";
  for (std::size_t k = 0; k <= rs.kmax(); ++k) q += std::to_string(k) + "," + format_double(rs.q_at(k)) + "\n";
  write_file(cfg.output + "_q.csv", q);
  const XstarVariance vx = var_xstar(rs);
  const double C = c_alpha(req.alpha);
  json meta = {{"tool", version_string()},
               {"config", to_json(cfg)},
               {"C_alpha", C},
               {"sum_q_sq", vx.sum_sq},
               {"var_xstar", vx.value},
               {"tail_increment", vx.tail_increment},
               {"converged", vx.converged}};
  if (req.n > 0) {
    const WeightProfile w = weights(rs, req.n);
    std::string b = "j,b_nj\n";
    for (std::int64_t j = w.j_min; j <= w.n; ++j) b += std::to_string(j) + "," + format_double(w.b_at(j)) + "\n";
    write_file(cfg.output + "_b.csv", b);
    meta["b_n_sq"] = w.b_n_sq;
  }
  write_file(cfg.output + ".json", meta.dump(2) + "\n");
  std::cout << "C_alpha " << format_double(C) << "\n";
  std::cout << "sum_q_sq " << format_double(vx.sum_sq) << "\n";
  if (!vx.converged) std::cerr << "warning: q tail not converged at kmax (q_kmax^2 >= 1e-10)\n";
  return kExitOk;
}

int cmd_sample_fbs(const RunConfig& cfg) {
  const HurstPair H = *cfg.hurst;
  const FbsSampler sampler(H, cfg.grid);
  const std::size_t m2 = cfg.grid.t2.empty() ? 1 : cfg.grid.t2.size();
  std::string out = "replicate,t1,t2,value\n";
  for (std::size_t r = 0; r < cfg.R; ++r) {
    RandomStream rng(split_seed(cfg.seed, r), 0);
    const std::vector<double> v = sampler.sample(rng);
    for (std::size_t a = 0; a < cfg.grid.t1.size(); ++a) {
      for (std::size_t b = 0; b < m2; ++b) {
        out += std::to_string(r) + "," + format_double(cfg.grid.t1[a]) + "," +
               (cfg.grid.t2.empty() ? std::string() : format_double(cfg.grid.t2[b])) + "," +
               format_double(v[a * m2 + b]) + "\n";
      }
    }
  }
  write_file(cfg.output + ".csv", out);
  write_file(cfg.output + ".json", json{{"tool", version_string()}, {"config", to_json(cfg)}}.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-partition random fields: simulation and verification"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"simulate", "Simulate a model and write corner sums"},
      {"verify", "Run a verification suite"},
      {"renewal", "Dump the renewal sequence and weights"},
      {"sample-fbs", "Draw reference fractional Brownian sheet samples"},
  };
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON run configuration")->required();
    sub->add_option("--seed", flags.seed, "128-bit hex seed, overrides the config");
    sub->add_option("--parallelism", flags.parallelism, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output path prefix");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = load_config(command, flags);
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "verify") return cmd_verify(cfg);
    if (command == "renewal") return cmd_renewal(cfg);
    return cmd_sample_fbs(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
