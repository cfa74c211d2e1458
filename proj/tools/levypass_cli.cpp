// SPDX-License-Identifier: Apache-2.0
// levypass: batch sampling, oracle comparison and validation jobs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "levypass/jobs.hpp"

namespace {

using nlohmann::json;
using namespace levypass;

struct Flags {
  std::string config;
  std::uint64_t seed = 0, n = 0, guard = 0;
  std::string out, format;
  double epsilon = 0;
};

void add_common(CLI::App* sub, Flags& f, bool config_required) {
  auto* c = sub->add_option("--config", f.config, "job config (JSON)")->envname("LEVYPASS_CONFIG");
  if (config_required) c->required();
  sub->add_option("--seed", f.seed, "job seed")->envname("LEVYPASS_SEED");
  sub->add_option("--n", f.n, "number of samples")->envname("LEVYPASS_N");
  sub->add_option("--out", f.out, "output path ('-' for stdout)")->envname("LEVYPASS_OUT");
  sub->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "jsonl"}))->envname("LEVYPASS_FORMAT");
  sub->add_option("--epsilon", f.epsilon, "oracle small-jump cutoff")->envname("LEVYPASS_EPSILON");
  sub->add_option("--guard", f.guard, "iteration guard")->envname("LEVYPASS_GUARD");
}

JobOverrides overrides(const CLI::App* sub, const Flags& f) {
  JobOverrides o;
  if (sub->count("--seed")) o.seed = f.seed;
  if (sub->count("--n")) o.n = f.n;
  if (sub->count("--guard")) o.guard = f.guard;
  if (sub->count("--out")) o.out = f.out;
  if (sub->count("--format")) o.format = f.format;
  if (sub->count("--epsilon")) o.epsilon = f.epsilon;
  return o;
}

json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
}

bool is_sampling(const std::string& mode) {
  return mode == "sample-fpe" || mode == "sample-id" || mode == "level" || mode == "interval";
}

std::string mode_of(const json& doc) {
  return doc.is_object() && doc.contains("mode") && doc["mode"].is_string() ? doc["mode"].get<std::string>() : "";
}

int run_moments(const JobConfig& c) {
  detail::OutputSink sink(c.out);
  const Moments m = id_moments(c.model, c.t);
  sink.stream() << json{{"t", c.t}, {"mean", m.mean}, {"variance", m.variance}}.dump() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact first-passage sampling for subordinators and bounded-variation Lévy processes"};
  app.require_subcommand(1);
  Flags f;
  auto* sample = app.add_subcommand("sample", "draw first-passage or marginal samples");
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  auto* oracle = app.add_subcommand("oracle", "compare exact draws with the truncation oracle");
  auto* moments = app.add_subcommand("moments", "mean and variance of Z(t)");
  add_common(sample, f, true);
  add_common(validate, f, false);
  add_common(oracle, f, true);
  add_common(moments, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    json doc = f.config.empty() ? json{{"mode", "validate"}} : load_document(f.config);
    const std::string mode = mode_of(doc);
    if (sub == sample && !is_sampling(mode))
      throw ConfigError("config: 'sample' needs mode sample-fpe, sample-id, level or interval (got '" + mode + "')");
    if (sub == validate && mode != "validate")
      throw ConfigError("config: 'validate' needs mode validate (got '" + mode + "')");
    if (sub == oracle) {
      if (mode == "sample-fpe" || mode == "level" || mode == "interval") {
        doc["subject"] = mode;
        doc["mode"] = "oracle-compare";
      } else if (mode != "oracle-compare") {
        throw ConfigError("config: 'oracle' needs mode oracle-compare, sample-fpe, level or interval");
      }
    }
    if (sub == moments && mode != "sample-id" && mode != "sample-fpe")
      throw ConfigError("config: 'moments' needs a sample-id or sample-fpe config");

    const json resolved = resolve_document(doc, overrides(sub, f));
    const JobConfig cfg = parse_config(resolved);
    std::cerr << "levypass " << sub->get_name() << ": mode=" << mode_name(cfg.mode) << " seed=" << cfg.seed
              << " n=" << cfg.n << " config-hash=" << config_hash(resolved) << '\n';
    if (sub == moments) return run_moments(cfg);
    return run_job(cfg, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}
