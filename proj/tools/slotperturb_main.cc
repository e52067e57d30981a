// slotperturb: batch front end for perturbing, building evaluation sets and
// scoring.
//
//   slotperturb perturb        --input eval.conll --op eos_filler --seed 7 --out dir
//   slotperturb build-random   --input eval.conll --seed 7 [--replicates 10] --out dir
//   slotperturb build-hard     --input eval.conll --confidence conf.jsonl --seed 7 --out dir
//   slotperturb score          --gold a.conll --pred a.jsonl [--gold ... --pred ...] --out dir
//   slotperturb baseline-predict --train train.conll --eval eval.conll --out dir
//   slotperturb validate       --input a.conll [--input ...]
//
// Every flag may also come from `--config file.json` (keys are flag names);
// flags on the command line win. Exit codes: 0 ok, 1 runtime error, 2 usage
// or configuration error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slotperturb/confidence.h"
#include "slotperturb/corpus.h"
#include "slotperturb/errors.h"
#include "slotperturb/evalset.h"
#include "slotperturb/metrics.h"
#include "slotperturb/provenance.h"
#include "slotperturb/remote_provider.h"
#include "slotperturb/text.h"

#ifndef SLOTPERTURB_DATA_DIR
#define SLOTPERTURB_DATA_DIR "data"
#endif

namespace sp = slotperturb;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char *kToolVersion = "1.0.0";

// Thrown for bad flags or config values; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string config;
  std::string seed_text;
  unsigned workers = 1;
  std::string out;

  std::string data_dir = SLOTPERTURB_DATA_DIR;
  std::string pos_lexicon, stopwords, fillers, synonyms, pronunciations,
      word_counts, contractions, pos_tags;
  std::uint64_t min_frequency = sp::PhoneticLexicon::kDefaultMinFrequency;
  std::string provider_url;
  double provider_timeout = 30.0;
  bool verb_phrase = false;
  std::size_t top_k = 50;
  bool sample = false;

  std::vector<std::string> inputs;
  std::string op;
  std::string group = "spoken";
  std::size_t replicates = 10;
  std::string confidence;
  std::vector<std::string> gold, pred;
  bool repair = false;
  std::string train, eval, confidence_out;
};

void add_output(CLI::App *cmd, Settings &s) {
  cmd->add_option("--out", s.out, "Output directory");
  cmd->add_option("--config", s.config, "JSON file with flag values");
}

void add_seeded(CLI::App *cmd, Settings &s) {
  cmd->add_option("--seed", s.seed_text, "Master seed (integer) or 'random'");
  cmd->add_option("--workers", s.workers, "Worker threads (no effect on output)")
      ->check(CLI::Range(1u, 1024u));
}

void add_resources(CLI::App *cmd, Settings &s) {
  cmd->add_option("--data-dir", s.data_dir, "Directory with the bundled resources");
  cmd->add_option("--pos-lexicon", s.pos_lexicon, "word<TAB>POS lexicon");
  cmd->add_option("--stopwords", s.stopwords, "Stopword inventory");
  cmd->add_option("--fillers", s.fillers, "Filler inventory (JSON)");
  cmd->add_option("--synonyms", s.synonyms, "Synonym dictionary");
  cmd->add_option("--pronunciations", s.pronunciations, "Pronunciation lexicon");
  cmd->add_option("--word-counts", s.word_counts, "Word frequency counts");
  cmd->add_option("--contractions", s.contractions, "Contraction table");
  cmd->add_option("--pos-tags", s.pos_tags, "Externally produced POS tags (id<TAB>tags)");
  cmd->add_option("--min-frequency", s.min_frequency,
                  "Minimum corpus count for speako candidates");
  cmd->add_option("--provider-url", s.provider_url,
                  "Remote candidate service (default: synonym dictionary)");
  cmd->add_option("--provider-timeout", s.provider_timeout, "Seconds per request");
  cmd->add_flag("--verb-phrase", s.verb_phrase,
                "Post-verb fillers go after the verb's object phrase");
  cmd->add_option("--top-k", s.top_k, "Candidates requested per masked token")
      ->check(CLI::Range(std::size_t{1}, std::size_t{200}));
  cmd->add_flag("--sample", s.sample, "Sample candidates by weight instead of argmax");
  cmd->add_option("--group", s.group, "Operator group: spoken, baseline or all");
}

// Fills options not given on the command line from the JSON config.
void apply_config(CLI::App *cmd, const std::string &path) {
  std::string text;
  try {
    text = sp::read_file(path);
  } catch (const sp::IoError &) {
    throw UsageError("config file not found: '" + path + "'");
  }
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::exception &e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config '" + path + "' must be an object");

  std::map<std::string, CLI::Option *> by_name;
  for (CLI::Option *opt : cmd->get_options()) {
    for (const std::string &n : opt->get_lnames()) by_name[n] = opt;
  }
  for (const auto &[raw_key, value] : cfg.items()) {
    std::string key = raw_key;
    for (char &c : key) {
      if (c == '_') c = '-';
    }
    auto it = by_name.find(key);
    if (it == by_name.end() || key == "config" || key == "help") {
      throw UsageError("unknown config key '" + raw_key + "' for " + cmd->get_name());
    }
    CLI::Option *opt = it->second;
    if (opt->count() > 0) continue;  // command line wins
    std::vector<json> values =
        value.is_array() ? value.get<std::vector<json>>() : std::vector<json>{value};
    for (const json &v : values) {
      if (v.is_string()) {
        opt->add_result(v.get<std::string>());
      } else if (v.is_boolean()) {
        opt->add_result(v.get<bool>() ? "true" : "false");
      } else if (v.is_number()) {
        opt->add_result(v.dump());
      } else {
        throw UsageError("config key '" + raw_key + "' has an unsupported value");
      }
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error &e) {
      throw UsageError("config key '" + raw_key + "': " + e.what());
    }
  }
}

std::uint64_t resolve_seed(const Settings &s) {
  if (s.seed_text.empty()) {
    throw UsageError("--seed is required (an integer, or 'random')");
  }
  if (s.seed_text == "random") {
    std::random_device rd;
    std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed: " << seed << "\n";
    return seed;
  }
  std::uint64_t seed = 0;
  const char *end = s.seed_text.data() + s.seed_text.size();
  auto [ptr, ec] = std::from_chars(s.seed_text.data(), end, seed);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("--seed must be an unsigned 64-bit integer or 'random', got '" +
                     s.seed_text + "'");
  }
  return seed;
}

void require(bool ok, const std::string &what) {
  if (!ok) throw UsageError(what);
}

void require_file(const std::string &path, const std::string &what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw sp::ConfigError(what + " not found: '" + path + "'");
  }
}

sp::ResourcePaths resource_paths(const Settings &s) {
  sp::ResourcePaths p = sp::ResourcePaths::under(s.data_dir);
  auto pick = [](std::string &slot, const std::string &flag) {
    if (!flag.empty()) slot = flag;
  };
  pick(p.pos_lexicon, s.pos_lexicon);
  pick(p.stopwords, s.stopwords);
  pick(p.fillers, s.fillers);
  pick(p.synonyms, s.synonyms);
  pick(p.pronunciations, s.pronunciations);
  pick(p.word_counts, s.word_counts);
  pick(p.contractions, s.contractions);
  p.pos_tags = s.pos_tags;
  return p;
}

std::span<const sp::OperatorId> resolve_group(const Settings &s) {
  auto g = sp::parse_operator_group(s.group);
  if (!g) {
    throw UsageError("unknown operator group '" + s.group +
                     "' (expected spoken, baseline or all)");
  }
  return *g;
}

json resource_config(const Settings &s) {
  sp::ResourcePaths p = resource_paths(s);
  return {{"pos_lexicon", p.pos_lexicon},
          {"stopwords", p.stopwords},
          {"fillers", p.fillers},
          {"synonyms", p.synonyms},
          {"pronunciations", p.pronunciations},
          {"word_counts", p.word_counts},
          {"contractions", p.contractions},
          {"pos_tags", p.pos_tags},
          {"min_frequency", s.min_frequency},
          {"provider", s.provider_url.empty() ? "dictionary" : s.provider_url},
          {"verb_phrase", s.verb_phrase},
          {"top_k", s.top_k},
          {"sample", s.sample}};
}

sp::Resources load_resources(const Settings &s) {
  sp::ResourcePaths paths = resource_paths(s);
  paths.validate();
  sp::Resources res = sp::Resources::load(paths, s.min_frequency);
  res.filler_options.verb_phrase_mode = s.verb_phrase;
  res.synonym_options.top_k = s.top_k;
  res.synonym_options.sample = s.sample;
  if (!s.provider_url.empty()) {
    res.provider = std::make_shared<sp::RemoteProvider>(s.provider_url,
                                                        s.provider_timeout);
  }
  return res;
}

fs::path output_dir(const Settings &s) {
  require(!s.out.empty(), "--out is required");
  fs::path dir(s.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw sp::IoError("cannot create output directory '" + s.out + "': " + ec.message());
  return dir;
}

std::string stem_of(const std::string &path) { return fs::path(path).stem().string(); }

// Manifest of one run: tool version, hashed configuration, seeds, outputs.
void write_manifest(const fs::path &dir, const std::string &command,
                    const json &config, const json &seeds,
                    const std::vector<std::string> &outputs) {
  const std::string canonical = config.dump();
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(sp::fnv1a64(canonical)));
  json manifest = {{"tool", "slotperturb"},
                   {"version", kToolVersion},
                   {"command", command},
                   {"config", config},
                   {"config_hash", hash},
                   {"seeds", seeds},
                   {"outputs", outputs}};
  sp::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// Writes `<name>.conll` and `<name>.provenance.jsonl`; returns both names.
std::vector<std::string> write_set(const fs::path &dir, const std::string &name,
                                   std::span<const sp::PerturbedUtterance> records) {
  sp::Dataset d = sp::to_dataset(records, name);
  const std::string conll = name + ".conll";
  const std::string prov = name + ".provenance.jsonl";
  sp::write_file(dir / conll, sp::write_conll(d));
  sp::write_file(dir / prov, sp::write_provenance(records));
  return {conll, prov};
}

int cmd_perturb(const Settings &s) {
  require(s.inputs.size() == 1, "perturb needs exactly one --input");
  require(!s.op.empty(), "--op is required");
  auto op = sp::parse_operator(s.op);
  if (!op) throw UsageError("unknown operator '" + s.op + "'");
  const std::uint64_t seed = resolve_seed(s);
  require_file(s.inputs[0], "input dataset");
  resource_paths(s).validate();
  const fs::path dir = output_dir(s);

  sp::Dataset d = sp::load_conll(s.inputs[0]);
  sp::Resources res = load_resources(s);
  auto records = sp::build_single_operator_set(d, *op, seed, res, {s.workers});
  auto outputs = write_set(dir, stem_of(s.inputs[0]) + "." + s.op, records);
  std::size_t no_ops = 0;
  for (const auto &r : records) no_ops += r.no_op;

  json config = {{"input", s.inputs[0]}, {"operator", s.op},
                 {"resources", resource_config(s)}};
  write_manifest(dir, "perturb", config, {{"master", seed}}, outputs);
  std::cout << "perturbed " << records.size() << " utterances with " << s.op << " ("
            << no_ops << " no-op)\n";
  return 0;
}

int cmd_build_random(const Settings &s) {
  require(s.inputs.size() == 1, "build-random needs exactly one --input");
  require(s.replicates >= 1, "--replicates must be at least 1");
  auto group = resolve_group(s);
  const std::uint64_t seed = resolve_seed(s);
  require_file(s.inputs[0], "input dataset");
  resource_paths(s).validate();
  const fs::path dir = output_dir(s);

  sp::Dataset d = sp::load_conll(s.inputs[0]);
  sp::Resources res = load_resources(s);
  auto sets = sp::build_random_set(d, seed, s.replicates, res, group, {s.workers});
  std::vector<std::string> outputs;
  json replicate_seeds = json::array();
  for (std::size_t r = 0; r < sets.size(); ++r) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), ".random-r%02zu", r);
    for (auto &f : write_set(dir, stem_of(s.inputs[0]) + suffix, sets[r])) {
      outputs.push_back(f);
    }
    replicate_seeds.push_back(seed ^ static_cast<std::uint64_t>(r));
  }
  json config = {{"input", s.inputs[0]}, {"group", s.group},
                 {"replicates", s.replicates}, {"resources", resource_config(s)}};
  write_manifest(dir, "build-random", config,
                 {{"master", seed}, {"replicates", replicate_seeds}}, outputs);
  std::cout << "built " << sets.size() << " random replicate(s) of " << d.size()
            << " utterances\n";
  return 0;
}

int cmd_build_hard(const Settings &s) {
  require(s.inputs.size() == 1, "build-hard needs exactly one --input");
  require(!s.confidence.empty(), "--confidence is required");
  auto group = resolve_group(s);
  const std::uint64_t seed = resolve_seed(s);
  require_file(s.inputs[0], "input dataset");
  require_file(s.confidence, "confidence table");
  resource_paths(s).validate();
  const fs::path dir = output_dir(s);

  sp::Dataset d = sp::load_conll(s.inputs[0]);
  sp::ConfidenceTable table = sp::ConfidenceTable::load(s.confidence);
  sp::check_coverage(table, d, group);
  sp::Resources res = load_resources(s);
  sp::HardSet hard = sp::build_hard_set(d, table, seed, res, group, {s.workers});
  const std::string name = stem_of(s.inputs[0]) + ".hard";
  auto outputs = write_set(dir, name, hard.records);
  sp::write_file(dir / (name + ".composition.json"), hard.composition.to_json());
  sp::write_file(dir / (name + ".composition.txt"), hard.composition.to_text());
  outputs.push_back(name + ".composition.json");
  outputs.push_back(name + ".composition.txt");

  json config = {{"input", s.inputs[0]}, {"confidence", s.confidence},
                 {"group", s.group}, {"resources", resource_config(s)}};
  write_manifest(dir, "build-hard", config, {{"master", seed}}, outputs);
  std::cout << hard.composition.to_text();
  return 0;
}

int cmd_score(const Settings &s) {
  require(!s.gold.empty(), "score needs at least one --gold");
  require(s.gold.size() == s.pred.size(),
          "score needs one --pred per --gold (got " + std::to_string(s.gold.size()) +
              " gold, " + std::to_string(s.pred.size()) + " pred)");
  for (const auto &g : s.gold) require_file(g, "gold dataset");
  for (const auto &p : s.pred) require_file(p, "prediction file");
  const fs::path dir = output_dir(s);

  std::vector<sp::ScoreReport> reports;
  for (std::size_t i = 0; i < s.gold.size(); ++i) {
    sp::Dataset gold = sp::load_conll(s.gold[i]);
    std::vector<sp::Prediction> preds = sp::load_predictions(s.pred[i]);
    reports.push_back(sp::score(gold, preds, {s.repair}, gold.name));
  }
  std::optional<sp::AggregateReport> agg;
  if (reports.size() > 1) agg = sp::aggregate(reports);
  const sp::AggregateReport *a = agg ? &*agg : nullptr;
  sp::write_file(dir / "report.json", sp::report_json(reports, a));
  const std::string text = sp::report_text(reports, a);
  sp::write_file(dir / "report.txt", text);

  json config = {{"gold", s.gold}, {"pred", s.pred}, {"repair", s.repair}};
  write_manifest(dir, "score", config, json::object(), {"report.json", "report.txt"});
  std::cout << text;
  return 0;
}

int cmd_baseline_predict(const Settings &s) {
  require(!s.train.empty(), "--train is required");
  require(!s.eval.empty(), "--eval is required");
  require_file(s.train, "training dataset");
  require_file(s.eval, "evaluation dataset");
  std::optional<std::uint64_t> seed;
  std::span<const sp::OperatorId> group;
  if (!s.confidence_out.empty()) {
    group = resolve_group(s);
    seed = resolve_seed(s);
    resource_paths(s).validate();
  }
  const fs::path dir = output_dir(s);

  sp::Dataset train = sp::load_conll(s.train);
  sp::Dataset eval = sp::load_conll(s.eval);
  sp::BaselineModel model = sp::BaselineModel::train(train);
  std::vector<sp::Prediction> preds;
  for (const auto &u : eval.utterances) preds.push_back(model.predict(u));
  const std::string pred_name = stem_of(s.eval) + ".pred.jsonl";
  sp::write_file(dir / pred_name, sp::write_predictions(preds));
  std::vector<std::string> outputs = {pred_name};

  json config = {{"train", s.train}, {"eval", s.eval}};
  json seeds = json::object();
  if (seed) {
    sp::Resources res = load_resources(s);
    sp::ConfidenceTable table =
        sp::baseline_confidence(model, eval, *seed, res, group, {s.workers});
    sp::write_file(dir / s.confidence_out, table.to_jsonl());
    outputs.push_back(s.confidence_out);
    config["group"] = s.group;
    config["resources"] = resource_config(s);
    seeds["master"] = *seed;
  }
  write_manifest(dir, "baseline-predict", config, seeds, outputs);
  std::cout << "wrote " << preds.size() << " predictions to " << (dir / pred_name).string()
            << "\n";
  return 0;
}

int cmd_validate(const Settings &s) {
  require(!s.inputs.empty(), "validate needs at least one --input");
  bool ok = true;
  for (const std::string &path : s.inputs) {
    require_file(path, "input dataset");
    try {
      sp::Dataset d = sp::load_conll(path);
      std::size_t tokens = 0;
      for (const auto &u : d.utterances) tokens += u.size();
      std::cout << path << ": ok (" << d.size() << " utterances, " << tokens
                << " tokens, " << d.intent_inventory.size() << " intents, "
                << d.slot_inventory.size() << " slot labels)\n";
    } catch (const sp::Error &e) {
      ok = false;
      std::cout << path << ": invalid: " << e.what() << "\n";
    }
  }
  return ok ? 0 : 1;
}

void report_error(const std::string &kind, const std::string &message) {
  json err = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Label-preserving perturbation of slot-filling / intent corpora"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Settings s;

  CLI::App *perturb = app.add_subcommand("perturb", "Apply one operator to every utterance");
  perturb->add_option("--input", s.inputs, "Dataset (canonical format)");
  perturb->add_option("--op", s.op, "Operator name, e.g. eos_filler");
  add_seeded(perturb, s);
  add_resources(perturb, s);
  add_output(perturb, s);

  CLI::App *random = app.add_subcommand("build-random", "Random evaluation sets");
  random->add_option("--input", s.inputs, "Dataset (canonical format)");
  random->add_option("--replicates", s.replicates, "Number of replicates");
  add_seeded(random, s);
  add_resources(random, s);
  add_output(random, s);

  CLI::App *hard = app.add_subcommand("build-hard", "Hard evaluation set");
  hard->add_option("--input", s.inputs, "Dataset (canonical format)");
  hard->add_option("--confidence", s.confidence, "Confidence table (JSONL)");
  add_seeded(hard, s);
  add_resources(hard, s);
  add_output(hard, s);

  CLI::App *score = app.add_subcommand("score", "Score predictions against gold sets");
  score->add_option("--gold", s.gold, "Gold dataset (repeatable)");
  score->add_option("--pred", s.pred, "Prediction JSONL, paired with --gold");
  score->add_flag("--repair", s.repair, "Promote dangling I- tags in predictions");
  add_output(score, s);

  CLI::App *baseline =
      app.add_subcommand("baseline-predict", "Memorization baseline predictions");
  baseline->add_option("--train", s.train, "Training dataset");
  baseline->add_option("--eval", s.eval, "Dataset to predict");
  baseline->add_option("--confidence-out", s.confidence_out,
                       "Also write proxy confidences (file name inside --out)");
  add_seeded(baseline, s);
  add_resources(baseline, s);
  add_output(baseline, s);

  CLI::App *validate = app.add_subcommand("validate", "Check datasets");
  validate->add_option("--input", s.inputs, "Dataset (repeatable)");
  validate->add_option("--config", s.config, "JSON file with flag values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App *cmd = app.get_subcommands().front();
  try {
    if (!s.config.empty()) apply_config(cmd, s.config);
    if (cmd == perturb) return cmd_perturb(s);
    if (cmd == random) return cmd_build_random(s);
    if (cmd == hard) return cmd_build_hard(s);
    if (cmd == score) return cmd_score(s);
    if (cmd == baseline) return cmd_baseline_predict(s);
    return cmd_validate(s);
  } catch (const UsageError &e) {
    report_error("usage", e.what());
    return 2;
  } catch (const sp::ConfigError &e) {
    report_error("config", e.what());
    return 2;
  } catch (const sp::JoinError &e) {
    report_error("join", e.what());
  } catch (const sp::ParseError &e) {
    report_error("parse", e.what());
  } catch (const sp::BioError &e) {
    report_error("bio", e.what());
  } catch (const sp::StructuralError &e) {
    report_error("structure", e.what());
  } catch (const sp::ProviderError &e) {
    report_error("provider", e.what());
  } catch (const sp::OperatorError &e) {
    report_error("operator", e.what());
  } catch (const sp::IoError &e) {
    report_error("io", e.what());
  } catch (const std::exception &e) {
    report_error("internal", e.what());
  }
  return 1;
}
