#include "slotperturb/evalset.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "slotperturb/errors.h"
#include "slotperturb/rng.h"
#include "slotperturb/text.h"

namespace slotperturb {

using nlohmann::json;

namespace {

// Seed-stream tags for derive_seed.
constexpr std::uint64_t kChoiceStream = 1;
constexpr std::uint64_t kApplyStream = 2;

std::uint64_t apply_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, index, kApplyStream);
}

class SerializedProvider : public CandidateProvider {
 public:
  explicit SerializedProvider(std::shared_ptr<const CandidateProvider> inner)
      : inner_(std::move(inner)) {}

  std::vector<Candidate> candidates(std::span<const std::string> tokens,
                                    std::size_t mask_index,
                                    std::size_t top_k) const override {
    std::lock_guard<std::mutex> lock(mu_);
    return inner_->candidates(tokens, mask_index, top_k);
  }
  bool thread_safe() const override { return true; }
  std::string describe() const override { return inner_->describe(); }

 private:
  std::shared_ptr<const CandidateProvider> inner_;
  mutable std::mutex mu_;
};

std::vector<OperatorId> sorted_group(std::span<const OperatorId> group) {
  std::vector<OperatorId> ops(group.begin(), group.end());
  std::sort(ops.begin(), ops.end());
  ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
  return ops;
}

// Resources whose provider may be shared by `workers` threads.
const Resources &for_workers(const Resources &res, unsigned workers,
                             std::optional<Resources> &holder) {
  if (workers <= 1 || !res.provider || res.provider->thread_safe()) return res;
  holder = res;
  holder->provider = serialized(res.provider);
  return *holder;
}

}  // namespace

// --- Resources --------------------------------------------------------------

ResourcePaths ResourcePaths::under(const std::string &dir) {
  const std::filesystem::path d(dir);
  ResourcePaths p;
  p.pos_lexicon = (d / "pos_lexicon.tsv").string();
  p.stopwords = (d / "stopwords.txt").string();
  p.fillers = (d / "fillers.json").string();
  p.synonyms = (d / "synonyms.tsv").string();
  p.pronunciations = (d / "pronunciations.tsv").string();
  p.word_counts = (d / "word_counts.tsv").string();
  p.contractions = (d / "contractions.tsv").string();
  return p;
}

void ResourcePaths::validate() const {
  const std::pair<const char *, const std::string *> all[] = {
      {"pos lexicon", &pos_lexicon},       {"stopwords", &stopwords},
      {"filler inventory", &fillers},      {"synonym dictionary", &synonyms},
      {"pronunciations", &pronunciations}, {"word counts", &word_counts},
      {"contraction table", &contractions}, {"pos tags", &pos_tags},
  };
  for (const auto &[what, path] : all) {
    if (path == &pos_tags && path->empty()) continue;
    std::error_code ec;
    if (path->empty() || !std::filesystem::is_regular_file(*path, ec)) {
      throw ConfigError(std::string(what) + " file not found: '" + *path + "'");
    }
    std::ifstream probe(*path);
    if (!probe) {
      throw ConfigError(std::string(what) + " file not readable: '" + *path + "'");
    }
  }
}

void Resources::set_phonetic(PhoneticLexicon lex) {
  phonetic_ = std::make_shared<const PhoneticLexicon>(std::move(lex));
  speako_cache_ = std::make_shared<SpeakoCache>(*phonetic_);
}

Resources Resources::load(const ResourcePaths &paths, std::uint64_t min_frequency) {
  paths.validate();
  Resources r;
  r.pos = load_pos_lexicon(paths.pos_lexicon, paths.stopwords);
  if (!paths.pos_tags.empty()) r.external_tags = ExternalTags::load(paths.pos_tags);
  r.fillers = load_filler_inventory(paths.fillers);
  r.provider = std::make_shared<DictionaryProvider>(
      DictionaryProvider::load(paths.synonyms));
  r.contractions = ContractionTable::load(paths.contractions);
  r.set_phonetic(
      PhoneticLexicon::load(paths.pronunciations, paths.word_counts, min_frequency));
  return r;
}

std::shared_ptr<const CandidateProvider> serialized(
    std::shared_ptr<const CandidateProvider> provider) {
  if (!provider || provider->thread_safe()) return provider;
  return std::make_shared<SerializedProvider>(std::move(provider));
}

// --- Dispatch ---------------------------------------------------------------

PerturbedUtterance apply_operator(const Utterance &u, OperatorId op,
                                  const Resources &res, std::uint64_t seed) {
  const std::string context =
      "utterance " + u.id + " (" + std::string(operator_name(op)) + "): ";
  auto pos_tags = [&] {
    if (res.external_tags) {
      if (auto t = res.external_tags->find(u)) return *t;
    }
    return tag(u, res.pos);
  };
  auto synonym = [&](SynonymKind kind) {
    if (!res.provider) throw ConfigError("no candidate provider configured");
    std::vector<CoarsePos> tags = pos_tags();
    return apply_synonym(u, kind, *res.provider, res.pos, seed,
                         res.synonym_options, tags);
  };
  auto filler = [&](FillerKind kind) {
    std::vector<CoarsePos> tags = pos_tags();
    return apply_filler(u, kind, res.fillers, tags, seed, res.filler_options);
  };

  PerturbedUtterance out;
  try {
    switch (op) {
      case OperatorId::kBosFiller: out = filler(FillerKind::kBos); break;
      case OperatorId::kPreVerbFiller: out = filler(FillerKind::kPreVerb); break;
      case OperatorId::kPostVerbFiller: out = filler(FillerKind::kPostVerb); break;
      case OperatorId::kEosFiller: out = filler(FillerKind::kEos); break;
      case OperatorId::kSynonymVerb: out = synonym(SynonymKind::kVerb); break;
      case OperatorId::kSynonymAdj: out = synonym(SynonymKind::kAdj); break;
      case OperatorId::kSynonymAdv: out = synonym(SynonymKind::kAdv); break;
      case OperatorId::kSynonymAny: out = synonym(SynonymKind::kAny); break;
      case OperatorId::kSynonymStopword: out = synonym(SynonymKind::kStopword); break;
      case OperatorId::kSpeako:
        if (!res.phonetic()) throw ConfigError("no phonetic lexicon configured");
        out = apply_speako(u, *res.phonetic(), seed, res.speako_cache());
        break;
      case OperatorId::kTypo: out = apply_typo(u, seed); break;
      case OperatorId::kContraction: out = apply_contraction(u, res.contractions); break;
      case OperatorId::kPunctuation: out = apply_punctuation(u); break;
    }
  } catch (const ProviderError &e) {
    throw ProviderError(context + e.what());
  } catch (const OperatorError &e) {
    throw OperatorError(context + e.what());
  } catch (const ConfigError &e) {
    throw ConfigError(context + e.what());
  }
  out.base.id = perturbed_id(u.id, op);
  out.origin_id = u.id;
  out.seed = seed;
  return out;
}

// --- Parallelism ------------------------------------------------------------

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)> &fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(
                                                         std::max<std::size_t>(n, 1))));
  std::mutex mu;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (i < failed_index) {
        failed_index = i;
        failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (std::thread &t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

// --- Builders ---------------------------------------------------------------

std::vector<PerturbedUtterance> build_single_operator_set(
    const Dataset &d, OperatorId op, std::uint64_t seed, const Resources &res,
    BuildOptions options) {
  std::optional<Resources> holder;
  const Resources &r = for_workers(res, options.workers, holder);
  std::vector<PerturbedUtterance> out(d.utterances.size());
  parallel_for(d.utterances.size(), options.workers, [&](std::size_t i) {
    out[i] = apply_operator(d.utterances[i], op, r, apply_seed(seed, i));
  });
  return out;
}

OperatorId random_choice(std::uint64_t master, std::size_t index,
                         std::span<const OperatorId> group) {
  Rng rng(derive_seed(master, index, kChoiceStream));
  return group[rng.uniform_index(group.size())];
}

std::vector<std::vector<PerturbedUtterance>> build_random_set(
    const Dataset &d, std::uint64_t seed, std::size_t replicates,
    const Resources &res, std::span<const OperatorId> group, BuildOptions options) {
  if (replicates == 0) throw ConfigError("replicates must be at least 1");
  if (group.empty()) throw ConfigError("operator group is empty");
  std::optional<Resources> holder;
  const Resources &r = for_workers(res, options.workers, holder);
  std::vector<std::vector<PerturbedUtterance>> sets(replicates);
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    const std::uint64_t master = seed ^ static_cast<std::uint64_t>(rep);
    std::vector<PerturbedUtterance> &out = sets[rep];
    out.resize(d.utterances.size());
    parallel_for(d.utterances.size(), options.workers, [&](std::size_t i) {
      const OperatorId op = random_choice(master, i, group);
      out[i] = apply_operator(d.utterances[i], op, r, apply_seed(master, i));
    });
  }
  return sets;
}

// --- Composition ------------------------------------------------------------

namespace {

CompositionReport::Row make_row(OperatorId op) {
  CompositionReport::Row row;
  row.op = op;
  return row;
}

}  // namespace

CompositionReport CompositionReport::from_records(
    std::span<const ProvenanceRecord> records, std::span<const OperatorId> ops) {
  CompositionReport rep;
  for (OperatorId op : sorted_group(ops)) rep.rows_.push_back(make_row(op));
  for (const ProvenanceRecord &r : records) {
    auto it = std::find_if(rep.rows_.begin(), rep.rows_.end(),
                           [&](const Row &row) { return row.op == r.op; });
    if (it == rep.rows_.end()) {
      rep.rows_.push_back(make_row(r.op));
      std::sort(rep.rows_.begin(), rep.rows_.end(),
                [](const Row &a, const Row &b) { return a.op < b.op; });
      it = std::find_if(rep.rows_.begin(), rep.rows_.end(),
                        [&](const Row &row) { return row.op == r.op; });
    }
    ++it->count;
  }
  rep.total_ = records.size();
  if (rep.total_ == 0) return rep;

  // Largest remainder: floor every share (in tenths of a percent), then hand
  // the leftover tenths to the largest remainders, earlier operator first.
  const std::size_t kScale = 1000;
  std::size_t assigned = 0;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (rem, row)
  for (std::size_t i = 0; i < rep.rows_.size(); ++i) {
    Row &row = rep.rows_[i];
    row.percent = 100.0 * static_cast<double>(row.count) /
                  static_cast<double>(rep.total_);
    const std::size_t scaled = row.count * kScale;
    row.tenths = static_cast<int>(scaled / rep.total_);
    assigned += static_cast<std::size_t>(row.tenths);
    remainders.emplace_back(scaled % rep.total_, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < kScale; ++k, ++assigned) {
    ++rep.rows_[remainders[k].second].tenths;
  }
  return rep;
}

CompositionReport CompositionReport::from_records(
    std::span<const PerturbedUtterance> records, std::span<const OperatorId> ops) {
  std::vector<ProvenanceRecord> prov;
  prov.reserve(records.size());
  for (const PerturbedUtterance &p : records) prov.push_back(provenance_of(p));
  return from_records(std::span<const ProvenanceRecord>(prov), ops);
}

const CompositionReport::Row *CompositionReport::find(OperatorId op) const {
  for (const Row &row : rows_) {
    if (row.op == op) return &row;
  }
  return nullptr;
}

namespace {

std::string tenths_text(int tenths) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d.%d", tenths / 10, tenths % 10);
  return buf;
}

}  // namespace

std::string CompositionReport::to_json() const {
  json rows = json::array();
  for (const Row &row : rows_) {
    rows.push_back({{"operator", std::string(operator_name(row.op))},
                    {"label", std::string(operator_label(row.op))},
                    {"count", row.count},
                    {"percent", json::parse(tenths_text(row.tenths))}});
  }
  json out = {{"total", total_}, {"operators", std::move(rows)}};
  return out.dump(2) + "\n";
}

std::string CompositionReport::to_text() const {
  std::size_t width = 0;
  for (const Row &row : rows_) width = std::max(width, operator_label(row.op).size());
  std::string out;
  for (const Row &row : rows_) {
    std::string label(operator_label(row.op));
    std::string value = tenths_text(row.tenths);
    out += label + std::string(width - label.size() + 2 + 5 - value.size(), ' ') +
           value + "\n";
  }
  return out;
}

// --- Hard ---------------------------------------------------------------------

OperatorId hard_choice(const ConfidenceTable &table, std::string_view id,
                       std::span<const OperatorId> group) {
  std::optional<OperatorId> best;
  double best_value = 0.0;
  for (OperatorId op : sorted_group(group)) {
    auto c = table.find(id, op);
    if (!c) {
      throw ConfigError("confidence table has no entry for (" + std::string(id) +
                        ", " + std::string(operator_name(op)) + ")");
    }
    if (!best || *c < best_value) {
      best = op;
      best_value = *c;
    }
  }
  if (!best) throw ConfigError("operator group is empty");
  return *best;
}

void check_coverage(const ConfidenceTable &table, const Dataset &d,
                    std::span<const OperatorId> group) {
  auto gaps = table.missing(d, group);
  if (gaps.empty()) return;
  std::string msg = "confidence table misses " + std::to_string(gaps.size()) +
                    " (id, operator) pair(s):";
  for (const auto &[id, op] : gaps) {
    msg += " (" + id + ", " + std::string(operator_name(op)) + ")";
  }
  throw ConfigError(msg);
}

HardSet build_hard_set(const Dataset &d, const ConfidenceTable &table,
                       std::uint64_t seed, const Resources &res,
                       std::span<const OperatorId> group, BuildOptions options) {
  if (group.empty()) throw ConfigError("operator group is empty");
  check_coverage(table, d, group);
  std::optional<Resources> holder;
  const Resources &r = for_workers(res, options.workers, holder);
  HardSet hard;
  hard.records.resize(d.utterances.size());
  parallel_for(d.utterances.size(), options.workers, [&](std::size_t i) {
    const Utterance &u = d.utterances[i];
    hard.records[i] =
        apply_operator(u, hard_choice(table, u.id, group), r, apply_seed(seed, i));
  });
  hard.composition = CompositionReport::from_records(
      std::span<const PerturbedUtterance>(hard.records), group);
  return hard;
}

ConfidenceTable baseline_confidence(const BaselineModel &model, const Dataset &d,
                                    std::uint64_t seed, const Resources &res,
                                    std::span<const OperatorId> group,
                                    BuildOptions options) {
  ConfidenceTable table;
  for (OperatorId op : sorted_group(group)) {
    std::vector<PerturbedUtterance> set =
        build_single_operator_set(d, op, seed, res, options);
    for (std::size_t i = 0; i < set.size(); ++i) {
      table.set(d.utterances[i].id, op, model.hit_rate(set[i].base));
    }
  }
  return table;
}

}  // namespace slotperturb
