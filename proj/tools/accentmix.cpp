// accentmix: dataset preparation and evaluation toolkit for accent-robust
// ASR experiments. See README.md for the pipeline walkthrough.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "accentmix/audio.hpp"
#include "accentmix/augment_td.hpp"
#include "accentmix/ctc.hpp"
#include "accentmix/manifest.hpp"
#include "accentmix/mcadams.hpp"
#include "accentmix/mixer.hpp"
#include "accentmix/report.hpp"
#include "accentmix/rng.hpp"
#include "accentmix/util.hpp"
#include "accentmix/wer.hpp"

namespace fs = std::filesystem;
using namespace accentmix;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "accentmix 0.1.0";

struct GlobalOpts {
  std::uint64_t seed = 42;  // fixed default keeps bare runs reproducible
  int jobs = 0;             // 0 = hardware concurrency
  bool verbose = false;
};

void note(const GlobalOpts& g, const std::string& msg) {
  if (g.verbose) std::cerr << msg << "\n";
}

std::string default_root(const std::string& manifest_path) {
  const fs::path parent = fs::path(manifest_path).parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
}

std::pair<int, int> parse_int_range(const std::string& s,
                                    const std::string& flag) {
  const auto parts = split_string(s, ',');
  if (parts.size() != 2)
    throw Error(flag + " expects MIN,MAX, got '" + s + "'");
  return {std::stoi(parts[0]), std::stoi(parts[1])};
}

std::pair<double, double> parse_real_range(const std::string& s,
                                           const std::string& flag) {
  const auto parts = split_string(s, ',');
  if (parts.size() != 2)
    throw Error(flag + " expects MIN,MAX, got '" + s + "'");
  return {std::stod(parts[0]), std::stod(parts[1])};
}

std::vector<double> parse_real_list(const std::string& s,
                                    const std::string& flag) {
  std::vector<double> out;
  for (const auto& p : split_string(s, ',')) {
    if (p.empty()) continue;
    try {
      out.push_back(std::stod(p));
    } catch (const std::exception&) {
      throw Error(flag + ": cannot parse '" + p + "' as a number");
    }
  }
  if (out.empty()) throw Error(flag + " is empty");
  return out;
}

// --- augment ---------------------------------------------------------------

struct McAdamsCliOpts {
  std::string manifest, out_dir, out_manifest, root;
  std::string alphas = "0.7,0.8,0.9,1.0";
  int lpc_order = 0;
  double frame_ms = 25.0, hop_ms = 10.0;
  double angle_floor = 0.02;
};

int run_augment_mcadams(const GlobalOpts& g, const McAdamsCliOpts& o) {
  const Manifest in = load_manifest(o.manifest);
  const std::vector<double> alphas = parse_real_list(o.alphas, "--alphas");

  McAdamsConfig cfg;
  cfg.lpc_order = o.lpc_order;
  cfg.frame_ms = o.frame_ms;
  cfg.hop_ms = o.hop_ms;
  cfg.angle_floor = o.angle_floor;

  const std::string root = o.root.empty() ? default_root(o.manifest) : o.root;
  fs::create_directories(o.out_dir);
  const AugmentResult res =
      augment_corpus(in, alphas, root, o.out_dir, cfg, g.jobs);

  save_manifest(res.manifest, o.out_manifest);
  for (const auto& f : res.failed_ids)
    std::cerr << "augment mcadams: failed: " << f << "\n";
  std::cerr << "augment mcadams: " << res.manifest.records.size()
            << " records written, " << res.failed_ids.size() << " failed, "
            << res.stats.fallback_frames << " frame fallbacks\n";
  return 0;
}

struct SpecaugCliOpts {
  std::string manifest, out_dir, out_manifest, root;
  std::string speeds = "0.95,1.0,1.05";
  std::string chunk_count = "1,5";
  std::string chunk_len_ms = "50,100";
  std::string band_count = "1,3";
  double band_width_hz = 100.0;
};

int run_augment_specaug(const GlobalOpts& g, const SpecaugCliOpts& o) {
  const Manifest in = load_manifest(o.manifest);

  TdAugmentConfig cfg;
  cfg.speed_factors = parse_real_list(o.speeds, "--speeds");
  std::tie(cfg.chunk_count_min, cfg.chunk_count_max) =
      parse_int_range(o.chunk_count, "--chunk-count");
  std::tie(cfg.chunk_len_ms_min, cfg.chunk_len_ms_max) =
      parse_real_range(o.chunk_len_ms, "--chunk-len-ms");
  std::tie(cfg.band_count_min, cfg.band_count_max) =
      parse_int_range(o.band_count, "--band-count");
  cfg.band_width_hz = o.band_width_hz;
  cfg.master_seed = g.seed;
  cfg.validate();

  const std::string root = o.root.empty() ? default_root(o.manifest) : o.root;
  fs::create_directories(o.out_dir);
  std::set<fs::path> dirs;
  for (const auto& r : in.records)
    dirs.insert(fs::path(o.out_dir) / fs::path(r.audio_path).parent_path());
  for (const auto& d : dirs) fs::create_directories(d);

  Manifest out;
  std::size_t failed = 0;
  for (const auto& r : in.records) {
    try {
      const AudioBuffer audio =
          read_wav((fs::path(root) / r.audio_path).string());
      const AudioBuffer augmented = apply_td_augment(audio, r.id, cfg);

      UtteranceRecord n = r;
      n.id = r.id + "__specaug";
      const fs::path p(r.audio_path);
      n.audio_path =
          (p.parent_path() / (p.stem().string() + "__specaug.wav"))
              .generic_string();
      n.duration_s = augmented.duration_s();
      write_wav(augmented, (fs::path(o.out_dir) / n.audio_path).string());
      out.records.push_back(std::move(n));
    } catch (const Error& e) {
      std::cerr << "augment specaug: failed: " << r.id << ": " << e.what()
                << "\n";
      ++failed;
    }
  }
  save_manifest(out, o.out_manifest);
  std::cerr << "augment specaug: " << out.records.size()
            << " records written, " << failed << " failed\n";
  return 0;
}

// --- manifest --------------------------------------------------------------

std::string stats_text(const CorpusStats& stats) {
  std::string out = "corpus      duration  utterances  speakers\n";
  char line[128];
  for (const auto& [corpus, pc] : stats.per_corpus) {
    std::snprintf(line, sizeof(line), "%-10s  %8s  %10zu  %8zu\n",
                  corpus.c_str(), format_hours_hmm(pc.duration_s).c_str(),
                  pc.utterances, pc.speakers);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-10s  %8s  %10zu  %8zu\n", "total",
                format_hours_hmm(stats.total_duration_s).c_str(),
                stats.utterance_count, stats.speaker_count);
  out += line;
  return out;
}

int run_manifest_stats(const GlobalOpts& g, const std::string& path,
                       bool as_json, bool verify_audio,
                       const std::string& root_flag) {
  const Manifest m = load_manifest(path);
  const CorpusStats stats = compute_stats(m);

  if (verify_audio) {
    const std::string root = root_flag.empty() ? default_root(path) : root_flag;
    std::size_t mismatches = 0;
    for (const auto& r : m.records) {
      try {
        const AudioBuffer buf = read_wav((fs::path(root) / r.audio_path).string());
        if (std::abs(buf.duration_s() - r.duration_s) > 1e-3) {
          std::cerr << "verify: " << r.id << ": manifest says "
                    << format_double(r.duration_s) << " s, audio has "
                    << format_double(buf.duration_s()) << " s\n";
          ++mismatches;
        }
      } catch (const Error& e) {
        std::cerr << "verify: " << r.id << ": " << e.what() << "\n";
        ++mismatches;
      }
    }
    note(g, "verified " + std::to_string(m.records.size()) + " files");
    if (mismatches > 0) {
      std::cerr << "verify: " << mismatches << " mismatches\n";
      return 1;
    }
  }

  if (as_json) {
    ordered_json j;
    j["total_duration_s"] = stats.total_duration_s;
    j["total_duration_hmm"] = format_hours_hmm(stats.total_duration_s);
    j["utterance_count"] = stats.utterance_count;
    j["speaker_count"] = stats.speaker_count;
    ordered_json per;
    for (const auto& [corpus, pc] : stats.per_corpus) {
      ordered_json cj;
      cj["duration_s"] = pc.duration_s;
      cj["duration_hmm"] = format_hours_hmm(pc.duration_s);
      cj["utterances"] = pc.utterances;
      cj["speakers"] = pc.speakers;
      per[corpus] = cj;
    }
    j["per_corpus"] = per;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << stats_text(stats);
  }
  return 0;
}

int run_manifest_split(const GlobalOpts& g, const std::string& path,
                       const std::vector<std::string>& split_specs,
                       const std::string& out_dir,
                       const std::string& remainder) {
  const Manifest m = load_manifest(path);
  std::vector<SplitTarget> targets;
  for (const auto& spec : split_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw Error("--split expects NAME=HOURS, got '" + spec + "'");
    targets.push_back({spec.substr(0, eq), std::stod(spec.substr(eq + 1))});
  }
  const auto splits = speaker_disjoint_split(m, targets, g.seed, remainder);
  fs::create_directories(out_dir);
  for (const auto& [name, part] : splits) {
    const std::string out = (fs::path(out_dir) / (name + ".jsonl")).string();
    save_manifest(part, out);
    std::cerr << "split " << name << ": " << part.records.size()
              << " records, " << format_hours_hmm(part.total_duration_s())
              << "\n";
  }
  return 0;
}

int run_manifest_normalize(const std::string& text, const std::string& path,
                           const std::string& out) {
  auto join = [](const std::vector<std::string>& tokens) {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) s += ' ';
      s += tokens[i];
    }
    return s;
  };
  if (!text.empty() || path.empty()) {
    std::cout << join(normalize_transcript(text)) << "\n";
    return 0;
  }
  Manifest m = load_manifest(path);
  for (auto& r : m.records) r.transcript = join(normalize_transcript(r.transcript));
  save_manifest(m, out);
  return 0;
}

// --- mix -------------------------------------------------------------------

std::map<std::string, Manifest> load_corpora(
    const std::vector<std::string>& corpus_specs) {
  std::map<std::string, Manifest> corpora;
  for (const auto& spec : corpus_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw Error("--corpus expects TAG=manifest.jsonl, got '" + spec + "'");
    const std::string tag = spec.substr(0, eq);
    if (corpora.count(tag)) throw DuplicateCorpus("corpus given twice: " + tag);
    corpora[tag] = load_manifest(spec.substr(eq + 1));
  }
  return corpora;
}

const MixRecipe& pick_recipe(const std::vector<MixRecipe>& recipes,
                             const std::string& name) {
  for (const auto& r : recipes)
    if (r.name == name) return r;
  std::string known;
  for (const auto& r : recipes) known += " " + r.name;
  throw Error("no recipe named '" + name + "'; file has:" + known);
}

// --- eval ------------------------------------------------------------------

std::map<std::string, std::string> load_hypotheses(const std::string& path) {
  std::map<std::string, std::string> hyps;
  const std::string text = read_file(path);
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string line = text.substr(
        pos, nl == std::string::npos ? text.size() - pos : nl - pos);
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("id") || !j.contains("transcript"))
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": hypothesis needs id and transcript");
    const std::string id = j.at("id").get<std::string>();
    if (!hyps.emplace(id, j.at("transcript").get<std::string>()).second)
      throw DuplicateId(path + ": duplicate hypothesis for '" + id + "'");
  }
  return hyps;
}

int run_eval_wer(const std::string& refs_path, const std::string& hyps_path,
                 const std::string& out, bool cer) {
  const Manifest refs = load_manifest(refs_path);
  const auto hyps = load_hypotheses(hyps_path);

  std::size_t missing = 0;
  std::vector<EvalPair> pairs;
  for (const auto& r : refs.records) {
    EvalPair p;
    p.id = r.id;
    p.ref = normalize_transcript(r.transcript);
    const auto it = hyps.find(r.id);
    if (it == hyps.end())
      ++missing;  // scored as an empty hypothesis (all deletions)
    else
      p.hyp = normalize_transcript(it->second);
    if (cer) {
      p.ref = char_tokens(p.ref);
      p.hyp = char_tokens(p.hyp);
    }
    pairs.push_back(std::move(p));
  }
  if (missing > 0)
    std::cerr << "eval wer: " << missing
              << " references had no hypothesis (scored as empty)\n";

  const WerReport report = corpus_wer(pairs);
  emit(wer_report_to_json(report), out);
  std::cerr << (cer ? "%CER " : "%WER ") << format_fixed2(report.wer) << " [ "
            << report.substitutions + report.deletions + report.insertions
            << " / " << report.ref_words << ", " << report.insertions
            << " ins, " << report.deletions << " del, "
            << report.substitutions << " sub ]\n";
  return 0;
}

// --- decode ----------------------------------------------------------------

int run_decode_greedy(const std::string& logits_dir,
                      const std::string& vocab_path, const std::string& out) {
  const auto vocab = load_vocab(vocab_path);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(logits_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".logits")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::string jsonl;
  for (const auto& f : files) {
    const LogitMatrix m = read_logits(f.string(), vocab);
    ordered_json j;
    j["id"] = f.stem().string();
    j["transcript"] = greedy_decode(m);
    jsonl += j.dump();
    jsonl += '\n';
  }
  emit(jsonl, out);
  std::cerr << "decode greedy: " << files.size() << " utterances\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataset preparation and evaluation toolkit for accent-robust "
               "ASR experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Master seed (default 42)")
      ->capture_default_str();
  app.add_option("--jobs", g.jobs,
                 "Worker threads, 0 = all cores (output is identical "
                 "regardless)")
      ->capture_default_str();
  app.add_flag("--verbose", g.verbose, "Chatty progress on stderr");

  int rc = 0;
  auto run = [&rc](auto fn) {
    return [&rc, fn]() { rc = fn(); };
  };

  // augment
  auto* augment = app.add_subcommand("augment", "Waveform-level augmentation");
  augment->require_subcommand(1);

  auto mc = std::make_shared<McAdamsCliOpts>();
  auto* mcadams_cmd = augment->add_subcommand(
      "mcadams", "McAdams pseudo-voice corpus expansion");
  mcadams_cmd->add_option("--manifest", mc->manifest, "Input manifest")
      ->required();
  mcadams_cmd->add_option("--alphas", mc->alphas,
                          "Comma-separated McAdams coefficients")
      ->capture_default_str();
  mcadams_cmd->add_option("--out-dir", mc->out_dir, "Output audio directory")
      ->required();
  mcadams_cmd->add_option("--out-manifest", mc->out_manifest,
                          "Output manifest path")
      ->required();
  mcadams_cmd->add_option("--root", mc->root,
                          "Audio root (default: manifest directory)");
  mcadams_cmd->add_option("--lpc-order", mc->lpc_order,
                          "LPC order, 0 = rate/1000 + 4");
  mcadams_cmd->add_option("--frame-ms", mc->frame_ms, "Analysis frame length")
      ->capture_default_str();
  mcadams_cmd->add_option("--hop-ms", mc->hop_ms, "Analysis hop")
      ->capture_default_str();
  mcadams_cmd->add_option("--angle-floor", mc->angle_floor,
                          "Pole angle floor in radians")
      ->capture_default_str();
  mcadams_cmd->callback(
      run([&g, mc]() { return run_augment_mcadams(g, *mc); }));

  auto sa = std::make_shared<SpecaugCliOpts>();
  auto* specaug_cmd = augment->add_subcommand(
      "specaug", "Time-domain SpecAugment approximation");
  specaug_cmd->add_option("--manifest", sa->manifest, "Input manifest")
      ->required();
  specaug_cmd->add_option("--out-dir", sa->out_dir, "Output audio directory")
      ->required();
  specaug_cmd->add_option("--out-manifest", sa->out_manifest,
                          "Output manifest path")
      ->required();
  specaug_cmd->add_option("--root", sa->root,
                          "Audio root (default: manifest directory)");
  specaug_cmd->add_option("--speeds", sa->speeds, "Speed factor choices")
      ->capture_default_str();
  specaug_cmd->add_option("--chunk-count", sa->chunk_count,
                          "MIN,MAX zeroed chunks")
      ->capture_default_str();
  specaug_cmd->add_option("--chunk-len-ms", sa->chunk_len_ms,
                          "MIN,MAX chunk length in ms")
      ->capture_default_str();
  specaug_cmd->add_option("--band-count", sa->band_count,
                          "MIN,MAX notched bands")
      ->capture_default_str();
  specaug_cmd->add_option("--band-width-hz", sa->band_width_hz,
                          "Notch -3 dB bandwidth")
      ->capture_default_str();
  specaug_cmd->callback(
      run([&g, sa]() { return run_augment_specaug(g, *sa); }));

  // manifest
  auto* manifest_cmd = app.add_subcommand("manifest", "Manifest utilities");
  manifest_cmd->require_subcommand(1);

  auto stats_path = std::make_shared<std::string>();
  auto stats_json = std::make_shared<bool>(false);
  auto stats_verify = std::make_shared<bool>(false);
  auto stats_root = std::make_shared<std::string>();
  auto* stats_cmd =
      manifest_cmd->add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("--manifest", *stats_path, "Input manifest")
      ->required();
  stats_cmd->add_flag("--json", *stats_json, "JSON output");
  stats_cmd->add_flag("--verify-audio", *stats_verify,
                      "Re-read WAV headers and compare durations");
  stats_cmd->add_option("--root", *stats_root,
                        "Audio root for --verify-audio");
  stats_cmd->callback(run([&g, stats_path, stats_json, stats_verify,
                           stats_root]() {
    return run_manifest_stats(g, *stats_path, *stats_json, *stats_verify,
                              *stats_root);
  }));

  auto split_path = std::make_shared<std::string>();
  auto split_specs = std::make_shared<std::vector<std::string>>();
  auto split_out = std::make_shared<std::string>();
  auto split_remainder = std::make_shared<std::string>("rest");
  auto* split_cmd = manifest_cmd->add_subcommand(
      "split", "Speaker-disjoint splitting");
  split_cmd->add_option("--manifest", *split_path, "Input manifest")
      ->required();
  split_cmd->add_option("--split", *split_specs, "NAME=HOURS (repeatable)")
      ->required();
  split_cmd->add_option("--out-dir", *split_out, "Directory for NAME.jsonl")
      ->required();
  split_cmd->add_option("--remainder", *split_remainder,
                        "Remainder split name ('' = disallow leftovers)")
      ->capture_default_str();
  split_cmd->callback(run([&g, split_path, split_specs, split_out,
                           split_remainder]() {
    return run_manifest_split(g, *split_path, *split_specs, *split_out,
                              *split_remainder);
  }));

  auto norm_text = std::make_shared<std::string>();
  auto norm_manifest = std::make_shared<std::string>();
  auto norm_out = std::make_shared<std::string>();
  auto* norm_cmd = manifest_cmd->add_subcommand(
      "normalize", "Apply transcript normalization");
  norm_cmd->add_option("--text", *norm_text, "Normalize one string to stdout");
  norm_cmd->add_option("--manifest", *norm_manifest,
                       "Normalize a manifest's transcripts");
  norm_cmd->add_option("--out", *norm_out, "Output manifest path");
  norm_cmd->callback(run([norm_text, norm_manifest, norm_out]() {
    return run_manifest_normalize(*norm_text, *norm_manifest, *norm_out);
  }));

  // mix
  auto* mix = app.add_subcommand("mix", "Training-set construction");
  mix->require_subcommand(1);

  auto cv_hours = std::make_shared<double>(30.87);
  auto aaf_hours = std::make_shared<double>(7.97);
  auto fullcv_hours = std::make_shared<double>(56.19);
  auto series_out = std::make_shared<std::string>();
  auto* series_cmd =
      mix->add_subcommand("series", "The 13-recipe CV proportion series");
  series_cmd->add_option("--cv-hours", *cv_hours, "CV train split hours")
      ->required();
  series_cmd->add_option("--aaf-hours", *aaf_hours, "AAF train split hours")
      ->required();
  series_cmd->add_option("--fullcv-hours", *fullcv_hours,
                         "Whole-CV hours (train+dev+test)")
      ->capture_default_str();
  series_cmd->add_option("--out", *series_out, "Output path (default stdout)");
  series_cmd->callback(run([cv_hours, aaf_hours, fullcv_hours, series_out]() {
    emit(recipes_to_json(build_cv_series(*cv_hours, *aaf_hours,
                                         *fullcv_hours)),
         *series_out);
    return 0;
  }));

  auto total_hours = std::make_shared<double>(31.0);
  auto step = std::make_shared<double>(0.1);
  auto fixed_out = std::make_shared<std::string>();
  auto* fixed_cmd =
      mix->add_subcommand("fixed", "Fixed-total-hours replacement series");
  fixed_cmd->add_option("--total-hours", *total_hours, "Total hours")
      ->required();
  fixed_cmd->add_option("--step", *step, "Proportion increment")
      ->capture_default_str();
  fixed_cmd->add_option("--out", *fixed_out, "Output path (default stdout)");
  fixed_cmd->callback(run([total_hours, step, fixed_out]() {
    emit(recipes_to_json(build_fixed_hours_series(*total_hours, *step)),
         *fixed_out);
    return 0;
  }));

  auto union_recipes = std::make_shared<std::string>();
  auto union_base = std::make_shared<std::string>();
  auto union_corpus = std::make_shared<std::string>();
  auto union_hours = std::make_shared<double>(0.0);
  auto union_full = std::make_shared<bool>(false);
  auto union_out = std::make_shared<std::string>();
  auto* union_cmd =
      mix->add_subcommand("union", "Add a corpus to an existing recipe");
  union_cmd->add_option("--recipes", *union_recipes, "Recipe JSON file")
      ->required();
  union_cmd->add_option("--base", *union_base, "Recipe name to extend")
      ->required();
  union_cmd->add_option("--corpus", *union_corpus, "Corpus tag to add")
      ->required();
  union_cmd->add_option("--hours", *union_hours, "Hour target for the corpus");
  union_cmd->add_flag("--full", *union_full, "Take the whole corpus");
  union_cmd->add_option("--out", *union_out, "Output path (default stdout)");
  union_cmd->callback(run([union_recipes, union_base, union_corpus,
                           union_hours, union_full, union_out]() {
    const auto recipes = load_recipes(*union_recipes);
    const MixRecipe& base = pick_recipe(recipes, *union_base);
    const MixRecipe merged = union_recipe(
        base, MixComponent{*union_corpus, *union_full, *union_hours});
    emit(recipes_to_json({merged}), *union_out);
    return 0;
  }));

  auto realize_recipes = std::make_shared<std::string>();
  auto realize_name = std::make_shared<std::string>();
  auto realize_corpora = std::make_shared<std::vector<std::string>>();
  auto realize_out = std::make_shared<std::string>();
  auto* realize_cmd =
      mix->add_subcommand("realize", "Materialize a recipe into a manifest");
  realize_cmd->add_option("--recipes", *realize_recipes,
                          "Recipe JSON file (with --recipe as a name)");
  realize_cmd
      ->add_option("--recipe", *realize_name,
                   "Recipe name within --recipes, or a single-recipe file")
      ->required();
  realize_cmd
      ->add_option("--corpus", *realize_corpora,
                   "TAG=manifest.jsonl (repeatable)")
      ->required();
  realize_cmd->add_option("--out", *realize_out, "Output manifest")
      ->required();
  realize_cmd->callback(run([&g, realize_recipes, realize_name,
                             realize_corpora, realize_out]() {
    MixRecipe recipe;
    if (!realize_recipes->empty()) {
      recipe = pick_recipe(load_recipes(*realize_recipes), *realize_name);
    } else {
      const auto recipes = load_recipes(*realize_name);
      if (recipes.size() != 1)
        throw Error("'" + *realize_name + "' holds " +
                    std::to_string(recipes.size()) +
                    " recipes; pass it as --recipes and name one with "
                    "--recipe");
      recipe = recipes.front();
    }
    const auto corpora = load_corpora(*realize_corpora);
    const Manifest m = realize_recipe(recipe, corpora, g.seed);
    save_manifest(m, *realize_out);
    std::cerr << "realize " << recipe.name << ": " << m.records.size()
              << " records, " << format_hours_hmm(m.total_duration_s())
              << "\n";
    return 0;
  }));

  auto val_cv = std::make_shared<std::string>();
  auto val_aaf = std::make_shared<std::string>();
  auto val_out = std::make_shared<std::string>();
  auto val_check = std::make_shared<std::vector<std::string>>();
  auto* val_cmd = mix->add_subcommand(
      "validation", "The 5-hour CV/AAF early-stopping set");
  val_cmd->add_option("--cv-dev", *val_cv, "CV dev manifest")->required();
  val_cmd->add_option("--aaf-dev", *val_aaf, "AAF dev manifest")->required();
  val_cmd->add_option("--out", *val_out, "Output manifest")->required();
  val_cmd->add_option("--check-train", *val_check,
                      "Train manifests that must stay speaker-disjoint");
  val_cmd->callback(run([val_cv, val_aaf, val_out, val_check]() {
    const Manifest val =
        build_validation_set(load_manifest(*val_cv), load_manifest(*val_aaf));
    save_manifest(val, *val_out);
    int bad = 0;
    for (const auto& train_path : *val_check) {
      const auto overlap = speaker_overlap(val, load_manifest(train_path));
      for (const auto& s : overlap) {
        std::cerr << "validation: speaker '" << s << "' also in "
                  << train_path << "\n";
        bad = 1;
      }
    }
    return bad;
  }));

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Scoring");
  eval_cmd->require_subcommand(1);
  auto refs_path = std::make_shared<std::string>();
  auto hyps_path = std::make_shared<std::string>();
  auto wer_out = std::make_shared<std::string>();
  auto use_cer = std::make_shared<bool>(false);
  auto* wer_cmd = eval_cmd->add_subcommand("wer", "Pooled word error rate");
  wer_cmd->add_option("--refs", *refs_path, "Reference manifest")->required();
  wer_cmd->add_option("--hyps", *hyps_path, "Hypothesis JSONL {id, transcript}")
      ->required();
  wer_cmd->add_option("--out", *wer_out, "Report path (default stdout)");
  wer_cmd->add_flag("--cer", *use_cer, "Character error rate instead");
  wer_cmd->callback(run([refs_path, hyps_path, wer_out, use_cer]() {
    return run_eval_wer(*refs_path, *hyps_path, *wer_out, *use_cer);
  }));

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "Logit decoding");
  decode_cmd->require_subcommand(1);
  auto logits_dir = std::make_shared<std::string>();
  auto vocab_path = std::make_shared<std::string>();
  auto decode_out = std::make_shared<std::string>();
  auto* greedy_cmd =
      decode_cmd->add_subcommand("greedy", "Best-path CTC decoding");
  greedy_cmd->add_option("--logits", *logits_dir, "Directory of .logits files")
      ->required();
  greedy_cmd->add_option("--vocab", *vocab_path, "Vocabulary JSON")
      ->required();
  greedy_cmd->add_option("--out", *decode_out, "Output JSONL (default stdout)");
  greedy_cmd->callback(run([logits_dir, vocab_path, decode_out]() {
    return run_decode_greedy(*logits_dir, *vocab_path, *decode_out);
  }));

  // report
  auto* report_cmd = app.add_subcommand("report", "Result presentation");
  report_cmd->require_subcommand(1);
  auto results_path = std::make_shared<std::string>();
  auto table_testsets = std::make_shared<std::string>();
  auto table_out = std::make_shared<std::string>();
  auto table_json = std::make_shared<bool>(false);
  auto* table_cmd =
      report_cmd->add_subcommand("table", "Train x test WER summary");
  table_cmd->add_option("--results", *results_path, "Results JSON")
      ->required();
  table_cmd->add_option("--testsets", *table_testsets,
                        "Column order, comma-separated");
  table_cmd->add_option("--out", *table_out, "Output path (default stdout)");
  table_cmd->add_flag("--json", *table_json, "Machine-readable summary");
  table_cmd->callback(run([results_path, table_testsets, table_out,
                           table_json]() {
    std::vector<std::string> cols;
    if (!table_testsets->empty())
      for (auto& c : split_string(*table_testsets, ','))
        if (!c.empty()) cols.push_back(c);
    const auto results = load_results(*results_path);
    emit(*table_json ? summary_json(results, cols)
                     : summary_table(results, cols),
         *table_out);
    return 0;
  }));

  auto scatter_results = std::make_shared<std::string>();
  auto scatter_x = std::make_shared<std::string>();
  auto scatter_y = std::make_shared<std::string>();
  auto scatter_out = std::make_shared<std::string>();
  auto* scatter_cmd =
      report_cmd->add_subcommand("scatter", "Two-domain trade-off CSV");
  scatter_cmd->add_option("--results", *scatter_results, "Results JSON")
      ->required();
  scatter_cmd->add_option("--x", *scatter_x, "X-axis test set")->required();
  scatter_cmd->add_option("--y", *scatter_y, "Y-axis test set")->required();
  scatter_cmd->add_option("--out", *scatter_out,
                          "Output path (default stdout)");
  scatter_cmd->callback(run([scatter_results, scatter_x, scatter_y,
                             scatter_out]() {
    emit(tradeoff_scatter(load_results(*scatter_results), *scatter_x,
                          *scatter_y),
         *scatter_out);
    return 0;
  }));

  auto curve_results = std::make_shared<std::string>();
  auto curve_testset = std::make_shared<std::string>();
  auto curve_out = std::make_shared<std::string>();
  auto* curve_cmd =
      report_cmd->add_subcommand("curve", "WER vs CV proportion CSV");
  curve_cmd->add_option("--results", *curve_results, "Results JSON")
      ->required();
  curve_cmd->add_option("--testset", *curve_testset, "Test set")->required();
  curve_cmd->add_option("--out", *curve_out, "Output path (default stdout)");
  curve_cmd->callback(run([curve_results, curve_testset, curve_out]() {
    emit(proportion_curve(load_results(*curve_results), *curve_testset),
         *curve_out);
    return 0;
  }));

  // Global flags (--seed, --jobs) may appear after the subcommand, as in
  // `accentmix mix realize ... --seed 5`.
  const std::function<void(CLI::App*)> enable_fallthrough =
      [&enable_fallthrough](CLI::App* cmd) {
        cmd->fallthrough();
        for (CLI::App* sub : cmd->get_subcommands({}))
          enable_fallthrough(sub);
      };
  enable_fallthrough(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the parse diagnostic to stderr
    return 2;
  } catch (const Error& e) {
    std::cerr << "accentmix: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "accentmix: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
