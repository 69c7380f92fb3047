// Copyright 2026 The scilist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Staged pipeline. Each stage reads its predecessors' artifacts from the
// output directory, writes its own into <out>/<stage>/ and records them in
// <out>/<stage>/manifest.json together with the config hash and seed.
//
//   sample       sample/result.json, sample/seeds.txt
//   classify     classify/scientists.{json,csv}, classify/bundles.json, classify/notes.csv
//   urls         urls/mentions.json, urls/domains.csv, urls/scientific_domains.csv,
//                urls/domains_by_discipline.csv, urls/fractions.csv,
//                urls/s_histograms.csv, urls/expansion.json
//   networks     networks/<kind>_edges.csv, networks/centrality_<kind>.csv,
//                networks/summary.csv, networks/group_shares.csv,
//                networks/assortativity.csv
//   communities  communities/partition.csv, communities/community_network.csv,
//                communities/summaries.json, communities/codelength.json
//   report       report/<table>.{csv,txt} for the nine tables in kReportTables

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "scilist/communities.hpp"
#include "scilist/config.hpp"
#include "scilist/error.hpp"
#include "scilist/graph.hpp"
#include "scilist/lexicon.hpp"
#include "scilist/netanalysis.hpp"
#include "scilist/parallel.hpp"
#include "scilist/profiles.hpp"
#include "scilist/rest.hpp"
#include "scilist/sampler.hpp"
#include "scilist/source.hpp"
#include "scilist/urlshare.hpp"

namespace scilist::pipeline {

inline constexpr const char* kToolVersion = "scilist 1.0.0";

inline constexpr const char* kReportTables[] = {
    "disciplines",       "workforce",      "gender",      "domains",      "s_histograms",
    "network_summary",   "centrality_top", "communities", "assortativity"};

// ---------------------------------------------------------------------------
// Hashing

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Files hash their bytes; directories hash the sorted list of
// (relative path, file hash) pairs.
inline std::string sha256_path(const std::filesystem::path& p) {
  if (!std::filesystem::is_directory(p)) return sha256_hex(read_file(p));
  std::vector<std::string> lines;
  for (const auto& e : std::filesystem::recursive_directory_iterator(p)) {
    if (!e.is_regular_file()) continue;
    lines.push_back(std::filesystem::relative(e.path(), p).generic_string() + "  " +
                    sha256_hex(read_file(e.path())) + "\n");
  }
  std::sort(lines.begin(), lines.end());
  std::string all;
  for (const auto& l : lines) all += l;
  return sha256_hex(all);
}

// ---------------------------------------------------------------------------
// Tables

inline std::string num(double x) { return fmt::format("{:.17g}", x); }
inline std::string fixed(double x, int digits) { return fmt::format("{:.{}f}", x, digits); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// RFC 4180 records, header included.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
      out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }

  // Aligned columns; numeric columns are right-aligned, header included.
  std::string text() const {
    std::vector<std::size_t> width(header.size());
    std::vector<bool> numeric(header.size(), true);
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) {
        width[c] = std::max(width[c], r[c].size());
        if (!r[c].empty() && !PipelineConfig::parse_real(r[c])) numeric[c] = false;
      }
    }
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      std::string l;
      for (std::size_t c = 0; c < width.size(); ++c) {
        const std::string v = c < r.size() ? r[c] : "";
        if (c) l += "  ";
        l += numeric[c] ? fmt::format("{:>{}}", v, width[c]) : fmt::format("{:<{}}", v, width[c]);
      }
      while (!l.empty() && l.back() == ' ') l.pop_back();
      out += l + "\n";
    };
    line(header);
    std::string rule;
    for (std::size_t c = 0; c < width.size(); ++c) rule += (c ? "  " : "") + std::string(width[c], '-');
    out += rule + "\n";
    for (const auto& r : rows) line(r);
    return out;
  }

  static Table from_csv(std::string_view text) {
    auto rows = parse_csv(text);
    Table t;
    if (rows.empty()) return t;
    t.header = std::move(rows.front());
    t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
    return t;
  }

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("table lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

// ---------------------------------------------------------------------------
// Stage plumbing

struct Context {
  PipelineConfig config;

  std::filesystem::path out() const { return config.path("output.dir"); }
  std::size_t workers() const { return static_cast<std::size_t>(config.integer("run.workers")); }
  std::filesystem::path stage_dir(Stage s) const { return out() / std::string(to_string(s)); }
};

struct InputRef {
  std::string name;
  std::string value;
  std::string sha256;
};

class StageOutput {
 public:
  StageOutput(const Context& ctx, Stage stage) : ctx_(ctx), stage_(stage) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }

  void input_setting(const std::string& key) {
    if (!ctx_.config.has_path(key)) return;
    inputs_.push_back({key, ctx_.config.str(key), sha256_path(ctx_.config.path(key))});
  }
  void input_artifact(Stage s, const std::string& file) {
    const std::string rel = std::string(to_string(s)) + "/" + file;
    inputs_.push_back({rel, "", sha256_path(ctx_.out() / rel)});
  }

  // Replaces the stage directory with the collected files and a manifest.
  void commit() {
    const auto dir = ctx_.stage_dir(stage_);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [name, content] : files_) {
      write_atomic(dir / name, content);
      outputs.push_back({{"path", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    }
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& in : inputs_) {
      nlohmann::json j = {{"name", in.name}, {"sha256", in.sha256}};
      if (!in.value.empty()) j["value"] = in.value;
      inputs.push_back(j);
    }
    nlohmann::json m = {{"format", "scilist-manifest"},
                        {"version", 1},
                        {"stage", std::string(to_string(stage_))},
                        {"tool", kToolVersion},
                        {"config_sha256", sha256_hex(ctx_.config.canonical())},
                        {"seed", nullptr},
                        {"inputs", inputs},
                        {"outputs", outputs}};
    if (ctx_.config.has("communities.seed")) {
      if (const auto s = PipelineConfig::parse_int(ctx_.config.str("communities.seed"))) m["seed"] = *s;
    }
    write_atomic(dir / "manifest.json", m.dump(2) + "\n");
  }

  static void write_atomic(const std::filesystem::path& p, const std::string& content) {
    const auto tmp = std::filesystem::path(p.string() + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw DataError("cannot write " + tmp.string());
      out << content;
      if (!out) throw DataError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
  }

 private:
  const Context& ctx_;
  Stage stage_;
  std::map<std::string, std::string> files_;
  std::vector<InputRef> inputs_;
};

// Reads a predecessor artifact, or reports which stage must run first.
inline std::string need(const Context& ctx, Stage consumer, Stage producer, const std::string& file) {
  const auto p = ctx.stage_dir(producer) / file;
  if (!std::filesystem::exists(p) || !std::filesystem::exists(ctx.stage_dir(producer) / "manifest.json")) {
    throw StageError("stage '" + std::string(to_string(consumer)) + "' needs " + p.string() +
                     "; run `scilist " + std::string(to_string(producer)) + "` first");
  }
  return read_file(p);
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": " + e.what());
  }
}

inline std::unique_ptr<Source> open_source(const Context& ctx) {
  if (ctx.config.has_path("source.fixture")) {
    FixtureOptions o;
    o.page_size = static_cast<std::size_t>(ctx.config.integer("source.page_size"));
    return std::make_unique<FixtureSource>(load_fixture(ctx.config.path("source.fixture")), o);
  }
  return std::make_unique<RestSource>(load_rest_config(ctx.config.path("source.rest").string()));
}

inline void input_source(StageOutput& out) {
  out.input_setting("source.fixture");
  out.input_setting("source.rest");
}

// ---------------------------------------------------------------------------
// Shared artifact readers

struct Classified {
  std::vector<ScientistRecord> records;           // by user_id
  std::map<std::string, UserBundle> bundles;      // by user_id
};

inline Classified read_classified(const Context& ctx, Stage consumer) {
  Classified c;
  const auto sj = parse_json(need(ctx, consumer, Stage::Classify, "scientists.json"), "scientists.json");
  const auto bj = parse_json(need(ctx, consumer, Stage::Classify, "bundles.json"), "bundles.json");
  try {
    c.records = sj.at("scientists").get<std::vector<ScientistRecord>>();
    for (const auto& b : bj.at("bundles")) {
      auto bundle = b.get<UserBundle>();
      const std::string id = bundle.profile.user_id;
      c.bundles.emplace(id, std::move(bundle));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("classify artifacts: ") + e.what());
  }
  return c;
}

inline std::optional<std::string> primary_discipline(const ScientistRecord& r) {
  if (r.disciplines.empty()) return std::nullopt;
  return r.disciplines.front();
}

// ---------------------------------------------------------------------------
// sample

// Attribute records (JSON lines) go through seed selection; any other file
// is read as one user id per line, with `#` comments.
inline std::vector<std::string> read_seeds(const std::filesystem::path& p, const TitleLexicon& lex,
                                           std::int64_t min_listed, std::size_t top_attrs) {
  const std::string text = read_file(p);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    std::istringstream in(text);
    return select_seeds(read_attribute_records(in), lex, min_listed, top_attrs);
  }
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (!t.empty() && t[0] != '#') ids.insert(std::string(t));
  }
  return {ids.begin(), ids.end()};
}

inline void run_sample(const Context& ctx) {
  const auto& cfg = ctx.config;
  const TitleLexicon lex = load_lexicon(cfg.path("lexicon.path").string());
  auto source = open_source(ctx);
  const auto seeds = read_seeds(cfg.path("sample.seeds"), lex, cfg.integer("sample.min_listed"),
                                static_cast<std::size_t>(cfg.integer("sample.top_attrs")));
  if (seeds.empty()) throw DataError("no seed users selected from " + cfg.path("sample.seeds").string());

  SnowballOptions o;
  o.workers = ctx.workers();
  o.match_descriptions = cfg.boolean("sample.match_descriptions");
  o.checkpoint_every = static_cast<std::size_t>(cfg.integer("sample.checkpoint_every"));
  if (o.checkpoint_every > 0) {
    std::filesystem::create_directories(ctx.out() / ".state");
    o.checkpoint = ctx.out() / ".state" / "sample_checkpoint.json";
    o.resume = true;
  }
  SampleResult r = snowball(seeds, *source, lex, o);
  r.self_identified = filter_self_identified(r, *source, lex, ctx.workers());

  StageOutput out(ctx, Stage::Sample);
  input_source(out);
  out.input_setting("lexicon.path");
  out.input_setting("sample.seeds");
  out.add("result.json", to_json(r).dump(2) + "\n");
  std::string seed_text;
  for (const auto& s : seeds) seed_text += s + "\n";
  out.add("seeds.txt", seed_text);
  out.commit();
}

// ---------------------------------------------------------------------------
// classify

inline std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

inline void run_classify(const Context& ctx) {
  const auto& cfg = ctx.config;
  const auto sample =
      sample_result_from_json(parse_json(need(ctx, Stage::Classify, Stage::Sample, "result.json"), "result.json"));
  const TitleLexicon lex = load_lexicon(cfg.path("lexicon.path").string());
  const CensusNameDb census =
      load_census(cfg.path("classify.census_female").string(), cfg.path("classify.census_male").string());
  std::optional<FixtureClassifier> classifier;
  if (cfg.has_path("classify.image_fixture")) {
    classifier = load_fixture_classifier(cfg.path("classify.image_fixture").string());
  }
  ClassifyOptions opts;
  opts.confidence_threshold = cfg.real("classify.confidence");
  opts.rank_order = cfg.str("classify.rank_order") == "listing" ? RankOrder::Listing : RankOrder::Offset;
  const auto max_statuses = static_cast<std::size_t>(cfg.integer("source.max_statuses"));
  auto source = open_source(ctx);

  const std::vector<std::string> ids(sample.self_identified.begin(), sample.self_identified.end());
  std::vector<std::optional<ScientistRecord>> records(ids.size());
  std::vector<std::optional<UserBundle>> bundles(ids.size());
  std::vector<std::string> notes(ids.size());
  parallel_for(ids.size(), ctx.workers(), [&](std::size_t i) {
    auto b = source->fetch_user_bundle(ids[i], max_statuses);
    if (!b) {
      notes[i] = "bundle " + std::string(to_string(b.status()));
      return;
    }
    auto lists = source->fetch_memberships(ids[i]);
    std::vector<ListRecord> memberships;
    if (lists) {
      memberships = std::move(lists).value();
    } else {
      notes[i] = "memberships " + std::string(to_string(lists.status()));
    }
    std::string note;
    records[i] = classify_scientist(b->profile, memberships, lex, census,
                                    classifier ? &*classifier : nullptr, opts, &note);
    if (!note.empty()) notes[i] += (notes[i].empty() ? "" : "; ") + note;
    bundles[i] = std::move(b).value();
  });

  nlohmann::json sj = nlohmann::json::array();
  nlohmann::json bj = nlohmann::json::array();
  Table csv{{"user_id", "screen_name", "profile_titles", "list_titles", "disciplines", "oes_group", "gender",
             "gender_method", "rank"},
            {}};
  Table note_table{{"user_id", "note"}, {}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!notes[i].empty()) note_table.rows.push_back({ids[i], notes[i]});
    if (!records[i]) continue;
    const auto& r = *records[i];
    sj.push_back(r);
    bj.push_back(*bundles[i]);
    std::vector<std::string> lt;
    for (const auto& [t, n] : r.list_title_counts) lt.push_back(t + ":" + std::to_string(n));
    csv.rows.push_back({r.user_id, bundles[i]->profile.screen_name, join(r.profile_titles, ";"), join(lt, ";"),
                        join(r.disciplines, ";"), r.oes_group ? std::string(to_string(*r.oes_group)) : "",
                        std::string(to_string(r.gender)), std::string(to_string(r.gender_method)),
                        std::string(to_string(r.rank))});
  }

  StageOutput out(ctx, Stage::Classify);
  out.input_artifact(Stage::Sample, "result.json");
  input_source(out);
  out.input_setting("lexicon.path");
  out.input_setting("classify.census_female");
  out.input_setting("classify.census_male");
  out.input_setting("classify.image_fixture");
  out.add("scientists.json",
          nlohmann::json{{"format", "scilist-scientists"}, {"version", 1}, {"scientists", sj}}.dump(2) + "\n");
  out.add("scientists.csv", csv.csv());
  out.add("bundles.json",
          nlohmann::json{{"format", "scilist-bundles"}, {"version", 1}, {"bundles", bj}}.dump(2) + "\n");
  out.add("notes.csv", note_table.csv());
  out.commit();
}

// ---------------------------------------------------------------------------
// urls

class NullResolver final : public Resolver {
 public:
  std::optional<std::string> resolve(const std::string&) override { return std::nullopt; }
};

inline Table ranking_table(const std::vector<DomainCount>& ranked) {
  Table t{{"domain", "count"}, {}};
  for (const auto& d : ranked) t.rows.push_back({d.domain, std::to_string(d.count)});
  return t;
}

inline void run_urls(const Context& ctx) {
  const auto& cfg = ctx.config;
  const Classified c = read_classified(ctx, Stage::Urls);
  std::vector<Status> statuses;
  for (const auto& [id, b] : c.bundles) statuses.insert(statuses.end(), b.statuses.begin(), b.statuses.end());
  std::vector<std::string> parse_errors;
  auto mentions = extract_urls(statuses, &parse_errors);
  if (cfg.boolean("urls.dedupe")) mentions = dedupe_mentions(mentions);

  std::unique_ptr<Resolver> resolver;
  const std::string kind = cfg.str("urls.resolver");
  const auto hops = cfg.integer("urls.max_hops");
  if (kind == "fixture") {
    resolver = std::make_unique<FixtureResolver>(
        load_fixture_resolver(cfg.path("urls.resolver_fixture").string(), static_cast<int>(hops)));
  } else if (kind == "http") {
    resolver = std::make_unique<HttpResolver>(static_cast<std::size_t>(hops), cfg.real("urls.timeout"));
  } else {
    resolver = std::make_unique<NullResolver>();
  }
  const auto shorteners = load_domain_list(cfg.path("urls.shorteners").string());
  const auto sci = load_domain_list(cfg.path("urls.scientific").string());
  ExpansionStats stats;
  const auto expanded = expand_all(mentions, *resolver, shorteners, ctx.workers(), &stats);

  std::map<std::string, std::string> discipline_of;
  for (const auto& r : c.records) {
    if (auto d = primary_discipline(r)) discipline_of[r.user_id] = *d;
  }
  const auto k = static_cast<std::size_t>(cfg.integer("urls.top_k"));
  const auto bins = static_cast<std::size_t>(cfg.integer("urls.bins"));

  const auto all_counts = domain_counts(expanded);
  std::set<std::string> sci_seen;
  for (const auto& [d, n] : all_counts) {
    if (domain_in(d, sci)) sci_seen.insert(d);
  }
  Table by_disc{{"discipline", "rank", "domain", "count"}, {}};
  for (const auto& [disc, ranked] : top_domains_by_discipline(expanded, k, discipline_of, &sci_seen)) {
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      by_disc.rows.push_back({disc, std::to_string(i + 1), ranked[i].domain, std::to_string(ranked[i].count)});
    }
  }

  const auto shares = scientific_fraction(expanded, sci);
  Table fractions{{"user_id", "scientific", "total", "s"}, {}};
  std::vector<double> all_s;
  for (const auto& [user, sh] : shares) {
    fractions.rows.push_back({user, std::to_string(sh.scientific), std::to_string(sh.total), num(sh.s)});
    all_s.push_back(sh.s);
  }
  Table hist{{"discipline", "bin_lo", "bin_hi", "count"}, {}};
  auto add_hist = [&](const std::string& name, const std::vector<std::int64_t>& h) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      hist.rows.push_back({name, num(static_cast<double>(i) / static_cast<double>(bins)),
                           num(static_cast<double>(i + 1) / static_cast<double>(bins)), std::to_string(h[i])});
    }
  };
  add_hist("all", fraction_histogram(all_s, bins));
  for (const auto& [disc, h] : fraction_histograms(shares, discipline_of, bins)) add_hist(disc, h);

  nlohmann::json mj = nlohmann::json::array();
  for (const auto& m : expanded) mj.push_back(m);
  nlohmann::json ej = {{"mentions_extracted", mentions.size()},
                       {"mentions_kept", expanded.size()},
                       {"expanded", stats.expanded},
                       {"unresolved", stats.unresolved},
                       {"dropped", stats.dropped},
                       {"parse_errors", parse_errors}};

  StageOutput out(ctx, Stage::Urls);
  out.input_artifact(Stage::Classify, "scientists.json");
  out.input_artifact(Stage::Classify, "bundles.json");
  out.input_setting("urls.scientific");
  out.input_setting("urls.shorteners");
  out.input_setting("urls.resolver_fixture");
  out.add("mentions.json", nlohmann::json{{"format", "scilist-mentions"}, {"version", 1}, {"mentions", mj}}.dump(2) + "\n");
  out.add("domains.csv", ranking_table(rank_counts(all_counts, all_counts.size())).csv());
  out.add("scientific_domains.csv", ranking_table(top_domains(expanded, std::max<std::size_t>(1, sci_seen.size()), &sci_seen)).csv());
  out.add("domains_by_discipline.csv", by_disc.csv());
  out.add("fractions.csv", fractions.csv());
  out.add("s_histograms.csv", hist.csv());
  out.add("expansion.json", ej.dump(2) + "\n");
  out.commit();
}

// ---------------------------------------------------------------------------
// networks

inline constexpr NetworkKind kNetworkKinds[] = {NetworkKind::Follower, NetworkKind::Retweet, NetworkKind::Mention};

inline PageRankOptions pagerank_options(const PipelineConfig& cfg) {
  PageRankOptions o;
  o.damping = cfg.real("network.damping");
  o.tol = cfg.real("network.tol");
  o.max_iter = static_cast<std::size_t>(cfg.integer("network.max_iter"));
  return o;
}

struct Labels {
  std::map<std::string, std::string> discipline;
  std::map<std::string, std::string> oes_group;
  std::map<std::string, std::string> gender;
};

inline Labels labels_of(const std::vector<ScientistRecord>& records) {
  Labels l;
  for (const auto& r : records) {
    if (auto d = primary_discipline(r)) l.discipline[r.user_id] = *d;
    if (r.oes_group && *r.oes_group != OesGroup::General) l.oes_group[r.user_id] = std::string(to_string(*r.oes_group));
    if (r.gender != Gender::Unknown) l.gender[r.user_id] = std::string(to_string(r.gender));
  }
  return l;
}

inline void run_networks(const Context& ctx) {
  const auto& cfg = ctx.config;
  const Classified c = read_classified(ctx, Stage::Networks);
  const auto pr_opts = pagerank_options(cfg);
  const KCoreMode kmode = parse_kcore_mode(cfg.str("network.kcore"));
  const Labels labels = labels_of(c.records);
  std::map<std::string, std::string> share_labels = labels.oes_group;
  if (cfg.boolean("network.shares_include_unknown")) {
    for (const auto& [id, _] : c.bundles) share_labels.emplace(id, "Unknown");
  }
  std::set<std::string> expected;
  for (OesGroup g : kOesMinorGroups) expected.insert(std::string(to_string(g)));

  StageOutput out(ctx, Stage::Networks);
  out.input_artifact(Stage::Classify, "scientists.json");
  out.input_artifact(Stage::Classify, "bundles.json");
  Table summary{{"network", "nodes", "links"}, {}};
  Table shares{{"network", "centrality", "group", "nodes", "node_fraction", "share", "normalized"}, {}};
  Table assort{{"network", "attribute", "weighted", "r"}, {}};
  for (NetworkKind kind : kNetworkKinds) {
    const std::string name(to_string(kind));
    const DirectedGraph g = build_network(kind, c.bundles);
    std::ostringstream edges;
    write_edges_csv(g, edges);
    out.add(name + "_edges.csv", edges.str());

    const DirectedGraph core = largest_wcc(g);
    summary.rows.push_back({name, std::to_string(core.node_count()), std::to_string(core.edge_count())});

    std::vector<CentralityVector> cs = {in_degree(g), in_strength(g)};
    if (!g.empty()) {
      cs.push_back(pagerank(g, pr_opts));
      cs.push_back(k_core_numbers(g, kmode));
    }
    Table cent{{"user_id", "kind", "value"}, {}};
    for (const auto& cv : cs) {
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        cent.rows.push_back({g.node(i), std::string(to_string(cv.kind)), num(cv.values[i])});
      }
      for (const auto& [group, s] : group_shares(g, cv, share_labels, expected)) {
        shares.rows.push_back({name, std::string(to_string(cv.kind)), group, std::to_string(s.nodes),
                               num(s.node_fraction), num(s.share), s.normalized ? num(*s.normalized) : ""});
      }
    }
    out.add("centrality_" + name + ".csv", cent.csv());

    const std::vector<bool> weightings =
        kind == NetworkKind::Follower ? std::vector<bool>{false} : std::vector<bool>{true, false};
    for (const auto& [attr, lab] : {std::pair{"discipline", &labels.discipline},
                                    std::pair{"oes_group", &labels.oes_group},
                                    std::pair{"gender", &labels.gender}}) {
      for (bool w : weightings) {
        const auto r = assortativity_discrete(g, *lab, w);
        assort.rows.push_back({name, attr, w ? "true" : "false", r ? num(*r) : ""});
      }
    }
  }
  out.add("summary.csv", summary.csv());
  out.add("group_shares.csv", shares.csv());
  out.add("assortativity.csv", assort.csv());
  out.commit();
}

// ---------------------------------------------------------------------------
// communities

inline void run_communities(const Context& ctx) {
  const auto& cfg = ctx.config;
  const Classified c = read_classified(ctx, Stage::Communities);
  const DirectedGraph g = build_network(NetworkKind::Follower, c.bundles);
  std::map<std::string, UserProfile> profiles;
  for (const auto& [id, b] : c.bundles) profiles[id] = b.profile;
  const auto seed = static_cast<std::uint64_t>(cfg.integer("communities.seed"));

  Table part{{"user_id", "community_id"}, {}};
  Table net_table{{"src_comm", "dst_comm", "weight", "retained"}, {}};
  nlohmann::json summaries = nlohmann::json::array();
  nlohmann::json info = {{"seed", seed}, {"trials", cfg.integer("communities.trials")}};
  if (!g.empty()) {
    DetectOptions o;
    o.seed = seed;
    o.trials = static_cast<std::size_t>(cfg.integer("communities.trials"));
    o.workers = ctx.workers();
    o.pagerank = pagerank_options(cfg);
    const Partition p = detect_communities(g, o);
    const auto pr = pagerank(g, o.pagerank);
    for (std::size_t i = 0; i < g.node_count(); ++i) part.rows.push_back({g.node(i), std::to_string(p.assignment[i])});
    const auto net = community_network(g, p, static_cast<std::size_t>(cfg.integer("communities.min_size")));
    for (const auto& l : net.links) {
      net_table.rows.push_back({std::to_string(l.a), std::to_string(l.b), num(l.weight), l.retained ? "true" : "false"});
    }
    for (const auto& s : label_and_rank(g, p, profiles, pr,
                                        static_cast<std::size_t>(cfg.integer("communities.label_words")),
                                        static_cast<std::size_t>(cfg.integer("communities.top_members")))) {
      nlohmann::json top = nlohmann::json::array();
      for (const auto& [id, v] : s.top_members) top.push_back({{"user_id", id}, {"pagerank", v}});
      summaries.push_back({{"community_id", s.community_id},
                           {"size", s.size},
                           {"label_words", s.label_words},
                           {"top_members", top}});
    }
    info["codelength"] = p.codelength;
    info["communities"] = p.community_count();
    info["network_communities"] = net.communities.size();
    info["network_connected"] = net.connected;
  }

  StageOutput out(ctx, Stage::Communities);
  out.input_artifact(Stage::Classify, "bundles.json");
  out.add("partition.csv", part.csv());
  out.add("community_network.csv", net_table.csv());
  out.add("summaries.json", summaries.dump(2) + "\n");
  out.add("codelength.json", info.dump(2) + "\n");
  out.commit();
}

// ---------------------------------------------------------------------------
// report

inline std::string share_text(std::int64_t n, std::int64_t total) {
  return total > 0 ? fixed(static_cast<double>(n) / static_cast<double>(total), 4) : "";
}

inline Table discipline_report(const std::vector<ScientistRecord>& records, std::size_t top) {
  const auto total = static_cast<std::int64_t>(records.size());
  std::map<std::string, std::int64_t> final_c, profile_c, list_c;
  std::int64_t with_list = 0;
  std::map<Rank, std::int64_t> ranks;
  for (const auto& r : records) {
    for (const auto& d : r.disciplines) ++final_c[d];
    for (const auto& t : r.profile_titles) ++profile_c[t];
    for (const auto& [t, n] : r.list_title_counts) ++list_c[t];
    with_list += !r.list_title_counts.empty();
    ++ranks[r.rank];
  }
  Table t{{"source", "rank", "title", "users", "share"}, {}};
  auto block = [&](const std::string& source, const std::map<std::string, std::int64_t>& counts) {
    std::vector<std::pair<std::string, std::int64_t>> v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < std::min(top, v.size()); ++i) {
      t.rows.push_back({source, std::to_string(i + 1), v[i].first, std::to_string(v[i].second),
                        share_text(v[i].second, total)});
    }
  };
  block("final", final_c);
  block("profile", profile_c);
  block("list", list_c);
  t.rows.push_back({"summary", "", "scientists", std::to_string(total), share_text(total, total)});
  t.rows.push_back({"summary", "", "any list title", std::to_string(with_list), share_text(with_list, total)});
  for (Rank r : {Rank::Student, Rank::Postdoc, Rank::Professor}) {
    t.rows.push_back({"summary", "", std::string(to_string(r)), std::to_string(ranks[r]), share_text(ranks[r], total)});
  }
  return t;
}

inline Table workforce_report(const std::vector<ScientistRecord>& records, const TitleLexicon& lex,
                              const std::map<OesGroup, std::int64_t>& employment) {
  const auto table = workforce_comparison(aggregate_oes(records, lex), employment);
  Table t{{"group", "employment", "employment_pct", "twitter_count", "twitter_pct", "ratio"}, {}};
  for (const auto& r : table.rows) {
    t.rows.push_back({std::string(to_string(r.group)), std::to_string(r.employment), fixed(100 * r.employment_pct, 2),
                      std::to_string(r.twitter_count), fixed(100 * r.twitter_pct, 2), fixed(r.ratio, 3)});
  }
  return t;
}

inline Table gender_report(const std::vector<ScientistRecord>& records) {
  const auto s = gender_ratio(records);
  std::int64_t census = 0, image = 0;
  for (const auto& r : records) {
    census += r.gender_method == GenderMethod::Census && r.gender != Gender::Unknown;
    image += r.gender_method == GenderMethod::Image && r.gender != Gender::Unknown;
  }
  Table t{{"female", "male", "unknown", "total", "ratio", "female_share", "identified_fraction", "by_census",
           "by_image"},
          {}};
  t.rows.push_back({std::to_string(s.female), std::to_string(s.male), std::to_string(s.total - s.female - s.male),
                    std::to_string(s.total), s.ratio ? fixed(*s.ratio, 3) : "",
                    s.female_share ? fixed(*s.female_share, 3) : "", fixed(s.identified_fraction, 3),
                    std::to_string(census), std::to_string(image)});
  return t;
}

inline Table domains_report(const Table& all, const Table& sci, const Table& by_disc, std::size_t k) {
  Table t{{"scope", "rank", "domain", "count"}, {}};
  auto block = [&](const std::string& scope, const Table& src) {
    for (std::size_t i = 0; i < std::min(k, src.rows.size()); ++i) {
      t.rows.push_back({scope, std::to_string(i + 1), src.rows[i][src.column("domain")], src.rows[i][src.column("count")]});
    }
  };
  block("all", all);
  block("scientific", sci);
  for (const auto& r : by_disc.rows) {
    t.rows.push_back({r[by_disc.column("discipline")], r[by_disc.column("rank")], r[by_disc.column("domain")],
                      r[by_disc.column("count")]});
  }
  return t;
}

inline Table centrality_report(const Context& ctx, Stage consumer, const Classified& c, std::size_t top) {
  Table t{{"network", "centrality", "rank", "user_id", "screen_name", "value"}, {}};
  for (NetworkKind kind : kNetworkKinds) {
    const std::string name(to_string(kind));
    const Table cent = Table::from_csv(need(ctx, consumer, Stage::Networks, "centrality_" + name + ".csv"));
    const std::string first = kind == NetworkKind::Follower ? "in_degree" : "in_strength";
    for (const std::string& k : {first, std::string("pagerank"), std::string("kcore")}) {
      std::vector<std::pair<double, std::string>> v;
      for (const auto& r : cent.rows) {
        if (r[cent.column("kind")] == k) v.push_back({*PipelineConfig::parse_real(r[cent.column("value")]), r[cent.column("user_id")]});
      }
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      for (std::size_t i = 0; i < std::min(top, v.size()); ++i) {
        const auto b = c.bundles.find(v[i].second);
        const std::string screen = b == c.bundles.end() ? "" : b->second.profile.screen_name;
        t.rows.push_back({name, k, std::to_string(i + 1), v[i].second, screen,
                          k == "pagerank" ? fmt::format("{:.6g}", v[i].first) : fmt::format("{:g}", v[i].first)});
      }
    }
  }
  return t;
}

inline Table communities_report(const nlohmann::json& summaries, const Classified& c, std::size_t min_size) {
  Table t{{"community_id", "size", "label_words", "top_members"}, {}};
  for (const auto& s : summaries) {
    if (s.at("size").get<std::size_t>() < min_size) continue;
    std::vector<std::string> members;
    for (const auto& m : s.at("top_members")) {
      const auto id = m.at("user_id").get<std::string>();
      const auto b = c.bundles.find(id);
      members.push_back(b == c.bundles.end() || b->second.profile.screen_name.empty() ? id : b->second.profile.screen_name);
    }
    t.rows.push_back({std::to_string(s.at("community_id").get<std::size_t>()), std::to_string(s.at("size").get<std::size_t>()),
                      join(s.at("label_words").get<std::vector<std::string>>(), " "), join(members, " ")});
  }
  return t;
}

inline Table round_column(Table t, const std::string& col, int digits) {
  const std::size_t i = t.column(col);
  for (auto& r : t.rows) {
    if (const auto x = PipelineConfig::parse_real(r[i])) r[i] = fixed(*x, digits);
  }
  return t;
}

inline void run_report(const Context& ctx) {
  const auto& cfg = ctx.config;
  const Stage me = Stage::Report;
  const Classified c = read_classified(ctx, me);
  const TitleLexicon lex = load_lexicon(cfg.path("lexicon.path").string());
  const auto employment = load_oes_employment(cfg.path("workforce.oes").string());
  const auto k = static_cast<std::size_t>(cfg.integer("urls.top_k"));

  std::map<std::string, Table> tables;
  tables["disciplines"] = discipline_report(c.records, static_cast<std::size_t>(cfg.integer("report.top_titles")));
  tables["workforce"] = workforce_report(c.records, lex, employment);
  tables["gender"] = gender_report(c.records);
  tables["domains"] = domains_report(Table::from_csv(need(ctx, me, Stage::Urls, "domains.csv")),
                                     Table::from_csv(need(ctx, me, Stage::Urls, "scientific_domains.csv")),
                                     Table::from_csv(need(ctx, me, Stage::Urls, "domains_by_discipline.csv")), k);
  tables["s_histograms"] = round_column(
      round_column(Table::from_csv(need(ctx, me, Stage::Urls, "s_histograms.csv")), "bin_lo", 3), "bin_hi", 3);
  tables["network_summary"] = Table::from_csv(need(ctx, me, Stage::Networks, "summary.csv"));
  tables["centrality_top"] = centrality_report(ctx, me, c, static_cast<std::size_t>(cfg.integer("report.top_users")));
  tables["communities"] =
      communities_report(parse_json(need(ctx, me, Stage::Communities, "summaries.json"), "summaries.json"), c,
                         static_cast<std::size_t>(cfg.integer("communities.min_size")));
  tables["assortativity"] = round_column(Table::from_csv(need(ctx, me, Stage::Networks, "assortativity.csv")), "r", 3);

  StageOutput out(ctx, me);
  out.input_artifact(Stage::Classify, "scientists.json");
  out.input_artifact(Stage::Classify, "bundles.json");
  for (const char* f : {"domains.csv", "scientific_domains.csv", "domains_by_discipline.csv", "s_histograms.csv"}) {
    out.input_artifact(Stage::Urls, f);
  }
  out.input_artifact(Stage::Networks, "summary.csv");
  out.input_artifact(Stage::Networks, "assortativity.csv");
  for (NetworkKind kind : kNetworkKinds) out.input_artifact(Stage::Networks, "centrality_" + std::string(to_string(kind)) + ".csv");
  out.input_artifact(Stage::Communities, "summaries.json");
  out.input_setting("lexicon.path");
  out.input_setting("workforce.oes");
  for (const char* name : kReportTables) {
    const Table& t = tables.at(name);
    out.add(std::string(name) + ".csv", t.csv());
    out.add(std::string(name) + ".txt", t.text());
  }
  out.commit();
}

// ---------------------------------------------------------------------------

inline void run_stage(Stage s, const Context& ctx) {
  switch (s) {
    case Stage::Sample: return run_sample(ctx);
    case Stage::Classify: return run_classify(ctx);
    case Stage::Urls: return run_urls(ctx);
    case Stage::Networks: return run_networks(ctx);
    case Stage::Communities: return run_communities(ctx);
    case Stage::Report: return run_report(ctx);
  }
}

// Validates the settings the stages need, then runs them in order.
inline void run(const std::vector<Stage>& stages, const PipelineConfig& config) {
  config.validate(std::set<Stage>(stages.begin(), stages.end()));
  Context ctx{config};
  std::filesystem::create_directories(ctx.out());
  for (Stage s : stages) run_stage(s, ctx);
}

}  // namespace scilist::pipeline
