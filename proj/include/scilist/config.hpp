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

// Pipeline configuration: an INI file (`[section]` plus `key = value`, full
// line `#` or `;` comments) whose every key has a matching command-line
// flag. Relative paths in a file resolve against the file's directory;
// relative paths given as flags resolve against the working directory.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "scilist/error.hpp"

namespace scilist {

enum class Stage { Sample, Classify, Urls, Networks, Communities, Report };

inline constexpr Stage kStages[] = {Stage::Sample,   Stage::Classify,    Stage::Urls,
                                    Stage::Networks, Stage::Communities, Stage::Report};

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Sample: return "sample";
    case Stage::Classify: return "classify";
    case Stage::Urls: return "urls";
    case Stage::Networks: return "networks";
    case Stage::Communities: return "communities";
    case Stage::Report: return "report";
  }
  return "?";
}

// Invalid configuration; carries every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& x : v) s += "\n  - " + x;
    return s;
  }
  std::vector<std::string> violations_;
};

// A stage ran before the stage whose output it needs.
class StageError : public Error {
 public:
  using Error::Error;
};

enum class SettingType { Path, OptionalPath, OutputDir, Int, Real, Bool, Choice };

struct Setting {
  std::string key;   // section.name
  std::string flag;  // long option name without dashes
  SettingType type;
  std::set<Stage> stages;
  std::optional<std::string> fallback;  // operational knobs only
  double lo = -HUGE_VAL;
  double hi = HUGE_VAL;
  bool lo_open = false;
  bool hi_open = false;
  std::vector<std::string> choices;
  std::string help;
};

inline const std::vector<Setting>& settings() {
  using S = Stage;
  using T = SettingType;
  const std::set<Stage> fetching{S::Sample, S::Classify};
  static const std::vector<Setting> all = {
      {"source.fixture", "fixture", T::OptionalPath, fetching, {}, 0, 0, false, false, {},
       "fixture directory (exactly one of fixture/rest)"},
      {"source.rest", "rest", T::OptionalPath, fetching, {}, 0, 0, false, false, {},
       "REST adapter JSON config (exactly one of fixture/rest)"},
      {"source.page_size", "page-size", T::Int, fetching, "100", 1, HUGE_VAL, false, false, {},
       "items per fixture page"},
      {"source.max_statuses", "max-statuses", T::Int, {S::Classify}, {}, 1, HUGE_VAL, false, false, {},
       "most recent statuses fetched per user"},
      {"lexicon.path", "lexicon", T::Path, {S::Sample, S::Classify, S::Report}, {}, 0, 0, false, false, {},
       "title lexicon (.tsv source or compiled .json)"},
      {"sample.seeds", "seeds", T::Path, {S::Sample}, {}, 0, 0, false, false, {},
       "seed users: attribute records (JSON lines) or one user id per line"},
      {"sample.min_listed", "min-listed", T::Int, {S::Sample}, {}, 0, HUGE_VAL, false, false, {},
       "minimum listed count of a seed"},
      {"sample.top_attrs", "top-attrs", T::Int, {S::Sample}, {}, 1, HUGE_VAL, false, false, {},
       "leading attributes inspected per seed record"},
      {"sample.match_descriptions", "match-descriptions", T::Bool, {S::Sample}, "false", 0, 0, false, false,
       {}, "also expand lists whose description carries a title"},
      {"sample.checkpoint_every", "checkpoint-every", T::Int, {S::Sample}, "0", 0, HUGE_VAL, false, false, {},
       "persist crawl progress every N dequeues (0 = off)"},
      {"classify.census_female", "census-female", T::Path, {S::Classify}, {}, 0, 0, false, false, {},
       "census female first-name table"},
      {"classify.census_male", "census-male", T::Path, {S::Classify}, {}, 0, 0, false, false, {},
       "census male first-name table"},
      {"classify.image_fixture", "image-fixture", T::OptionalPath, {S::Classify}, {}, 0, 0, false, false, {},
       "canned image classifier responses (empty = no image step)"},
      {"classify.confidence", "confidence", T::Real, {S::Classify}, {}, 0, 100, false, false, {},
       "image classifier confidence threshold (exclusive)"},
      {"classify.rank_order", "rank-order", T::Choice, {S::Classify}, {}, 0, 0, false, false,
       {"offset", "listing"}, "academic rank tie rule"},
      {"urls.scientific", "scientific-domains", T::Path, {S::Urls}, {}, 0, 0, false, false, {},
       "scientific domain list"},
      {"urls.shorteners", "shorteners", T::Path, {S::Urls}, {}, 0, 0, false, false, {},
       "URL shortener domain list"},
      {"urls.resolver", "resolver", T::Choice, {S::Urls}, {}, 0, 0, false, false, {"none", "fixture", "http"},
       "how shortened URLs are expanded"},
      {"urls.resolver_fixture", "resolver-fixture", T::OptionalPath, {S::Urls}, {}, 0, 0, false, false, {},
       "redirect map for resolver = fixture"},
      {"urls.max_hops", "max-hops", T::Int, {S::Urls}, {}, 1, 50, false, false, {},
       "redirects followed per URL"},
      {"urls.timeout", "timeout", T::Real, {S::Urls}, {}, 0, HUGE_VAL, true, false, {},
       "seconds per redirect request"},
      {"urls.dedupe", "dedupe", T::Bool, {S::Urls}, "false", 0, 0, false, false, {},
       "collapse repeated (user, status, url) mentions"},
      {"urls.bins", "bins", T::Int, {S::Urls}, {}, 1, 1000, false, false, {},
       "histogram bins for the scientific fraction"},
      {"urls.top_k", "top-domains", T::Int, {S::Urls, S::Report}, {}, 1, HUGE_VAL, false, false, {},
       "domains per ranking"},
      {"network.damping", "damping", T::Real, {S::Networks, S::Communities}, {}, 0, 1, true, true, {},
       "PageRank damping factor"},
      {"network.tol", "tol", T::Real, {S::Networks, S::Communities}, {}, 0, 1, true, false, {},
       "PageRank L1 convergence tolerance"},
      {"network.max_iter", "max-iter", T::Int, {S::Networks, S::Communities}, {}, 1, HUGE_VAL, false, false,
       {}, "PageRank iteration cap"},
      {"network.kcore", "kcore", T::Choice, {S::Networks}, {}, 0, 0, false, false,
       {"undirected", "in", "out", "total"}, "degree used for k-core peeling"},
      {"network.shares_include_unknown", "shares-include-unknown", T::Bool, {S::Networks}, "false", 0, 0,
       false, false, {}, "count users without a group in group-share totals"},
      {"communities.seed", "seed", T::Int, {S::Communities}, {}, 0, HUGE_VAL, false, false, {},
       "search seed; trial t uses seed + t"},
      {"communities.trials", "trials", T::Int, {S::Communities}, {}, 1, HUGE_VAL, false, false, {},
       "independent searches; the shortest codelength wins"},
      {"communities.min_size", "min-size", T::Int, {S::Communities, S::Report}, {}, 1, HUGE_VAL, false,
       false, {}, "smallest community reported and drawn"},
      {"communities.label_words", "label-words", T::Int, {S::Communities}, {}, 1, HUGE_VAL, false, false, {},
       "words per community label"},
      {"communities.top_members", "top-members", T::Int, {S::Communities}, {}, 1, HUGE_VAL, false, false, {},
       "members listed per community"},
      {"workforce.oes", "oes", T::Path, {S::Report}, {}, 0, 0, false, false, {},
       "OES employment per minor group (CSV group,employment)"},
      {"report.top_users", "top-users", T::Int, {S::Report}, {}, 1, HUGE_VAL, false, false, {},
       "users per centrality ranking"},
      {"report.top_titles", "top-titles", T::Int, {S::Report}, {}, 1, HUGE_VAL, false, false, {},
       "titles per discipline ranking"},
      {"run.workers", "workers", T::Int, {S::Sample, S::Classify, S::Urls, S::Communities}, "1", 1, 256,
       false, false, {}, "worker threads"},
      {"output.dir", "out", T::OutputDir,
       {S::Sample, S::Classify, S::Urls, S::Networks, S::Communities, S::Report}, {}, 0, 0, false, false, {},
       "artifact directory"},
  };
  return all;
}

inline const Setting& setting(const std::string& key) {
  for (const auto& s : settings()) {
    if (s.key == key) return s;
  }
  throw Error("unknown setting " + key);
}

class PipelineConfig {
 public:
  // Reads an INI file; unknown keys and unparsable files are violations.
  static PipelineConfig from_ini(const std::filesystem::path& file) {
    PipelineConfig c;
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(file.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError({e.what()});
    }
    std::vector<std::string> bad;
    const auto base = file.parent_path();
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        bad.push_back("key '" + section + "' outside any section");
        continue;
      }
      for (const auto& [name, value] : body) {
        const std::string key = section + "." + name;
        const auto it = std::find_if(settings().begin(), settings().end(),
                                     [&](const Setting& s) { return s.key == key; });
        if (it == settings().end()) {
          bad.push_back("unknown setting '" + key + "' in " + file.string());
          continue;
        }
        c.set(key, value.data(), base);
      }
    }
    if (!bad.empty()) throw ConfigError(bad);
    return c;
  }

  // `base` anchors relative paths; empty means the working directory.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {}) {
    values_[key] = value;
    bases_[key] = base;
  }

  bool has(const std::string& key) const { return values_.count(key) || setting(key).fallback; }

  std::string str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    if (const auto& f = setting(key).fallback) return *f;
    throw Error("setting " + key + " is not set");
  }

  std::filesystem::path path(const std::string& key) const {
    std::filesystem::path p = str(key);
    const auto it = bases_.find(key);
    if (p.is_relative() && it != bases_.end() && !it->second.empty()) p = it->second / p;
    return p.lexically_normal();
  }

  bool has_path(const std::string& key) const { return has(key) && !str(key).empty(); }

  std::int64_t integer(const std::string& key) const {
    const auto v = parse_int(str(key));
    if (!v) throw Error("setting " + key + " is not an integer");
    return *v;
  }
  double real(const std::string& key) const {
    const auto v = parse_real(str(key));
    if (!v) throw Error("setting " + key + " is not a number");
    return *v;
  }
  bool boolean(const std::string& key) const {
    const auto v = parse_bool(str(key));
    if (!v) throw Error("setting " + key + " is not a boolean");
    return *v;
  }

  // Every violation for running `stages`; empty when valid.
  std::vector<std::string> violations(const std::set<Stage>& stages) const {
    std::vector<std::string> out;
    for (const auto& s : settings()) {
      if (!std::any_of(s.stages.begin(), s.stages.end(), [&](Stage x) { return stages.count(x); })) continue;
      const std::string where = "'" + s.key + "' (--" + s.flag + ")";
      if (!values_.count(s.key)) {
        if (!s.fallback && s.type != SettingType::OptionalPath) out.push_back("missing setting " + where);
        continue;
      }
      const std::string v = values_.at(s.key);
      switch (s.type) {
        case SettingType::Path:
          if (v.empty() || !std::filesystem::exists(path(s.key))) {
            out.push_back(where + ": path '" + path(s.key).string() + "' does not exist");
          }
          break;
        case SettingType::OptionalPath:
          if (!v.empty() && !std::filesystem::exists(path(s.key))) {
            out.push_back(where + ": path '" + path(s.key).string() + "' does not exist");
          }
          break;
        case SettingType::OutputDir:
          if (v.empty()) out.push_back(where + ": empty output directory");
          break;
        case SettingType::Int: {
          const auto n = parse_int(v);
          if (!n) {
            out.push_back(where + ": '" + v + "' is not an integer");
          } else if (!in_range(s, static_cast<double>(*n))) {
            out.push_back(where + ": " + v + " is outside " + range(s));
          }
          break;
        }
        case SettingType::Real: {
          const auto x = parse_real(v);
          if (!x) {
            out.push_back(where + ": '" + v + "' is not a number");
          } else if (!in_range(s, *x)) {
            out.push_back(where + ": " + v + " is outside " + range(s));
          }
          break;
        }
        case SettingType::Bool:
          if (!parse_bool(v)) out.push_back(where + ": '" + v + "' is not true/false");
          break;
        case SettingType::Choice:
          if (std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end()) {
            std::string opts;
            for (const auto& c : s.choices) opts += (opts.empty() ? "" : "|") + c;
            out.push_back(where + ": '" + v + "' is not one of " + opts);
          }
          break;
      }
    }
    if (stages.count(Stage::Sample) || stages.count(Stage::Classify)) {
      const int sources = has_path("source.fixture") + has_path("source.rest");
      if (sources != 1) out.push_back("exactly one of 'source.fixture' (--fixture) and 'source.rest' (--rest) must be set");
    }
    if (stages.count(Stage::Urls) && values_.count("urls.resolver") && values_.at("urls.resolver") == "fixture" &&
        !has_path("urls.resolver_fixture")) {
      out.push_back("'urls.resolver' = fixture needs 'urls.resolver_fixture' (--resolver-fixture)");
    }
    return out;
  }

  void validate(const std::set<Stage>& stages) const {
    auto v = violations(stages);
    if (!v.empty()) throw ConfigError(std::move(v));
  }

  // Sorted key = value lines of every explicit setting except the output
  // directory, which names where results go rather than what they are.
  std::string canonical() const {
    std::string s;
    for (const auto& [k, v] : values_) {
      if (k != "output.dir") s += k + " = " + v + "\n";
    }
    return s;
  }

  static std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
  }
  static std::optional<double> parse_real(const std::string& s) {
    double v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  }
  static std::optional<bool> parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    return std::nullopt;
  }

 private:
  static bool in_range(const Setting& s, double x) {
    if (s.lo_open ? x <= s.lo : x < s.lo) return false;
    if (s.hi_open ? x >= s.hi : x > s.hi) return false;
    return true;
  }
  static std::string range(const Setting& s) {
    auto num = [](double x) {
      if (std::isinf(x)) return std::string("inf");
      std::ostringstream o;
      o << x;
      return o.str();
    };
    return std::string(s.lo_open ? "(" : "[") + num(s.lo) + ", " + num(s.hi) + (s.hi_open ? ")" : "]");
  }

  std::map<std::string, std::string> values_;
  std::map<std::string, std::filesystem::path> bases_;
};

}  // namespace scilist
