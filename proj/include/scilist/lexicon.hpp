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

// Scientist-title lexicon: compiled from occupation titles, expanded with
// singular and core-term variants, and used as a longest-first tagger.

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scilist/error.hpp"
#include "scilist/text.hpp"

namespace scilist {

enum class OesGroup { ComputerInfo, Mathematical, Life, Physical, Social, General };

inline constexpr std::array<OesGroup, 5> kOesMinorGroups = {
    OesGroup::ComputerInfo, OesGroup::Mathematical, OesGroup::Life,
    OesGroup::Physical, OesGroup::Social};

inline std::string_view to_string(OesGroup g) {
  switch (g) {
    case OesGroup::ComputerInfo: return "ComputerInfo";
    case OesGroup::Mathematical: return "Mathematical";
    case OesGroup::Life: return "Life";
    case OesGroup::Physical: return "Physical";
    case OesGroup::Social: return "Social";
    case OesGroup::General: return "General";
  }
  return "General";
}

inline OesGroup parse_oes_group(std::string_view s) {
  const std::string f = text::fold_case(text::trim(s));
  for (OesGroup g : {OesGroup::ComputerInfo, OesGroup::Mathematical, OesGroup::Life,
                     OesGroup::Physical, OesGroup::Social, OesGroup::General}) {
    if (text::fold_case(to_string(g)) == f) return g;
  }
  throw DataError("unknown OES group '" + std::string(s) + "'");
}

struct TitleEntry {
  std::string canonical;
  std::set<std::string> variants;
  std::optional<std::string> soc_code;
  OesGroup oes_group = OesGroup::General;

  friend bool operator==(const TitleEntry&, const TitleEntry&) = default;
};

// One input title line. Titles are given in their plural form.
struct TitleSpec {
  std::string title;
  std::optional<std::string> soc_code;
  OesGroup oes_group = OesGroup::General;
};

struct LexiconSource {
  std::vector<TitleSpec> soc;
  std::vector<TitleSpec> wiki;
  std::vector<TitleSpec> general;
  std::map<std::string, std::string> singular_exceptions;  // plural -> singular
};

struct VariantCollision {
  std::string variant;
  std::string kept;     // canonical that owns the variant
  std::string dropped;  // canonical that lost it

  friend bool operator==(const VariantCollision&, const VariantCollision&) = default;
};

struct TitleMatch {
  const TitleEntry* entry;
  std::string surface;
  std::size_t begin;
  std::size_t end;
};

namespace lexicon_detail {

inline std::string normalize_title(std::string_view title) {
  // Fold case and collapse internal whitespace runs to one space.
  std::string out;
  bool pending_space = false;
  for (char c : text::fold_case(text::trim(title))) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::string singular_word(const std::string& word,
                                 const std::map<std::string, std::string>& exceptions) {
  if (auto it = exceptions.find(word); it != exceptions.end()) return it->second;
  if (ends_with(word, "ics")) return word;
  if (ends_with(word, "s") && word.size() > 1) return word.substr(0, word.size() - 1);
  return word;
}

inline std::string last_word(const std::string& title) {
  const auto pos = title.find_last_of(' ');
  return pos == std::string::npos ? title : title.substr(pos + 1);
}

}  // namespace lexicon_detail

// Singular form of a (normalized) title. A whole-title exception wins over a
// final-word exception; otherwise only the final word changes.
inline std::string singularize(const std::string& title,
                               const std::map<std::string, std::string>& exceptions = {}) {
  using namespace lexicon_detail;
  if (auto it = exceptions.find(title); it != exceptions.end()) return it->second;
  const auto pos = title.find_last_of(' ');
  if (pos == std::string::npos) return singular_word(title, exceptions);
  return title.substr(0, pos + 1) + singular_word(title.substr(pos + 1), exceptions);
}

class TitleLexicon {
 public:
  TitleLexicon() = default;

  TitleLexicon(std::vector<TitleEntry> entries, std::vector<VariantCollision> collisions)
      : entries_(std::move(entries)), collisions_(std::move(collisions)) {
    reindex();
  }

  const std::vector<TitleEntry>& entries() const { return entries_; }
  const std::vector<VariantCollision>& collisions() const { return collisions_; }

  std::size_t variant_count() const { return by_variant_.size(); }

  const TitleEntry* find_variant(std::string_view variant) const {
    const auto it = by_variant_.find(lexicon_detail::normalize_title(variant));
    return it == by_variant_.end() ? nullptr : &entries_[it->second];
  }

  const TitleEntry* find_canonical(std::string_view canonical) const {
    const std::string key = lexicon_detail::normalize_title(canonical);
    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), key,
        [](const TitleEntry& e, const std::string& k) { return e.canonical < k; });
    return (it != entries_.end() && it->canonical == key) ? &*it : nullptr;
  }

  std::vector<TitleMatch> match(std::string_view text) const {
    std::vector<TitleMatch> out;
    for (auto& hit : index_.find(text)) {
      out.push_back({&entries_[hit.payload],
                     text::fold_case(text.substr(hit.begin, hit.end - hit.begin)),
                     hit.begin, hit.end});
    }
    return out;
  }

  // Structural equality: same entries and collision log.
  friend bool operator==(const TitleLexicon& a, const TitleLexicon& b) {
    return a.entries_ == b.entries_ && a.collisions_ == b.collisions_;
  }

 private:
  void reindex() {
    index_ = text::PhraseIndex<std::size_t>();
    by_variant_.clear();
    std::sort(entries_.begin(), entries_.end(),
              [](const TitleEntry& a, const TitleEntry& b) { return a.canonical < b.canonical; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      for (const std::string& v : entries_[i].variants) {
        if (!by_variant_.emplace(v, i).second) {
          throw DataError("variant '" + v + "' appears under '" +
                          entries_[by_variant_[v]].canonical + "' and '" +
                          entries_[i].canonical + "'");
        }
        index_.add(v, i);
      }
    }
  }

  std::vector<TitleEntry> entries_;
  std::vector<VariantCollision> collisions_;
  std::map<std::string, std::size_t, std::less<>> by_variant_;
  text::PhraseIndex<std::size_t> index_;
};

inline const std::vector<TitleSpec>& default_general_titles() {
  static const std::vector<TitleSpec> kGeneral = {
      {"scientists", std::nullopt, OesGroup::General},
      {"researchers", std::nullopt, OesGroup::General}};
  return kGeneral;
}

// Builds the lexicon. Each title contributes its plural and singular form;
// multi-word titles also contribute the plural and singular of their final
// word (the core disciplinary term). When one variant string is produced
// by several entries it stays with the entry whose own plural/singular it
// is, otherwise with the longest canonical (ties: lexicographically first).
inline TitleLexicon compile_lexicon(const std::vector<TitleSpec>& soc_titles,
                                    const std::vector<TitleSpec>& wiki_titles,
                                    const std::vector<TitleSpec>& general_titles =
                                        default_general_titles(),
                                    const std::map<std::string, std::string>& exceptions = {}) {
  using namespace lexicon_detail;
  struct Building {
    TitleEntry entry;
    std::set<std::string> own;  // plural + singular of the title itself
  };
  std::map<std::string, Building> by_canonical;

  auto add = [&](const TitleSpec& spec) {
    const std::string title = normalize_title(spec.title);
    if (title.empty()) return;
    const std::string canonical = singularize(title, exceptions);
    auto [it, fresh] = by_canonical.try_emplace(canonical);
    Building& b = it->second;
    if (fresh) {
      b.entry.canonical = canonical;
      b.entry.oes_group = spec.oes_group;
    } else if (b.entry.oes_group != spec.oes_group) {
      throw DataError("conflicting OES groups for '" + canonical + "': " +
                      std::string(to_string(b.entry.oes_group)) + " vs " +
                      std::string(to_string(spec.oes_group)) + " (from '" + spec.title + "')");
    }
    if (!b.entry.soc_code && spec.soc_code) b.entry.soc_code = spec.soc_code;
    b.own.insert(title);
    b.own.insert(canonical);
    b.entry.variants.insert(title);
    b.entry.variants.insert(canonical);
    if (title.find(' ') != std::string::npos) {
      const std::string core = last_word(title);
      b.entry.variants.insert(core);
      b.entry.variants.insert(singular_word(core, exceptions));
    }
  };
  for (const auto* list : {&soc_titles, &wiki_titles, &general_titles}) {
    for (const TitleSpec& s : *list) add(s);
  }
  if (by_canonical.empty()) throw DataError("empty lexicon");

  std::map<std::string, std::vector<std::string>> claimants;  // variant -> canonicals
  for (const auto& [canonical, b] : by_canonical) {
    for (const std::string& v : b.entry.variants) claimants[v].push_back(canonical);
  }
  std::vector<VariantCollision> collisions;
  for (auto& [variant, owners] : claimants) {
    if (owners.size() < 2) continue;
    const auto rank = [&, v = variant](const std::string& c) {
      const bool own = by_canonical.at(c).own.count(v) > 0;
      return std::tuple(!own, -static_cast<long>(c.size()), c);
    };
    const std::string winner =
        *std::min_element(owners.begin(), owners.end(),
                          [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
    for (const std::string& c : owners) {
      if (c == winner) continue;
      by_canonical.at(c).entry.variants.erase(variant);
      collisions.push_back({variant, winner, c});
    }
  }

  std::vector<TitleEntry> entries;
  entries.reserve(by_canonical.size());
  for (auto& [canonical, b] : by_canonical) entries.push_back(std::move(b.entry));
  return TitleLexicon(std::move(entries), std::move(collisions));
}

inline TitleLexicon compile_lexicon(const LexiconSource& src) {
  return compile_lexicon(src.soc, src.wiki,
                         src.general.empty() ? default_general_titles() : src.general,
                         src.singular_exceptions);
}

// Line format: `title<TAB>soc_code_or_-<TAB>oes_group`, `!plural<TAB>singular`
// for singularization exceptions, `#` comments and blank lines ignored.
inline LexiconSource parse_lexicon_source(std::istream& in) {
  LexiconSource src;
  std::string line;
  std::size_t lineno = 0;
  auto split_tabs = [](std::string_view s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto pos = s.find('\t', start);
      parts.emplace_back(text::trim(s.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return parts;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::string where = "lexicon line " + std::to_string(lineno);
    if (t.front() == '!') {
      auto parts = split_tabs(t.substr(1));
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
        throw DataError(where + ": exception needs `!plural<TAB>singular`");
      }
      src.singular_exceptions[lexicon_detail::normalize_title(parts[0])] =
          lexicon_detail::normalize_title(parts[1]);
      continue;
    }
    auto parts = split_tabs(t);
    if (parts.size() != 3 || parts[0].empty()) {
      throw DataError(where + ": expected `title<TAB>soc_code<TAB>oes_group`");
    }
    TitleSpec spec;
    spec.title = parts[0];
    if (parts[1] != "-" && !parts[1].empty()) spec.soc_code = parts[1];
    try {
      spec.oes_group = parse_oes_group(parts[2]);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (spec.oes_group == OesGroup::General) {
      src.general.push_back(std::move(spec));
    } else if (spec.soc_code) {
      src.soc.push_back(std::move(spec));
    } else {
      src.wiki.push_back(std::move(spec));
    }
  }
  return src;
}

inline TitleLexicon load_lexicon_source(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon source " + path);
  return compile_lexicon(parse_lexicon_source(in));
}

inline constexpr int kLexiconJsonVersion = 1;

inline nlohmann::json to_json(const TitleLexicon& lex) {
  nlohmann::json entries = nlohmann::json::array();
  for (const TitleEntry& e : lex.entries()) {
    entries.push_back({{"canonical", e.canonical},
                       {"variants", e.variants},
                       {"soc_code", e.soc_code ? nlohmann::json(*e.soc_code) : nlohmann::json()},
                       {"oes_group", to_string(e.oes_group)}});
  }
  nlohmann::json collisions = nlohmann::json::array();
  for (const auto& c : lex.collisions()) {
    collisions.push_back({{"variant", c.variant}, {"kept", c.kept}, {"dropped", c.dropped}});
  }
  return {{"format", "scilist-lexicon"},
          {"version", kLexiconJsonVersion},
          {"entries", entries},
          {"collisions", collisions}};
}

inline TitleLexicon lexicon_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "scilist-lexicon") throw DataError("not a lexicon document");
  if (j.value("version", 0) != kLexiconJsonVersion) {
    throw DataError("unsupported lexicon version " + j.value("version", nlohmann::json()).dump());
  }
  std::vector<TitleEntry> entries;
  for (const auto& je : j.at("entries")) {
    TitleEntry e;
    e.canonical = je.at("canonical").get<std::string>();
    e.variants = je.at("variants").get<std::set<std::string>>();
    if (!je.at("soc_code").is_null()) e.soc_code = je.at("soc_code").get<std::string>();
    e.oes_group = parse_oes_group(je.at("oes_group").get<std::string>());
    entries.push_back(std::move(e));
  }
  std::vector<VariantCollision> collisions;
  for (const auto& jc : j.at("collisions")) {
    collisions.push_back({jc.at("variant"), jc.at("kept"), jc.at("dropped")});
  }
  return TitleLexicon(std::move(entries), std::move(collisions));
}

// Loads either a compiled JSON lexicon (by `.json` extension) or a source file.
inline TitleLexicon load_lexicon(const std::string& path) {
  if (lexicon_detail::ends_with(path, ".json")) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon " + path);
    try {
      return lexicon_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("lexicon " + path + ": " + e.what());
    }
  }
  return load_lexicon_source(path);
}

inline std::vector<TitleMatch> match_titles(std::string_view text, const TitleLexicon& lexicon) {
  return lexicon.match(text);
}

inline OesGroup title_to_group(const TitleEntry& entry) { return entry.oes_group; }

}  // namespace scilist
