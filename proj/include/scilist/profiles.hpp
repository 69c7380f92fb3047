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

// Per-scientist demographics: discipline, gender, academic rank, plus the
// workforce comparison and gender summary built on top of them.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scilist/error.hpp"
#include "scilist/lexicon.hpp"
#include "scilist/source.hpp"
#include "scilist/text.hpp"

namespace scilist {

enum class Gender { Female, Male, Unknown };
enum class GenderMethod { Census, Image, None };
enum class Rank { Student, Postdoc, Professor, Unknown };

inline std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::Female: return "female";
    case Gender::Male: return "male";
    case Gender::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::string_view to_string(GenderMethod m) {
  switch (m) {
    case GenderMethod::Census: return "census";
    case GenderMethod::Image: return "image";
    case GenderMethod::None: return "none";
  }
  return "none";
}

inline std::string_view to_string(Rank r) {
  switch (r) {
    case Rank::Student: return "student";
    case Rank::Postdoc: return "postdoc";
    case Rank::Professor: return "professor";
    case Rank::Unknown: return "unknown";
  }
  return "unknown";
}

template <class E, std::size_t N>
E parse_enum(std::string_view s, const E (&all)[N], const char* what) {
  for (E e : all) {
    if (to_string(e) == s) return e;
  }
  throw DataError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

inline Gender parse_gender(std::string_view s) {
  static constexpr Gender all[] = {Gender::Female, Gender::Male, Gender::Unknown};
  return parse_enum(s, all, "gender");
}

inline GenderMethod parse_gender_method(std::string_view s) {
  static constexpr GenderMethod all[] = {GenderMethod::Census, GenderMethod::Image,
                                         GenderMethod::None};
  return parse_enum(s, all, "gender method");
}

inline Rank parse_rank(std::string_view s) {
  static constexpr Rank all[] = {Rank::Student, Rank::Postdoc, Rank::Professor, Rank::Unknown};
  return parse_enum(s, all, "rank");
}

struct ScientistRecord {
  std::string user_id;
  std::vector<std::string> profile_titles;            // canonical titles, deduplicated
  std::map<std::string, std::int64_t> list_title_counts;  // canonical -> number of lists
  std::vector<std::string> disciplines;
  std::optional<OesGroup> oes_group;  // group of the first discipline
  Gender gender = Gender::Unknown;
  GenderMethod gender_method = GenderMethod::None;
  Rank rank = Rank::Unknown;

  friend bool operator==(const ScientistRecord&, const ScientistRecord&) = default;
};

// ---------------------------------------------------------------------------
// Discipline

// Canonical titles found in `text`, each once, in order of first appearance.
inline std::vector<std::string> distinct_titles(std::string_view text, const TitleLexicon& lex) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const TitleMatch& m : match_titles(text, lex)) {
    if (seen.insert(m.entry->canonical).second) out.push_back(m.entry->canonical);
  }
  return out;
}

// Each list contributes at most one to each title it names.
inline std::map<std::string, std::int64_t> count_list_titles(const std::vector<ListRecord>& lists,
                                                             const TitleLexicon& lex) {
  std::map<std::string, std::int64_t> counts;
  for (const ListRecord& l : lists) {
    for (const std::string& t : distinct_titles(l.name, lex)) ++counts[t];
  }
  return counts;
}

// Profile titles win outright; otherwise the most frequent list title, ties
// going to the lexicographically smallest canonical.
inline std::vector<std::string> assign_discipline(
    const std::vector<std::string>& profile_titles,
    const std::map<std::string, std::int64_t>& list_title_counts) {
  if (!profile_titles.empty()) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& t : profile_titles) {
      if (seen.insert(t).second) out.push_back(t);
    }
    return out;
  }
  const std::string* best = nullptr;
  std::int64_t best_count = 0;
  for (const auto& [title, count] : list_title_counts) {
    if (count > best_count) {
      best = &title;
      best_count = count;
    }
  }
  if (!best) return {};
  return {*best};
}

// Distinct OES minor groups of a record's final titles; General titles and
// unknown canonicals are ignored.
inline std::set<OesGroup> oes_groups(const std::vector<std::string>& disciplines,
                                     const TitleLexicon& lex) {
  std::set<OesGroup> out;
  for (const auto& d : disciplines) {
    const TitleEntry* e = lex.find_canonical(d);
    if (e && e->oes_group != OesGroup::General) out.insert(e->oes_group);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gender

struct CensusEntry {
  double freq_pct = 0;
  double cum_pct = 0;
  std::int64_t rank = 0;

  friend bool operator==(const CensusEntry&, const CensusEntry&) = default;
};

struct CensusNameDb {
  std::map<std::string, CensusEntry> female;
  std::map<std::string, CensusEntry> male;
};

// One census name file: `NAME FREQ_PCT CUM_PCT RANK` per line.
inline std::map<std::string, CensusEntry> parse_census_table(std::istream& in,
                                                            const std::string& origin = "census") {
  std::map<std::string, CensusEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    std::istringstream row(line);
    std::string name;
    CensusEntry e;
    std::string extra;
    if (!(row >> name >> e.freq_pct >> e.cum_pct >> e.rank) || (row >> extra)) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": expected NAME FREQ CUM RANK");
    }
    if (name != text::ascii_upper(name)) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": name '" + name +
                      "' is not uppercase");
    }
    if (e.freq_pct < 0 || e.cum_pct < 0 || e.rank < 1) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": negative frequency or rank");
    }
    if (!out.emplace(name, e).second) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": duplicate name '" + name + "'");
    }
  }
  return out;
}

inline CensusNameDb load_census(const std::string& female_path, const std::string& male_path) {
  auto read = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open census file " + path);
    return parse_census_table(in, path);
  };
  return {read(female_path), read(male_path)};
}

// Census verdict for an uppercase first name: Female/Male, or Unknown when
// absent or too close to call.
inline Gender census_lookup(const CensusNameDb& db, const std::string& upper_name) {
  const auto f = db.female.find(upper_name);
  const auto m = db.male.find(upper_name);
  const bool in_f = f != db.female.end();
  const bool in_m = m != db.male.end();
  if (in_f && !in_m) return Gender::Female;
  if (in_m && !in_f) return Gender::Male;
  if (!in_f && !in_m) return Gender::Unknown;
  const double diff = f->second.freq_pct - m->second.freq_pct;
  if (std::abs(diff) <= 1e-6) return Gender::Unknown;
  return diff > 0 ? Gender::Female : Gender::Male;
}

// Removes leading "Dr", "Dr.", "Prof", "Prof." tokens (any case, repeated).
inline std::string strip_name_prefixes(std::string_view name) {
  std::string_view rest = text::trim(name);
  while (true) {
    const auto tokens = text::tokenize(rest);
    if (tokens.empty() || tokens[0].begin != 0) break;
    if (tokens[0].folded != "dr" && tokens[0].folded != "prof") break;
    std::size_t cut = tokens[0].end;
    if (cut < rest.size() && rest[cut] == '.') ++cut;
    if (cut < rest.size() && !std::isspace(static_cast<unsigned char>(rest[cut]))) break;
    rest = text::trim(rest.substr(cut));
  }
  return std::string(rest);
}

inline std::string first_name_key(std::string_view display_name) {
  const std::string stripped = strip_name_prefixes(display_name);
  const auto tokens = text::tokenize(stripped);
  if (tokens.empty()) return {};
  return text::ascii_upper(std::string_view(stripped).substr(tokens[0].begin,
                                                             tokens[0].end - tokens[0].begin));
}

struct GenderGuess {
  Gender gender = Gender::Unknown;
  double confidence = 0;  // 0-100
};

// Face-attribute service seen through its only input, the profile image URL.
// Implementations throw on transport failure.
class ImageClassifier {
 public:
  virtual ~ImageClassifier() = default;
  virtual GenderGuess classify(const std::string& image_url) = 0;
};

// Replays canned responses; unknown URLs behave like a transport failure.
class FixtureClassifier final : public ImageClassifier {
 public:
  FixtureClassifier() = default;
  explicit FixtureClassifier(std::map<std::string, GenderGuess> responses)
      : responses_(std::move(responses)) {}

  GenderGuess classify(const std::string& image_url) override {
    const auto it = responses_.find(image_url);
    if (it == responses_.end()) throw Error("no canned response for " + image_url);
    return it->second;
  }

 private:
  std::map<std::string, GenderGuess> responses_;
};

// JSON object: url -> {"gender": "female"|"male", "confidence": number}.
inline FixtureClassifier load_fixture_classifier(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open classifier fixture " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  std::map<std::string, GenderGuess> responses;
  for (const auto& [url, v] : j.items()) {
    responses[url] = {parse_gender(v.at("gender").get<std::string>()),
                      v.at("confidence").get<double>()};
  }
  return FixtureClassifier(std::move(responses));
}

inline constexpr double kDefaultConfidenceThreshold = 90.0;

struct GenderResult {
  Gender gender = Gender::Unknown;
  GenderMethod method = GenderMethod::None;
  std::string note;  // classifier failure, if any
};

inline GenderResult assign_gender(const std::string& display_name,
                                  const std::optional<std::string>& profile_image_url,
                                  const CensusNameDb& census, ImageClassifier* classifier,
                                  double confidence_threshold = kDefaultConfidenceThreshold) {
  const std::string key = first_name_key(display_name);
  if (!key.empty()) {
    const Gender g = census_lookup(census, key);
    if (g != Gender::Unknown) return {g, GenderMethod::Census, {}};
  }
  if (!classifier || !profile_image_url) return {};
  try {
    const GenderGuess guess = classifier->classify(*profile_image_url);
    if (guess.gender != Gender::Unknown && guess.confidence > confidence_threshold) {
      return {guess.gender, GenderMethod::Image, {}};
    }
    return {};
  } catch (const std::exception& e) {
    return {Gender::Unknown, GenderMethod::None, e.what()};
  }
}

// ---------------------------------------------------------------------------
// Academic rank

enum class RankOrder {
  Offset,   // earliest keyword in the description decides
  Listing,  // first category (student, postdoc, professor) with any hit
};

inline const std::vector<std::pair<Rank, std::vector<std::string>>>& rank_keywords() {
  static const std::vector<std::pair<Rank, std::vector<std::string>>> k = {
      {Rank::Student,
       {"phd student", "phd candidate", "graduate student", "grad student", "doctoral student"}},
      {Rank::Postdoc, {"postdoc", "post-doc", "postdoctoral"}},
      {Rank::Professor,
       {"assistant professor", "assistant prof", "asst prof", "associate professor",
        "associate prof", "assoc prof", "professor", "prof", "faculty"}},
  };
  return k;
}

inline const text::PhraseIndex<Rank>& rank_index() {
  static const text::PhraseIndex<Rank> index = [] {
    text::PhraseIndex<Rank> idx;
    for (const auto& [rank, words] : rank_keywords()) {
      for (const auto& w : words) idx.add(w, rank);
    }
    return idx;
  }();
  return index;
}

inline Rank assign_rank(std::string_view description, RankOrder order = RankOrder::Offset) {
  const auto hits = rank_index().find(description);
  if (hits.empty()) return Rank::Unknown;
  if (order == RankOrder::Offset) return hits.front().payload;
  Rank best = Rank::Unknown;
  for (const auto& h : hits) best = std::min(best, h.payload);
  return best;
}

// ---------------------------------------------------------------------------
// Record assembly

struct ClassifyOptions {
  double confidence_threshold = kDefaultConfidenceThreshold;
  RankOrder rank_order = RankOrder::Offset;
};

// `lists` are the public lists that contain the user.
inline ScientistRecord classify_scientist(const UserProfile& profile,
                                          const std::vector<ListRecord>& lists,
                                          const TitleLexicon& lex, const CensusNameDb& census,
                                          ImageClassifier* classifier,
                                          const ClassifyOptions& opts = {},
                                          std::string* note = nullptr) {
  ScientistRecord r;
  r.user_id = profile.user_id;
  r.profile_titles = distinct_titles(profile.description, lex);
  r.list_title_counts = count_list_titles(lists, lex);
  r.disciplines = assign_discipline(r.profile_titles, r.list_title_counts);
  if (!r.disciplines.empty()) {
    if (const TitleEntry* e = lex.find_canonical(r.disciplines.front())) r.oes_group = e->oes_group;
  }
  GenderResult g = assign_gender(profile.display_name, profile.profile_image_url, census,
                                 classifier, opts.confidence_threshold);
  r.gender = g.gender;
  r.gender_method = g.method;
  if (note) *note = std::move(g.note);
  r.rank = assign_rank(profile.description, opts.rank_order);
  return r;
}

inline void to_json(nlohmann::json& j, const ScientistRecord& r) {
  j = nlohmann::json{{"user_id", r.user_id},
                     {"profile_titles", r.profile_titles},
                     {"list_title_counts", r.list_title_counts},
                     {"disciplines", r.disciplines},
                     {"oes_group", r.oes_group ? nlohmann::json(to_string(*r.oes_group))
                                               : nlohmann::json(nullptr)},
                     {"gender", to_string(r.gender)},
                     {"gender_method", to_string(r.gender_method)},
                     {"rank", to_string(r.rank)}};
}

inline void from_json(const nlohmann::json& j, ScientistRecord& r) {
  j.at("user_id").get_to(r.user_id);
  j.at("profile_titles").get_to(r.profile_titles);
  j.at("list_title_counts").get_to(r.list_title_counts);
  j.at("disciplines").get_to(r.disciplines);
  r.oes_group.reset();
  if (!j.at("oes_group").is_null()) r.oes_group = parse_oes_group(j["oes_group"].get<std::string>());
  r.gender = parse_gender(j.at("gender").get<std::string>());
  r.gender_method = parse_gender_method(j.at("gender_method").get<std::string>());
  r.rank = parse_rank(j.at("rank").get<std::string>());
}

// ---------------------------------------------------------------------------
// Workforce comparison

struct WorkforceRow {
  OesGroup group = OesGroup::General;
  std::int64_t employment = 0;
  double employment_pct = 0;  // fractions in [0, 1]
  std::int64_t twitter_count = 0;
  double twitter_pct = 0;
  double ratio = 0;
};

struct WorkforceTable {
  std::vector<WorkforceRow> rows;  // one per OES minor group, in kOesMinorGroups order
};

inline double representation_ratio(double employment_pct, double twitter_pct) {
  if (!(employment_pct > 0)) throw DataError("employment share must be positive");
  return twitter_pct / employment_pct;
}

inline WorkforceTable workforce_comparison(const std::map<OesGroup, std::int64_t>& twitter_counts,
                                           const std::map<OesGroup, std::int64_t>& employment) {
  WorkforceTable t;
  std::int64_t emp_total = 0;
  std::int64_t tw_total = 0;
  for (OesGroup g : kOesMinorGroups) {
    WorkforceRow row;
    row.group = g;
    const auto e = employment.find(g);
    if (e == employment.end() || e->second <= 0) {
      throw DataError("employment for " + std::string(to_string(g)) + " must be positive");
    }
    row.employment = e->second;
    const auto c = twitter_counts.find(g);
    row.twitter_count = c == twitter_counts.end() ? 0 : c->second;
    if (row.twitter_count < 0) throw DataError("negative Twitter count");
    emp_total += row.employment;
    tw_total += row.twitter_count;
    t.rows.push_back(row);
  }
  for (WorkforceRow& row : t.rows) {
    row.employment_pct = static_cast<double>(row.employment) / static_cast<double>(emp_total);
    row.twitter_pct =
        tw_total ? static_cast<double>(row.twitter_count) / static_cast<double>(tw_total) : 0.0;
    row.ratio = representation_ratio(row.employment_pct, row.twitter_pct);
  }
  return t;
}

// One count per distinct OES minor group among each record's final titles.
inline std::map<OesGroup, std::int64_t> aggregate_oes(const std::vector<ScientistRecord>& records,
                                                      const TitleLexicon& lex) {
  std::map<OesGroup, std::int64_t> out;
  for (const auto& r : records) {
    for (OesGroup g : oes_groups(r.disciplines, lex)) ++out[g];
  }
  return out;
}

// CSV `group,employment`; a header row and `#` comments are allowed.
inline std::map<OesGroup, std::int64_t> parse_oes_employment(std::istream& in) {
  std::map<OesGroup, std::int64_t> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string_view::npos) {
      throw DataError("OES employment line " + std::to_string(lineno) + ": expected group,count");
    }
    const std::string_view name = text::trim(t.substr(0, comma));
    const std::string count(text::trim(t.substr(comma + 1)));
    if (out.empty() && text::fold_case(name) == "group") continue;
    const OesGroup g = parse_oes_group(name);
    std::size_t used = 0;
    std::int64_t n = 0;
    try {
      n = std::stoll(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != count.size() || n <= 0) {
      throw DataError("OES employment line " + std::to_string(lineno) + ": bad count '" + count + "'");
    }
    if (!out.emplace(g, n).second) {
      throw DataError("OES employment: duplicate group " + std::string(to_string(g)));
    }
  }
  return out;
}

inline std::map<OesGroup, std::int64_t> load_oes_employment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open OES employment file " + path);
  return parse_oes_employment(in);
}

// ---------------------------------------------------------------------------
// Gender summary

struct GenderSummary {
  std::int64_t female = 0;
  std::int64_t male = 0;
  std::int64_t total = 0;
  std::optional<double> ratio;         // female / male; empty when no males identified
  std::optional<double> female_share;  // female / identified
  double identified_fraction = 0;      // identified / total
};

inline GenderSummary gender_ratio(std::int64_t female, std::int64_t male, std::int64_t total) {
  if (female < 0 || male < 0 || female + male > total) throw DataError("inconsistent gender counts");
  GenderSummary s{female, male, total, std::nullopt, std::nullopt, 0.0};
  if (male > 0) s.ratio = static_cast<double>(female) / static_cast<double>(male);
  if (female + male > 0) {
    s.female_share = static_cast<double>(female) / static_cast<double>(female + male);
  }
  if (total > 0) s.identified_fraction = static_cast<double>(female + male) / static_cast<double>(total);
  return s;
}

inline GenderSummary gender_ratio(const std::vector<ScientistRecord>& records) {
  std::int64_t f = 0;
  std::int64_t m = 0;
  for (const auto& r : records) {
    f += r.gender == Gender::Female;
    m += r.gender == Gender::Male;
  }
  return gender_ratio(f, m, static_cast<std::int64_t>(records.size()));
}

}  // namespace scilist
