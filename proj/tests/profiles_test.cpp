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

#include "scilist/profiles.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "support/fixture_gen.hpp"

namespace scilist {
namespace {

const std::string kData = SCILIST_DATA_DIR;

CensusNameDb shipped_census() {
  return load_census(kData + "/census/dist.female.first", kData + "/census/dist.male.first");
}

// Plain line scan of a census file, independent of the parser.
bool file_has_name(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(name + " ", 0) == 0) return true;
  }
  return false;
}

TEST(AssignDiscipline, ProfileTitlesTakePrecedence) {
  EXPECT_EQ(assign_discipline({"physicist"}, {{"astronomer", 9}}),
            (std::vector<std::string>{"physicist"}));
  EXPECT_EQ(assign_discipline({}, {{"sociologist", 4}, {"economist", 2}}),
            (std::vector<std::string>{"sociologist"}));
  EXPECT_TRUE(assign_discipline({}, {}).empty());
  EXPECT_EQ(assign_discipline({"economist", "physicist", "economist"}, {}),
            (std::vector<std::string>{"economist", "physicist"}));
}

TEST(AssignDiscipline, TiesGoToLexicographicallySmallest) {
  EXPECT_EQ(assign_discipline({}, {{"sociologist", 3}, {"economist", 3}, {"zoologist", 3}}),
            (std::vector<std::string>{"economist"}));
}

TEST(AssignDiscipline, PrecedenceProperty) {
  std::mt19937_64 rng(4);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> profile;
    std::map<std::string, std::int64_t> counts;
    for (const auto& t : pool) {
      if (rng() % 3 == 0) profile.push_back(t);
      if (rng() % 2 == 0) counts[t] = static_cast<std::int64_t>(rng() % 5 + 1);
    }
    const auto d = assign_discipline(profile, counts);
    if (!profile.empty()) {
      for (const auto& t : d) {
        EXPECT_NE(std::find(profile.begin(), profile.end(), t), profile.end());
      }
    } else if (!counts.empty()) {
      ASSERT_EQ(d.size(), 1u);
      for (const auto& [t, c] : counts) EXPECT_LE(c, counts.at(d[0]));
    }
  }
}

TEST(CountListTitles, OncePerListPerTitle) {
  const auto lex = testing::small_lexicon();
  std::vector<ListRecord> lists = {{"L1", "economist economists", "", true, {}},
                                   {"L2", "Economists and physicists", "", true, {}},
                                   {"L3", "friends", "", true, {}}};
  const auto counts = count_list_titles(lists, lex);
  EXPECT_EQ(counts, (std::map<std::string, std::int64_t>{{"economist", 2}, {"physicist", 1}}));
}

TEST(Census, ShippedFilesParseAndBetseyIsFemaleOnly) {
  const auto db = shipped_census();
  EXPECT_TRUE(file_has_name(kData + "/census/dist.female.first", "BETSEY"));
  EXPECT_FALSE(file_has_name(kData + "/census/dist.male.first", "BETSEY"));
  EXPECT_EQ(census_lookup(db, "BETSEY"), Gender::Female);
  EXPECT_EQ(census_lookup(db, "JAMES"), Gender::Male);  // in both, male far more frequent
  EXPECT_EQ(census_lookup(db, "MARIE"), Gender::Unknown);  // equal frequencies: ambiguous
  EXPECT_EQ(db.female.at("MARY"), (CensusEntry{2.629, 2.629, 1}));
}

TEST(Census, RejectsMalformedRows) {
  std::istringstream lower("mary 1.0 1.0 1\n");
  EXPECT_THROW(parse_census_table(lower), DataError);
  std::istringstream short_row("MARY 1.0 1.0\n");
  EXPECT_THROW(parse_census_table(short_row), DataError);
  std::istringstream negative("MARY -1.0 1.0 1\n");
  EXPECT_THROW(parse_census_table(negative), DataError);
  EXPECT_THROW(load_census("/nonexistent/f", "/nonexistent/m"), DataError);
}

TEST(NamePrefixes, StrippingIsIdempotentAndBoundaryAware) {
  EXPECT_EQ(strip_name_prefixes("Dr. Betsey Stevenson"), "Betsey Stevenson");
  EXPECT_EQ(strip_name_prefixes("prof Jane Roe"), "Jane Roe");
  EXPECT_EQ(strip_name_prefixes("PROF. DR. Ada Byron"), "Ada Byron");
  EXPECT_EQ(strip_name_prefixes("Drew Carey"), "Drew Carey");
  EXPECT_EQ(strip_name_prefixes("Dr.Who"), "Dr.Who");
  EXPECT_EQ(strip_name_prefixes("Dr."), "");
  for (std::string s : {"Dr. Prof. X", "  Dr  Ann", "Professor Y", "dr. dr. z", "Prof.Dr. A"}) {
    const auto once = strip_name_prefixes(s);
    EXPECT_EQ(strip_name_prefixes(once), once) << s;
  }
}

TEST(AssignGender, CensusFirst) {
  const auto db = shipped_census();
  const auto r = assign_gender("Dr. Betsey Stevenson", std::nullopt, db, nullptr);
  EXPECT_EQ(r.gender, Gender::Female);
  EXPECT_EQ(r.method, GenderMethod::Census);
  EXPECT_EQ(assign_gender("Prof. John Smith", std::nullopt, db, nullptr).gender, Gender::Male);
  const auto x = assign_gender("X \xC3\x86 A-12", std::nullopt, db, nullptr);
  EXPECT_EQ(x.gender, Gender::Unknown);
  EXPECT_EQ(x.method, GenderMethod::None);
}

TEST(AssignGender, ImageFallbackRespectsThreshold) {
  const auto db = shipped_census();
  FixtureClassifier clf({{"img/85", {Gender::Male, 85}},
                         {"img/90", {Gender::Female, 90}},
                         {"img/95", {Gender::Female, 95}}});
  auto at = [&](const char* url) { return assign_gender("Zed Q", std::string(url), db, &clf); };
  EXPECT_EQ(at("img/85").gender, Gender::Unknown);
  EXPECT_EQ(at("img/90").gender, Gender::Unknown);  // strictly greater than
  const auto ok = at("img/95");
  EXPECT_EQ(ok.gender, Gender::Female);
  EXPECT_EQ(ok.method, GenderMethod::Image);
  EXPECT_EQ(assign_gender("Zed Q", std::string("img/85"), db, &clf, 80).gender, Gender::Male);
  // An ambiguous census name falls through to the image.
  EXPECT_EQ(assign_gender("Marie Curie", std::string("img/95"), db, &clf).method, GenderMethod::Image);
  // A census hit never consults the classifier.
  EXPECT_EQ(assign_gender("Mary Q", std::string("img/85"), db, &clf).method, GenderMethod::Census);
}

TEST(AssignGender, ClassifierFailureIsUnknownNotFatal) {
  const auto db = shipped_census();
  FixtureClassifier clf;
  const auto r = assign_gender("Zed Q", std::string("img/missing"), db, &clf);
  EXPECT_EQ(r.gender, Gender::Unknown);
  EXPECT_EQ(r.method, GenderMethod::None);
  EXPECT_FALSE(r.note.empty());
}

TEST(AssignRank, EarliestKeywordWins) {
  EXPECT_EQ(assign_rank("Postdoc turned assistant professor"), Rank::Postdoc);
  EXPECT_EQ(assign_rank("PhD student in biology"), Rank::Student);
  EXPECT_EQ(assign_rank("Baker and runner"), Rank::Unknown);
  EXPECT_EQ(assign_rank("Assistant Prof. of History; former post-doc"), Rank::Professor);
  EXPECT_EQ(assign_rank("Professional baker"), Rank::Unknown);
  EXPECT_EQ(assign_rank("Faculty at MIT, PhD candidate advisor"), Rank::Professor);
  EXPECT_EQ(assign_rank("phd-student"), Rank::Student);
}

TEST(AssignRank, ListingOrderAlternative) {
  EXPECT_EQ(assign_rank("Professor and former grad student", RankOrder::Offset), Rank::Professor);
  EXPECT_EQ(assign_rank("Professor and former grad student", RankOrder::Listing), Rank::Student);
  EXPECT_EQ(assign_rank("prof, postdoctoral mentor", RankOrder::Listing), Rank::Postdoc);
}

TEST(Workforce, PaperPercentagesGiveTableRatios) {
  const std::vector<std::tuple<double, double, double>> rows = {
      {2.71, 3.62, 1.336}, {15.48, 3.18, 0.205}, {30.13, 25.18, 0.836},
      {30.68, 19.66, 0.641}, {21.00, 48.37, 2.303}};
  for (const auto& [emp, tw, ratio] : rows) {
    EXPECT_NEAR(representation_ratio(emp / 100, tw / 100), ratio, 1e-3);
  }
  EXPECT_THROW(representation_ratio(0, 0.1), DataError);
}

TEST(Workforce, TableArithmeticAndEdgeCases) {
  std::ifstream in(kData + "/oes/employment_2014.csv");
  const auto emp = parse_oes_employment(in);
  ASSERT_EQ(emp.size(), 5u);
  EXPECT_EQ(emp.at(OesGroup::Life), 269660);

  const auto t = workforce_comparison({{OesGroup::ComputerInfo, 362}, {OesGroup::Mathematical, 318},
                                       {OesGroup::Life, 2518}, {OesGroup::Physical, 1966}},
                                      emp);
  double se = 0;
  double st = 0;
  for (const auto& r : t.rows) {
    se += r.employment_pct;
    st += r.twitter_pct;
    EXPECT_LT(std::abs(r.ratio * r.employment_pct - r.twitter_pct), 1e-9);
  }
  EXPECT_NEAR(se, 1.0, 1e-9);
  EXPECT_NEAR(st, 1.0, 1e-9);
  EXPECT_EQ(t.rows[4].group, OesGroup::Social);
  EXPECT_EQ(t.rows[4].ratio, 0.0);

  std::map<OesGroup, std::int64_t> equal;
  for (OesGroup g : kOesMinorGroups) equal[g] = 7;
  for (const auto& r : workforce_comparison(equal, equal).rows) EXPECT_DOUBLE_EQ(r.ratio, 1.0);

  auto missing = emp;
  missing.erase(OesGroup::Social);
  EXPECT_THROW(workforce_comparison(equal, missing), DataError);
  std::istringstream bad("Life,abc\n");
  EXPECT_THROW(parse_oes_employment(bad), DataError);
}

TEST(Workforce, MultiDisciplineUsersCountOncePerGroup) {
  const auto lex = testing::small_lexicon();
  ScientistRecord a;
  a.disciplines = {"economist", "physicist"};
  ScientistRecord b;
  b.disciplines = {"physicist", "marine biologist", "historian"};
  ScientistRecord c;
  c.disciplines = {"scientist"};  // General: not aggregated
  const auto agg = aggregate_oes({a, b, c}, lex);
  EXPECT_EQ(agg, (std::map<OesGroup, std::int64_t>{
                     {OesGroup::Life, 1}, {OesGroup::Physical, 2}, {OesGroup::Social, 2}}));
}

TEST(GenderRatio, PaperCounts) {
  const auto s = gender_ratio(12732, 20232, 45867);
  EXPECT_NEAR(*s.ratio, 0.629, 1e-3);
  EXPECT_NEAR(*s.female_share, 0.386, 1e-3);
  EXPECT_NEAR(s.identified_fraction, 0.719, 1e-3);
  EXPECT_DOUBLE_EQ(*gender_ratio(1, 1, 2).ratio, 1.0);
  const auto none = gender_ratio(0, 0, 10);
  EXPECT_FALSE(none.ratio.has_value());
  EXPECT_FALSE(none.female_share.has_value());
  EXPECT_THROW(gender_ratio(5, 6, 10), DataError);
}

TEST(GenderRatio, FromRecords) {
  std::vector<ScientistRecord> rs(4);
  rs[0].gender = Gender::Female;
  rs[1].gender = Gender::Male;
  rs[2].gender = Gender::Male;
  const auto s = gender_ratio(rs);
  EXPECT_EQ(s.total, 4);
  EXPECT_DOUBLE_EQ(*s.ratio, 0.5);
  EXPECT_DOUBLE_EQ(s.identified_fraction, 0.75);
}

TEST(ClassifyScientist, AssemblesRecordAndRoundTrips) {
  const auto lex = testing::small_lexicon();
  const auto db = shipped_census();
  UserProfile p;
  p.user_id = "u9";
  p.display_name = "Dr. Betsey Stevenson";
  p.description = "PhD student. Economist; marine biologists fan";
  std::vector<ListRecord> lists = {{"L1", "physicists", "", true, {}},
                                   {"L2", "Physicists 2", "", true, {}}};
  const auto r = classify_scientist(p, lists, lex, db, nullptr);
  EXPECT_EQ(r.profile_titles, (std::vector<std::string>{"economist", "marine biologist"}));
  EXPECT_EQ(r.list_title_counts.at("physicist"), 2);
  EXPECT_EQ(r.disciplines, r.profile_titles);
  EXPECT_EQ(r.oes_group, OesGroup::Social);
  EXPECT_EQ(r.gender, Gender::Female);
  EXPECT_EQ(r.rank, Rank::Student);

  nlohmann::json j = r;
  EXPECT_EQ(j.get<ScientistRecord>(), r);

  p.description = "";
  const auto r2 = classify_scientist(p, lists, lex, db, nullptr);
  EXPECT_EQ(r2.disciplines, (std::vector<std::string>{"physicist"}));
  EXPECT_EQ(r2.oes_group, OesGroup::Physical);
  EXPECT_EQ(r2.gender == Gender::Unknown, r2.gender_method == GenderMethod::None);
}

}  // namespace
}  // namespace scilist
