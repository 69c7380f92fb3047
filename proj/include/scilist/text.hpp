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

// Text primitives shared by every tagger in the library: UTF-8 decoding,
// length-preserving simple case folding, word tokenization and a
// longest-first multi-phrase index.
//
// A word is a maximal run of letters/digits after folding. Every other code
// point separates words. Folding never changes the UTF-8 length of a code
// point, so byte offsets computed on folded text are valid in the original.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scilist::text {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed; 1 for invalid sequences
  bool valid;
};

inline CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {b0, 1, false};
  }
  if (pos + len > s.size()) return {b0, 1, false};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong encodings so every code point has one representation.
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
      (len == 4 && (cp < 0x10000 || cp > 0x10FFFF))) {
    return {b0, 1, false};
  }
  return {cp, len, true};
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Simple (1:1) case folding for Latin, Greek and Cyrillic. Mappings that
// would change the encoded length (U+0130, U+1E9E, final sigma variants)
// are left alone.
constexpr char32_t fold(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c >= 0x100 && c <= 0x137 && c != 0x130) return c | 1u;
  if (c >= 0x139 && c <= 0x148) return (c & 1u) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1u;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1u) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

constexpr bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') ||
           (c >= U'0' && c <= U'9');
  }
  if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  // Punctuation, symbols, arrows, math operators, box drawing, dingbats.
  if (c >= 0x2000 && c <= 0x2BFF) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  if (c >= 0xFF1A && c <= 0xFF20) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;  // emoji & pictographs
  if (c >= 0xE000 && c <= 0xF8FF) return false;    // private use
  return true;
}

inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const CodePoint cp = decode_utf8(s, i);
    if (cp.valid) {
      append_utf8(out, fold(cp.value));
    } else {
      out.push_back(s[i]);
    }
    i += cp.length;
  }
  return out;
}

inline std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 0x20);
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view kWs = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(kWs);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kWs);
  return s.substr(b, e - b + 1);
}

struct Token {
  std::string folded;
  std::size_t begin;  // byte offsets into the source text
  std::size_t end;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    CodePoint cp = decode_utf8(s, i);
    if (!cp.valid || !is_word_char(cp.value)) {
      i += cp.length;
      continue;
    }
    Token t{{}, i, i};
    while (i < s.size()) {
      cp = decode_utf8(s, i);
      if (!cp.valid || !is_word_char(cp.value)) break;
      append_utf8(t.folded, fold(cp.value));
      i += cp.length;
    }
    t.end = i;
    tokens.push_back(std::move(t));
  }
  return tokens;
}

// How a phrase's inter-word gap must look in the text. A gap made of
// whitespace matches any nonempty run of whitespace and hyphens ("post doc"
// also matches "post-doc"). A gap containing anything else, including a
// lone hyphen, must appear verbatim.
struct Gap {
  bool literal = false;
  std::string text;  // folded; only meaningful when literal

  friend bool operator==(const Gap&, const Gap&) = default;
};

inline bool is_space_gap_char(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == '-';
}

inline bool gap_matches(const Gap& gap, std::string_view folded_between) {
  if (gap.literal) return folded_between == gap.text;
  if (folded_between.empty()) return false;
  return std::all_of(folded_between.begin(), folded_between.end(),
                     is_space_gap_char);
}

struct PhraseShape {
  std::vector<std::string> words;
  std::vector<Gap> gaps;  // words.size() - 1 entries
};

inline PhraseShape phrase_shape(std::string_view phrase) {
  const std::string folded = fold_case(trim(phrase));
  PhraseShape shape;
  const auto tokens = tokenize(folded);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) {
      const std::string_view between = std::string_view(folded).substr(
          tokens[i - 1].end, tokens[i].begin - tokens[i - 1].end);
      Gap g;
      const bool all_ws = std::all_of(between.begin(), between.end(), [](char c) {
        return c != '-' && is_space_gap_char(c);
      });
      if (!all_ws) {
        g.literal = true;
        g.text = std::string(between);
      }
      shape.gaps.push_back(std::move(g));
    }
    shape.words.push_back(tokens[i].folded);
  }
  return shape;
}

template <class Payload>
struct PhraseHit {
  Payload payload;
  std::size_t begin;  // byte span in the scanned text
  std::size_t end;
  std::size_t word_count;
};

// Multi-phrase index with global longest-first selection: all occurrences
// are collected, then accepted in order of descending word count (then
// descending span length, then ascending offset) unless they overlap an
// already accepted hit. Results are returned in text order.
template <class Payload>
class PhraseIndex {
 public:
  // Returns false when the phrase has no words.
  bool add(std::string_view phrase, Payload payload) {
    PhraseShape shape = phrase_shape(phrase);
    if (shape.words.empty()) return false;
    std::size_t node = 0;
    for (const std::string& w : shape.words) {
      auto it = nodes_[node].children.find(w);
      if (it == nodes_[node].children.end()) {
        nodes_.emplace_back();
        it = nodes_[node].children.emplace(w, nodes_.size() - 1).first;
      }
      node = it->second;
    }
    nodes_[node].terminals.push_back({std::move(shape.gaps), std::move(payload)});
    ++size_;
    return true;
  }

  std::size_t size() const { return size_; }

  // Every occurrence, overlapping ones included.
  std::vector<PhraseHit<Payload>> occurrences(std::string_view text) const {
    std::vector<PhraseHit<Payload>> hits;
    if (size_ == 0) return hits;
    const std::string folded = fold_case(text);
    const auto tokens = tokenize(folded);
    const std::string_view fv(folded);
    for (std::size_t start = 0; start < tokens.size(); ++start) {
      std::size_t node = 0;
      for (std::size_t j = start; j < tokens.size(); ++j) {
        const auto it = nodes_[node].children.find(tokens[j].folded);
        if (it == nodes_[node].children.end()) break;
        node = it->second;
        for (const Terminal& term : nodes_[node].terminals) {
          bool ok = true;
          for (std::size_t g = 0; g < term.gaps.size() && ok; ++g) {
            const auto& a = tokens[start + g];
            const auto& b = tokens[start + g + 1];
            ok = gap_matches(term.gaps[g], fv.substr(a.end, b.begin - a.end));
          }
          if (ok) {
            hits.push_back({term.payload, tokens[start].begin, tokens[j].end,
                            j - start + 1});
          }
        }
      }
    }
    return hits;
  }

  std::vector<PhraseHit<Payload>> find(std::string_view text) const {
    auto hits = occurrences(text);
    std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
      if (a.word_count != b.word_count) return a.word_count > b.word_count;
      const auto la = a.end - a.begin;
      const auto lb = b.end - b.begin;
      if (la != lb) return la > lb;
      return a.begin < b.begin;
    });
    std::vector<PhraseHit<Payload>> accepted;
    for (auto& h : hits) {
      const bool clash = std::any_of(accepted.begin(), accepted.end(), [&](const auto& a) {
        return h.begin < a.end && a.begin < h.end;
      });
      if (!clash) accepted.push_back(std::move(h));
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const auto& a, const auto& b) { return a.begin < b.begin; });
    return accepted;
  }

 private:
  struct Terminal {
    std::vector<Gap> gaps;
    Payload payload;
  };
  struct Node {
    std::map<std::string, std::size_t, std::less<>> children;
    std::vector<Terminal> terminals;
  };
  std::vector<Node> nodes_{1};
  std::size_t size_ = 0;
};

}  // namespace scilist::text
