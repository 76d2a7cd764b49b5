// Copyright 2026 The formsql Authors.
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

#include <algorithm>
#include <array>
#include <regex>

#include "formsql/error.hpp"
#include "formsql/fusion.hpp"
#include "formsql/text.hpp"

namespace formsql {

namespace {

constexpr const char* kShapes =
    "accepted shapes: 'what is the P [of E]', '[what is the] AGG P [by G]', "
    "'list|show|find|which C where|with|are|have P', 'how many C where|with|are|have P'";

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && text::to_lower(s.substr(0, prefix.size())) == prefix;
}

std::string strip_articles(std::string_view s) {
  std::string out = text::collapse_whitespace(s);
  for (bool again = true; again;) {
    again = false;
    for (std::string_view art : {"the ", "a ", "an "}) {
      if (starts_with_ci(out, art) && out.size() > art.size()) {
        out = out.substr(art.size());
        again = true;
      }
    }
  }
  return out;
}

bool is_upper_ascii(char c) { return c >= 'A' && c <= 'Z'; }

struct AggWord {
  std::string_view word;
  sql::AggFn fn;
};

constexpr std::array<AggWord, 14> kAggWords{{
    {"average", sql::AggFn::Avg},
    {"avg", sql::AggFn::Avg},
    {"mean", sql::AggFn::Avg},
    {"total", sql::AggFn::Sum},
    {"sum", sql::AggFn::Sum},
    {"maximum", sql::AggFn::Max},
    {"max", sql::AggFn::Max},
    {"highest", sql::AggFn::Max},
    {"largest", sql::AggFn::Max},
    {"minimum", sql::AggFn::Min},
    {"min", sql::AggFn::Min},
    {"lowest", sql::AggFn::Min},
    {"smallest", sql::AggFn::Min},
    {"count", sql::AggFn::Count},
}};

// Text columns declaring a value equal (case-insensitively) to s.
std::optional<EntityFilter> declared_entity(std::string_view s, const SchemaGraph& schema) {
  std::string key = text::to_lower(s);
  EntityFilter e;
  for (const auto& t : schema.tables) {
    for (const auto& c : t.columns) {
      if (c.type != ColumnType::Text) continue;
      for (const auto& v : c.values) {
        if (text::to_lower(v) == key) {
          if (e.candidates.empty()) e.literal = v;
          e.candidates.push_back({t.name, c.name});
          break;
        }
      }
    }
  }
  if (e.candidates.empty()) return std::nullopt;
  return e;
}

// A capitalized mention that no column declares: text key columns first,
// then any text column.
std::optional<EntityFilter> guessed_entity(std::string_view s, const SchemaGraph& schema) {
  if (s.empty() || !is_upper_ascii(s.front())) return std::nullopt;
  EntityFilter e;
  e.literal = std::string(s);
  for (const auto& t : schema.tables) {
    for (const auto& c : t.columns) {
      if (c.type == ColumnType::Text && t.is_key(c.name)) e.candidates.push_back({t.name, c.name});
    }
  }
  if (e.candidates.empty()) {
    for (const auto& t : schema.tables) {
      for (const auto& c : t.columns) {
        if (c.type == ColumnType::Text) e.candidates.push_back({t.name, c.name});
      }
    }
  }
  if (e.candidates.empty()) return std::nullopt;
  return e;
}

// Splits one trailing qualifier off a value phrase: "EBIT of Walmart",
// "price in first tier cities". The rightmost connector that yields a usable
// tail wins.
void split_qualifier(QuestionFrame& frame, const SchemaGraph& schema) {
  const std::string& target = frame.target;
  std::string lower = text::to_lower(target);
  struct Cut {
    std::size_t pos;
    std::string_view connector;
  };
  std::vector<Cut> cuts;
  for (std::string_view conn : {" of ", " in ", " for ", " with ", " where "}) {
    for (auto p = lower.find(conn); p != std::string::npos; p = lower.find(conn, p + 1)) cuts.push_back({p, conn});
  }
  std::sort(cuts.begin(), cuts.end(), [](const Cut& a, const Cut& b) { return a.pos > b.pos; });
  for (const auto& cut : cuts) {
    std::string head = text::collapse_whitespace(target.substr(0, cut.pos));
    std::string tail = strip_articles(target.substr(cut.pos + cut.connector.size()));
    if (head.empty() || tail.empty()) continue;
    if (auto e = declared_entity(tail, schema)) {
      frame.entities.push_back(std::move(*e));
      frame.target = head;
      return;
    }
    if (cut.connector == " of ") {
      if (auto e = guessed_entity(tail, schema)) {
        frame.entities.push_back(std::move(*e));
        frame.target = head;
        return;
      }
      continue;
    }
    frame.condition = tail;
    frame.target = head;
    return;
  }
}

bool resolves_to_column(std::string_view phrase, const SchemaGraph& schema) {
  for (const auto& qc : schema.columns()) {
    if (phrase_similarity(phrase, qc.column) >= kDefaultThreshold) return true;
  }
  return false;
}

[[noreturn]] void unparseable(std::string_view text) {
  throw UnparseableQuestionError("cannot parse question '" + std::string(text) + "'; " + kShapes);
}

}  // namespace

std::string_view to_string(Intent intent) {
  switch (intent) {
    case Intent::Lookup: return "Lookup";
    case Intent::Aggregate: return "Aggregate";
    case Intent::Filter: return "Filter";
    case Intent::AggregateBy: return "AggregateBy";
  }
  return "?";
}

double phrase_similarity(std::string_view a, std::string_view b) {
  auto singular = [](std::string_view s) {
    std::string out;
    for (const auto& w : text::split_words(text::normalize_phrase(s))) {
      if (!out.empty()) out.push_back(' ');
      out += text::singularize(w);
    }
    return out;
  };
  return std::max(composite_similarity(a, b), composite_similarity(singular(a), singular(b)));
}

QuestionFrame parse_question(std::string_view text, const SchemaGraph& schema) {
  std::string q = text::collapse_whitespace(text);
  while (!q.empty() && (q.back() == '?' || q.back() == '.' || q.back() == '!' || q.back() == ' ')) q.pop_back();
  if (q.empty()) unparseable(text);

  QuestionFrame frame;
  frame.source = std::string(text);
  const auto icase = std::regex::ECMAScript | std::regex::icase;

  static const std::regex count_re(
      R"(^how many (.+?) (?:where|with|that are|which are|that have|that has|are|have|has|is) (.+)$)", icase);
  static const std::regex filter_re(
      R"(^(?:list|show|find|which)(?: all)?(?: the)? (.+?) (?:where|with|that are|which are|that have|that has|whose|are|have|has|is) (.+)$)",
      icase);
  std::smatch m;
  if (std::regex_match(q, m, count_re)) {
    frame.intent = Intent::Aggregate;
    frame.agg = sql::AggFn::Count;
    frame.subject = strip_articles(m[1].str());
    frame.target = strip_articles(m[2].str());
    frame.target_is_condition = true;
    return frame;
  }
  if (std::regex_match(q, m, filter_re)) {
    frame.intent = Intent::Filter;
    frame.subject = strip_articles(m[1].str());
    frame.target = strip_articles(m[2].str());
    frame.target_is_condition = true;
    return frame;
  }

  std::string rest = q;
  bool lookup_prefix = false;
  for (std::string_view prefix : {"what is ", "what's ", "what are "}) {
    if (starts_with_ci(rest, prefix)) {
      rest = strip_articles(rest.substr(prefix.size()));
      lookup_prefix = true;
      break;
    }
  }

  for (const auto& aw : kAggWords) {
    std::string word = std::string(aw.word) + " ";
    if (!starts_with_ci(rest, word)) continue;
    std::string body = rest.substr(word.size());
    if (starts_with_ci(body, "of ")) body = body.substr(3);
    body = strip_articles(body);
    if (body.empty()) unparseable(text);
    frame.agg = aw.fn;
    std::string lower = text::to_lower(body);
    std::optional<std::pair<std::size_t, std::size_t>> split;  // position, connector length
    for (std::string_view conn : {" by ", " for each "}) {
      auto p = lower.rfind(conn);
      if (p != std::string::npos && (!split || p > split->first)) split = {p, conn.size()};
    }
    if (!split) {
      auto p = lower.rfind(" per ");
      if (p != std::string::npos && resolves_to_column(body.substr(p + 5), schema)) split = {p, 5};
    }
    if (split && split->first > 0 && split->first + split->second < body.size()) {
      frame.intent = Intent::AggregateBy;
      frame.target = text::collapse_whitespace(body.substr(0, split->first));
      frame.group = strip_articles(body.substr(split->first + split->second));
    } else {
      frame.intent = Intent::Aggregate;
      frame.target = body;
      split_qualifier(frame, schema);
    }
    return frame;
  }

  if (!lookup_prefix || rest.empty()) unparseable(text);
  frame.intent = Intent::Lookup;
  frame.target = rest;
  split_qualifier(frame, schema);
  return frame;
}

}  // namespace formsql
