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
#include <cstdio>

#include "formsql/pipeline.hpp"
#include "json.hpp"

namespace formsql {

namespace {

using ojson = nlohmann::ordered_json;

ojson trace_json(const ExampleTrace& t) {
  ojson retrieved = ojson::array();
  for (const auto& hit : t.retrieved) retrieved.push_back(ojson{{"id", hit.id}, {"score", hit.score}});
  ojson grounded = ojson::array();
  for (const auto& g : t.grounded) grounded.push_back(ojson::parse(grounding_to_json(g, -1)));
  ojson out{{"id", t.id},
            {"mode", to_string(t.mode)},
            {"retrieved", retrieved},
            {"grounded", grounded},
            {"parser_input", t.parser_input},
            {"predicted_sql", t.predicted ? ojson(t.predicted_sql) : ojson(nullptr)}};
  out["error"] = t.error_kind.empty() ? ojson(nullptr) : ojson{{"kind", t.error_kind}, {"message", t.error_message}};
  out["fusion_path"] = t.path ? ojson(to_string(*t.path)) : ojson(nullptr);
  out["used_items"] = t.used_items;
  out["gold_in_grammar"] = t.gold_in_grammar;
  out["match"] = t.match;
  return out;
}

ojson split_json(const SplitReport& s, const std::vector<Mode>& modes) {
  ojson accuracy = ojson::object();
  ojson correct = ojson::object();
  for (Mode m : modes) {
    accuracy[std::string(to_string(m))] = s.accuracy.count(m) > 0 ? s.accuracy.at(m) : 0.0;
    correct[std::string(to_string(m))] = s.correct.count(m) > 0 ? s.correct.at(m) : 0;
  }
  ojson errors = ojson::object();
  for (ErrorCategory c : kErrorCategories) {
    errors[std::string(to_string(c))] = s.errors.count(c) > 0 ? s.errors.at(c) : 0;
  }
  return ojson{{"split", s.split},
               {"examples", s.examples},
               {"in_grammar", s.in_grammar},
               {"accuracy", accuracy},
               {"correct", correct},
               {"recall", {{"examples", s.recall_examples},
                           {"at_1", s.recall_at_1},
                           {"at_3", s.recall_at_3},
                           {"at_10", s.recall_at_10}}},
               {"grounding", {{"precision", s.grounding.precision},
                              {"recall", s.grounding.recall},
                              {"f1", s.grounding.f1}}},
               {"failures", s.failures},
               {"errors", errors}};
}

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Column-aligned text: the first column left-aligned, the rest right-aligned.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::string pad(width[i] - r[i].size(), ' ');
      if (i > 0) line += "  ";
      line += i == 0 ? r[i] + pad : pad + r[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace

std::string trace_to_json(const ExampleTrace& trace, int indent) { return trace_json(trace).dump(indent); }

std::string report_to_json(const EvalReport& report, int indent) {
  ojson modes = ojson::array();
  for (Mode m : report.config.modes) modes.push_back(to_string(m));
  ojson config{{"modes", modes},
               {"k", report.config.k},
               {"threshold", report.config.threshold},
               {"strategy", to_string(report.config.strategy)},
               {"scorer", to_string(report.config.retriever.scorer)}};
  ojson splits = ojson::array();
  for (const auto& s : report.splits) splits.push_back(split_json(s, report.config.modes));
  ojson attributions = ojson::object();
  for (const auto& [id, cat] : report.attributions) attributions[id] = to_string(cat);
  ojson traces = ojson::array();
  for (const auto& t : report.traces) traces.push_back(trace_json(t));
  ojson root{{"config", config}, {"splits", splits}, {"attributions", attributions}, {"traces", traces}};
  return root.dump(indent);
}

std::string report_to_table(const EvalReport& report) {
  std::vector<std::vector<std::string>> acc{{"split", "n"}};
  for (Mode m : report.config.modes) acc[0].emplace_back(to_string(m));
  std::vector<std::vector<std::string>> ret{{"split", "n", "R@1", "R@3", "R@10", "P", "R", "F1"}};
  std::vector<std::vector<std::string>> err{{"split", "failures"}};
  for (ErrorCategory c : kErrorCategories) err[0].emplace_back(to_string(c));

  for (const auto& s : report.splits) {
    std::vector<std::string> a{s.split, std::to_string(s.examples)};
    for (Mode m : report.config.modes) a.push_back(fixed(s.accuracy.count(m) > 0 ? s.accuracy.at(m) : 0.0));
    acc.push_back(a);
    ret.push_back({s.split, std::to_string(s.recall_examples), fixed(s.recall_at_1), fixed(s.recall_at_3),
                   fixed(s.recall_at_10), fixed(s.grounding.precision), fixed(s.grounding.recall),
                   fixed(s.grounding.f1)});
    std::vector<std::string> e{s.split, std::to_string(s.failures)};
    for (ErrorCategory c : kErrorCategories) e.push_back(std::to_string(s.errors.count(c) > 0 ? s.errors.at(c) : 0));
    err.push_back(e);
  }
  return "exact set match accuracy\n" + align(acc) + "\nretrieval recall and grounding (micro)\n" + align(ret) +
         "\nfull-mode error attribution\n" + align(err);
}

}  // namespace formsql
