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

#include "formsql/error.hpp"
#include "formsql/pipeline.hpp"
#include "formsql/text.hpp"

namespace formsql {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Vanilla: return "vanilla";
    case Mode::NoGround: return "no_ground";
    case Mode::Full: return "full";
    case Mode::Oracle: return "oracle";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  std::string key = text::to_lower(text::collapse_whitespace(s));
  for (Mode m : {Mode::Vanilla, Mode::NoGround, Mode::Full, Mode::Oracle}) {
    if (key == to_string(m)) return m;
  }
  throw PreconditionError("unknown mode '" + std::string(s) + "' (expected vanilla, no_ground, full or oracle)");
}

std::vector<Mode> parse_modes(std::string_view csv) {
  std::vector<Mode> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string_view::npos) comma = csv.size();
    std::string_view part = csv.substr(start, comma - start);
    if (!text::collapse_whitespace(part).empty()) {
      Mode m = parse_mode(part);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    start = comma + 1;
  }
  if (out.empty()) throw PreconditionError("no modes given");
  return out;
}

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::RetrievalError: return "RetrievalError";
    case ErrorCategory::GroundingError: return "GroundingError";
    case ErrorCategory::ParsingError: return "ParsingError";
    case ErrorCategory::OtherError: return "OtherError";
  }
  return "?";
}

void validate_config(const PipelineConfig& config) {
  if (config.k == 0) throw PreconditionError("k must be positive");
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw PreconditionError("threshold must lie in [0, 1]");
  }
}

namespace {

std::vector<GroundedKnowledge> knowledge_for(const DatasetExample& example, const KnowledgeBank& bank,
                                             const KnowledgeIndex& index, const SchemaGraph& schema,
                                             const PipelineConfig& config, ExampleTrace& trace) {
  std::vector<GroundedKnowledge> out;
  switch (config.mode) {
    case Mode::Vanilla:
      break;
    case Mode::NoGround:
    case Mode::Full: {
      auto query = make_query(example.question, schema, config.retriever.tokenizer);
      trace.retrieved = retrieve(index, query, config.k, config.retriever);
      for (const auto& hit : trace.retrieved) {
        const KnowledgeItem& item = bank.at(hit.id);
        if (config.mode == Mode::NoGround) {
          out.push_back(unresolved_grounding(item));
          continue;
        }
        try {
          out.push_back(ground(item, schema, config.threshold, config.strategy));
        } catch (const NoConceptError&) {
          out.push_back(unresolved_grounding(item));
        }
      }
      break;
    }
    case Mode::Oracle:
      for (const auto& id : example.gold_knowledge_ids) {
        out.push_back(inject_grounding(bank.at(id), example.gold_grounding));
      }
      break;
  }
  return out;
}

}  // namespace

ExampleTrace run_pipeline(const DatasetExample& example, const KnowledgeBank& bank, const KnowledgeIndex& index,
                          const SchemaGraph& schema, const PipelineConfig& config) {
  validate_config(config);
  ExampleTrace trace;
  trace.id = example.id;
  trace.mode = config.mode;
  auto gold = gold_query(example, schema);
  trace.gold_in_grammar = gold.has_value();
  try {
    trace.grounded = knowledge_for(example, bank, index, schema, config, trace);
    trace.parser_input = serialize_parser_input(schema, trace.grounded, example.question);
    FusionInput input{parse_question(example.question, schema), &schema, trace.grounded};
    FusionResult result = fuse_traced(input, config.threshold);
    trace.path = result.trace.target_path;
    trace.used_items = result.trace.used_items;
    trace.predicted_sql = sql::render_sql(result.query);
    trace.predicted = std::move(result.query);
  } catch (const Error& e) {
    trace.error_kind = e.kind();
    trace.error_message = e.what();
    return trace;
  }
  if (gold) {
    try {
      trace.match = sql::exact_set_match(sql::bind(*trace.predicted, schema), *gold);
    } catch (const Error& e) {
      trace.error_kind = e.kind();
      trace.error_message = e.what();
    }
  }
  return trace;
}

ExampleTrace run_pipeline(const DatasetExample& example, const KnowledgeBank& bank, const SchemaGraph& schema,
                          const PipelineConfig& config) {
  KnowledgeIndex index = build_index(bank, config.retriever.tokenizer);
  return run_pipeline(example, bank, index, schema, config);
}

ErrorCategory attribute_error(const DatasetExample& example, const ExampleTrace& trace) {
  if (trace.match) throw NotAFailureError("example " + example.id + " matched its gold SQL");

  std::set<std::string> retrieved;
  for (const auto& hit : trace.retrieved) retrieved.insert(hit.id);
  for (const auto& id : example.gold_knowledge_ids) {
    if (retrieved.count(id) == 0) return ErrorCategory::RetrievalError;
  }

  std::set<GroundingLink> predicted;
  std::set<std::string> gold_concepts;
  for (const auto& g : trace.grounded) {
    if (example.gold_knowledge_ids.count(g.item_id()) == 0) continue;
    auto links = resolved_links(g, example.id);
    predicted.insert(links.begin(), links.end());
    for (const auto& r : g.resolutions) gold_concepts.insert(text::normalize_phrase(r.concept_text));
  }
  std::set<GroundingLink> gold;
  for (const auto& link : gold_links(example)) {
    if (gold_concepts.count(link.concept_key) > 0) gold.insert(link);
  }
  if (predicted != gold) return ErrorCategory::GroundingError;

  if (!trace.gold_in_grammar || trace.error_kind == "JoinPathError") return ErrorCategory::OtherError;
  return ErrorCategory::ParsingError;
}

EvalReport evaluate(const std::vector<DatasetExample>& dataset, const KnowledgeBank& bank,
                    const std::map<std::string, SchemaGraph>& schemas, const EvalConfig& config) {
  if (config.modes.empty()) throw PreconditionError("no modes requested");
  validate_dataset(dataset, bank, schemas);
  PipelineConfig base;
  base.k = config.k;
  base.threshold = config.threshold;
  base.strategy = config.strategy;
  base.retriever = config.retriever;
  validate_config(base);

  EvalReport report;
  report.config = config;
  KnowledgeIndex index = build_index(bank, config.retriever.tokenizer);

  std::vector<const DatasetExample*> ordered;
  for (const auto& ex : dataset) ordered.push_back(&ex);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

  std::map<std::string, SplitReport> splits;
  SplitReport overall;
  overall.split = "overall";
  std::map<std::string, std::pair<std::set<GroundingLink>, std::set<GroundingLink>>> links;  // split -> pred, gold
  std::pair<std::set<GroundingLink>, std::set<GroundingLink>> all_links;

  for (const DatasetExample* ex : ordered) {
    const SchemaGraph& schema = schemas.at(ex->schema_id);
    SplitReport& split = splits[ex->split];
    split.split = ex->split;
    std::vector<SplitReport*> rows{&split, &overall};

    bool in_grammar = gold_query(*ex, schema).has_value();
    for (auto* row : rows) {
      ++row->examples;
      if (in_grammar) ++row->in_grammar;
    }

    std::optional<ExampleTrace> full_trace;
    for (Mode mode : config.modes) {
      PipelineConfig pc = base;
      pc.mode = mode;
      ExampleTrace trace = run_pipeline(*ex, bank, index, schema, pc);
      for (auto* row : rows) row->correct[mode] += trace.match ? 1 : 0;
      if (mode == Mode::Full) full_trace = trace;
      report.traces.push_back(std::move(trace));
    }
    if (!full_trace) {
      PipelineConfig full = base;
      full.mode = Mode::Full;
      full_trace = run_pipeline(*ex, bank, index, schema, full);
    }
    if (!full_trace->match) {
      ErrorCategory cat = attribute_error(*ex, *full_trace);
      report.attributions[ex->id] = cat;
      for (auto* row : rows) {
        ++row->failures;
        ++row->errors[cat];
      }
    }

    if (!ex->gold_knowledge_ids.empty()) {
      auto query = make_query(ex->question, schema, config.retriever.tokenizer);
      RankedKnowledge top = retrieve(index, query, 10, config.retriever);
      for (auto* row : rows) {
        ++row->recall_examples;
        row->recall_at_1 += recall_at_k(top, ex->gold_knowledge_ids, 1);
        row->recall_at_3 += recall_at_k(top, ex->gold_knowledge_ids, 3);
        row->recall_at_10 += recall_at_k(top, ex->gold_knowledge_ids, 10);
      }
      std::set<GroundingLink> predicted;
      for (const auto& id : ex->gold_knowledge_ids) {
        try {
          auto g = ground(bank.at(id), schema, config.threshold, config.strategy);
          auto l = resolved_links(g, ex->id);
          predicted.insert(l.begin(), l.end());
        } catch (const NoConceptError&) {
        }
      }
      auto gold = gold_links(*ex);
      for (auto* sink : {&links[ex->split], &all_links}) {
        sink->first.insert(predicted.begin(), predicted.end());
        sink->second.insert(gold.begin(), gold.end());
      }
    }
  }

  auto finish = [&](SplitReport& row, const std::pair<std::set<GroundingLink>, std::set<GroundingLink>>& l) {
    for (Mode mode : config.modes) {
      row.accuracy[mode] = row.examples == 0 ? 0.0 : static_cast<double>(row.correct[mode]) / row.examples;
    }
    if (row.recall_examples > 0) {
      const auto n = static_cast<double>(row.recall_examples);
      row.recall_at_1 /= n;
      row.recall_at_3 /= n;
      row.recall_at_10 /= n;
    }
    for (ErrorCategory c : kErrorCategories) row.errors.try_emplace(c, 0);
    row.grounding = grounding_prf(l.first, l.second);
  };
  for (auto& [name, row] : splits) {
    finish(row, links[name]);
    report.splits.push_back(row);
  }
  finish(overall, all_links);
  report.splits.push_back(overall);
  return report;
}

}  // namespace formsql
