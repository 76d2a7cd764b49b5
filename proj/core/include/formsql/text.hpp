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

// String helpers shared by the retriever, grounder and question parser.
// Everything here is byte-oriented: ASCII is case-folded and classified,
// bytes >= 0x80 (UTF-8 continuation and lead bytes) are treated as word
// characters so non-Latin text survives tokenization intact.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace formsql::text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

/// Trims and collapses internal whitespace runs to one space. Case kept.
std::string collapse_whitespace(std::string_view s);

/// Lowercases, maps every ASCII non-alphanumeric byte to a space and
/// collapses whitespace. "Cost_of-Goods  Sold" -> "cost of goods sold".
std::string normalize_phrase(std::string_view s);

/// Splits on single spaces; intended for normalize_phrase output.
std::vector<std::string> split_words(std::string_view normalized);

/// Retrieval tokenizer, word mode: maximal runs of word bytes, lowercased.
std::vector<std::string> word_tokens(std::string_view s);

/// Retrieval tokenizer, character n-gram mode. Each run of word bytes is cut
/// into overlapping n-code-point windows; runs shorter than n are emitted
/// whole.
std::vector<std::string> char_ngram_tokens(std::string_view s, std::size_t n);

/// UTF-8 code points as separate strings. Invalid lead bytes become single
/// byte units.
std::vector<std::string> code_points(std::string_view s);

std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein(a, b) / max(|a|, |b|); 1.0 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

/// Shortest fixed-notation text that reads back to exactly the same double.
std::string format_number(double value);

/// Naive English singular: "cities" -> "city", "boxes" -> "box",
/// "models" -> "model". Returns the input when no rule applies.
std::string singularize(std::string_view word);

bool is_word_byte(char c);

}  // namespace formsql::text
