// corpus.hpp

// Copyright 2026  The alsel Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "alsel/error.hpp"
#include "alsel/rng.hpp"
#include "alsel/text.hpp"

namespace alsel {

// Index of a sentence inside its owning pool: file order, starting at 0.
using SentenceId = std::uint32_t;

using Sentence = std::vector<std::string>;

// Monolingual corpus, whitespace-pre-tokenized, one sentence per line.
// Immutable after loading.
struct MonoCorpus {
  std::vector<Sentence> sentences;
  std::size_t skipped_blank_lines = 0;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
  const Sentence& operator[](std::size_t i) const { return sentences[i]; }
};

struct SentencePair {
  Sentence source;
  Sentence target;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs[i]; }

  std::vector<Sentence> sources() const {
    std::vector<Sentence> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.source);
    return out;
  }
  std::vector<Sentence> targets() const {
    std::vector<Sentence> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(p.target);
    return out;
  }
};

struct DictEntry {
  std::string source;
  std::string target;
};

// Single word-to-word translation pairs; multi-word entries are dropped at
// load time, duplicates removed.
struct Dictionary {
  std::vector<DictEntry> entries;
  std::size_t dropped_multiword = 0;
  std::size_t dropped_duplicate = 0;

  std::size_t size() const { return entries.size(); }

  std::vector<std::string> source_words() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& e : entries)
      if (seen.insert(e.source).second) out.push_back(e.source);
    return out;
  }
  std::vector<std::string> target_words() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& e : entries)
      if (seen.insert(e.target).second) out.push_back(e.target);
    return out;
  }
};

// Disjoint random halves of a pool. half1 takes the extra sentence when the
// pool size is odd. Both halves are kept sorted.
struct PoolSplit {
  std::vector<SentenceId> half1;
  std::vector<SentenceId> half2;
  std::uint64_t seed = 0;

  // 1 or 2, or 0 when the id is in neither half.
  int half_of(SentenceId id) const {
    if (std::binary_search(half1.begin(), half1.end(), id)) return 1;
    if (std::binary_search(half2.begin(), half2.end(), id)) return 2;
    return 0;
  }
};

inline MonoCorpus load_mono(const std::string& path) {
  MonoCorpus corpus;
  for (const std::string& line : read_lines(path)) {
    Sentence tokens = split_ws(line);
    if (tokens.empty()) {
      ++corpus.skipped_blank_lines;
      continue;
    }
    corpus.sentences.push_back(std::move(tokens));
  }
  if (corpus.sentences.empty())
    throw DataError("no usable lines in " + path);
  return corpus;
}

inline ParallelCorpus load_parallel(const std::string& src_path,
                                    const std::string& tgt_path) {
  const std::vector<std::string> src_lines = read_lines(src_path);
  const std::vector<std::string> tgt_lines = read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size())
    throw DataError("line-count mismatch " + std::to_string(src_lines.size()) +
                    " vs " + std::to_string(tgt_lines.size()) + " (" +
                    src_path + ", " + tgt_path + ")");
  ParallelCorpus corpus;
  corpus.pairs.reserve(src_lines.size());
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    SentencePair pair{split_ws(src_lines[i]), split_ws(tgt_lines[i])};
    if (pair.source.empty())
      throw DataError("empty source on line " + std::to_string(i + 1) +
                      " of " + src_path);
    if (pair.target.empty())
      throw DataError("empty target on line " + std::to_string(i + 1) +
                      " of " + tgt_path);
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

// TSV `source<TAB>target`, one entry per line; '#' starts a comment line.
inline Dictionary load_dictionary(const std::string& path) {
  Dictionary dict;
  std::unordered_set<std::string> seen;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t p = 0; p <= line.size(); ++p) {
      if (p == line.size() || line[p] == '\t') {
        cols.push_back(line.substr(start, p - start));
        start = p + 1;
      }
    }
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw DataError("malformed dictionary line " + std::to_string(i + 1) +
                      " in " + path + " (expected source<TAB>target)");
    const auto has_space = [](const std::string& w) {
      for (unsigned char c : w)
        if (std::isspace(c)) return true;
      return false;
    };
    if (has_space(cols[0]) || has_space(cols[1])) {
      ++dict.dropped_multiword;
      continue;
    }
    if (!seen.insert(cols[0] + '\t' + cols[1]).second) {
      ++dict.dropped_duplicate;
      continue;
    }
    dict.entries.push_back({std::move(cols[0]), std::move(cols[1])});
  }
  return dict;
}

// Partitions the given ids into two random halves; a pure function of
// (ids, seed).
inline PoolSplit split_ids(std::vector<SentenceId> ids, std::uint64_t seed) {
  if (ids.size() < 2)
    throw DataError("cannot split a pool of " + std::to_string(ids.size()) +
                    " sentences into halves");
  SplitMix64 rng(seed);
  rng.shuffle(ids);
  const std::size_t h1 = (ids.size() + 1) / 2;
  PoolSplit split;
  split.seed = seed;
  split.half1.assign(ids.begin(), ids.begin() + h1);
  split.half2.assign(ids.begin() + h1, ids.end());
  std::sort(split.half1.begin(), split.half1.end());
  std::sort(split.half2.begin(), split.half2.end());
  return split;
}

inline PoolSplit split_halves(const MonoCorpus& pool, std::uint64_t seed) {
  std::vector<SentenceId> ids(pool.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return split_ids(std::move(ids), seed);
}

}  // namespace alsel
