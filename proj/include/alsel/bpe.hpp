// bpe.hpp

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
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "alsel/corpus.hpp"
#include "alsel/error.hpp"
#include "alsel/text.hpp"

namespace alsel {

using Symbol = std::string;
using SymbolPair = std::pair<Symbol, Symbol>;

struct SymbolPairHash {
  std::size_t operator()(const SymbolPair& p) const {
    const std::size_t a = std::hash<std::string>{}(p.first);
    const std::size_t b = std::hash<std::string>{}(p.second);
    return a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  }
};

// Subword pieces of one sentence. Non-final pieces of a word carry the
// continuation marker `@@`.
using EncodedSentence = std::vector<std::string>;

// Dictionary words that the current merge table splits into >1 piece.
using RareWordSet = std::unordered_set<std::string>;

// Ordered merge rules; rank = position. Immutable after construction.
class MergeTable {
 public:
  static constexpr std::size_t kNoRank = std::numeric_limits<std::size_t>::max();

  MergeTable() = default;

  explicit MergeTable(std::vector<SymbolPair> merges)
      : merges_(std::move(merges)) {
    ranks_.reserve(merges_.size());
    for (std::size_t r = 0; r < merges_.size(); ++r) {
      if (!ranks_.emplace(merges_[r], r).second)
        throw DataError("duplicate merge rule: " + merges_[r].first + " " +
                        merges_[r].second);
    }
  }

  const std::vector<SymbolPair>& merges() const { return merges_; }
  std::size_t size() const { return merges_.size(); }

  std::size_t rank_of(const Symbol& left, const Symbol& right) const {
    const auto it = ranks_.find(SymbolPair(left, right));
    return it == ranks_.end() ? kNoRank : it->second;
  }

  void save(std::ostream& out) const {
    out << "#version: dp-bpe 1\n";
    for (const auto& [left, right] : merges_) out << left << ' ' << right << '\n';
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write merge table: " + path);
    save(out);
  }

  static MergeTable load(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw DataError(name + ": empty merge table file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "#version: dp-bpe 1")
      throw DataError(name + ": missing '#version: dp-bpe 1' header");
    std::vector<SymbolPair> merges;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> parts = split_ws(line);
      if (parts.size() != 2)
        throw DataError(name + ": line " + std::to_string(lineno) +
                        ": expected 'left right'");
      merges.emplace_back(std::move(parts[0]), std::move(parts[1]));
    }
    return MergeTable(std::move(merges));
  }

  static MergeTable load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open merge table: " + path);
    return load(in, path);
  }

 private:
  std::vector<SymbolPair> merges_;
  std::unordered_map<SymbolPair, std::size_t, SymbolPairHash> ranks_;
};

namespace detail {

// Replaces every left-to-right occurrence of `pair` with the joined symbol.
inline std::vector<Symbol> merge_pair(const std::vector<Symbol>& syms,
                                      const SymbolPair& pair) {
  std::vector<Symbol> out;
  out.reserve(syms.size());
  std::size_t i = 0;
  while (i < syms.size()) {
    if (i + 1 < syms.size() && syms[i] == pair.first &&
        syms[i + 1] == pair.second) {
      out.push_back(syms[i] + syms[i + 1]);
      i += 2;
    } else {
      out.push_back(syms[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace detail

// Splits one word into subword pieces (no continuation markers yet): start
// from UTF-8 code points, then repeatedly apply the lowest-ranked merge
// present anywhere in the word.
inline std::vector<Symbol> encode_word(const std::string& word,
                                       const MergeTable& table) {
  std::vector<Symbol> syms = utf8_chars(word);
  if (syms.size() <= 1) return {word};
  while (syms.size() >= 2) {
    std::size_t best = MergeTable::kNoRank;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i)
      best = std::min(best, table.rank_of(syms[i], syms[i + 1]));
    if (best == MergeTable::kNoRank) break;
    syms = detail::merge_pair(syms, table.merges()[best]);
  }
  return syms;
}

namespace detail {

inline void append_pieces(EncodedSentence& out, const std::vector<Symbol>& pieces) {
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) out.push_back(pieces[i] + "@@");
  out.push_back(pieces.back());
}

}  // namespace detail

inline EncodedSentence apply_bpe(const Sentence& sentence, const MergeTable& table) {
  EncodedSentence out;
  out.reserve(sentence.size());
  for (const std::string& word : sentence)
    detail::append_pieces(out, encode_word(word, table));
  return out;
}

// Learns merge rules by greedy most-frequent-pair merging over word types
// weighted by frequency. Ties break on the lexicographically smallest
// (left, right) pair; learning stops early once no pair occurs twice.
inline MergeTable learn_bpe(const std::vector<const MonoCorpus*>& corpora,
                            std::size_t num_merges) {
  if (num_merges < 1) throw DataError("num_merges must be >= 1");
  std::unordered_map<std::string, std::int64_t> word_freqs;
  for (const MonoCorpus* corpus : corpora)
    for (const Sentence& s : corpus->sentences)
      for (const std::string& w : s) ++word_freqs[w];
  if (word_freqs.empty()) throw DataError("cannot learn merges from an empty corpus");

  std::vector<std::vector<Symbol>> words;
  std::vector<std::int64_t> freqs;
  words.reserve(word_freqs.size());
  for (auto& [word, freq] : word_freqs) {
    words.push_back(utf8_chars(word));
    freqs.push_back(freq);
  }

  // pair -> corpus count; pair -> (word index -> adjacency count), so a merge
  // only revisits the words it touches.
  std::unordered_map<SymbolPair, std::int64_t, SymbolPairHash> counts;
  std::unordered_map<SymbolPair, std::unordered_map<std::size_t, std::int64_t>,
                     SymbolPairHash>
      where;
  const auto add_word = [&](std::size_t w, std::int64_t sign) {
    const std::vector<Symbol>& syms = words[w];
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      SymbolPair p(syms[i], syms[i + 1]);
      counts[p] += sign * freqs[w];
      auto& occ = where[p][w];
      occ += sign;
      if (occ == 0) {
        where[p].erase(w);
        if (where[p].empty()) where.erase(p);
      }
    }
  };
  for (std::size_t w = 0; w < words.size(); ++w) add_word(w, +1);

  std::vector<SymbolPair> merges;
  merges.reserve(num_merges);
  for (std::size_t m = 0; m < num_merges; ++m) {
    const SymbolPair* best = nullptr;
    std::int64_t best_count = 0;
    for (const auto& [pair, count] : counts) {
      if (count <= 0) continue;
      if (count > best_count ||
          (count == best_count && best != nullptr && pair < *best)) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr || best_count < 2) break;
    const SymbolPair chosen = *best;
    merges.push_back(chosen);

    std::vector<std::size_t> affected;
    if (const auto it = where.find(chosen); it != where.end()) {
      affected.reserve(it->second.size());
      for (const auto& [w, occ] : it->second) affected.push_back(w);
    }
    for (std::size_t w : affected) {
      std::vector<Symbol> merged = detail::merge_pair(words[w], chosen);
      if (merged == words[w]) continue;
      add_word(w, -1);
      words[w] = std::move(merged);
      add_word(w, +1);
    }
    counts.erase(chosen);
  }
  return MergeTable(std::move(merges));
}

inline MergeTable learn_bpe(const MonoCorpus& corpus, std::size_t num_merges) {
  return learn_bpe(std::vector<const MonoCorpus*>{&corpus}, num_merges);
}

// Dictionary words on one side that the table splits into multiple pieces.
inline RareWordSet compute_rare_words(const std::vector<std::string>& dictionary_side,
                                      const MergeTable& table) {
  RareWordSet rare;
  for (const std::string& w : dictionary_side)
    if (encode_word(w, table).size() > 1) rare.insert(w);
  return rare;
}

inline bool contains_rare_word(const Sentence& sentence, const RareWordSet& rare) {
  if (rare.empty()) return false;
  for (const std::string& w : sentence)
    if (rare.count(w)) return true;
  return false;
}

// Encodes with rare words kept as single whole tokens; everything else gets
// standard BPE.
inline EncodedSentence apply_bpe_protected(const Sentence& sentence,
                                           const MergeTable& table,
                                           const RareWordSet& rare) {
  EncodedSentence out;
  out.reserve(sentence.size());
  for (const std::string& word : sentence) {
    if (rare.count(word)) {
      out.push_back(word);
    } else {
      detail::append_pieces(out, encode_word(word, table));
    }
  }
  return out;
}

// One encoding when the sentence has no rare word; otherwise two, protected
// variant first, standard second.
inline std::vector<EncodedSentence> dp_bpe_encode_mono(const Sentence& sentence,
                                                       const MergeTable& table,
                                                       const RareWordSet& rare) {
  if (!contains_rare_word(sentence, rare)) return {apply_bpe(sentence, table)};
  return {apply_bpe_protected(sentence, table, rare), apply_bpe(sentence, table)};
}

using EncodedPair = std::pair<EncodedSentence, EncodedSentence>;

// Pair rule: either side containing a rare word yields two encoded pairs,
// (protected, protected) then (standard, standard); a side without rare words
// is identical in both.
inline std::vector<EncodedPair> dp_bpe_encode_parallel(const SentencePair& pair,
                                                       const MergeTable& table_src,
                                                       const MergeTable& table_tgt,
                                                       const RareWordSet& rare_src,
                                                       const RareWordSet& rare_tgt) {
  const bool any_rare = contains_rare_word(pair.source, rare_src) ||
                        contains_rare_word(pair.target, rare_tgt);
  if (!any_rare)
    return {{apply_bpe(pair.source, table_src), apply_bpe(pair.target, table_tgt)}};
  return {{apply_bpe_protected(pair.source, table_src, rare_src),
           apply_bpe_protected(pair.target, table_tgt, rare_tgt)},
          {apply_bpe(pair.source, table_src), apply_bpe(pair.target, table_tgt)}};
}

// Inverse of encoding: glue continuation pieces back into words. The bare
// token `@@` is literal content (an encoded continuation piece is never
// empty), so only tokens longer than the marker continue a word.
inline Sentence decode(const EncodedSentence& encoded) {
  Sentence out;
  std::string word;
  bool pending = false;
  for (const std::string& tok : encoded) {
    if (tok.size() > 2 && std::string_view(tok).substr(tok.size() - 2) == "@@") {
      word.append(tok, 0, tok.size() - 2);
      pending = true;
    } else {
      word += tok;
      out.push_back(std::move(word));
      word.clear();
      pending = false;
    }
  }
  if (pending) throw DataError("dangling '@@' piece at end of sentence");
  return out;
}

}  // namespace alsel
