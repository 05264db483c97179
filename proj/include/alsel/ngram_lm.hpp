// ngram_lm.hpp

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

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "alsel/corpus.hpp"
#include "alsel/error.hpp"
#include "alsel/text.hpp"

namespace alsel {

struct LmConfig {
  int order = 3;
  double alpha = 0.1;
  // Interpolation weights, one per order, summing to 1; empty means uniform.
  std::vector<double> lambda;
};

// Interpolated additive-smoothed causal n-gram model:
//
//   p(w | h) = sum_k lambda_k * (count_k(h_k, w) + alpha)
//                             / (count_k(h_k) + alpha * V)
//
// with h_k the last k-1 tokens of the history (BOS-padded), V the prediction
// vocabulary (training types + UNK + EOS). Every sentence contributes one
// prediction per token plus one EOS prediction; unseen tokens map to UNK in
// both target and context positions. Cross-entropy is the per-token mean of
// -ln p, in nats. Immutable after training.
class NGramModel {
 public:
  static constexpr std::uint32_t kUnk = 0;
  static constexpr std::uint32_t kEos = 1;
  static constexpr std::uint32_t kBos = 2;
  static constexpr std::uint32_t kFirstType = 3;

  static NGramModel train(const std::vector<Sentence>& corpus, const LmConfig& cfg) {
    NGramModel m;
    m.order_ = cfg.order;
    m.alpha_ = cfg.alpha;
    if (m.order_ < 1) throw DataError("model order must be >= 1");
    if (!(m.alpha_ > 0)) throw DataError("smoothing alpha must be > 0");
    if (corpus.empty()) throw DataError("cannot train a model on an empty corpus");
    m.lambda_ = normalize_lambda(cfg.lambda, m.order_);

    m.gram_counts_.resize(m.order_);
    m.ctx_counts_.resize(m.order_);
    std::vector<std::uint32_t> ids;
    for (const Sentence& s : corpus) {
      ids.clear();
      ids.reserve(s.size());
      for (const std::string& tok : s) ids.push_back(m.intern(tok));
      m.count_events(ids);
    }
    return m;
  }

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& lambda() const { return lambda_; }
  std::size_t vocab_types() const { return types_.size(); }
  // Prediction vocabulary: training types plus UNK and EOS.
  std::size_t prediction_vocab() const { return types_.size() + 2; }

  std::uint32_t token_id(const std::string& tok) const {
    const auto it = vocab_.find(tok);
    return it == vocab_.end() ? kUnk : it->second;
  }

  // Mean negative log-likelihood per token (EOS included), in nats.
  double cross_entropy(const Sentence& sentence) const {
    if (sentence.empty()) throw DataError("cannot score an empty sentence");
    std::vector<std::uint32_t> ids;
    ids.reserve(sentence.size());
    for (const std::string& tok : sentence) ids.push_back(token_id(tok));
    double nll = 0.0;
    for (std::size_t pos = 0; pos <= ids.size(); ++pos) {
      const std::uint32_t target = pos < ids.size() ? ids[pos] : kEos;
      nll -= std::log(token_prob(ids, pos, target));
    }
    return nll / static_cast<double>(ids.size() + 1);
  }

  // exp of the corpus-level token-weighted mean cross-entropy.
  double perplexity(const std::vector<Sentence>& corpus) const {
    if (corpus.empty()) throw DataError("cannot evaluate an empty corpus");
    double nll = 0.0;
    double tokens = 0.0;
    for (const Sentence& s : corpus) {
      const double events = static_cast<double>(s.size() + 1);
      nll += cross_entropy(s) * events;
      tokens += events;
    }
    return std::exp(nll / tokens);
  }

  // p(target | ids[0..pos-1]) with BOS padding on the left.
  double token_prob(const std::vector<std::uint32_t>& ids, std::size_t pos,
                    std::uint32_t target) const {
    const double v = static_cast<double>(prediction_vocab());
    double p = 0.0;
    std::string key;
    for (int k = 1; k <= order_; ++k) {
      key.clear();
      for (int j = k - 1; j >= 1; --j) {
        const std::int64_t at = static_cast<std::int64_t>(pos) - j;
        append_id(key, at < 0 ? kBos : ids[static_cast<std::size_t>(at)]);
      }
      const std::int64_t ctx = lookup(ctx_counts_[k - 1], key);
      append_id(key, target);
      const std::int64_t cnt = lookup(gram_counts_[k - 1], key);
      p += lambda_[k - 1] * (static_cast<double>(cnt) + alpha_) /
           (static_cast<double>(ctx) + alpha_ * v);
    }
    return p;
  }

  void save(std::ostream& out) const {
    out << "NGLM1\n";
    out << "order " << order_ << '\n';
    out << "alpha " << format_double(alpha_) << '\n';
    out << "lambda";
    for (double l : lambda_) out << ' ' << format_double(l);
    out << '\n';
    out << "vocab " << types_.size() << '\n';
    for (const std::string& t : types_) out << t << '\n';
    for (int k = 1; k <= order_; ++k) {
      const auto& table = gram_counts_[k - 1];
      std::vector<std::pair<std::vector<std::uint32_t>, std::int64_t>> entries;
      entries.reserve(table.size());
      for (const auto& [key, count] : table) entries.emplace_back(unpack(key), count);
      std::sort(entries.begin(), entries.end());
      out << "counts " << k << ' ' << entries.size() << '\n';
      for (const auto& [gram, count] : entries) {
        for (std::uint32_t id : gram) out << id << ' ';
        out << count << '\n';
      }
    }
    out << "end\n";
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    save(out);
  }

  static NGramModel load(std::istream& in, const std::string& name = "<stream>") {
    const auto fail = [&](const std::string& what) -> DataError {
      return DataError(name + ": " + what);
    };
    std::string line;
    if (!next_line(in, line) || line != "NGLM1") throw fail("not an NGLM1 model file");

    NGramModel m;
    std::string word;
    if (!next_line(in, line)) throw fail("truncated header");
    {
      std::istringstream ls(line);
      if (!(ls >> word >> m.order_) || word != "order" || m.order_ < 1)
        throw fail("bad order line");
    }
    if (!next_line(in, line)) throw fail("truncated header");
    {
      std::istringstream ls(line);
      if (!(ls >> word >> m.alpha_) || word != "alpha" || !(m.alpha_ > 0))
        throw fail("bad alpha line");
    }
    if (!next_line(in, line)) throw fail("truncated header");
    {
      std::istringstream ls(line);
      if (!(ls >> word) || word != "lambda") throw fail("bad lambda line");
      double l = 0;
      while (ls >> l) m.lambda_.push_back(l);
      m.lambda_ = normalize_lambda(m.lambda_, m.order_);
    }
    std::size_t n_types = 0;
    if (!next_line(in, line)) throw fail("truncated header");
    {
      std::istringstream ls(line);
      if (!(ls >> word >> n_types) || word != "vocab") throw fail("bad vocab line");
    }
    for (std::size_t i = 0; i < n_types; ++i) {
      if (!next_line(in, line) || line.empty()) throw fail("truncated vocabulary");
      m.vocab_.emplace(line, static_cast<std::uint32_t>(kFirstType + m.types_.size()));
      m.types_.push_back(line);
    }
    m.gram_counts_.resize(m.order_);
    m.ctx_counts_.resize(m.order_);
    for (int k = 1; k <= m.order_; ++k) {
      if (!next_line(in, line)) throw fail("missing counts section");
      std::istringstream ls(line);
      int kk = 0;
      std::size_t n_entries = 0;
      if (!(ls >> word >> kk >> n_entries) || word != "counts" || kk != k)
        throw fail("bad counts header for order " + std::to_string(k));
      for (std::size_t i = 0; i < n_entries; ++i) {
        if (!next_line(in, line)) throw fail("truncated counts");
        std::istringstream es(line);
        std::vector<std::uint32_t> gram(static_cast<std::size_t>(k));
        for (auto& id : gram)
          if (!(es >> id)) throw fail("bad count entry: " + line);
        std::int64_t count = 0;
        if (!(es >> count) || count <= 0) throw fail("bad count entry: " + line);
        std::string key;
        for (std::uint32_t id : gram) append_id(key, id);
        m.gram_counts_[k - 1][key] = count;
        m.ctx_counts_[k - 1][key.substr(0, key.size() - 4)] += count;
      }
    }
    if (!next_line(in, line) || line != "end") throw fail("missing end marker");
    return m;
  }

  static NGramModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    return load(in, path);
  }

 private:
  NGramModel() = default;

  static std::vector<double> normalize_lambda(const std::vector<double>& lambda,
                                              int order) {
    if (lambda.empty())
      return std::vector<double>(order, 1.0 / static_cast<double>(order));
    if (static_cast<int>(lambda.size()) != order)
      throw DataError("lambda needs exactly " + std::to_string(order) + " entries");
    double sum = 0.0;
    for (double l : lambda) {
      if (l < 0) throw DataError("lambda entries must be nonnegative");
      sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw DataError("lambda entries must sum to 1 (got " + format_double(sum) + ")");
    return lambda;
  }

  static void append_id(std::string& key, std::uint32_t id) {
    char buf[4];
    std::memcpy(buf, &id, 4);
    key.append(buf, 4);
  }

  static std::vector<std::uint32_t> unpack(const std::string& key) {
    std::vector<std::uint32_t> ids(key.size() / 4);
    for (std::size_t i = 0; i < ids.size(); ++i)
      std::memcpy(&ids[i], key.data() + 4 * i, 4);
    return ids;
  }

  static std::int64_t lookup(const std::unordered_map<std::string, std::int64_t>& table,
                             const std::string& key) {
    const auto it = table.find(key);
    return it == table.end() ? 0 : it->second;
  }

  static bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::uint32_t intern(const std::string& tok) {
    const auto it = vocab_.find(tok);
    if (it != vocab_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(kFirstType + types_.size());
    vocab_.emplace(tok, id);
    types_.push_back(tok);
    return id;
  }

  // One event per position (each token, then EOS), counted at every order.
  void count_events(const std::vector<std::uint32_t>& ids) {
    std::string key;
    for (std::size_t pos = 0; pos <= ids.size(); ++pos) {
      const std::uint32_t target = pos < ids.size() ? ids[pos] : kEos;
      for (int k = 1; k <= order_; ++k) {
        key.clear();
        for (int j = k - 1; j >= 1; --j) {
          const std::int64_t at = static_cast<std::int64_t>(pos) - j;
          append_id(key, at < 0 ? kBos : ids[static_cast<std::size_t>(at)]);
        }
        ++ctx_counts_[k - 1][key];
        append_id(key, target);
        ++gram_counts_[k - 1][key];
      }
    }
  }

  int order_ = 0;
  double alpha_ = 0.0;
  std::vector<double> lambda_;
  std::vector<std::string> types_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
  // Indexed by k-1; keys are packed little-endian u32 id sequences.
  std::vector<std::unordered_map<std::string, std::int64_t>> gram_counts_;
  std::vector<std::unordered_map<std::string, std::int64_t>> ctx_counts_;
};

}  // namespace alsel
