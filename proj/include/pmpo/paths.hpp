#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "pmpo/graphs.hpp"

namespace pmpo {

/// A path on G written as the list of G-edge indices it walks along.  Paths
/// start in V0 and alternate: odd steps follow an edge forward (V0 -> V3),
/// even steps backward (V3 -> V0).
using Word = std::vector<std::uint32_t>;

/// End vertex of a word started at `start` (index into V0), or nullopt when
/// the word is not a walk.  The end lies in V3 for odd length, V0 otherwise.
std::optional<std::size_t> walk_end(const LayeredGraph& g, std::size_t start, const Word& w);

/// All walks of `length` steps from `start`, in lexicographic order.
std::vector<Word> walks_from(const LayeredGraph& g, std::size_t start, std::size_t length);

/// Closed walks of length 2k grouped by base vertex x in V0; within a group
/// words are lexicographic.
class LoopBasis {
 public:
  LoopBasis(const LayeredGraph& g, std::size_t k);

  std::size_t k() const { return k_; }
  std::size_t size() const { return words_.size(); }
  const Word& word(std::size_t i) const { return words_[i]; }
  std::size_t base(std::size_t i) const { return base_[i]; }
  /// Index range [begin, end) of the loops based at x.
  std::pair<std::size_t, std::size_t> block(std::size_t x) const { return {offset_[x], offset_[x + 1]}; }
  std::optional<std::size_t> find(const Word& w) const;

 private:
  std::size_t k_;
  std::vector<Word> words_;
  std::vector<std::size_t> base_;
  std::vector<std::size_t> offset_;
  std::map<Word, std::size_t> index_;
};

/// B_k: strings (p1, p2) of two length-k walks from the same x in V0 with a
/// common end, ordered by x, then p1, then p2.
class StringBasis {
 public:
  StringBasis(const LayeredGraph& g, std::size_t k);

  struct Entry {
    std::size_t x;
    std::size_t end;  // common end vertex (V3 for odd k, V0 for even k)
    std::size_t p1;   // indices into walks(x)
    std::size_t p2;
  };

  std::size_t k() const { return k_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t num_bases() const { return walks_.size(); }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  /// Walks of length k from x, lexicographic.
  const std::vector<Word>& walks(std::size_t x) const { return walks_[x]; }
  std::size_t walk_end(std::size_t x, std::size_t p) const { return ends_[x][p]; }
  std::pair<std::size_t, std::size_t> block(std::size_t x) const { return {offset_[x], offset_[x + 1]}; }
  /// Index of (p1, p2) over x, or nullopt when the ends differ.
  std::optional<std::size_t> find(std::size_t x, std::size_t p1, std::size_t p2) const;
  std::optional<std::size_t> find_walk(std::size_t x, const Word& w) const;

 private:
  std::size_t k_;
  std::vector<std::vector<Word>> walks_;
  std::vector<std::vector<std::size_t>> ends_;
  std::vector<std::map<Word, std::size_t>> walk_index_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> offset_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> index_;
};

}  // namespace pmpo
