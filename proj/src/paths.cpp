#include "pmpo/paths.hpp"

#include <algorithm>
#include <tuple>

#include "pmpo/linalg.hpp"

namespace pmpo {

std::optional<std::size_t> walk_end(const LayeredGraph& g, std::size_t start, const Word& w) {
  std::size_t v = start;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= g.num_edges()) return std::nullopt;
    const Edge& e = g.edge(w[i]);
    if (i % 2 == 0) {
      if (e.source != v) return std::nullopt;
      v = e.range;
    } else {
      if (e.range != v) return std::nullopt;
      v = e.source;
    }
  }
  return v;
}

std::vector<Word> walks_from(const LayeredGraph& g, std::size_t start, std::size_t length) {
  std::vector<Word> done{Word{}};
  std::vector<std::size_t> ends{start};
  for (std::size_t step = 0; step < length; ++step) {
    std::vector<Word> next;
    std::vector<std::size_t> next_ends;
    for (std::size_t i = 0; i < done.size(); ++i) {
      const auto edges = step % 2 == 0 ? g.edges_from(ends[i]) : g.edges_into(ends[i]);
      for (std::size_t e : edges) {
        Word w = done[i];
        w.push_back(static_cast<std::uint32_t>(e));
        next.push_back(std::move(w));
        next_ends.push_back(step % 2 == 0 ? g.edge(e).range : g.edge(e).source);
      }
    }
    done = std::move(next);
    ends = std::move(next_ends);
  }
  std::vector<std::size_t> order(done.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return done[a] < done[b]; });
  std::vector<Word> out;
  out.reserve(done.size());
  for (std::size_t i : order) out.push_back(std::move(done[i]));
  return out;
}

LoopBasis::LoopBasis(const LayeredGraph& g, std::size_t k) : k_(k) {
  if (k == 0) throw InputError("loop length must be positive");
  offset_.push_back(0);
  for (std::size_t x = 0; x < g.num_sources(); ++x) {
    for (Word& w : walks_from(g, x, 2 * k)) {
      if (walk_end(g, x, w) != x) continue;
      index_.emplace(w, words_.size());
      words_.push_back(std::move(w));
      base_.push_back(x);
    }
    offset_.push_back(words_.size());
  }
}

std::optional<std::size_t> LoopBasis::find(const Word& w) const {
  const auto it = index_.find(w);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StringBasis::StringBasis(const LayeredGraph& g, std::size_t k) : k_(k) {
  if (k == 0) throw InputError("string length must be positive");
  offset_.push_back(0);
  for (std::size_t x = 0; x < g.num_sources(); ++x) {
    walks_.push_back(walks_from(g, x, k));
    auto& ends = ends_.emplace_back();
    auto& windex = walk_index_.emplace_back();
    const auto& ws = walks_.back();
    for (std::size_t p = 0; p < ws.size(); ++p) {
      ends.push_back(*pmpo::walk_end(g, x, ws[p]));
      windex.emplace(ws[p], p);
    }
    for (std::size_t p1 = 0; p1 < ws.size(); ++p1) {
      for (std::size_t p2 = 0; p2 < ws.size(); ++p2) {
        if (ends[p1] != ends[p2]) continue;
        index_.emplace(std::make_tuple(x, p1, p2), entries_.size());
        entries_.push_back({x, ends[p1], p1, p2});
      }
    }
    offset_.push_back(entries_.size());
  }
}

std::optional<std::size_t> StringBasis::find(std::size_t x, std::size_t p1, std::size_t p2) const {
  const auto it = index_.find(std::make_tuple(x, p1, p2));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> StringBasis::find_walk(std::size_t x, const Word& w) const {
  if (x >= walk_index_.size()) return std::nullopt;
  const auto it = walk_index_[x].find(w);
  if (it == walk_index_[x].end()) return std::nullopt;
  return it->second;
}

}  // namespace pmpo
