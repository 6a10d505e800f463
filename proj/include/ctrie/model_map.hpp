// Sequentially exact reference model: the abstract map the trie must agree
// with, one operation at a time.

#ifndef CTRIE_MODEL_MAP_HPP_INCLUDED
#define CTRIE_MODEL_MAP_HPP_INCLUDED

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ctrie {

class ModelMap {
 public:
  void insert(std::uint64_t k, std::uint64_t v) { map_[k] = v; }

  std::optional<std::uint64_t> lookup(std::uint64_t k) const {
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint64_t> remove(std::uint64_t k) {
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    std::uint64_t v = it->second;
    map_.erase(it);
    return v;
  }

  std::size_t size() const { return map_.size(); }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> entries() const {
    return {map_.begin(), map_.end()};
  }

 private:
  std::unordered_map<std::uint64_t, std::uint64_t> map_;
};

}  // namespace ctrie

#endif  // CTRIE_MODEL_MAP_HPP_INCLUDED
