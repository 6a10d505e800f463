// Shared fixture helpers: a trie instantiation with a hand-computable hash
// and raw node builders for structural cases.

#ifndef CTRIE_TESTS_TEST_UTIL_HPP
#define CTRIE_TESTS_TEST_UTIL_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "ctrie/ctrie.hpp"

namespace tutil {

// Hash = low 32 bits of the key: structures are hand-computable and full
// 32-bit collisions can be engineered via the high key bits.
struct IdentityHash {
  std::uint32_t operator()(std::uint64_t k) const {
    return static_cast<std::uint32_t>(k);
  }
};

using Trie = ctrie::Ctrie<std::uint64_t, std::uint64_t, IdentityHash>;
using Node = Trie::Node;
using INode = Trie::INode;
using CNode = Trie::CNode;
using SNode = Trie::SNode;
using Collision = Trie::Collision;

inline SNode* sn(std::uint64_t key, std::uint64_t value, bool tombed = false) {
  return new SNode(key, value, static_cast<std::uint32_t>(key), tombed);
}

// Branches must be listed in ascending bit order of `bmp`.
inline CNode* cn_of(std::uint32_t bmp, std::vector<Node*> branches) {
  auto arr = std::make_unique<Node*[]>(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i) arr[i] = branches[i];
  return new CNode(bmp, static_cast<std::uint32_t>(branches.size()),
                   std::move(arr));
}

inline INode* in_of(Node* main) { return new INode(main); }

// Deep free for fixtures that never went through a Ctrie.
inline void free_deep(Node* n) {
  if (n == nullptr) return;
  switch (n->kind) {
    case ctrie::NodeKind::inode: {
      auto* in = static_cast<INode*>(n);
      free_deep(in->main.load());
      delete in;
      return;
    }
    case ctrie::NodeKind::cnode: {
      auto* cn = static_cast<CNode*>(n);
      for (std::uint32_t i = 0; i < cn->count; ++i) free_deep(cn->branch(i));
      delete cn;
      return;
    }
    case ctrie::NodeKind::collision: {
      auto* col = static_cast<Collision*>(n);
      for (SNode* e : col->entries) delete e;
      delete col;
      return;
    }
    case ctrie::NodeKind::snode:
      delete static_cast<SNode*>(n);
      return;
  }
}

}  // namespace tutil

#endif
