// Quiescent-state structural checks for the concurrent trie: invariant
// validation, state metrics, tip accounting, the definitional has-key
// relation, set export, and longest-path traces.
//
// Everything here walks raw node pointers and must only run while no other
// thread mutates the trie; that quiescence is the caller's obligation.
//
// Checked invariants, reported by id:
//   INV1          an INode main is a CNode, a tombed SNode, a well-formed
//                 Collision, or absent
//   INV2          popcount(cn.bmp) equals the branch array length
//   INV3          every set bit maps to a branch that is an INode or a
//                 non-tombed SNode
//   INV4          a binding stored under a CNode sits on its hash path
//   INV5          a tombed binding below an INode sits on its hash path
//   ROOT-NOT-TOMB the root INode is never a tomb-inode
//   DENSE-ORDER   a binding's chunk at its own level matches the bitmap bit
//                 its slot is filed under

#ifndef CTRIE_VALIDATE_HPP_INCLUDED
#define CTRIE_VALIDATE_HPP_INCLUDED

#include <bit>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctrie/ctrie.hpp"

namespace ctrie {

struct Violation {
  std::string invariant;            // id from the table above
  std::vector<std::uint32_t> path;  // chunk indices from the root
  std::string detail;
};

struct InvariantReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// State counters: n / t / l / r / d.
struct StateMetrics {
  std::uint64_t null_inodes = 0;        // n
  std::uint64_t tomb_inodes = 0;        // t
  std::uint64_t live_inodes = 0;        // l
  std::uint64_t single_tips = 0;        // r
  std::uint64_t total_path_length = 0;  // d: edges of the reachable tree

  bool clean() const { return null_inodes == 0 && tomb_inodes == 0; }
  bool operator==(const StateMetrics&) const = default;
};

enum class PathTerminal : std::uint8_t {
  empty,
  snode,
  cnode,
  null_inode,
  collision,
};

struct PathStep {
  NodeKind kind;
};

struct PathTrace {
  std::vector<PathStep> nodes;
  PathTerminal terminal = PathTerminal::empty;
};

namespace vdetail {

inline constexpr unsigned kDepthCap = 64;  // far beyond any valid trie

inline std::string join_path(const std::vector<std::uint32_t>& path) {
  std::string s;
  for (std::uint32_t c : path) {
    if (!s.empty()) s += '.';
    s += std::to_string(c);
  }
  return s.empty() ? "<root>" : s;
}

template <class Trie>
struct Walker {
  using Node = typename Trie::Node;
  using INode = typename Trie::INode;
  using CNode = typename Trie::CNode;
  using SNode = typename Trie::SNode;
  using Collision = typename Trie::Collision;

  static const Node* main_of(const INode* in) {
    return in->main.load(std::memory_order_relaxed);
  }

  // hash_chunk is only defined for in-range levels; malformed fixtures can
  // present deeper nodes, so keep every access guarded.
  static bool prefix_matches(std::uint32_t hc,
                             const std::vector<std::uint32_t>& path) {
    std::uint32_t lev = 0;
    for (std::uint32_t chunk : path) {
      if (lev > kMaxLevel) return false;
      if (hash_chunk(hc, lev) != chunk) return false;
      lev += kBranchBits;
    }
    return true;
  }
};

template <class Trie>
struct Validator : Walker<Trie> {
  using W = Walker<Trie>;
  using typename W::CNode;
  using typename W::Collision;
  using typename W::INode;
  using typename W::Node;
  using typename W::SNode;

  const typename Trie::key_equal& eq;
  InvariantReport report;

  explicit Validator(const typename Trie::key_equal& key_eq) : eq(key_eq) {}

  void flag(const char* id, const std::vector<std::uint32_t>& path,
            std::string detail) {
    report.violations.push_back(Violation{id, path, std::move(detail)});
  }

  void run(const INode* root) {
    if (root == nullptr) return;
    const Node* m = W::main_of(root);
    if (m != nullptr && m->kind == NodeKind::snode &&
        static_cast<const SNode*>(m)->tombed)
      flag("ROOT-NOT-TOMB", {}, "root inode holds a tombed binding");
    visit_inode(root, 0, {}, 0);
  }

  void visit_inode(const INode* in, std::uint32_t lev,
                   std::vector<std::uint32_t> path, unsigned depth) {
    if (depth > kDepthCap) {
      flag("INV1", path, "traversal depth cap exceeded; structure is cyclic "
                         "or far deeper than any hash path allows");
      return;
    }
    const Node* m = W::main_of(in);
    if (m == nullptr) return;  // null-inode
    switch (m->kind) {
      case NodeKind::snode: {
        const SNode* sn = static_cast<const SNode*>(m);
        if (!sn->tombed) {
          flag("INV1", path, "inode main is a live binding");
          return;
        }
        if (!W::prefix_matches(sn->hash, path))
          flag("INV5", path,
               "tombed binding off its hash path (hash=" +
                   std::to_string(sn->hash) + ")");
        return;
      }
      case NodeKind::cnode:
        visit_cnode(static_cast<const CNode*>(m), lev, std::move(path),
                    depth + 1);
        return;
      case NodeKind::collision:
        visit_collision(static_cast<const Collision*>(m), path);
        return;
      case NodeKind::inode:
        flag("INV1", path, "inode main is another inode");
        return;
    }
  }

  void visit_collision(const Collision* col,
                       const std::vector<std::uint32_t>& path) {
    if (col->entries.size() < 2)
      flag("INV1", path, "collision node with fewer than two entries");
    for (std::size_t a = 0; a < col->entries.size(); ++a) {
      const SNode* sn = col->entries[a];
      if (sn->tombed) flag("INV1", path, "tombed binding inside collision");
      if (sn->hash != col->hash)
        flag("INV1", path, "collision entry hash differs from node hash");
      if (!W::prefix_matches(sn->hash, path))
        flag("INV5", path, "collision entry off its hash path");
      for (std::size_t b = a + 1; b < col->entries.size(); ++b)
        if (eq(sn->key, col->entries[b]->key))
          flag("INV1", path, "duplicate key inside collision");
    }
  }

  void visit_cnode(const CNode* cn, std::uint32_t lev,
                   std::vector<std::uint32_t> path, unsigned depth) {
    const auto pop = static_cast<std::uint32_t>(std::popcount(cn->bmp));
    if (pop != cn->count)
      flag("INV2", path,
           "bitmap popcount " + std::to_string(pop) + " != array length " +
               std::to_string(cn->count));
    if (lev > kMaxLevel) {
      flag("INV3", path, "cnode below the deepest hash level");
      return;
    }
    std::uint32_t bits = cn->bmp;
    const std::uint32_t usable = pop < cn->count ? pop : cn->count;
    for (std::uint32_t j = 0; j < usable; ++j) {
      const std::uint32_t flag_bit = bits & (0u - bits);
      bits ^= flag_bit;
      const auto r = static_cast<std::uint32_t>(std::countr_zero(flag_bit));
      const Node* b = cn->branches[j];
      if (b == nullptr) {
        flag("INV3", path, "empty slot under a set bit");
        continue;
      }
      switch (b->kind) {
        case NodeKind::snode: {
          const SNode* sn = static_cast<const SNode*>(b);
          if (sn->tombed) {
            flag("INV3", path, "tombed binding stored as a branch");
            break;
          }
          if (hash_chunk(sn->hash, lev) != r)
            flag("DENSE-ORDER", path,
                 "binding filed under bit " + std::to_string(r) +
                     " but its chunk is " +
                     std::to_string(hash_chunk(sn->hash, lev)));
          else if (!W::prefix_matches(sn->hash, path))
            flag("INV4", path,
                 "binding off its hash path (hash=" +
                     std::to_string(sn->hash) + ")");
          break;
        }
        case NodeKind::inode: {
          auto sub_path = path;
          sub_path.push_back(r);
          visit_inode(static_cast<const INode*>(b), lev + kBranchBits,
                      std::move(sub_path), depth + 1);
          break;
        }
        default:
          flag("INV3", path, "branch is neither an inode nor a binding");
          break;
      }
    }
  }
};

template <class Trie>
struct MetricsWalker : Walker<Trie> {
  using W = Walker<Trie>;
  using typename W::CNode;
  using typename W::Collision;
  using typename W::INode;
  using typename W::Node;
  using typename W::SNode;

  StateMetrics m;
  // (cnode, arity of the first ancestor cnode; 0 when the root cnode)
  std::vector<std::pair<const CNode*, std::uint32_t>> cnodes;

  void run(const INode* root) {
    if (root == nullptr) return;
    m.total_path_length += 1;  // root cell -> inode
    visit_inode(root, 0, 0);
  }

  void visit_inode(const INode* in, std::uint32_t parent_arity,
                   unsigned depth) {
    if (depth > kDepthCap) return;
    const Node* main = W::main_of(in);
    if (main == nullptr) {
      m.null_inodes += 1;
      return;
    }
    m.total_path_length += 1;  // inode -> main
    if (main->kind == NodeKind::snode) {
      m.tomb_inodes += 1;  // tombed by INV1; a live binding here is invalid
      return;
    }
    m.live_inodes += 1;
    if (main->kind == NodeKind::cnode) {
      const CNode* cn = static_cast<const CNode*>(main);
      cnodes.emplace_back(cn, parent_arity);
      for (std::uint32_t j = 0; j < cn->count; ++j) {
        m.total_path_length += 1;  // cnode -> branch
        const Node* b = cn->branches[j];
        if (b != nullptr && b->kind == NodeKind::inode)
          visit_inode(static_cast<const INode*>(b), cn->count, depth + 1);
      }
    }
  }

  bool is_single_tip(const CNode* cn, unsigned depth) const {
    if (depth > kDepthCap) return false;
    if (cn->count == 0) return true;
    if (cn->count != 1) return false;
    const Node* b = cn->branches[0];
    if (b == nullptr || b->kind != NodeKind::inode) return false;
    const Node* main = W::main_of(static_cast<const INode*>(b));
    if (main == nullptr) return false;
    if (main->kind == NodeKind::snode)
      return static_cast<const SNode*>(main)->tombed;
    if (main->kind == NodeKind::cnode)
      return is_single_tip(static_cast<const CNode*>(main), depth + 1);
    return false;
  }

  // A tip holds at most one singleton reference, any number of null-inodes
  // and no live subtrees.
  bool is_tip(const CNode* cn) const {
    unsigned singletons = 0;
    for (std::uint32_t j = 0; j < cn->count; ++j) {
      const Node* b = cn->branches[j];
      if (b == nullptr) return false;
      if (b->kind == NodeKind::snode) {
        ++singletons;
        continue;
      }
      if (b->kind != NodeKind::inode) return false;
      const Node* main = W::main_of(static_cast<const INode*>(b));
      if (main == nullptr) continue;  // null-inodes are allowed
      if (main->kind == NodeKind::snode) {
        ++singletons;  // tomb-inode
        continue;
      }
      return false;  // a live subtree disqualifies
    }
    return singletons <= 1;
  }

  void finish() {
    for (const auto& [cn, parent_arity] : cnodes)
      if (is_single_tip(cn, 0)) m.single_tips += 1;
  }

  std::uint64_t count_tips() const {
    std::uint64_t tips = 0;
    for (const auto& [cn, parent_arity] : cnodes) {
      // Length-1 tips: the first ancestor cnode is more than one-way, or
      // there is no ancestor cnode at all (the root position).
      if ((parent_arity == 0 || parent_arity > 1) && is_tip(cn)) ++tips;
    }
    return tips;
  }
};

}  // namespace vdetail

template <class Trie>
InvariantReport validate_root(const typename Trie::INode* root,
                              const typename Trie::key_equal& eq =
                                  typename Trie::key_equal{}) {
  vdetail::Validator<Trie> v(eq);
  v.run(root);
  return std::move(v.report);
}

template <class Trie>
InvariantReport validate(const Trie& trie) {
  return validate_root<Trie>(trie.quiescent_root(), trie.key_eq());
}

template <class Trie>
StateMetrics state_metrics_root(const typename Trie::INode* root) {
  vdetail::MetricsWalker<Trie> w;
  w.run(root);
  w.finish();
  return w.m;
}

template <class Trie>
StateMetrics state_metrics(const Trie& trie) {
  return state_metrics_root<Trie>(trie.quiescent_root());
}

template <class Trie>
std::uint64_t tip_count_root(const typename Trie::INode* root) {
  vdetail::MetricsWalker<Trie> w;
  w.run(root);
  return w.count_tips();
}

template <class Trie>
std::uint64_t tip_count(const Trie& trie) {
  return tip_count_root<Trie>(trie.quiescent_root());
}

// The definitional membership relation, evaluated recursively over the
// structure. Independent of the lookup code path: no repairs, no restarts.
template <class Trie>
bool has_key_root(const typename Trie::INode* root,
                  const typename Trie::key_type& k, std::uint32_t hc,
                  const typename Trie::key_equal& eq) {
  using Node = typename Trie::Node;
  using INode = typename Trie::INode;
  using CNode = typename Trie::CNode;
  using SNode = typename Trie::SNode;
  using Collision = typename Trie::Collision;

  const INode* in = root;
  std::uint32_t lev = 0;
  while (in != nullptr) {
    const Node* m = in->main.load(std::memory_order_relaxed);
    if (m == nullptr) return false;
    if (m->kind == NodeKind::snode)
      return eq(static_cast<const SNode*>(m)->key, k);
    if (m->kind == NodeKind::collision) {
      for (const SNode* sn : static_cast<const Collision*>(m)->entries)
        if (eq(sn->key, k)) return true;
      return false;
    }
    if (m->kind != NodeKind::cnode || lev > kMaxLevel) return false;
    const CNode* cn = static_cast<const CNode*>(m);
    const auto [flag, pos] = flagpos(hc, lev, cn->bmp);
    if ((cn->bmp & flag) == 0 || pos >= cn->count) return false;
    const Node* b = cn->branches[pos];
    if (b == nullptr) return false;
    if (b->kind == NodeKind::snode)
      return eq(static_cast<const SNode*>(b)->key, k);
    in = static_cast<const INode*>(b);
    lev += kBranchBits;
  }
  return false;
}

template <class Trie>
bool has_key(const Trie& trie, const typename Trie::key_type& k) {
  return has_key_root<Trie>(trie.quiescent_root(), k, trie.hash_function()(k),
                            trie.key_eq());
}

// Materializes the abstract set: exactly the bindings has_key reaches.
template <class Trie>
std::vector<std::pair<typename Trie::key_type, typename Trie::mapped_type>>
to_set(const Trie& trie) {
  using Node = typename Trie::Node;
  using INode = typename Trie::INode;
  using CNode = typename Trie::CNode;
  using SNode = typename Trie::SNode;
  using Collision = typename Trie::Collision;

  std::vector<std::pair<typename Trie::key_type, typename Trie::mapped_type>>
      out;
  struct Rec {
    static void node(const Node* n, decltype(out)& acc, unsigned depth) {
      if (n == nullptr || depth > vdetail::kDepthCap) return;
      switch (n->kind) {
        case NodeKind::inode:
          node(static_cast<const INode*>(n)->main.load(
                   std::memory_order_relaxed),
               acc, depth + 1);
          return;
        case NodeKind::snode: {
          const SNode* sn = static_cast<const SNode*>(n);
          acc.emplace_back(sn->key, sn->value);
          return;
        }
        case NodeKind::cnode: {
          const CNode* cn = static_cast<const CNode*>(n);
          for (std::uint32_t j = 0; j < cn->count; ++j)
            node(cn->branches[j], acc, depth + 1);
          return;
        }
        case NodeKind::collision:
          for (const SNode* sn : static_cast<const Collision*>(n)->entries)
            acc.emplace_back(sn->key, sn->value);
          return;
      }
    }
  };
  Rec::node(trie.quiescent_root(), out, 0);
  return out;
}

// Follows the chunks of `hc` from the root as far as the structure allows.
template <class Trie>
PathTrace longest_path_root(const typename Trie::INode* root,
                            std::uint32_t hc) {
  using Node = typename Trie::Node;
  using INode = typename Trie::INode;
  using CNode = typename Trie::CNode;

  PathTrace trace;
  if (root == nullptr) return trace;
  const INode* in = root;
  std::uint32_t lev = 0;
  for (unsigned depth = 0; depth <= vdetail::kDepthCap; ++depth) {
    trace.nodes.push_back(PathStep{NodeKind::inode});
    const Node* m = in->main.load(std::memory_order_relaxed);
    if (m == nullptr) {
      trace.terminal = PathTerminal::null_inode;
      return trace;
    }
    if (m->kind == NodeKind::snode) {
      trace.nodes.push_back(PathStep{NodeKind::snode});
      trace.terminal = PathTerminal::snode;
      return trace;
    }
    if (m->kind == NodeKind::collision) {
      trace.nodes.push_back(PathStep{NodeKind::collision});
      trace.terminal = PathTerminal::collision;
      return trace;
    }
    const CNode* cn = static_cast<const CNode*>(m);
    trace.nodes.push_back(PathStep{NodeKind::cnode});
    if (lev > kMaxLevel) {
      trace.terminal = PathTerminal::cnode;
      return trace;
    }
    const auto [flag, pos] = flagpos(hc, lev, cn->bmp);
    if ((cn->bmp & flag) == 0 || pos >= cn->count) {
      trace.terminal = PathTerminal::cnode;
      return trace;
    }
    const Node* b = cn->branches[pos];
    if (b == nullptr || b->kind == NodeKind::snode) {
      if (b != nullptr) trace.nodes.push_back(PathStep{NodeKind::snode});
      trace.terminal = b == nullptr ? PathTerminal::cnode : PathTerminal::snode;
      return trace;
    }
    in = static_cast<const INode*>(b);
    lev += kBranchBits;
  }
  return trace;
}

template <class Trie>
PathTrace longest_path(const Trie& trie, std::uint32_t hc) {
  return longest_path_root<Trie>(trie.quiescent_root(), hc);
}

// Order-insensitive digest of the reachable structure: node kinds, bitmaps,
// key hashes and tomb flags. Values are not digested (not hashable in
// general); bindings are immutable, so key identity suffices to detect
// structural mutation.
template <class Trie>
std::uint64_t structural_hash(const Trie& trie) {
  using Node = typename Trie::Node;
  using INode = typename Trie::INode;
  using CNode = typename Trie::CNode;
  using SNode = typename Trie::SNode;
  using Collision = typename Trie::Collision;

  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto eat = [&h](std::uint64_t x) {
    h ^= x;
    h *= 0x100000001b3ULL;
    h = mix64(h);
  };
  struct Rec {
    static void node(const Node* n, const decltype(eat)& f, unsigned depth) {
      if (n == nullptr || depth > vdetail::kDepthCap) {
        f(0xdead);
        return;
      }
      f(static_cast<std::uint64_t>(n->kind) + 1);
      switch (n->kind) {
        case NodeKind::inode:
          node(static_cast<const INode*>(n)->main.load(
                   std::memory_order_relaxed),
               f, depth + 1);
          return;
        case NodeKind::snode: {
          const SNode* sn = static_cast<const SNode*>(n);
          f(sn->hash);
          f(sn->tombed ? 2 : 1);
          return;
        }
        case NodeKind::cnode: {
          const CNode* cn = static_cast<const CNode*>(n);
          f(cn->bmp);
          f(cn->count);
          for (std::uint32_t j = 0; j < cn->count; ++j)
            node(cn->branches[j], f, depth + 1);
          return;
        }
        case NodeKind::collision: {
          const Collision* col = static_cast<const Collision*>(n);
          f(col->hash);
          f(col->entries.size());
          for (const SNode* sn : col->entries) node(sn, f, depth + 1);
          return;
        }
      }
    }
  };
  Rec::node(trie.quiescent_root(), eat, 0);
  return h;
}

}  // namespace ctrie

#endif  // CTRIE_VALIDATE_HPP_INCLUDED
