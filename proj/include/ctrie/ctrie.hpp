// A lock-free concurrent hash array mapped trie.
//
// The structure is a tree of immutable nodes stitched together by mutable
// indirection nodes (INode). An INode's `main` cell is the only CAS target
// inside the trie; the root cell of the Ctrie itself is the only other CAS
// target. All modifications copy the affected immutable node and swing one
// pointer, so readers never see a half-applied update and a stalled thread
// never blocks anyone else.
//
// Node roles:
//   INode     - indirection cell; `main` holds the current view of a subtree.
//   CNode     - immutable 32-way branch node: bitmap + dense branch array.
//   SNode     - immutable key/value leaf; `tombed` marks an entombed binding
//               that is waiting to be folded back into its parent.
//   Collision - immutable list of >= 2 bindings whose full 32-bit hashes are
//               equal; lives below the deepest bitmap level.
//
// A branch (CNode array entry) is an INode or a non-tombed SNode. An INode
// main is a CNode, a tombed SNode, a Collision, or null. An INode whose main
// is null or a tombed SNode is nonlive and final: it is never written again;
// operations that meet one repair the parent (clean / contraction) and retry.
//
// Removal keeps the trie compact: after taking a binding out, the remover
// entombs a now-singleton subtree (tomb_compress) and folds the tombed
// binding into the parent (contract_parent), and every frame on the way back
// up re-checks its own level, so degenerate chains collapse instead of
// accumulating.
//
// Unlinked nodes are handed to the epoch reclaimer (reclaim.hpp); traversals
// run under a reclaim::Guard, which keeps any node they can still reach
// alive until they finish.

#ifndef CTRIE_CTRIE_HPP_INCLUDED
#define CTRIE_CTRIE_HPP_INCLUDED

#include <atomic>
#include <bit>
#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ctrie/hash.hpp"
#include "ctrie/reclaim.hpp"
#include "ctrie/testhook.hpp"

namespace ctrie {

// Hashes are consumed five bits per level: levels 0,5,...,25 use full 5-bit
// chunks, level 30 uses the remaining two bits. Collision nodes sit below
// level 30 when two distinct keys exhaust all 32 bits.
inline constexpr std::uint32_t kBranchBits = 5;
inline constexpr std::uint32_t kBranchWidth = 1u << kBranchBits;  // 32
inline constexpr std::uint32_t kHashBits = 32;
inline constexpr std::uint32_t kMaxLevel = 30;

constexpr std::uint32_t hash_chunk(std::uint32_t hc, std::uint32_t lev) {
  return (hc >> lev) & (kBranchWidth - 1);
}

struct FlagPos {
  std::uint32_t flag;  // one-hot bitmap mask for the hash chunk at this level
  std::uint32_t pos;   // dense array index: set bits below `flag`
};

constexpr FlagPos flagpos(std::uint32_t hc, std::uint32_t lev,
                          std::uint32_t bmp) {
  const std::uint32_t flag = 1u << hash_chunk(hc, lev);
  const std::uint32_t pos =
      static_cast<std::uint32_t>(std::popcount(bmp & (flag - 1)));
  return FlagPos{flag, pos};
}

enum class NodeKind : std::uint8_t { inode, cnode, snode, collision };

template <class K, class V, class Hash = DefaultHash<K>,
          class Eq = std::equal_to<K>>
class Ctrie {
 public:
  using key_type = K;
  using mapped_type = V;
  using hasher = Hash;
  using key_equal = Eq;

  struct Node {
    const NodeKind kind;
    explicit Node(NodeKind nk) : kind(nk) {}
  };

  struct SNode : Node {
    const K key;
    const V value;
    const std::uint32_t hash;
    const bool tombed;
    SNode(const K& k, const V& v, std::uint32_t hc, bool tomb)
        : Node(NodeKind::snode), key(k), value(v), hash(hc), tombed(tomb) {}
  };

  struct INode : Node {
    std::atomic<Node*> main;
    explicit INode(Node* m) : Node(NodeKind::inode), main(m) {}
  };

  struct CNode : Node {
    const std::uint32_t bmp;
    const std::uint32_t count;  // equals popcount(bmp) on well-formed nodes
    const std::unique_ptr<Node*[]> branches;

    CNode(std::uint32_t bitmap, std::uint32_t n, std::unique_ptr<Node*[]> arr)
        : Node(NodeKind::cnode),
          bmp(bitmap),
          count(n),
          branches(std::move(arr)) {}

    Node* branch(std::uint32_t pos) const { return branches[pos]; }

    CNode* with_inserted(std::uint32_t flag, std::uint32_t pos,
                         Node* b) const {
      assert((bmp & flag) == 0);
      auto arr = std::make_unique<Node*[]>(count + 1);
      for (std::uint32_t i = 0; i < pos; ++i) arr[i] = branches[i];
      arr[pos] = b;
      for (std::uint32_t i = pos; i < count; ++i) arr[i + 1] = branches[i];
      return new CNode(bmp | flag, count + 1, std::move(arr));
    }

    CNode* with_updated(std::uint32_t pos, Node* b) const {
      assert(pos < count);
      auto arr = std::make_unique<Node*[]>(count);
      for (std::uint32_t i = 0; i < count; ++i) arr[i] = branches[i];
      arr[pos] = b;
      return new CNode(bmp, count, std::move(arr));
    }

    CNode* with_removed(std::uint32_t flag, std::uint32_t pos) const {
      assert((bmp & flag) != 0 && pos < count);
      auto arr =
          count > 1 ? std::make_unique<Node*[]>(count - 1) : nullptr;
      for (std::uint32_t i = 0; i < pos; ++i) arr[i] = branches[i];
      for (std::uint32_t i = pos + 1; i < count; ++i) arr[i - 1] = branches[i];
      return new CNode(bmp & ~flag, count - 1, std::move(arr));
    }
  };

  struct Collision : Node {
    const std::uint32_t hash;  // shared by every entry
    const std::vector<SNode*> entries;
    Collision(std::uint32_t hc, std::vector<SNode*> list)
        : Node(NodeKind::collision), hash(hc), entries(std::move(list)) {}
  };

  Ctrie() = default;
  explicit Ctrie(Hash h, Eq eq = Eq{})
      : hash_(std::move(h)), eq_(std::move(eq)) {}

  Ctrie(const Ctrie&) = delete;
  Ctrie& operator=(const Ctrie&) = delete;

  // The destructor assumes quiescence: no operation may be in flight.
  ~Ctrie() { free_subtree(root_.load(std::memory_order_relaxed)); }

  // Wraps a hand-built structure, taking ownership of every node reachable
  // from `root`. Intended for structural fixtures and validator tests.
  static Ctrie adopt(INode* root) { return Ctrie(root); }

  // Maps `k` to `v`, replacing any previous binding. Retries internally until
  // a CAS lands; never fails.
  void insert(const K& k, const V& v) {
    reclaim::Guard guard;
    const std::uint32_t hc = hash_(k);
    for (;;) {
      INode* r = root_.load();
      if (r == nullptr || is_null_inode(r)) {
        SNode* sn = new SNode(k, v, hc, false);
        auto arr = std::make_unique<Node*[]>(1);
        arr[0] = sn;
        CNode* cn = new CNode(1u << hash_chunk(hc, 0), 1, std::move(arr));
        INode* nr = new INode(cn);
        INode* expected = r;
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(root_install, attempt);
        if (root_.compare_exchange_strong(expected, nr)) {
          CTRIE_CAS_EVENT(root_install, success);
          if (r != nullptr) retire_node(r);
          return;
        }
        delete sn;
        delete cn;
        delete nr;
        continue;
      }
      if (iinsert(r, k, v, hc, 0, nullptr)) return;
    }
  }

  // Returns the value bound to `k`, if any.
  std::optional<V> lookup(const K& k) const {
    Ctrie* self = const_cast<Ctrie*>(this);  // may repair relaxed states
    reclaim::Guard guard;
    const std::uint32_t hc = self->hash_(k);
    for (;;) {
      INode* r = self->root_.load();
      if (r == nullptr) return std::nullopt;
      if (is_null_inode(r)) {
        self->fix_null_root(r);
        continue;
      }
      Outcome res = self->ilookup(r, k, hc, 0, nullptr);
      if (!res.restart) return std::move(res.value);
    }
  }

  // Unbinds `k`; returns the removed value, or nullopt if absent.
  std::optional<V> remove(const K& k) {
    reclaim::Guard guard;
    const std::uint32_t hc = hash_(k);
    for (;;) {
      INode* r = root_.load();
      if (r == nullptr) return std::nullopt;
      if (is_null_inode(r)) {
        fix_null_root(r);
        continue;
      }
      Outcome res = iremove(r, k, hc, 0, nullptr);
      if (!res.restart) return std::move(res.value);
    }
  }

  // Raw root for quiescent inspection (validation, metrics, fixtures).
  INode* quiescent_root() const { return root_.load(std::memory_order_relaxed); }

  // --- internal machinery, exposed for structural tests -------------------

  static bool is_null_inode(const INode* in) { return in->main.load() == nullptr; }

  static bool is_tomb_inode(const INode* in) {
    Node* m = in->main.load();
    return m != nullptr && m->kind == NodeKind::snode &&
           static_cast<SNode*>(m)->tombed;
  }

  // A singleton is a plain binding or an entombed one behind an INode.
  static bool is_singleton(const Node* b) {
    if (b->kind == NodeKind::snode) return true;
    return b->kind == NodeKind::inode &&
           is_tomb_inode(static_cast<const INode*>(b));
  }

  // Tomb-inodes resurrect to plain bindings; anything else passes through.
  // Returns the branch to keep and whether a fresh node was allocated.
  static std::pair<Node*, bool> resurrect(Node* b) {
    if (b->kind == NodeKind::inode) {
      INode* in = static_cast<INode*>(b);
      Node* m = in->main.load();
      if (m != nullptr && m->kind == NodeKind::snode) {
        SNode* sn = static_cast<SNode*>(m);
        return {new SNode(sn->key, sn->value, sn->hash, false), true};
      }
    }
    return {b, false};
  }

  // Every CAS on an inode's main goes through here. A main CAS never expects
  // a nonlive value: once an inode holds absent or a tombed binding it is
  // final, so such a CAS would be a bug.
  static bool cas_main(INode* i, Node* expected, Node* desired) {
    assert(expected != nullptr && (expected->kind == NodeKind::cnode ||
                                   expected->kind == NodeKind::collision));
    return i->main.compare_exchange_strong(expected, desired);
  }

  // Result of computing a replacement main node. `created` must be deleted
  // if the CAS loses; `unlinked` must be retired if it wins.
  struct Rewrite {
    Node* value = nullptr;
    bool identity = false;
    std::vector<Node*> created;
    std::vector<Node*> unlinked;
  };

  // The compression of a CNode: a lone tomb-inode collapses to its tombed
  // binding; null-inodes are dropped; tomb-inodes are resurrected; a node
  // left with nothing compresses to null. Entombing (the lone-tomb collapse)
  // is only legal when the result lands below the root: a tombed binding
  // needs a parent to fold into, and a tombed root wedges every operation.
  // With allow_entomb false the lone tomb-inode is resurrected instead,
  // which is an equally valid compression.
  static Rewrite to_compressed(const CNode* cn, bool allow_entomb = true) {
    Rewrite rw;
    if (allow_entomb && cn->count == 1 &&
        cn->branch(0)->kind == NodeKind::inode) {
      INode* in = static_cast<INode*>(cn->branch(0));
      Node* m = in->main.load();
      if (m != nullptr && m->kind == NodeKind::snode &&
          static_cast<SNode*>(m)->tombed) {
        rw.value = m;  // shared with the dying inode
        rw.unlinked.push_back(in);
        return rw;
      }
    }
    std::uint32_t nbmp = 0;
    std::vector<Node*> kept;
    std::uint32_t bits = cn->bmp;
    for (std::uint32_t j = 0; j < cn->count && bits != 0; ++j) {
      const std::uint32_t flag = bits & (0u - bits);  // lowest set bit
      bits ^= flag;
      Node* b = cn->branch(j);
      if (b->kind == NodeKind::inode) {
        INode* in = static_cast<INode*>(b);
        Node* m = in->main.load();
        if (m == nullptr) {
          rw.unlinked.push_back(in);
          continue;
        }
        if (m->kind == NodeKind::snode) {
          SNode* sn = static_cast<SNode*>(m);
          SNode* alive = new SNode(sn->key, sn->value, sn->hash, false);
          rw.created.push_back(alive);
          rw.unlinked.push_back(in);
          rw.unlinked.push_back(sn);
          kept.push_back(alive);
          nbmp |= flag;
          continue;
        }
      }
      kept.push_back(b);
      nbmp |= flag;
    }
    if (kept.empty()) {
      rw.value = nullptr;
      return rw;
    }
    auto arr = std::make_unique<Node*[]>(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) arr[i] = kept[i];
    CNode* ncn = new CNode(nbmp, static_cast<std::uint32_t>(kept.size()),
                           std::move(arr));
    rw.created.push_back(ncn);
    rw.value = ncn;
    return rw;
  }

  // The weak tombing of a CNode. With more than one non-null branch there is
  // nothing to entomb and the node itself comes back (identity). A single
  // surviving singleton entombs to a tombed binding; a single surviving
  // subtree keeps a one-way node with the null-inodes stripped; nothing
  // surviving weak-tombs to null.
  static Rewrite to_weak_tombed(const CNode* cn) {
    Rewrite rw;
    std::vector<Node*> live;
    std::vector<Node*> stripped;
    for (std::uint32_t j = 0; j < cn->count; ++j) {
      Node* b = cn->branch(j);
      if (b->kind == NodeKind::inode &&
          static_cast<INode*>(b)->main.load() == nullptr) {
        stripped.push_back(b);
      } else {
        live.push_back(b);
      }
    }
    if (live.size() > 1) {
      rw.identity = true;
      rw.value = const_cast<CNode*>(cn);
      return rw;
    }
    if (live.empty()) {
      rw.value = nullptr;
      rw.unlinked = std::move(stripped);
      return rw;
    }
    Node* b = live.front();
    if (b->kind == NodeKind::snode) {
      SNode* sn = static_cast<SNode*>(b);
      assert(!sn->tombed);
      SNode* tomb = new SNode(sn->key, sn->value, sn->hash, true);
      rw.created.push_back(tomb);
      rw.unlinked = std::move(stripped);
      rw.unlinked.push_back(sn);
      rw.value = tomb;
      return rw;
    }
    INode* in = static_cast<INode*>(b);
    Node* m = in->main.load();
    if (m != nullptr && m->kind == NodeKind::snode) {
      // Tomb-inode: reuse its tombed binding as the replacement main.
      rw.value = m;
      rw.unlinked = std::move(stripped);
      rw.unlinked.push_back(in);
      return rw;
    }
    if (stripped.empty() && cn->count == 1) {
      rw.identity = true;  // already a bare one-way node
      rw.value = const_cast<CNode*>(cn);
      return rw;
    }
    std::uint32_t flag = 0;
    std::uint32_t bits = cn->bmp;
    for (std::uint32_t j = 0; j < cn->count; ++j) {
      const std::uint32_t f = bits & (0u - bits);
      bits ^= f;
      if (cn->branch(j) == b) flag = f;
    }
    auto arr = std::make_unique<Node*[]>(1);
    arr[0] = b;
    CNode* ncn = new CNode(flag, 1, std::move(arr));
    rw.created.push_back(ncn);
    rw.unlinked = std::move(stripped);
    rw.value = ncn;
    return rw;
  }

  // Swaps a CNode main for its compression; a single attempt, the caller
  // restarts its own operation either way. `lev` is the level of i's cnode;
  // at the root (lev 0) the lone-tomb collapse is disallowed, see above.
  void clean(INode* i, std::uint32_t lev) {
    Node* m = i->main.load();
    if (m == nullptr || m->kind != NodeKind::cnode) return;
    Rewrite rw = to_compressed(static_cast<CNode*>(m), lev > 0);
    CTRIE_PAUSE_POINT();
    CTRIE_CAS_EVENT(clean, attempt);
    if (cas_main(i, m, rw.value)) {
      CTRIE_CAS_EVENT(clean, success);
      retire_node(m);
      retire_all(rw.unlinked);
    } else {
      delete_all(rw.created);
    }
  }

  // Repeatedly entombs `i` after a removal until there is nothing left to
  // entomb or the entombing lands. True means the parent must contract.
  bool tomb_compress(INode* i) {
    for (;;) {
      Node* m = i->main.load();
      if (m == nullptr || m->kind != NodeKind::cnode) return false;
      Rewrite rw = to_weak_tombed(static_cast<CNode*>(m));
      if (rw.identity) return false;
      CTRIE_PAUSE_POINT();
      CTRIE_CAS_EVENT(tomb_compress, attempt);
      if (cas_main(i, m, rw.value)) {
        CTRIE_CAS_EVENT(tomb_compress, success);
        retire_node(m);
        retire_all(rw.unlinked);
        return rw.value == nullptr ||
               (rw.value->kind == NodeKind::snode &&
                static_cast<SNode*>(rw.value)->tombed);
      }
      delete_all(rw.created);
    }
  }

  // Folds a nonlive `i` into its parent: drops a null-inode's slot or swaps
  // a tomb-inode for the resurrected binding. `lev` is the parent's level.
  // Retries itself until `i` is dealt with or no longer reachable.
  void contract_parent(INode* parent, INode* i, std::uint32_t hc,
                       std::uint32_t lev) {
    for (;;) {
      Node* m = i->main.load();
      Node* pm = parent->main.load();
      if (pm == nullptr || pm->kind != NodeKind::cnode) return;
      CNode* cn = static_cast<CNode*>(pm);
      const auto [flag, pos] = flagpos(hc, lev, cn->bmp);
      if ((cn->bmp & flag) == 0) return;
      if (cn->branch(pos) != i) return;
      if (m == nullptr) {
        CNode* ncn = cn->with_removed(flag, pos);
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(contract_null, attempt);
        if (cas_main(parent, pm, ncn)) {
          CTRIE_CAS_EVENT(contract_null, success);
          retire_node(cn);
          retire_node(i);
          return;
        }
        delete ncn;
        continue;
      }
      if (m->kind == NodeKind::snode && static_cast<SNode*>(m)->tombed) {
        SNode* dead = static_cast<SNode*>(m);
#if defined(CTRIE_FAULT_DROP_TOMB)
        // Fault injection for the harness negative control: treat the
        // entombed binding like a null-inode and drop it.
        CNode* ncn = cn->with_removed(flag, pos);
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(contract_null, attempt);
        if (cas_main(parent, pm, ncn)) {
          CTRIE_CAS_EVENT(contract_null, success);
          retire_node(cn);
          retire_node(i);
          retire_node(dead);
          return;
        }
        delete ncn;
        continue;
#else
        SNode* alive = new SNode(dead->key, dead->value, dead->hash, false);
        CNode* ncn = cn->with_updated(pos, alive);
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(contract_resurrect, attempt);
        if (cas_main(parent, pm, ncn)) {
          CTRIE_CAS_EVENT(contract_resurrect, success);
          retire_node(cn);
          retire_node(i);
          retire_node(dead);
          return;
        }
        delete alive;
        delete ncn;
        continue;
#endif
      }
      return;  // nonlive inodes are final; anything else means we lost a race
    }
  }

  // One descent step of insert. False requests a restart from the top.
  bool iinsert(INode* i, const K& k, const V& v, std::uint32_t hc,
               std::uint32_t lev, INode* parent) {
    Node* m = i->main.load();
    if (m != nullptr && m->kind == NodeKind::cnode) {
      CNode* cn = static_cast<CNode*>(m);
      const auto [flag, pos] = flagpos(hc, lev, cn->bmp);
      if ((cn->bmp & flag) == 0) {
        SNode* nsn = new SNode(k, v, hc, false);
        CNode* ncn = cn->with_inserted(flag, pos, nsn);
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(insert_slot, attempt);
        if (cas_main(i, m, ncn)) {
          CTRIE_CAS_EVENT(insert_slot, success);
          retire_node(cn);
          return true;
        }
        delete nsn;
        delete ncn;
        return false;
      }
      Node* b = cn->branch(pos);
      if (b->kind == NodeKind::inode)
        return iinsert(static_cast<INode*>(b), k, v, hc, lev + kBranchBits, i);
      SNode* sn = static_cast<SNode*>(b);
      assert(!sn->tombed);
      SNode* nsn = new SNode(k, v, hc, false);
      if (eq_(sn->key, k)) {
        CNode* ncn = cn->with_updated(pos, nsn);
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(insert_replace, attempt);
        if (cas_main(i, m, ncn)) {
          CTRIE_CAS_EVENT(insert_replace, success);
          retire_node(cn);
          retire_node(sn);
          return true;
        }
        delete nsn;
        delete ncn;
        return false;
      }
      std::vector<Node*> created;
      Node* deeper = make_pair_node(sn, nsn, lev + kBranchBits, created);
      INode* nin = new INode(deeper);
      CNode* ncn = cn->with_updated(pos, nin);
      CTRIE_PAUSE_POINT();
      CTRIE_CAS_EVENT(insert_extend, attempt);
      if (cas_main(i, m, ncn)) {
        CTRIE_CAS_EVENT(insert_extend, success);
        retire_node(cn);  // sn lives on inside the new subtree
        return true;
      }
      delete nsn;
      delete nin;
      delete ncn;
      delete_all(created);
      return false;
    }
    if (m != nullptr && m->kind == NodeKind::collision) {
      Collision* col = static_cast<Collision*>(m);
      assert(col->hash == hc);
      SNode* nsn = new SNode(k, v, hc, false);
      int found = -1;
      for (std::size_t e = 0; e < col->entries.size(); ++e)
        if (eq_(col->entries[e]->key, k)) found = static_cast<int>(e);
      std::vector<SNode*> entries = col->entries;
      if (found >= 0)
        entries[static_cast<std::size_t>(found)] = nsn;
      else
        entries.push_back(nsn);
      Collision* ncol = new Collision(hc, std::move(entries));
      CTRIE_PAUSE_POINT();
      CTRIE_CAS_EVENT(insert_collision, attempt);
      if (cas_main(i, m, ncol)) {
        CTRIE_CAS_EVENT(insert_collision, success);
        retire_node(col);
        if (found >= 0)
          retire_node(col->entries[static_cast<std::size_t>(found)]);
        return true;
      }
      delete nsn;
      delete ncol;
      return false;
    }
    // Nonlive: repair the parent and restart.
    if (parent != nullptr) clean(parent, lev - kBranchBits);
    return false;
  }

  struct Outcome {
    bool restart = false;
    std::optional<V> value;  // engaged = found
  };

  // One descent step of lookup.
  Outcome ilookup(INode* i, const K& k, std::uint32_t hc, std::uint32_t lev,
                  INode* parent) {
    Node* m = i->main.load();
    if (m != nullptr && m->kind == NodeKind::cnode) {
      CNode* cn = static_cast<CNode*>(m);
      const auto [flag, pos] = flagpos(hc, lev, cn->bmp);
      if ((cn->bmp & flag) == 0) return Outcome{};
      Node* b = cn->branch(pos);
      if (b->kind == NodeKind::inode)
        return ilookup(static_cast<INode*>(b), k, hc, lev + kBranchBits, i);
      SNode* sn = static_cast<SNode*>(b);
      if (eq_(sn->key, k)) return Outcome{false, sn->value};
      return Outcome{};
    }
    if (m != nullptr && m->kind == NodeKind::collision) {
      Collision* col = static_cast<Collision*>(m);
      for (SNode* sn : col->entries)
        if (eq_(sn->key, k)) return Outcome{false, sn->value};
      return Outcome{};
    }
    if (parent != nullptr) clean(parent, lev - kBranchBits);
    return Outcome{true, std::nullopt};
  }

  // One descent step of remove. A successful removal entombs and contracts
  // on the way out; every ancestor frame re-checks its own level.
  Outcome iremove(INode* i, const K& k, std::uint32_t hc, std::uint32_t lev,
                  INode* parent) {
    Node* m = i->main.load();
    if (m != nullptr && m->kind == NodeKind::cnode) {
      CNode* cn = static_cast<CNode*>(m);
      const auto [flag, pos] = flagpos(hc, lev, cn->bmp);
      if ((cn->bmp & flag) == 0) return Outcome{};
      Node* b = cn->branch(pos);
      Outcome res;
      if (b->kind == NodeKind::inode) {
        res = iremove(static_cast<INode*>(b), k, hc, lev + kBranchBits, i);
      } else {
        SNode* sn = static_cast<SNode*>(b);
        if (!eq_(sn->key, k)) return Outcome{};
        Node* ncn = cn->count == 1
                        ? nullptr
                        : static_cast<Node*>(cn->with_removed(flag, pos));
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(remove_slot, attempt);
        if (cas_main(i, m, ncn)) {
          CTRIE_CAS_EVENT(remove_slot, success);
          res = Outcome{false, sn->value};
          retire_node(cn);
          retire_node(sn);
        } else {
          if (ncn != nullptr) delete static_cast<CNode*>(ncn);
          return Outcome{true, std::nullopt};
        }
      }
      if (res.restart || !res.value.has_value()) return res;
      if (parent != nullptr && tomb_compress(i))
        contract_parent(parent, i, hc, lev - kBranchBits);
      return res;
    }
    if (m != nullptr && m->kind == NodeKind::collision) {
      Collision* col = static_cast<Collision*>(m);
      int found = -1;
      for (std::size_t e = 0; e < col->entries.size(); ++e)
        if (eq_(col->entries[e]->key, k)) found = static_cast<int>(e);
      if (found < 0) return Outcome{};
      SNode* victim = col->entries[static_cast<std::size_t>(found)];
      V out = victim->value;
      if (col->entries.size() == 2) {
        // Down to one binding: entomb it so the usual contraction applies.
        SNode* other = col->entries[found == 0 ? 1 : 0];
        SNode* tomb = new SNode(other->key, other->value, other->hash, true);
        CTRIE_PAUSE_POINT();
        CTRIE_CAS_EVENT(remove_collision, attempt);
        if (cas_main(i, m, tomb)) {
          CTRIE_CAS_EVENT(remove_collision, success);
          retire_node(col);
          retire_node(victim);
          retire_node(other);
          if (parent != nullptr)
            contract_parent(parent, i, hc, lev - kBranchBits);
          return Outcome{false, std::move(out)};
        }
        delete tomb;
        return Outcome{true, std::nullopt};
      }
      std::vector<SNode*> entries;
      entries.reserve(col->entries.size() - 1);
      for (std::size_t e = 0; e < col->entries.size(); ++e)
        if (e != static_cast<std::size_t>(found))
          entries.push_back(col->entries[e]);
      Collision* ncol = new Collision(col->hash, std::move(entries));
      CTRIE_PAUSE_POINT();
      CTRIE_CAS_EVENT(remove_collision, attempt);
      if (cas_main(i, m, ncol)) {
        CTRIE_CAS_EVENT(remove_collision, success);
        retire_node(col);
        retire_node(victim);
        return Outcome{false, std::move(out)};
      }
      delete ncol;
      return Outcome{true, std::nullopt};
    }
    if (parent != nullptr) clean(parent, lev - kBranchBits);
    return Outcome{true, std::nullopt};
  }

  const Hash& hash_function() const { return hash_; }
  const Eq& key_eq() const { return eq_; }

 private:
  explicit Ctrie(INode* adopted) : root_(adopted) {}

  void fix_null_root(INode* r) {
    INode* expected = r;
    CTRIE_PAUSE_POINT();
    CTRIE_CAS_EVENT(root_null_fix, attempt);
    if (root_.compare_exchange_strong(expected, nullptr)) {
      CTRIE_CAS_EVENT(root_null_fix, success);
      retire_node(r);
    }
  }

  // Joins two distinct non-tombed bindings below `lev`, extending one level
  // at a time while their chunks agree; equal full hashes end in a Collision.
  Node* make_pair_node(SNode* sn1, SNode* sn2, std::uint32_t lev,
                       std::vector<Node*>& created) {
    if (lev > kMaxLevel) {
      assert(sn1->hash == sn2->hash);
      Collision* col = new Collision(sn1->hash, {sn1, sn2});
      created.push_back(col);
      return col;
    }
    const std::uint32_t c1 = hash_chunk(sn1->hash, lev);
    const std::uint32_t c2 = hash_chunk(sn2->hash, lev);
    if (c1 != c2) {
      auto arr = std::make_unique<Node*[]>(2);
      arr[0] = c1 < c2 ? sn1 : sn2;
      arr[1] = c1 < c2 ? sn2 : sn1;
      CNode* cn = new CNode((1u << c1) | (1u << c2), 2, std::move(arr));
      created.push_back(cn);
      return cn;
    }
    Node* deeper = make_pair_node(sn1, sn2, lev + kBranchBits, created);
    INode* in = new INode(deeper);
    created.push_back(in);
    auto arr = std::make_unique<Node*[]>(1);
    arr[0] = in;
    CNode* cn = new CNode(1u << c1, 1, std::move(arr));
    created.push_back(cn);
    return cn;
  }

  static void free_node(void* p) {
    Node* n = static_cast<Node*>(p);
    switch (n->kind) {
      case NodeKind::inode:
        delete static_cast<INode*>(n);
        break;
      case NodeKind::cnode:
        delete static_cast<CNode*>(n);
        break;
      case NodeKind::snode:
        delete static_cast<SNode*>(n);
        break;
      case NodeKind::collision:
        delete static_cast<Collision*>(n);
        break;
    }
  }

  static void retire_node(Node* n) { reclaim::retire(n, &free_node); }

  static void retire_all(const std::vector<Node*>& nodes) {
    for (Node* n : nodes) retire_node(n);
  }

  static void delete_all(const std::vector<Node*>& nodes) {
    for (Node* n : nodes) free_node(n);
  }

  static void free_subtree(Node* n) {
    if (n == nullptr) return;
    switch (n->kind) {
      case NodeKind::inode: {
        INode* in = static_cast<INode*>(n);
        free_subtree(in->main.load(std::memory_order_relaxed));
        delete in;
        break;
      }
      case NodeKind::cnode: {
        CNode* cn = static_cast<CNode*>(n);
        for (std::uint32_t i = 0; i < cn->count; ++i)
          free_subtree(cn->branch(i));
        delete cn;
        break;
      }
      case NodeKind::collision: {
        Collision* col = static_cast<Collision*>(n);
        for (SNode* sn : col->entries) delete sn;
        delete col;
        break;
      }
      case NodeKind::snode:
        delete static_cast<SNode*>(n);
        break;
    }
  }

  mutable std::atomic<INode*> root_{nullptr};
  [[no_unique_address]] Hash hash_{};
  [[no_unique_address]] Eq eq_{};
};

}  // namespace ctrie

#endif  // CTRIE_CTRIE_HPP_INCLUDED
