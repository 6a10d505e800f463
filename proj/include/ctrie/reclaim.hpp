// Epoch-based deferred reclamation.
//
// Writers unlink nodes with CAS while readers may still be traversing them,
// so unlinked nodes are retired, not freed. Every trie operation runs under a
// Guard that pins the calling thread to the current global epoch; a retired
// node is freed only once no pinned thread could still hold a reference to
// it. A stalled reader delays reclamation, never other operations.
//
// Scheme: one global epoch counter and one slot per participating thread.
// pin() publishes the current epoch into the thread's slot and re-validates;
// retire(p) tags p with the epoch at retirement and queues it on the owning
// thread's limbo list. Collection advances the epoch when every pinned thread
// has caught up, then frees entries that are two epochs old and older than
// every pinned epoch. Slots of exited threads are recycled; any limbo they
// leave behind moves to a shared orphan list drained by later collections.

#ifndef CTRIE_RECLAIM_HPP_INCLUDED
#define CTRIE_RECLAIM_HPP_INCLUDED

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <vector>

namespace ctrie::reclaim {

namespace detail {

struct Retired {
  void* ptr;
  void (*free_fn)(void*);
  std::uint64_t epoch;
};

struct ThreadSlot {
  std::atomic<std::uint64_t> pinned{0};  // 0 = quiescent, else pinned epoch
  std::atomic<bool> owned{false};
  ThreadSlot* next = nullptr;
  std::vector<Retired> limbo;  // touched only by the owning thread
  unsigned guard_depth = 0;    // owning thread only
};

// Limbo growth before a collection pass is attempted.
inline constexpr std::size_t kCollectThreshold = 64;

class Registry {
 public:
  static Registry& instance() {
    static Registry reg;
    return reg;
  }

  ThreadSlot* acquire_slot() {
    for (ThreadSlot* s = head_.load(std::memory_order_acquire); s != nullptr;
         s = s->next) {
      bool expected = false;
      if (!s->owned.load(std::memory_order_relaxed) &&
          s->owned.compare_exchange_strong(expected, true,
                                           std::memory_order_acq_rel))
        return s;
    }
    auto* s = new ThreadSlot;
    s->owned.store(true, std::memory_order_relaxed);
    ThreadSlot* h = head_.load(std::memory_order_relaxed);
    do {
      s->next = h;
    } while (!head_.compare_exchange_weak(h, s, std::memory_order_acq_rel));
    return s;
  }

  void release_slot(ThreadSlot* s) {
    collect(s);
    if (!s->limbo.empty()) {
      std::lock_guard<std::mutex> lk(orphan_mx_);
      orphans_.insert(orphans_.end(), s->limbo.begin(), s->limbo.end());
      s->limbo.clear();
      s->limbo.shrink_to_fit();
    }
    s->pinned.store(0, std::memory_order_seq_cst);
    s->owned.store(false, std::memory_order_release);
  }

  void pin(ThreadSlot* s) {
    for (;;) {
      std::uint64_t e = epoch_.load(std::memory_order_seq_cst);
      s->pinned.store(e, std::memory_order_seq_cst);
      // Re-validate after publishing: if the epoch moved while our pin was
      // in flight, a collector may have scanned past us; pin again at the
      // newer epoch before touching shared nodes.
      if (epoch_.load(std::memory_order_seq_cst) == e) return;
    }
  }

  void unpin(ThreadSlot* s) { s->pinned.store(0, std::memory_order_seq_cst); }

  void retire(ThreadSlot* s, void* p, void (*free_fn)(void*)) {
    s->limbo.push_back(
        Retired{p, free_fn, epoch_.load(std::memory_order_seq_cst)});
    // Collect every kCollectThreshold retirements, not on every call past
    // the threshold: when a pinned thread blocks freeing, limbo grows and a
    // per-retire scan would go quadratic.
    if (s->limbo.size() % kCollectThreshold == 0) collect(s);
  }

  void collect(ThreadSlot* self) {
    const std::uint64_t current = epoch_.load(std::memory_order_seq_cst);
    std::uint64_t min_pinned = ~std::uint64_t{0};
    bool all_current = true;
    for (ThreadSlot* s = head_.load(std::memory_order_acquire); s != nullptr;
         s = s->next) {
      const std::uint64_t p = s->pinned.load(std::memory_order_seq_cst);
      if (p != 0) {
        min_pinned = std::min(min_pinned, p);
        if (p != current) all_current = false;
      }
    }
    if (all_current) {
      std::uint64_t expected = current;
      epoch_.compare_exchange_strong(expected, current + 1,
                                     std::memory_order_seq_cst);
    }
    const std::uint64_t now = epoch_.load(std::memory_order_seq_cst);
    const auto freeable = [&](const Retired& r) {
      return r.epoch + 2 <= now && r.epoch < min_pinned;
    };
    free_filtered(self->limbo, freeable);
    // Orphans from exited threads; skip rather than wait when contended.
    if (orphan_mx_.try_lock()) {
      std::lock_guard<std::mutex> lk(orphan_mx_, std::adopt_lock);
      free_filtered(orphans_, freeable);
    }
  }

  std::uint64_t epoch() const {
    return epoch_.load(std::memory_order_seq_cst);
  }

  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

 private:
  Registry() = default;

  // Program teardown: no participating threads remain, free everything.
  ~Registry() {
    ThreadSlot* s = head_.load(std::memory_order_acquire);
    while (s != nullptr) {
      for (const Retired& r : s->limbo) r.free_fn(r.ptr);
      ThreadSlot* next = s->next;
      delete s;
      s = next;
    }
    for (const Retired& r : orphans_) r.free_fn(r.ptr);
  }

  template <class Pred>
  static void free_filtered(std::vector<Retired>& v, const Pred& freeable) {
    auto keep = v.begin();
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (freeable(*it)) {
        it->free_fn(it->ptr);
      } else {
        *keep++ = *it;
      }
    }
    v.erase(keep, v.end());
  }

  std::atomic<ThreadSlot*> head_{nullptr};
  std::atomic<std::uint64_t> epoch_{2};
  std::mutex orphan_mx_;
  std::vector<Retired> orphans_;
};

struct ThreadHandle {
  ThreadSlot* slot;
  ThreadHandle() : slot(Registry::instance().acquire_slot()) {}
  ~ThreadHandle() { Registry::instance().release_slot(slot); }
  ThreadHandle(const ThreadHandle&) = delete;
  ThreadHandle& operator=(const ThreadHandle&) = delete;
};

inline ThreadSlot* local_slot() {
  thread_local ThreadHandle handle;
  return handle.slot;
}

}  // namespace detail

// Pins the calling thread while alive. Nests.
class Guard {
 public:
  Guard() : slot_(detail::local_slot()) {
    if (slot_->guard_depth++ == 0)
      detail::Registry::instance().pin(slot_);
  }
  ~Guard() {
    if (--slot_->guard_depth == 0)
      detail::Registry::instance().unpin(slot_);
  }
  Guard(const Guard&) = delete;
  Guard& operator=(const Guard&) = delete;

 private:
  detail::ThreadSlot* slot_;
};

// Queues p for deferred freeing. p must already be unlinked: no new
// references to it can be created after this call.
inline void retire(void* p, void (*free_fn)(void*)) {
  detail::Registry::instance().retire(detail::local_slot(), p, free_fn);
}

// Runs a collection pass on the calling thread's limbo.
inline void collect() {
  detail::Registry::instance().collect(detail::local_slot());
}

}  // namespace ctrie::reclaim

#endif  // CTRIE_RECLAIM_HPP_INCLUDED
