// Test-build instrumentation. Compiled in only when CTRIE_TEST_PAUSE_HOOK is
// defined (the test targets set it); other builds see empty macros.
//
// Two hooks exist:
//   - the pause point, which runs between an operation's read of a main cell
//     and its subsequent CAS; the progress smoke test parks threads there;
//   - the CAS event hook, which reports which CAS site is about to run and
//     which succeeded; the state-transition tests snapshot metrics around it.

#ifndef CTRIE_TESTHOOK_HPP_INCLUDED
#define CTRIE_TESTHOOK_HPP_INCLUDED

#if defined(CTRIE_TEST_PAUSE_HOOK)

#include <atomic>
#include <cstdint>

namespace ctrie::testhook {

enum class CasSite : std::uint8_t {
  root_install,
  root_null_fix,
  insert_slot,
  insert_replace,
  insert_extend,
  insert_collision,
  remove_slot,
  remove_collision,
  clean,
  tomb_compress,
  contract_null,
  contract_resurrect,
};

enum class CasPhase : std::uint8_t { attempt, success };

struct CasEvent {
  CasSite site;
  CasPhase phase;
};

using PauseFn = void (*)(void*);
using EventFn = void (*)(void*, const CasEvent&);

inline std::atomic<PauseFn> pause_fn{nullptr};
inline std::atomic<void*> pause_ctx{nullptr};
inline std::atomic<EventFn> event_fn{nullptr};
inline std::atomic<void*> event_ctx{nullptr};

inline void pause_point() {
  if (PauseFn f = pause_fn.load(std::memory_order_acquire))
    f(pause_ctx.load(std::memory_order_acquire));
}

inline void emit(CasSite site, CasPhase phase) {
  if (EventFn f = event_fn.load(std::memory_order_acquire))
    f(event_ctx.load(std::memory_order_acquire), CasEvent{site, phase});
}

struct ScopedPauseHook {
  ScopedPauseHook(PauseFn f, void* ctx) {
    pause_ctx.store(ctx, std::memory_order_release);
    pause_fn.store(f, std::memory_order_release);
  }
  ~ScopedPauseHook() {
    pause_fn.store(nullptr, std::memory_order_release);
    pause_ctx.store(nullptr, std::memory_order_release);
  }
  ScopedPauseHook(const ScopedPauseHook&) = delete;
  ScopedPauseHook& operator=(const ScopedPauseHook&) = delete;
};

struct ScopedEventHook {
  ScopedEventHook(EventFn f, void* ctx) {
    event_ctx.store(ctx, std::memory_order_release);
    event_fn.store(f, std::memory_order_release);
  }
  ~ScopedEventHook() {
    event_fn.store(nullptr, std::memory_order_release);
    event_ctx.store(nullptr, std::memory_order_release);
  }
  ScopedEventHook(const ScopedEventHook&) = delete;
  ScopedEventHook& operator=(const ScopedEventHook&) = delete;
};

}  // namespace ctrie::testhook

#define CTRIE_PAUSE_POINT() ::ctrie::testhook::pause_point()
#define CTRIE_CAS_EVENT(site, phase)                     \
  ::ctrie::testhook::emit(::ctrie::testhook::CasSite::site, \
                          ::ctrie::testhook::CasPhase::phase)

#else

#define CTRIE_PAUSE_POINT() ((void)0)
#define CTRIE_CAS_EVENT(site, phase) ((void)0)

#endif  // CTRIE_TEST_PAUSE_HOOK

#endif  // CTRIE_TESTHOOK_HPP_INCLUDED
