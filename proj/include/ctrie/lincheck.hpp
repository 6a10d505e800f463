// Linearizability checking by exhaustive frontier search.
//
// A history is linearizable when some total order of its events (a) respects
// real time, i.e. an operation that returned before another was invoked
// comes first, and (b) replays correctly against the sequential model. The
// search schedules one real-time-minimal event at a time and memoizes
// (completed-set, model-state) pairs so that the exponential blowup only
// happens on genuinely hard histories. Worst case is still exponential; the
// event-count guard keeps inputs small enough for that to be acceptable.

#ifndef CTRIE_LINCHECK_HPP_INCLUDED
#define CTRIE_LINCHECK_HPP_INCLUDED

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ctrie/history.hpp"

namespace ctrie {

enum class LinStatus : std::uint8_t {
  accepted,
  rejected,
  too_large,  // resource guard: more than kMaxLinEvents events
  malformed,
};

inline constexpr std::size_t kMaxLinEvents = 64;

struct LinResult {
  LinStatus status = LinStatus::accepted;
  // On acceptance: a full witness order (event indices). On rejection: the
  // shortest linearized prefix from which no event could be scheduled.
  std::vector<std::size_t> witness;
  std::size_t states_explored = 0;
  std::string detail;

  bool accepted() const { return status == LinStatus::accepted; }
};

namespace lindetail {

// Model state over the history's key universe, packed for memoization.
struct State {
  std::vector<std::optional<std::uint64_t>> slots;  // indexed by key index

  std::string packed(std::uint64_t mask) const {
    std::string s;
    s.reserve(8 + slots.size() * 9);
    s.append(reinterpret_cast<const char*>(&mask), 8);
    for (const auto& v : slots) {
      s.push_back(v.has_value() ? 1 : 0);
      const std::uint64_t raw = v.value_or(0);
      s.append(reinterpret_cast<const char*>(&raw), 8);
    }
    return s;
  }
};

// Applies event e; false when the recorded result contradicts the state.
inline bool apply(const HistoryEvent& e, std::size_t key_idx, State& st) {
  auto& slot = st.slots[key_idx];
  switch (e.op) {
    case OpKind::insert:
      slot = e.value;
      return true;
    case OpKind::lookup:
      if (e.res == ResKind::found)
        return slot.has_value() && *slot == e.res_value;
      return !slot.has_value();
    case OpKind::remove:
      if (e.res == ResKind::found) {
        if (!slot.has_value() || *slot != e.res_value) return false;
        slot.reset();
        return true;
      }
      return !slot.has_value();
  }
  return false;
}

struct Searcher {
  const std::vector<HistoryEvent>& ev;
  std::vector<std::size_t> key_of;       // event -> key index
  std::vector<std::uint64_t> pred;       // event -> events that must precede
  std::unordered_set<std::string> seen;  // failed (mask, state) pairs
  std::vector<std::size_t> order;
  std::vector<std::size_t> best_stuck;
  bool have_stuck = false;
  std::size_t explored = 0;

  explicit Searcher(const History& h) : ev(h.events) {
    std::unordered_map<std::uint64_t, std::size_t> key_index;
    key_of.reserve(ev.size());
    for (const HistoryEvent& e : ev) {
      auto [it, fresh] = key_index.emplace(e.key, key_index.size());
      key_of.push_back(it->second);
    }
    keys = key_index.size();
    pred.assign(ev.size(), 0);
    for (std::size_t a = 0; a < ev.size(); ++a)
      for (std::size_t b = 0; b < ev.size(); ++b)
        if (a != b && ev[a].return_ns < ev[b].invoke_ns)
          pred[b] |= std::uint64_t{1} << a;
  }

  std::size_t keys = 0;

  bool dfs(std::uint64_t mask, State& st) {
    ++explored;
    if (mask == (ev.size() == 64 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << ev.size()) - 1))
      return true;
    const std::string key = st.packed(mask);
    if (seen.contains(key)) return false;
    bool any_applied = false;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if ((mask & bit) != 0) continue;
      if ((pred[i] & ~mask) != 0) continue;  // a predecessor is pending
      State next = st;
      if (!apply(ev[i], key_of[i], next)) continue;
      any_applied = true;
      order.push_back(i);
      if (dfs(mask | bit, next)) return true;
      order.pop_back();
    }
    if (!any_applied &&
        (!have_stuck || order.size() < best_stuck.size())) {
      best_stuck = order;
      have_stuck = true;
    }
    seen.insert(key);
    return false;
  }
};

}  // namespace lindetail

inline LinResult check_linearizable(const History& h) {
  LinResult result;
  if (h.events.size() > kMaxLinEvents) {
    result.status = LinStatus::too_large;
    result.detail = "history has " + std::to_string(h.events.size()) +
                    " events; the guard admits at most " +
                    std::to_string(kMaxLinEvents);
    return result;
  }
  std::string why;
  if (!well_formed(h, &why)) {
    result.status = LinStatus::malformed;
    result.detail = why;
    return result;
  }
  lindetail::Searcher s(h);
  lindetail::State st;
  st.slots.assign(s.keys, std::nullopt);
  const bool ok = h.events.empty() || s.dfs(0, st);
  result.states_explored = s.explored;
  if (ok) {
    result.status = LinStatus::accepted;
    result.witness = std::move(s.order);
  } else {
    result.status = LinStatus::rejected;
    result.witness = std::move(s.best_stuck);
    result.detail = "no schedulable extension after " +
                    std::to_string(result.witness.size()) +
                    " linearized events";
  }
  return result;
}

}  // namespace ctrie

#endif  // CTRIE_LINCHECK_HPP_INCLUDED
