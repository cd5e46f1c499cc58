// Deferred carry resolution: a host-side virtual counter tracks the maximum
// possible digit occupancy (mask-oblivious) and schedules ripples only when a
// pending digit could cross twice, instead of sweeping after every input.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "jcim/counters.hpp"

namespace jcim {

class IarmScheduler {
 public:
  struct Action {
    enum class Kind { kRipple, kResolveMsd, kAdd };
    Kind kind;
    int digit = 0;
    int k = 0;
  };

  // `masked`: plan against an upper bound of per-column occupancy. Needed
  // when adds are column-masked: an executed ripple only lowers the columns
  // whose pending flag is set, so the model floors at 2n-1 instead of
  // subtracting a full crossing. Without masks the scalar model is exact.
  IarmScheduler(int n, int digits, bool masked = false);

  // Digit occupancy bound per digit: value + one unresolved crossing, i.e.
  // v in [0, 4n-1]. A digit add is safe iff v + d <= 4n-1.
  const std::vector<int>& virtual_digits() const { return v_; }
  bool saturated() const { return saturated_; }
  std::uint64_t planned_ripples() const { return planned_ripples_; }
  void reset();

  // Re-arm after the bank was settled outside the scheduler (sweep after a
  // masked decrement run): every pending flag is clear but the decoded digits
  // are unknown, so each digit is bounded by its decoded ceiling 2n-1.
  void resync_resolved();

  // Plan the actions for adding base-2n digits `ds` (LSD first, entries may
  // be zero). Ripples are emitted immediately before the add that needs the
  // room, cascading upward depth-first. Updates the virtual counter.
  std::vector<Action> plan(const std::vector<int>& ds);

  // Plan the ripples that settle every digit below 2n.
  std::vector<Action> plan_flush();

  // Execute a plan against a bank: adds go through `add_fn(digit, k)`.
  void apply(CounterBank& bank, const std::vector<int>& ds,
             const std::function<void(int, int)>& add_fn);
  void flush(CounterBank& bank);

 private:
  void ripple_one(int digit, std::vector<Action>& out);
  void execute(CounterBank& bank, const std::vector<Action>& acts,
               const std::function<void(int, int)>& add_fn);

  int n_;
  int digits_;
  bool masked_;
  std::vector<int> v_;
  bool saturated_ = false;
  std::uint64_t planned_ripples_ = 0;
};

}  // namespace jcim
