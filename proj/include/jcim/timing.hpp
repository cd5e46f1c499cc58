// Latency model for command streams: every op is an activation pair whose
// issue rate is limited per bank by tRAS+tRP (plus decode slack) and across
// banks by tRRD / tFAW when independent subarrays interleave.
#pragma once

#include <algorithm>
#include <cstdint>

namespace jcim {

struct TimingModel {
  // DDR5-4400-class parameters, nanoseconds.
  double t_ras = 32.0;
  double t_rp = 14.5;
  double t_rrd = 3.63;
  double t_faw = 14.5;
  double slack = 4.0;  // command/decode overhead folded into each op

  double t_aap() const { return t_ras + t_rp + slack; }

  // Steady-state issue interval when `banks` independent banks interleave.
  double interval(int banks) const {
    const double per_bank = (t_aap() + t_rrd) / static_cast<double>(banks);
    return std::max({per_bank, t_rrd, t_faw / 4.0});
  }

  double speedup(int banks) const { return interval(1) / interval(banks); }

  double estimate_latency_ns(std::uint64_t ops, int banks = 1) const {
    return static_cast<double>(ops) * interval(banks);
  }
};

}  // namespace jcim
