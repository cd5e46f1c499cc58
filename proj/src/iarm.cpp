#include "jcim/iarm.hpp"

#include <algorithm>

namespace jcim {

IarmScheduler::IarmScheduler(int n, int digits, bool masked)
    : n_(n), digits_(digits), masked_(masked),
      v_(static_cast<std::size_t>(digits), 0) {
  if (n < 2 || digits < 1) throw ConfigError("bad scheduler shape");
}

void IarmScheduler::reset() {
  std::fill(v_.begin(), v_.end(), 0);
  saturated_ = false;
  planned_ripples_ = 0;
}

void IarmScheduler::resync_resolved() {
  std::fill(v_.begin(), v_.end(), 2 * n_ - 1);
}

void IarmScheduler::ripple_one(int digit, std::vector<Action>& out) {
  // Caller guarantees v_[digit] >= 2n (a crossing is actually pending).
  // A masked ripple only lowers the columns whose flag is set; the others
  // keep their decoded value, which is at most 2n-1, so the column bound
  // after the ripple is max(v - 2n, 2n - 1).
  const int after = v_[static_cast<std::size_t>(digit)] - 2 * n_;
  const int bound = masked_ ? std::max(after, 2 * n_ - 1) : after;
  if (digit + 1 >= digits_) {
    out.push_back({Action::Kind::kResolveMsd, digit, 0});
    v_[static_cast<std::size_t>(digit)] = bound;
    saturated_ = true;  // wrap (or sign toggle on signed banks)
    planned_ripples_ += 1;
    return;
  }
  if (v_[static_cast<std::size_t>(digit) + 1] + 1 > 4 * n_ - 1)
    ripple_one(digit + 1, out);
  out.push_back({Action::Kind::kRipple, digit, 0});
  v_[static_cast<std::size_t>(digit)] = bound;
  v_[static_cast<std::size_t>(digit) + 1] += 1;
  planned_ripples_ += 1;
}

std::vector<IarmScheduler::Action> IarmScheduler::plan(const std::vector<int>& ds) {
  if (static_cast<int>(ds.size()) > digits_)
    throw ConfigError("digit vector wider than counter");
  std::vector<Action> out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int d = ds[i];
    if (d == 0) continue;
    if (d < 0 || d > 2 * n_ - 1) throw ConfigError("digit out of range");
    while (v_[i] + d > 4 * n_ - 1) ripple_one(static_cast<int>(i), out);
    out.push_back({Action::Kind::kAdd, static_cast<int>(i), d});
    v_[i] += d;
  }
  return out;
}

std::vector<IarmScheduler::Action> IarmScheduler::plan_flush() {
  std::vector<Action> out;
  for (int i = 0; i < digits_; ++i)
    while (v_[static_cast<std::size_t>(i)] >= 2 * n_) ripple_one(i, out);
  return out;
}

void IarmScheduler::execute(CounterBank& bank, const std::vector<Action>& acts,
                            const std::function<void(int, int)>& add_fn) {
  for (const auto& a : acts) {
    switch (a.kind) {
      case Action::Kind::kRipple: bank.ripple(a.digit); break;
      case Action::Kind::kResolveMsd: bank.resolve_msd(); break;
      case Action::Kind::kAdd: add_fn(a.digit, a.k); break;
    }
  }
}

void IarmScheduler::apply(CounterBank& bank, const std::vector<int>& ds,
                          const std::function<void(int, int)>& add_fn) {
  execute(bank, plan(ds), add_fn);
}

void IarmScheduler::flush(CounterBank& bank) {
  execute(bank, plan_flush(), [](int, int) {});
}

}  // namespace jcim
