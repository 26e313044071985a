#pragma once

// Fixed-capacity search list ordered by (dist, id) with a cursor over
// unchecked entries — the frontier structure shared by graph
// construction and query traversal.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "skipdisk/common.hpp"

namespace skipdisk {

class FrontierList {
 public:
  struct Entry {
    float dist;
    PointId id;
    bool checked;
  };

  explicit FrontierList(std::size_t cap) : cap_(cap) { v_.reserve(cap + 1); }

  void clear() {
    v_.clear();
    cur_ = 0;
  }

  // Keeps the best cap_ entries by (dist, id); returns false when the
  // entry was rejected as worse than the current tail of a full list.
  bool insert(float dist, PointId id) {
    Entry e{dist, id, false};
    auto pos = std::lower_bound(v_.begin(), v_.end(), e,
                                [](const Entry& a, const Entry& b) {
                                  return a.dist < b.dist ||
                                         (a.dist == b.dist && a.id < b.id);
                                });
    if (v_.size() >= cap_ && pos == v_.end()) return false;
    std::size_t idx = static_cast<std::size_t>(pos - v_.begin());
    v_.insert(pos, e);
    if (v_.size() > cap_) v_.pop_back();
    if (idx < cur_) cur_ = idx;
    return true;
  }

  bool has_unchecked() {
    while (cur_ < v_.size() && v_[cur_].checked) ++cur_;
    return cur_ < v_.size();
  }

  // Requires has_unchecked() just returned true.
  Entry pop_unchecked() {
    v_[cur_].checked = true;
    return v_[cur_];
  }

  const std::vector<Entry>& entries() const { return v_; }

 private:
  std::vector<Entry> v_;
  std::size_t cap_;
  std::size_t cur_ = 0;
};

}  // namespace skipdisk
