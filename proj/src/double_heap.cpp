#include "mqseg/double_heap.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mqseg {

DoubleHeap::DoubleHeap(int rank, const std::vector<double>& values, long first_tag) {
  size_ = static_cast<int>(values.size());
  if (size_ < 1) throw std::invalid_argument("double heap needs at least one element");
  if (rank < 1 || rank > size_) throw std::invalid_argument("target rank out of range");
  rank_ = rank;

  // Sort (value, tag) once; cheaper rebuilds are possible but construction is
  // off the hot path.
  std::vector<int> idx(static_cast<size_t>(size_));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values[static_cast<size_t>(a)] < values[static_cast<size_t>(b)]; });

  pos_.assign(static_cast<size_t>(size_), 0);
  below_val_.resize(static_cast<size_t>(rank_) - 1);
  below_tag_.resize(static_cast<size_t>(rank_) - 1);
  above_val_.resize(static_cast<size_t>(size_ - rank_));
  above_tag_.resize(static_cast<size_t>(size_ - rank_));

  // A sorted array read top-down is a valid heap in either orientation: fill
  // below with ranks 1..rank-1 reversed (largest first) and above with ranks
  // rank+1..size in order.
  for (int r = 0; r < rank_ - 1; ++r) {
    const int src = idx[static_cast<size_t>(rank_ - 2 - r)];
    below_val_[static_cast<size_t>(r)] = values[static_cast<size_t>(src)];
    below_tag_[static_cast<size_t>(r)] = first_tag + src;
  }
  {
    const int src = idx[static_cast<size_t>(rank_) - 1];
    root_val_ = values[static_cast<size_t>(src)];
    root_tag_ = first_tag + src;
  }
  for (int r = 0; r < size_ - rank_; ++r) {
    const int src = idx[static_cast<size_t>(rank_ + r)];
    above_val_[static_cast<size_t>(r)] = values[static_cast<size_t>(src)];
    above_tag_[static_cast<size_t>(r)] = first_tag + src;
  }
  for (int s = 0; s < rank_ - 1; ++s) pos_of(below_tag_[static_cast<size_t>(s)]) = s + 1;
  pos_of(root_tag_) = 0;
  for (int s = 0; s < size_ - rank_; ++s) pos_of(above_tag_[static_cast<size_t>(s)]) = -(s + 1);
}

void DoubleHeap::set_below(int slot, double v, long t) {
  below_val_[static_cast<size_t>(slot)] = v;
  below_tag_[static_cast<size_t>(slot)] = t;
  pos_of(t) = slot + 1;
}

void DoubleHeap::set_above(int slot, double v, long t) {
  above_val_[static_cast<size_t>(slot)] = v;
  above_tag_[static_cast<size_t>(slot)] = t;
  pos_of(t) = -(slot + 1);
}

void DoubleHeap::set_root(double v, long t) {
  root_val_ = v;
  root_tag_ = t;
  pos_of(t) = 0;
}

void DoubleHeap::sift_up_below(int slot) {
  const double v = below_val_[static_cast<size_t>(slot)];
  const long t = below_tag_[static_cast<size_t>(slot)];
  while (slot > 0) {
    const int parent = (slot - 1) / 2;
    if (below_val_[static_cast<size_t>(parent)] >= v) break;
    set_below(slot, below_val_[static_cast<size_t>(parent)], below_tag_[static_cast<size_t>(parent)]);
    slot = parent;
    ++levels_;
  }
  set_below(slot, v, t);
}

void DoubleHeap::sift_down_below(int slot) {
  const int m = static_cast<int>(below_val_.size());
  const double v = below_val_[static_cast<size_t>(slot)];
  const long t = below_tag_[static_cast<size_t>(slot)];
  while (true) {
    int child = 2 * slot + 1;
    if (child >= m) break;
    if (child + 1 < m &&
        below_val_[static_cast<size_t>(child + 1)] > below_val_[static_cast<size_t>(child)])
      ++child;
    if (below_val_[static_cast<size_t>(child)] <= v) break;
    set_below(slot, below_val_[static_cast<size_t>(child)], below_tag_[static_cast<size_t>(child)]);
    slot = child;
    ++levels_;
  }
  set_below(slot, v, t);
}

void DoubleHeap::sift_up_above(int slot) {
  const double v = above_val_[static_cast<size_t>(slot)];
  const long t = above_tag_[static_cast<size_t>(slot)];
  while (slot > 0) {
    const int parent = (slot - 1) / 2;
    if (above_val_[static_cast<size_t>(parent)] <= v) break;
    set_above(slot, above_val_[static_cast<size_t>(parent)], above_tag_[static_cast<size_t>(parent)]);
    slot = parent;
    ++levels_;
  }
  set_above(slot, v, t);
}

void DoubleHeap::sift_down_above(int slot) {
  const int m = static_cast<int>(above_val_.size());
  const double v = above_val_[static_cast<size_t>(slot)];
  const long t = above_tag_[static_cast<size_t>(slot)];
  while (true) {
    int child = 2 * slot + 1;
    if (child >= m) break;
    if (child + 1 < m &&
        above_val_[static_cast<size_t>(child + 1)] < above_val_[static_cast<size_t>(child)])
      ++child;
    if (above_val_[static_cast<size_t>(child)] >= v) break;
    set_above(slot, above_val_[static_cast<size_t>(child)], above_tag_[static_cast<size_t>(child)]);
    slot = child;
    ++levels_;
  }
  set_above(slot, v, t);
}

void DoubleHeap::replace_root(double v, long t) {
  if (!below_val_.empty() && v < below_val_[0]) {
    // New value sinks into below; old below-max becomes the root.
    set_root(below_val_[0], below_tag_[0]);
    ++levels_;
    set_below(0, v, t);
    sift_down_below(0);
  } else if (!above_val_.empty() && v > above_val_[0]) {
    set_root(above_val_[0], above_tag_[0]);
    ++levels_;
    set_above(0, v, t);
    sift_down_above(0);
  } else {
    set_root(v, t);
  }
}

void DoubleHeap::replace_below(int slot, double v, long t) {
  if (v <= root_val_) {
    const double old = below_val_[static_cast<size_t>(slot)];
    set_below(slot, v, t);
    if (v > old)
      sift_up_below(slot);
    else
      sift_down_below(slot);
    return;
  }
  // The incoming value belongs at or above the root: promote the current
  // root into the vacated below slot (it dominates everything below)...
  set_below(slot, root_val_, root_tag_);
  sift_up_below(slot);
  ++levels_;
  // ...then settle the new value against the above side.
  if (!above_val_.empty() && above_val_[0] < v) {
    set_root(above_val_[0], above_tag_[0]);
    set_above(0, v, t);
    sift_down_above(0);
    ++levels_;
  } else {
    set_root(v, t);
  }
}

void DoubleHeap::replace_above(int slot, double v, long t) {
  if (v >= root_val_) {
    const double old = above_val_[static_cast<size_t>(slot)];
    set_above(slot, v, t);
    if (v < old)
      sift_up_above(slot);
    else
      sift_down_above(slot);
    return;
  }
  set_above(slot, root_val_, root_tag_);
  sift_up_above(slot);
  ++levels_;
  if (!below_val_.empty() && below_val_[0] > v) {
    set_root(below_val_[0], below_tag_[0]);
    set_below(0, v, t);
    sift_down_below(0);
    ++levels_;
  } else {
    set_root(v, t);
  }
}

void DoubleHeap::replace_tagged(long out_tag, double in_value, long in_tag) {
  const int p = pos_[static_cast<size_t>(out_tag % size_)];
  long resident;
  if (p == 0)
    resident = root_tag_;
  else if (p > 0)
    resident = below_tag_[static_cast<size_t>(p) - 1];
  else
    resident = above_tag_[static_cast<size_t>(-p) - 1];
  if (resident != out_tag)
    throw std::domain_error("double heap: tag to remove is not resident");

  if (p == 0)
    replace_root(in_value, in_tag);
  else if (p > 0)
    replace_below(p - 1, in_value, in_tag);
  else
    replace_above(-p - 1, in_value, in_tag);
}

int DoubleHeap::find_value_slot(double v) const {
  if (root_val_ == v) return 0;
  // Pruned descent: subtrees whose root is already past v cannot hold it.
  if (v < root_val_) {
    std::vector<int> stack;
    if (!below_val_.empty()) stack.push_back(0);
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      const double bv = below_val_[static_cast<size_t>(s)];
      if (bv == v) return s + 1;
      if (bv < v) continue;  // max-heap: children only smaller
      const int c = 2 * s + 1;
      if (c < static_cast<int>(below_val_.size())) stack.push_back(c);
      if (c + 1 < static_cast<int>(below_val_.size())) stack.push_back(c + 1);
    }
  } else {
    std::vector<int> stack;
    if (!above_val_.empty()) stack.push_back(0);
    while (!stack.empty()) {
      const int s = stack.back();
      stack.pop_back();
      const double av = above_val_[static_cast<size_t>(s)];
      if (av == v) return -(s + 1);
      if (av > v) continue;  // min-heap: children only larger
      const int c = 2 * s + 1;
      if (c < static_cast<int>(above_val_.size())) stack.push_back(c);
      if (c + 1 < static_cast<int>(above_val_.size())) stack.push_back(c + 1);
    }
  }
  return 2 * size_;
}

void DoubleHeap::replace(double out_value, double in_value) {
  const int p = find_value_slot(out_value);
  if (p == 2 * size_)
    throw std::domain_error("double heap: value to remove is not resident");
  long out_tag;
  if (p == 0)
    out_tag = root_tag_;
  else if (p > 0)
    out_tag = below_tag_[static_cast<size_t>(p) - 1];
  else
    out_tag = above_tag_[static_cast<size_t>(-p) - 1];
  // Reuse the vacated tag slot for the incoming element.
  if (p == 0)
    replace_root(in_value, out_tag);
  else if (p > 0)
    replace_below(p - 1, in_value, out_tag);
  else
    replace_above(-p - 1, in_value, out_tag);
}

bool DoubleHeap::verify() const {
  for (size_t s = 0; s < below_val_.size(); ++s) {
    const size_t c = 2 * s + 1;
    if (c < below_val_.size() && below_val_[c] > below_val_[s]) return false;
    if (c + 1 < below_val_.size() && below_val_[c + 1] > below_val_[s]) return false;
    if (below_val_[s] > root_val_) return false;
  }
  for (size_t s = 0; s < above_val_.size(); ++s) {
    const size_t c = 2 * s + 1;
    if (c < above_val_.size() && above_val_[c] < above_val_[s]) return false;
    if (c + 1 < above_val_.size() && above_val_[c + 1] < above_val_[s]) return false;
    if (above_val_[s] < root_val_) return false;
  }
  // Tag map must round-trip.
  for (int s = 0; s < static_cast<int>(below_val_.size()); ++s)
    if (pos_[static_cast<size_t>(below_tag_[static_cast<size_t>(s)] % size_)] != s + 1) return false;
  for (int s = 0; s < static_cast<int>(above_val_.size()); ++s)
    if (pos_[static_cast<size_t>(above_tag_[static_cast<size_t>(s)] % size_)] != -(s + 1)) return false;
  if (pos_[static_cast<size_t>(root_tag_ % size_)] != 0) return false;
  return true;
}

}  // namespace mqseg
