// Double heap: a fixed-size window structure exposing one order statistic
// under single-element replacement in logarithmic time.
//
// Layout: a max-ordered tree ("below") of the rank-1 smallest elements, the
// root holding the target order statistic, and a min-ordered tree ("above")
// of the rest. Every element carries a caller-supplied integer tag (the
// originating series index) so replacement can target a specific occurrence
// even when values tie; tags within the live window must be distinct modulo
// the window size, which consecutive series indices satisfy automatically.
#ifndef MQSEG_DOUBLE_HEAP_HPP
#define MQSEG_DOUBLE_HEAP_HPP

#include <cstdint>
#include <vector>

namespace mqseg {

class DoubleHeap {
 public:
  // Builds the window from `values` with the given target rank (1-based,
  // 1 <= rank <= values.size()). Element i receives tag first_tag + i.
  DoubleHeap(int rank, const std::vector<double>& values, long first_tag = 0);

  int size() const { return size_; }
  int rank() const { return rank_; }

  // Current value (and tag) of the target order statistic.
  double root() const { return root_val_; }
  long root_tag() const { return root_tag_; }

  // Replaces the element carrying `out_tag` by (`in_value`, `in_tag`).
  // O(log size). Throws std::domain_error if out_tag is not resident.
  void replace_tagged(long out_tag, double in_value, long in_tag);

  // Replaces some element whose value equals `out_value`. Locates the
  // occurrence by pruned descent; the structural update is O(log size).
  // Throws std::domain_error if no element holds out_value.
  void replace(double out_value, double in_value);

  // Total tree levels touched by sift operations since construction; used to
  // check the per-replace O(log) contract.
  std::uint64_t levels_touched() const { return levels_; }

  // Structural audit (heap orders, cross-root bounds, tag map); test hook.
  bool verify() const;

 private:
  // pos encoding: 0 = root, p > 0 = below slot p-1, p < 0 = above slot -p-1.
  int& pos_of(long tag) { return pos_[static_cast<size_t>(tag % size_)]; }

  void set_below(int slot, double v, long t);
  void set_above(int slot, double v, long t);
  void set_root(double v, long t);

  void sift_up_below(int slot);
  void sift_down_below(int slot);
  void sift_up_above(int slot);
  void sift_down_above(int slot);

  void replace_root(double v, long t);
  void replace_below(int slot, double v, long t);
  void replace_above(int slot, double v, long t);

  int find_value_slot(double v) const;  // encoded like pos; 2*size_ if absent

  int size_ = 0;
  int rank_ = 1;
  double root_val_ = 0.0;
  long root_tag_ = 0;
  std::vector<double> below_val_, above_val_;
  std::vector<long> below_tag_, above_tag_;
  std::vector<int> pos_;
  std::uint64_t levels_ = 0;
};

}  // namespace mqseg

#endif  // MQSEG_DOUBLE_HEAP_HPP
