#ifndef DIG_BLOCK_HPP
#define DIG_BLOCK_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dig {

// Maximum number of cells in any exactly enumerated block table.
inline constexpr std::uint64_t kMaxTableCells = std::uint64_t{1} << 24;

// One (node, time offset) coordinate of a block. Time 0 is the oldest slot.
struct Slot {
  int node = 0;
  int time = 0;

  auto operator<=>(const Slot &) const = default;
};

// Mixed-radix encoding of symbols over an ordered set of slots. Slots are
// ordered node-major, time-minor; the first slot is the most significant
// digit and the last slot the least significant one.
class BlockLayout {
public:
  BlockLayout(int alphabet, std::vector<Slot> slots);

  // All nodes 0..nodes-1 over times 0..span-1.
  static BlockLayout full(int nodes, int span, int alphabet);

  int alphabet() const noexcept { return alphabet_; }
  const std::vector<Slot> &slots() const noexcept { return slots_; }
  std::size_t slot_count() const noexcept { return slots_.size(); }
  std::size_t cell_count() const noexcept { return cells_; }

  // Index of `slot` in the ordering, or -1 when absent.
  int position(Slot slot) const;

  // Digit of the slot at `position` within `code`.
  int digit(std::size_t code, std::size_t position) const;

  // Sub-layout made of every slot for which keep(slot) is true.
  template <typename Pred> BlockLayout restrict_to(Pred keep) const {
    std::vector<Slot> kept;
    for (const Slot &s : slots_) {
      if (keep(s)) {
        kept.push_back(s);
      }
    }
    return BlockLayout(alphabet_, std::move(kept));
  }

private:
  int alphabet_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> weights_;
  std::size_t cells_ = 1;
};

// Maps each cell of `from` onto the cell of `to` that shares its kept digits.
// Every slot of `to` must appear in `from`.
std::vector<std::size_t> projection_map(const BlockLayout &from,
                                        const BlockLayout &to);

template <typename T>
std::vector<T> marginal_values(const BlockLayout &from, std::span<const T> values,
                               const BlockLayout &to) {
  const auto map = projection_map(from, to);
  std::vector<T> out(to.cell_count(), T{});
  for (std::size_t c = 0; c < values.size(); ++c) {
    out[map[c]] += values[c];
  }
  return out;
}

// Shannon entropy in nats with 0 log 0 = 0.
double entropy(std::span<const double> probabilities);

// I(target_now ; source_block | target_past, others_block) evaluated on a
// full (k+1)-block table as a difference of four marginal entropies.
double conditional_directed_info(const BlockLayout &full,
                                 std::span<const double> probabilities,
                                 int source, int target);

// Slot sets used by the conditional directed information and its
// likelihood-ratio form, for an edge source -> target in a full layout.
struct DirectedInfoLayouts {
  BlockLayout without_source;             // Y_1^{k+1}, Z_1^{k+1}
  BlockLayout conditioning;               // Y_1^k, Z_1^{k+1}
  BlockLayout without_target_now;         // X_1^{k+1}, Y_1^k, Z_1^{k+1}
};

DirectedInfoLayouts directed_info_layouts(const BlockLayout &full, int source,
                                          int target);

} // namespace dig

#endif // DIG_BLOCK_HPP
