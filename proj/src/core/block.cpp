#include "dig/block.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dig/error.hpp"

namespace dig {

BlockLayout::BlockLayout(int alphabet, std::vector<Slot> slots)
    : alphabet_(alphabet), slots_(std::move(slots)) {
  require(alphabet_ >= 2, ErrorKind::Domain, "alphabet size must be at least 2");
  require(std::is_sorted(slots_.begin(), slots_.end()) &&
              std::adjacent_find(slots_.begin(), slots_.end()) == slots_.end(),
          ErrorKind::Domain, "block slots must be strictly ordered");
  weights_.assign(slots_.size(), 1);
  for (std::size_t p = slots_.size(); p-- > 0;) {
    weights_[p] = cells_;
    require(cells_ <= kMaxTableCells / static_cast<std::size_t>(alphabet_),
            ErrorKind::Resource,
            "block table exceeds " + std::to_string(kMaxTableCells) + " cells");
    cells_ *= static_cast<std::size_t>(alphabet_);
  }
}

BlockLayout BlockLayout::full(int nodes, int span, int alphabet) {
  std::vector<Slot> slots;
  slots.reserve(static_cast<std::size_t>(nodes) * span);
  for (int node = 0; node < nodes; ++node) {
    for (int t = 0; t < span; ++t) {
      slots.push_back({node, t});
    }
  }
  return BlockLayout(alphabet, std::move(slots));
}

int BlockLayout::position(Slot slot) const {
  const auto it = std::lower_bound(slots_.begin(), slots_.end(), slot);
  if (it == slots_.end() || *it != slot) {
    return -1;
  }
  return static_cast<int>(it - slots_.begin());
}

int BlockLayout::digit(std::size_t code, std::size_t position) const {
  return static_cast<int>((code / weights_[position]) %
                          static_cast<std::size_t>(alphabet_));
}

std::vector<std::size_t> projection_map(const BlockLayout &from,
                                        const BlockLayout &to) {
  require(from.alphabet() == to.alphabet(), ErrorKind::Domain,
          "projection between layouts with different alphabets");
  const std::size_t a = static_cast<std::size_t>(from.alphabet());
  // Weight in `to` of each slot of `from` (0 when summed out).
  std::vector<std::size_t> target_weight(from.slot_count(), 0);
  std::size_t w = 1;
  for (std::size_t p = to.slot_count(); p-- > 0;) {
    const int src = from.position(to.slots()[p]);
    require(src >= 0, ErrorKind::Domain, "projection onto a slot not in source");
    target_weight[static_cast<std::size_t>(src)] = w;
    w *= a;
  }
  std::vector<std::size_t> map(from.cell_count());
  for (std::size_t code = 0; code < map.size(); ++code) {
    std::size_t rest = code;
    std::size_t out = 0;
    for (std::size_t p = from.slot_count(); p-- > 0;) {
      out += (rest % a) * target_weight[p];
      rest /= a;
    }
    map[code] = out;
  }
  return map;
}

double entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) {
      h -= p * std::log(p);
    }
  }
  return h;
}

DirectedInfoLayouts directed_info_layouts(const BlockLayout &full, int source,
                                          int target) {
  int last = 0;
  for (const Slot &s : full.slots()) {
    last = std::max(last, s.time);
  }
  const Slot target_now{target, last};
  return DirectedInfoLayouts{
      full.restrict_to([&](Slot s) { return s.node != source; }),
      full.restrict_to(
          [&](Slot s) { return s.node != source && s != target_now; }),
      full.restrict_to([&](Slot s) { return s != target_now; }),
  };
}

double conditional_directed_info(const BlockLayout &full,
                                 std::span<const double> probabilities,
                                 int source, int target) {
  const auto layouts = directed_info_layouts(full, source, target);
  const auto h = [&](const BlockLayout &to) {
    const auto marginal = marginal_values(full, probabilities, to);
    return entropy(marginal);
  };
  // H(Y_{k+1} | Y_1^k, Z_1^{k+1}) - H(Y_{k+1} | X_1^{k+1}, Y_1^k, Z_1^{k+1})
  const double without_source = h(layouts.without_source) - h(layouts.conditioning);
  const double with_source = entropy(probabilities) - h(layouts.without_target_now);
  return without_source - with_source;
}

} // namespace dig
