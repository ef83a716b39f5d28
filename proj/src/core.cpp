#include "cascade/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cascade {

namespace {

void check_probability(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream msg;
    msg << what << " must lie in [0,1], got " << value;
    throw InputError(msg.str());
  }
}

template <typename T>
void check_indices(std::span<const ItemId> list, std::span<const T> weights) {
  for (ItemId e : list) {
    if (e >= weights.size()) {
      throw InputError("item " + std::to_string(e) + " out of range for " +
                       std::to_string(weights.size()) + " items");
    }
  }
}

}  // namespace

AttractionModel::AttractionModel(std::vector<double> means) : means_(std::move(means)) {
  if (means_.empty()) throw InputError("attraction model needs at least one item");
  for (double m : means_) check_probability(m, "attraction mean");
}

void validate_list(std::span<const ItemId> list, std::size_t num_items) {
  if (list.empty() || list.size() > num_items) {
    throw InputError("list length " + std::to_string(list.size()) + " not in [1, " +
                     std::to_string(num_items) + "]");
  }
  std::vector<bool> seen(num_items, false);
  for (ItemId e : list) {
    if (e >= num_items) {
      throw InputError("item " + std::to_string(e) + " out of range for " +
                       std::to_string(num_items) + " items");
    }
    if (seen[e]) throw InputError("duplicate item " + std::to_string(e) + " in list");
    seen[e] = true;
  }
}

double list_value(std::span<const ItemId> list, std::span<const double> weights) {
  check_indices(list, weights);
  double miss = 1.0;
  for (ItemId e : list) miss *= 1.0 - weights[e];
  return 1.0 - miss;
}

double list_value(std::span<const ItemId> list, std::span<const std::uint8_t> weights) {
  check_indices(list, weights);
  for (ItemId e : list) {
    if (weights[e] != 0) return 1.0;
  }
  return 0.0;
}

CascadeFeedback first_click(std::span<const ItemId> list,
                            std::span<const std::uint8_t> weights) {
  check_indices(list, weights);
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (weights[list[k]] != 0) return CascadeFeedback::at(k + 1);
  }
  return CascadeFeedback::none();
}

std::vector<Observation> observed_weights(const CascadeFeedback& feedback,
                                          std::size_t list_size) {
  if (feedback.click && (*feedback.click == 0 || *feedback.click > list_size)) {
    throw InputError("click position " + std::to_string(*feedback.click) +
                     " outside list of length " + std::to_string(list_size));
  }
  const std::size_t last = feedback.click.value_or(list_size);
  std::vector<Observation> out;
  out.reserve(last);
  for (std::size_t k = 1; k <= last; ++k) {
    out.push_back({k, feedback.click == k ? 1 : 0});
  }
  return out;
}

Recommendation top_k(std::span<const double> scores, std::size_t count) {
  if (count > scores.size()) {
    throw InputError("cannot pick " + std::to_string(count) + " of " +
                     std::to_string(scores.size()) + " items");
  }
  Recommendation order(scores.size());
  std::iota(order.begin(), order.end(), ItemId{0});
  auto better = [&](ItemId a, ItemId b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                    order.end(), better);
  order.resize(count);
  return order;
}

Recommendation optimal_list(const AttractionModel& model, std::size_t list_size) {
  return top_k(model.means(), list_size);
}

double gap(const AttractionModel& model, ItemId item, ItemId optimal_item) {
  if (item >= model.size() || optimal_item >= model.size()) {
    throw InputError("gap: item out of range");
  }
  return model[optimal_item] - model[item];
}

double instantaneous_regret(std::span<const ItemId> optimal,
                            std::span<const ItemId> chosen,
                            std::span<const std::uint8_t> weights) {
  return list_value(optimal, weights) - list_value(chosen, weights);
}

std::string format_list(std::span<const ItemId> list) {
  std::string out = "(";
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (k) out += ", ";
    out += std::to_string(list[k] + 1);
  }
  return out + ")";
}

}  // namespace cascade
