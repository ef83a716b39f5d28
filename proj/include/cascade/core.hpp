#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cascade {

/// Raised on malformed arguments: out-of-range item ids, probabilities
/// outside [0,1], duplicate list entries and the like.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Zero-based index into the ground set. Reports print `id + 1`.
using ItemId = std::size_t;

/// Ordered list of K distinct items shown to the user.
using Recommendation = std::vector<ItemId>;

/// Realized attraction indicators w_t(e), one byte (0 or 1) per item.
using WeightVector = std::vector<std::uint8_t>;

/// Per-item Bernoulli attraction means.
class AttractionModel {
 public:
  AttractionModel() = default;
  explicit AttractionModel(std::vector<double> means);

  std::size_t size() const { return means_.size(); }
  double operator[](ItemId e) const { return means_[e]; }
  std::span<const double> means() const { return means_; }

 private:
  std::vector<double> means_;
};

/// Click position of the cascade user, 1-based; empty means no click.
struct CascadeFeedback {
  std::optional<std::size_t> click;

  static CascadeFeedback none() { return {}; }
  static CascadeFeedback at(std::size_t position) { return {position}; }
  bool clicked() const { return click.has_value(); }
  bool operator==(const CascadeFeedback&) const = default;
};

/// One implied observation: position is 1-based, weight is 0 or 1.
struct Observation {
  std::size_t position;
  int weight;
  bool operator==(const Observation&) const = default;
};

/// Throws InputError unless `list` holds 1..L distinct ids below L.
void validate_list(std::span<const ItemId> list, std::size_t num_items);

/// 1 - prod_k (1 - w(a_k)). Serves binary realizations and mean vectors alike.
double list_value(std::span<const ItemId> list, std::span<const double> weights);
double list_value(std::span<const ItemId> list, std::span<const std::uint8_t> weights);

CascadeFeedback first_click(std::span<const ItemId> list,
                            std::span<const std::uint8_t> weights);

/// Weights revealed by a cascade click: positions 1..min(C, K), the last
/// one carrying the click.
std::vector<Observation> observed_weights(const CascadeFeedback& feedback,
                                          std::size_t list_size);

/// Indices of the `count` largest scores, ordered by decreasing score with
/// ties going to the smaller index.
Recommendation top_k(std::span<const double> scores, std::size_t count);

Recommendation optimal_list(const AttractionModel& model, std::size_t list_size);

/// w(e*) - w(e).
double gap(const AttractionModel& model, ItemId item, ItemId optimal_item);

double instantaneous_regret(std::span<const ItemId> optimal,
                            std::span<const ItemId> chosen,
                            std::span<const std::uint8_t> weights);

/// Human-facing rendering "(1, 2, 5)" with 1-based ids.
std::string format_list(std::span<const ItemId> list);

}  // namespace cascade
