#include "rdpq/grid.hpp"

#include "rdpq/errors.hpp"

namespace rdpq {

Grid::Grid(std::size_t intervals) : intervals_(intervals), spacing_(0.0) {
  if (intervals_ == 0) throw ConfigError("grid needs at least one interval");
  spacing_ = 1.0 / static_cast<double>(intervals_);
  nodes_.resize(size());
  weights_.assign(size(), spacing_);
  for (std::size_t i = 0; i < size(); ++i) nodes_[i] = node(i);
  weights_.front() = weights_.back() = 0.5 * spacing_;
}

}  // namespace rdpq
