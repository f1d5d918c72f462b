#include "wetting/lattice.hpp"

#include <string>

#include "wetting/error.hpp"

namespace wetting {

Lattice::Lattice(int dim, int side) : dim_(dim), side_(side) {
  if (dim < 1 || dim > kMaxDim) {
    throw ParameterError("lattice dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (side < 1) {
    throw ParameterError("lattice side must be >= 1, got " + std::to_string(side));
  }
  std::size_t n = 1;
  for (int k = 0; k < dim; ++k) {
    n *= static_cast<std::size_t>(side);
    if (n > (std::size_t{1} << 30)) throw ParameterError("lattice too large");
  }
  offsets_.reserve(n + 1);
  flat_.reserve(n * 2 * dim);
  outside_.resize(n);
  offsets_.push_back(0);
  for (Site x = 0; x < n; ++x) {
    auto c = coords(x);
    int out = 0;
    for (int k = 0; k < dim; ++k) {
      for (int step : {-1, 1}) {
        auto nc = c;
        nc[k] += step;
        if (nc[k] < 0 || nc[k] >= side) {
          ++out;
        } else {
          flat_.push_back(index(nc));
        }
      }
    }
    outside_[x] = static_cast<std::uint8_t>(out);
    offsets_.push_back(static_cast<std::uint32_t>(flat_.size()));
  }
}

std::size_t Lattice::outside_bond_total() const {
  std::size_t total = 0;
  for (auto o : outside_) total += o;
  return total;
}

std::array<int, Lattice::kMaxDim> Lattice::coords(Site x) const {
  std::array<int, kMaxDim> c{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    c[k] = static_cast<int>(x % static_cast<Site>(side_));
    x /= static_cast<Site>(side_);
  }
  return c;
}

Site Lattice::index(const std::array<int, kMaxDim>& c) const {
  Site x = 0;
  for (int k = dim_ - 1; k >= 0; --k) x = x * static_cast<Site>(side_) + static_cast<Site>(c[k]);
  return x;
}

bool Lattice::adjacent(Site x, Site y) const {
  for (Site n : neighbors(x)) {
    if (n == y) return true;
  }
  return false;
}

Site Lattice::center() const {
  std::array<int, kMaxDim> c{0, 0, 0};
  for (int k = 0; k < dim_; ++k) c[k] = side_ / 2;
  return index(c);
}

int Lattice::color(Site x) const {
  auto c = coords(x);
  return (c[0] + c[1] + c[2]) & 1;
}

Lattice build_lattice(int dim, int side) { return Lattice(dim, side); }

std::vector<Site> boundary_sites(const Lattice& lat) {
  std::vector<Site> out;
  for (Site x = 0; x < lat.size(); ++x) {
    if (lat.outside_bonds(x) > 0) out.push_back(x);
  }
  return out;
}

std::vector<Site> snake_path(const Lattice& lat) {
  const int n = lat.side();
  std::vector<Site> path;
  path.reserve(lat.size());
  // Row by row with alternating direction gives the planar snake; stacked
  // layers traverse it alternately forwards and backwards, so every step is a
  // nearest-neighbour move.
  const int rows = lat.dim() >= 2 ? n : 1;
  const int layers = lat.dim() >= 3 ? n : 1;
  std::vector<std::array<int, 2>> plane;
  plane.reserve(static_cast<std::size_t>(n) * rows);
  for (int y = 0; y < rows; ++y) {
    for (int r = 0; r < n; ++r) plane.push_back({y % 2 == 0 ? r : n - 1 - r, y});
  }
  for (int z = 0; z < layers; ++z) {
    for (std::size_t i = 0; i < plane.size(); ++i) {
      const auto& p = (z % 2 == 0) ? plane[i] : plane[plane.size() - 1 - i];
      path.push_back(lat.index({p[0], p[1], z}));
    }
  }
  return path;
}

}  // namespace wetting
