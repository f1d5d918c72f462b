#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wetting {

using Site = std::uint32_t;

/// The box {0..N-1}^d with zero boundary condition outside.
///
/// Sites are indexed row-major with axis 0 fastest: index = x0 + N*x1 + N^2*x2.
/// Exterior sites are never materialized; each site instead carries the
/// number of its 2d bonds that leave the box.
class Lattice {
 public:
  static constexpr int kMaxDim = 3;

  Lattice(int dim, int side);

  int dim() const { return dim_; }
  int side() const { return side_; }
  std::size_t size() const { return outside_.size(); }

  /// Inside neighbours, ordered axis by axis, minus direction first.
  std::span<const Site> neighbors(Site x) const {
    return {flat_.data() + offsets_[x], flat_.data() + offsets_[x + 1]};
  }
  int outside_bonds(Site x) const { return outside_[x]; }
  int bonds_per_site() const { return 2 * dim_; }
  std::size_t outside_bond_total() const;

  std::array<int, kMaxDim> coords(Site x) const;
  Site index(const std::array<int, kMaxDim>& c) const;
  bool adjacent(Site x, Site y) const;

  /// Site closest to the geometric centre (coordinate N/2 on every axis).
  Site center() const;
  /// 0 for even coordinate sum, 1 for odd.
  int color(Site x) const;

 private:
  int dim_;
  int side_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Site> flat_;
  std::vector<std::uint8_t> outside_;
};

Lattice build_lattice(int dim, int side);

/// Sites with at least one bond leaving the box, in index order.
std::vector<Site> boundary_sites(const Lattice& lat);

/// Boustrophedon Hamiltonian path through every site, starting at the
/// origin corner.
std::vector<Site> snake_path(const Lattice& lat);

}  // namespace wetting
