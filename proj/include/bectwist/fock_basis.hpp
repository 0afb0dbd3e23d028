#pragma once

// Occupation-number basis for N_c bosons on a ring of N_s sites, times the position of a
// single impurity. Ordering is descending lexicographic in the occupation vector
// ((N_c,0,...,0) first); the index map is the combinatorial rank, so no hash table.

#include <bectwist/errors.hpp>

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace bectwist {

/// Number of ways to put `particles` bosons on `sites` sites, C(p + s - 1, s - 1).
/// Saturates at the int64 maximum.
inline long long count_configurations(int sites, int particles) {
  if (sites <= 0) return particles == 0 ? 1 : 0;
  // C(particles + sites - 1, particles), built incrementally; exact while no overflow.
  long double acc = 1.0L;
  const int n = particles + sites - 1;
  const int k = std::min(particles, sites - 1);
  for (int i = 1; i <= k; ++i) acc = acc * static_cast<long double>(n - k + i) / i;
  if (acc > static_cast<long double>(std::numeric_limits<long long>::max() / 2))
    return std::numeric_limits<long long>::max();
  return static_cast<long long>(acc + 0.5L);
}

class BosonSectorBasis {
public:
  using Occupation = std::uint8_t;

  BosonSectorBasis(int sites, int particles) : sites_(sites), particles_(particles) {
    if (sites < 1) throw ValidationError("N_s", "must be >= 1");
    if (particles < 0 || particles > 255) throw ValidationError("N_c", "must be in [0, 255]");
    ways_.assign(static_cast<std::size_t>(sites + 1) * static_cast<std::size_t>(particles + 1), 0);
    for (int s = 0; s <= sites; ++s)
      for (int p = 0; p <= particles; ++p) ways_[table_index(s, p)] = count_configurations(s, p);
    dimension_ = ways_[table_index(sites, particles)];

    occupations_.reserve(static_cast<std::size_t>(dimension_) * static_cast<std::size_t>(sites));
    std::vector<Occupation> current(static_cast<std::size_t>(sites), 0);
    enumerate(0, particles, current);
  }

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  long long dimension() const { return dimension_; }

  std::span<const Occupation> state(long long k) const {
    return {occupations_.data() + k * sites_, static_cast<std::size_t>(sites_)};
  }

  /// Position of an occupation vector in the ordering. Precondition: entries sum to N_c.
  long long index_of(std::span<const Occupation> occ) const {
    long long rank = 0;
    int remaining = particles_;
    for (int s = 0; s + 1 < sites_; ++s) {
      const int n = occ[static_cast<std::size_t>(s)];
      const int rest_sites = sites_ - s - 1;
      for (int k = n + 1; k <= remaining; ++k) rank += ways_[table_index(rest_sites, remaining - k)];
      remaining -= n;
    }
    return rank;
  }

private:
  std::size_t table_index(int s, int p) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(particles_ + 1) +
           static_cast<std::size_t>(p);
  }

  void enumerate(int site, int remaining, std::vector<Occupation>& current) {
    if (site == sites_ - 1) {
      current[static_cast<std::size_t>(site)] = static_cast<Occupation>(remaining);
      occupations_.insert(occupations_.end(), current.begin(), current.end());
      return;
    }
    for (int n = remaining; n >= 0; --n) {
      current[static_cast<std::size_t>(site)] = static_cast<Occupation>(n);
      enumerate(site + 1, remaining - n, current);
    }
  }

  int sites_;
  int particles_;
  long long dimension_ = 0;
  std::vector<long long> ways_;
  std::vector<Occupation> occupations_;
};

/// Rough upper bound on Hamiltonian nonzeros: diagonal, two hops per occupied c site,
/// two impurity hops.
inline long long estimated_nonzeros(int sites, int bosons) {
  const long long csec = count_configurations(sites, bosons);
  const long long per_row = 1 + 2LL * std::min(bosons, sites) + 2;
  if (csec > std::numeric_limits<long long>::max() / (per_row * sites)) return std::numeric_limits<long long>::max();
  return csec * sites * per_row;
}

/// Throws before anything is allocated when the Hamiltonian estimate exceeds `cap`.
inline void require_within_cap(int sites, int bosons, long long cap) {
  if (sites < 3) throw ValidationError("N_s", "ring needs at least 3 sites");
  if (bosons < 1) throw ValidationError("N_c", "need at least one boson in mode c");
  const long long nnz = estimated_nonzeros(sites, bosons);
  if (nnz > cap) {
    const long long csec = count_configurations(sites, bosons);
    const long long dim = csec > std::numeric_limits<long long>::max() / sites
                              ? std::numeric_limits<long long>::max()
                              : csec * sites;
    throw SizeError(dim, nnz, cap);
  }
}

/// Two-mode basis: (c occupations, impurity site). Index = c_index * N_s + site.
class FockBasis {
public:
  /// Throws SizeError before allocating anything when the estimate exceeds the cap.
  FockBasis(int sites, int bosons, long long max_nonzeros = 5'000'000)
      : c_sector_(checked(sites, bosons, max_nonzeros)) {}

  const BosonSectorBasis& c_sector() const { return c_sector_; }
  int sites() const { return c_sector_.sites(); }
  long long dimension() const { return c_sector_.dimension() * sites(); }

  std::pair<std::span<const BosonSectorBasis::Occupation>, int> state(long long k) const {
    return {c_sector_.state(k / sites()), static_cast<int>(k % sites())};
  }

  long long index_of(std::span<const BosonSectorBasis::Occupation> occ, int impurity_site) const {
    return c_sector_.index_of(occ) * sites() + impurity_site;
  }

private:
  static BosonSectorBasis checked(int sites, int bosons, long long cap) {
    require_within_cap(sites, bosons, cap);
    return BosonSectorBasis(sites, bosons);
  }

  BosonSectorBasis c_sector_;
};

}  // namespace bectwist
