#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spoiler/election.hpp"
#include "spoiler/error.hpp"
#include "spoiler/random.hpp"

namespace spoiler {

enum class CultureKind { Spatial, Walsh, Conitzer, Mallows, Impartial };

// A generative model for multi-district party elections. Every district has p*k candidates, k per
// party, numbered party by party, and n voters; every district elects k.
struct CultureSpec {
  CultureKind kind = CultureKind::Impartial;
  int dimension = 1;           // spatial only
  double sigma = 0.05;         // candidate dispersion around the party point (spatial, walsh, conitzer)
  bool sigma_is_stddev = false;  // default: sigma is the variance of each coordinate
  double norm_phi_district = 0.75;  // mallows: district central votes around the overall central vote
  double norm_phi_voter = 0.25;     // mallows: votes around the district central vote
  int p = 3;
  int c = 1;
  int n = 100;
  int k = 1;
  std::uint64_t seed = 0;

  int num_candidates() const { return p * k; }

  double candidate_stddev() const { return sigma_is_stddev ? sigma : std::sqrt(sigma); }

  // CLI name: spatial1d, spatial2d, walsh, conitzer, mallows, ic.
  std::string name() const {
    switch (kind) {
      case CultureKind::Spatial: return "spatial" + std::to_string(dimension) + "d";
      case CultureKind::Walsh: return "walsh";
      case CultureKind::Conitzer: return "conitzer";
      case CultureKind::Mallows: return "mallows";
      case CultureKind::Impartial: return "ic";
    }
    return "?";
  }

  // Compact parameter description, e.g. "sigma=0.05" or "phi1=0.75;phi2=0.25".
  std::string params() const {
    std::ostringstream os;
    switch (kind) {
      case CultureKind::Spatial:
      case CultureKind::Walsh:
      case CultureKind::Conitzer: os << "sigma=" << sigma; break;
      case CultureKind::Mallows: os << "phi1=" << norm_phi_district << ";phi2=" << norm_phi_voter; break;
      case CultureKind::Impartial: break;
    }
    return os.str();
  }

  void validate() const {
    if (p < 1 || c < 1 || n < 1 || k < 1) throw ConfigError("culture counts p, c, n, k must be >= 1");
    if (kind == CultureKind::Spatial && dimension < 1) throw ConfigError("spatial dimension must be >= 1");
    if ((kind == CultureKind::Spatial || kind == CultureKind::Walsh || kind == CultureKind::Conitzer) &&
        !(sigma > 0.0)) {
      throw ConfigError("sigma must be positive");
    }
    if (kind == CultureKind::Mallows) {
      for (double f : {norm_phi_district, norm_phi_voter}) {
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("norm-phi must lie in [0,1]");
      }
    }
  }
};

// Parses a culture name into a spec template (parameters left at their defaults).
inline CultureSpec culture_from_name(std::string_view name) {
  CultureSpec s;
  if (name == "spatial1d") {
    s.kind = CultureKind::Spatial;
    s.dimension = 1;
  } else if (name == "spatial2d") {
    s.kind = CultureKind::Spatial;
    s.dimension = 2;
  } else if (name == "walsh") {
    s.kind = CultureKind::Walsh;
  } else if (name == "conitzer") {
    s.kind = CultureKind::Conitzer;
  } else if (name == "mallows") {
    s.kind = CultureKind::Mallows;
  } else if (name == "ic") {
    s.kind = CultureKind::Impartial;
  } else {
    throw ConfigError("unknown culture '" + std::string(name) + "'");
  }
  return s;
}

// Number of discordant pairs.
template <class T>
long long kendall_tau(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) throw DomainError("Kendall tau needs orders over the same candidates");
  std::map<T, std::size_t> pos;
  for (std::size_t i = 0; i < v.size(); ++i) pos[v[i]] = i;
  if (pos.size() != v.size()) throw DomainError("order contains duplicates");
  std::vector<std::size_t> mapped;
  mapped.reserve(u.size());
  for (const T& x : u) {
    auto it = pos.find(x);
    if (it == pos.end()) throw DomainError("orders are over different candidate sets");
    mapped.push_back(it->second);
  }
  long long inv = 0;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    for (std::size_t j = i + 1; j < mapped.size(); ++j) inv += mapped[i] > mapped[j];
  }
  return inv;
}

// Expected Kendall distance to the centre under Mallows(phi) over m items: the i-th inserted item
// adds t in {0..i} inversions with probability proportional to phi^t.
inline double mallows_expected_distance(double phi, int m) {
  double total = 0.0;
  for (int i = 1; i < m; ++i) {
    double num = 0.0, den = 0.0, pw = 1.0;
    for (int t = 0; t <= i; ++t) {
      num += t * pw;
      den += pw;
      pw *= phi;
    }
    total += num / den;
  }
  return total;
}

// Classical phi whose expected normalized Kendall distance equals norm_phi / 2.
inline double phi_from_norm_phi(double norm_phi, int m) {
  if (norm_phi <= 0.0 || m < 2) return 0.0;
  if (norm_phi >= 1.0) return 1.0;
  static std::mutex mu;
  static std::map<std::pair<int, double>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({m, norm_phi});
    if (it != cache.end()) return it->second;
  }
  const double target = norm_phi * m * (m - 1) / 4.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mallows_expected_distance(mid, m) < target ? lo : hi) = mid;
  }
  const double phi = 0.5 * (lo + hi);
  std::lock_guard<std::mutex> lock(mu);
  cache[{m, norm_phi}] = phi;
  return phi;
}

// Repeated insertion: item i of the centre lands t places above the end with probability
// proportional to phi^t.
inline std::vector<int> sample_mallows(std::span<const int> center, double phi, Rng& rng) {
  std::vector<int> out;
  out.reserve(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    std::size_t t = 0;
    if (phi >= 1.0) {
      t = rng.below(i + 1);
    } else if (phi > 0.0) {
      // Inverse CDF of the truncated geometric distribution on {0..i}.
      const double u = rng.uniform();
      const double tail = 1.0 - std::pow(phi, double(i + 1));
      t = static_cast<std::size_t>(std::floor(std::log1p(-u * tail) / std::log(phi)));
      t = std::min(t, i);
    }
    out.insert(out.end() - static_cast<std::ptrdiff_t>(t), center[i]);
  }
  return out;
}

// Uniform single-peaked vote on `axis`: the last place is repeatedly taken from either end of the
// remaining interval with probability 1/2.
inline std::vector<int> sample_walsh(std::span<const int> axis, Rng& rng) {
  const std::size_t m = axis.size();
  std::vector<int> vote(m);
  std::size_t lo = 0, hi = m - 1;
  for (std::size_t r = m; r-- > 1;) {
    vote[r] = rng.coin() ? axis[lo++] : axis[hi--];
  }
  vote[0] = axis[lo];
  return vote;
}

// Conitzer random walk: uniform peak, then uniformly the left or right neighbour of the ranked
// interval (forced once a side is exhausted).
inline std::vector<int> sample_conitzer(std::span<const int> axis, Rng& rng) {
  const auto m = static_cast<long long>(axis.size());
  std::vector<int> vote;
  vote.reserve(axis.size());
  const auto peak = static_cast<long long>(rng.below(static_cast<std::uint64_t>(m)));
  vote.push_back(axis[static_cast<std::size_t>(peak)]);
  long long left = peak - 1, right = peak + 1;
  while (static_cast<long long>(vote.size()) < m) {
    bool go_left;
    if (left < 0) go_left = false;
    else if (right >= m) go_left = true;
    else go_left = rng.coin();
    vote.push_back(go_left ? axis[static_cast<std::size_t>(left--)] : axis[static_cast<std::size_t>(right++)]);
  }
  return vote;
}

inline bool is_single_peaked(std::span<const int> vote, std::span<const int> axis) {
  std::vector<long long> at(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (axis[i] < 0 || static_cast<std::size_t>(axis[i]) >= axis.size()) return false;
    at[static_cast<std::size_t>(axis[i])] = static_cast<long long>(i);
  }
  if (vote.empty()) return true;
  long long lo = at[static_cast<std::size_t>(vote[0])], hi = lo;
  for (std::size_t r = 1; r < vote.size(); ++r) {
    const long long x = at[static_cast<std::size_t>(vote[r])];
    if (x == lo - 1) lo = x;
    else if (x == hi + 1) hi = x;
    else return false;
  }
  return true;
}

namespace detail {

inline std::vector<int> party_blocks(int p, int k) {
  std::vector<int> aff(static_cast<std::size_t>(p * k));
  for (int c = 0; c < p * k; ++c) aff[static_cast<std::size_t>(c)] = c / k;
  return aff;
}

inline constexpr std::uint64_t kPartyStream = 0;
inline std::uint64_t district_stream(int d) { return 1 + static_cast<std::uint64_t>(d); }

// Candidate axis of a district: candidates sorted by 1-D position around their party point.
inline std::vector<int> district_axis(const CultureSpec& s, std::span<const double> party_points, Rng& rng) {
  const int m = s.num_candidates();
  std::vector<double> x(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) x[static_cast<std::size_t>(c)] = party_points[static_cast<std::size_t>(c / s.k)] + s.candidate_stddev() * rng.normal();
  std::vector<int> axis(static_cast<std::size_t>(m));
  std::iota(axis.begin(), axis.end(), 0);
  std::stable_sort(axis.begin(), axis.end(), [&](int a, int b) { return x[static_cast<std::size_t>(a)] < x[static_cast<std::size_t>(b)]; });
  return axis;
}

}  // namespace detail

// Spatial model: party points uniform on (0,1)^d once per election; per district, candidate points
// normal around their party point and voter points uniform on (0,1)^d plus a district shift
// uniform on (-1/4,1/4)^d. Votes rank candidates by Euclidean distance, ties by index.
inline MultiDistrictElection gen_spatial(const CultureSpec& s) {
  s.validate();
  const int d = s.dimension, m = s.num_candidates();
  Rng party_rng(derive_seed(s.seed, detail::kPartyStream));
  std::vector<double> party(static_cast<std::size_t>(s.p * d));
  for (double& x : party) x = party_rng.uniform();
  const auto aff = detail::party_blocks(s.p, s.k);
  std::vector<DistrictElection> districts;
  for (int di = 0; di < s.c; ++di) {
    const std::uint64_t dseed = derive_seed(s.seed, detail::district_stream(di));
    Rng rng(dseed);
    std::vector<double> cand(static_cast<std::size_t>(m * d));
    for (int c = 0; c < m; ++c) {
      for (int j = 0; j < d; ++j) {
        cand[static_cast<std::size_t>(c * d + j)] = party[static_cast<std::size_t>((c / s.k) * d + j)] + s.candidate_stddev() * rng.normal();
      }
    }
    std::vector<double> shift(static_cast<std::size_t>(d));
    for (double& x : shift) x = rng.uniform(-0.25, 0.25);
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(m * s.n));
    std::vector<double> dist(static_cast<std::size_t>(m));
    std::vector<int> order(static_cast<std::size_t>(m));
    std::vector<double> voter(static_cast<std::size_t>(d));
    for (int v = 0; v < s.n; ++v) {
      Rng vrng(derive_seed(dseed, static_cast<std::uint64_t>(v)));
      for (int j = 0; j < d; ++j) voter[static_cast<std::size_t>(j)] = vrng.uniform() + shift[static_cast<std::size_t>(j)];
      for (int c = 0; c < m; ++c) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) {
          const double diff = cand[static_cast<std::size_t>(c * d + j)] - voter[static_cast<std::size_t>(j)];
          acc += diff * diff;
        }
        dist[static_cast<std::size_t>(c)] = acc;
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)]; });
      flat.insert(flat.end(), order.begin(), order.end());
    }
    districts.emplace_back(aff, s.p, s.n, std::move(flat));
  }
  return MultiDistrictElection(PartyRoster::numbered(s.p), std::move(districts),
                               std::vector<int>(static_cast<std::size_t>(s.c), s.k));
}

namespace detail {

template <class Sampler>
MultiDistrictElection gen_single_peaked(const CultureSpec& s, Sampler sample) {
  s.validate();
  Rng party_rng(derive_seed(s.seed, kPartyStream));
  std::vector<double> party(static_cast<std::size_t>(s.p));
  for (double& x : party) x = party_rng.uniform();
  const auto aff = party_blocks(s.p, s.k);
  std::vector<DistrictElection> districts;
  for (int di = 0; di < s.c; ++di) {
    const std::uint64_t dseed = derive_seed(s.seed, district_stream(di));
    Rng rng(dseed);
    const auto axis = district_axis(s, party, rng);
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(s.num_candidates() * s.n));
    for (int v = 0; v < s.n; ++v) {
      Rng vrng(derive_seed(dseed, static_cast<std::uint64_t>(v)));
      const auto vote = sample(axis, vrng);
      flat.insert(flat.end(), vote.begin(), vote.end());
    }
    districts.emplace_back(aff, s.p, s.n, std::move(flat));
  }
  return MultiDistrictElection(PartyRoster::numbered(s.p), std::move(districts),
                               std::vector<int>(static_cast<std::size_t>(s.c), s.k));
}

}  // namespace detail

inline MultiDistrictElection gen_walsh(const CultureSpec& s) {
  return detail::gen_single_peaked(s, [](std::span<const int> axis, Rng& r) { return sample_walsh(axis, r); });
}

inline MultiDistrictElection gen_conitzer(const CultureSpec& s) {
  return detail::gen_single_peaked(s, [](std::span<const int> axis, Rng& r) { return sample_conitzer(axis, r); });
}

// Two-stage Mallows: district centres around the party-grouped identity order, votes around the
// district centre.
inline MultiDistrictElection gen_mallows(const CultureSpec& s) {
  s.validate();
  const int m = s.num_candidates();
  const double phi1 = phi_from_norm_phi(s.norm_phi_district, m);
  const double phi2 = phi_from_norm_phi(s.norm_phi_voter, m);
  std::vector<int> overall(static_cast<std::size_t>(m));
  std::iota(overall.begin(), overall.end(), 0);
  const auto aff = detail::party_blocks(s.p, s.k);
  std::vector<DistrictElection> districts;
  for (int di = 0; di < s.c; ++di) {
    const std::uint64_t dseed = derive_seed(s.seed, detail::district_stream(di));
    Rng rng(dseed);
    const auto center = sample_mallows(overall, phi1, rng);
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(m * s.n));
    for (int v = 0; v < s.n; ++v) {
      Rng vrng(derive_seed(dseed, static_cast<std::uint64_t>(v)));
      const auto vote = sample_mallows(center, phi2, vrng);
      flat.insert(flat.end(), vote.begin(), vote.end());
    }
    districts.emplace_back(aff, s.p, s.n, std::move(flat));
  }
  return MultiDistrictElection(PartyRoster::numbered(s.p), std::move(districts),
                               std::vector<int>(static_cast<std::size_t>(s.c), s.k));
}

inline MultiDistrictElection gen_impartial(const CultureSpec& s) {
  s.validate();
  const int m = s.num_candidates();
  const auto aff = detail::party_blocks(s.p, s.k);
  std::vector<DistrictElection> districts;
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int di = 0; di < s.c; ++di) {
    const std::uint64_t dseed = derive_seed(s.seed, detail::district_stream(di));
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(m * s.n));
    for (int v = 0; v < s.n; ++v) {
      Rng vrng(derive_seed(dseed, static_cast<std::uint64_t>(v)));
      std::iota(order.begin(), order.end(), 0);
      for (int i = m - 1; i > 0; --i) {
        std::swap(order[static_cast<std::size_t>(i)], order[vrng.below(static_cast<std::uint64_t>(i) + 1)]);
      }
      flat.insert(flat.end(), order.begin(), order.end());
    }
    districts.emplace_back(aff, s.p, s.n, std::move(flat));
  }
  return MultiDistrictElection(PartyRoster::numbered(s.p), std::move(districts),
                               std::vector<int>(static_cast<std::size_t>(s.c), s.k));
}

inline MultiDistrictElection generate(const CultureSpec& s) {
  switch (s.kind) {
    case CultureKind::Spatial: return gen_spatial(s);
    case CultureKind::Walsh: return gen_walsh(s);
    case CultureKind::Conitzer: return gen_conitzer(s);
    case CultureKind::Mallows: return gen_mallows(s);
    case CultureKind::Impartial: return gen_impartial(s);
  }
  throw ConfigError("unknown culture kind");
}

}  // namespace spoiler
