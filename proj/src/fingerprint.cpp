#include "chemkd/fingerprint.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "chemkd/error.hpp"

namespace chemkd {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void check_radius(int radius) {
  if (radius < 0 || radius > 8) throw InvalidArgument("fingerprint radius must be in [0, 8]");
}

// Farthest graph distance from each atom, capped at `limit`.
std::vector<int> capped_eccentricity(const MolecularGraph& g, int limit) {
  const std::size_t n = g.atom_count();
  std::vector<int> result(n, 0);
  std::vector<int> dist(n, -1);
  std::vector<std::uint32_t> frontier, next, touched;
  for (std::size_t s = 0; s < n; ++s) {
    frontier.assign(1, static_cast<std::uint32_t>(s));
    touched.assign(1, static_cast<std::uint32_t>(s));
    dist[s] = 0;
    int depth = 0;
    while (!frontier.empty() && depth < limit) {
      next.clear();
      for (std::uint32_t u : frontier) {
        for (const AdjacentAtom& nb : g.neighbors(u)) {
          if (dist[nb.atom] < 0) {
            dist[nb.atom] = depth + 1;
            next.push_back(nb.atom);
            touched.push_back(nb.atom);
          }
        }
      }
      if (next.empty()) break;
      ++depth;
      frontier.swap(next);
    }
    result[s] = depth;
    for (std::uint32_t t : touched) dist[t] = -1;
  }
  return result;
}

}  // namespace

std::uint64_t stable_hash(std::span<const std::uint64_t> words) {
  std::uint64_t h = kFnvOffset;
  for (std::uint64_t w : words) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (w >> (8 * byte)) & 0xFFU;
      h *= kFnvPrime;
    }
  }
  return h;
}

std::vector<std::uint64_t> circular_identifiers(const MolecularGraph& g, int radius) {
  check_radius(radius);
  const std::size_t n = g.atom_count();
  std::vector<std::uint64_t> current(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom& atom = g.atom(i);
    const std::uint64_t words[] = {
        atom.element,
        static_cast<std::uint64_t>(g.degree(i)),
        static_cast<std::uint64_t>(static_cast<std::int64_t>(atom.charge)),
        atom.aromatic ? 1ULL : 0ULL,
    };
    current[i] = stable_hash(words);
  }

  std::vector<std::uint64_t> emitted(current);
  const std::vector<int> reach = capped_eccentricity(g, radius);

  std::vector<std::uint64_t> next(n);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  std::vector<std::uint64_t> words;
  for (int r = 1; r <= radius; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      env.clear();
      for (const AdjacentAtom& nb : g.neighbors(i)) {
        env.emplace_back(static_cast<std::uint64_t>(nb.order), current[nb.atom]);
      }
      std::sort(env.begin(), env.end());
      words.assign(1, current[i]);
      for (const auto& [code, id] : env) {
        words.push_back(code);
        words.push_back(id);
      }
      next[i] = stable_hash(words);
    }
    current.swap(next);
    for (std::size_t i = 0; i < n; ++i) {
      if (reach[i] >= r) emitted.push_back(current[i]);
    }
  }
  return emitted;
}

Fingerprint256 ecfp(const MolecularGraph& graph, int radius) {
  Fingerprint256 fp;
  fp.kind = FingerprintKind::kBinary;
  for (std::uint64_t id : circular_identifiers(graph, radius)) fp.values[id % kFingerprintLength] = 1;
  return fp;
}

Fingerprint256 ecfc(const MolecularGraph& graph, int radius) {
  Fingerprint256 fp;
  fp.kind = FingerprintKind::kCounts;
  for (std::uint64_t id : circular_identifiers(graph, radius)) {
    auto& slot = fp.values[id % kFingerprintLength];
    if (slot < std::numeric_limits<std::uint16_t>::max()) ++slot;
  }
  return fp;
}

std::size_t Fingerprint256::popcount() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](std::uint16_t v) { return v != 0; }));
}

std::uint64_t Fingerprint256::total() const {
  std::uint64_t sum = 0;
  for (std::uint16_t v : values) sum += v;
  return sum;
}

std::vector<double> Fingerprint256::to_reals() const {
  return std::vector<double>(values.begin(), values.end());
}

double tanimoto_distance(const Fingerprint256& a, const Fingerprint256& b) {
  if (a.kind != FingerprintKind::kBinary || b.kind != FingerprintKind::kBinary) {
    throw InvalidArgument("tanimoto distance requires two binary fingerprints");
  }
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t i = 0; i < kFingerprintLength; ++i) {
    const bool x = a.values[i] != 0;
    const bool y = b.values[i] != 0;
    both += x && y;
    either += x || y;
  }
  if (either == 0) throw InvalidArgument("tanimoto distance undefined for two empty fingerprints");
  return 1.0 - static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace chemkd
