#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chemkd/molgraph.hpp"

namespace chemkd {

inline constexpr std::size_t kFingerprintLength = 256;
inline constexpr int kDefaultFingerprintRadius = 2;

enum class FingerprintKind : std::uint8_t { kBinary, kCounts };

/// 256-slot circular fingerprint. Binary fingerprints hold 0/1 per slot,
/// count fingerprints hold a (saturating) occurrence count per slot.
struct Fingerprint256 {
  FingerprintKind kind = FingerprintKind::kBinary;
  std::array<std::uint16_t, kFingerprintLength> values{};

  std::size_t popcount() const;
  std::uint64_t total() const;
  std::vector<double> to_reals() const;

  friend bool operator==(const Fingerprint256&, const Fingerprint256&) = default;
};

/// FNV-1a over the little-endian bytes of each 64-bit word.
std::uint64_t stable_hash(std::span<const std::uint64_t> words);

/// Identifiers emitted by the Morgan-style iteration, radius-major then by atom.
///
/// Radius 0 emits one identifier per atom (hash of atomic number, degree,
/// formal charge, aromatic flag). Radius r re-hashes each atom's previous
/// identifier with its sorted (bond code, neighbor identifier) list; an atom
/// emits at radius r only while its radius-r environment still reaches new
/// atoms.
std::vector<std::uint64_t> circular_identifiers(const MolecularGraph& graph,
                                                int radius = kDefaultFingerprintRadius);

/// Binary fingerprint: slot (id mod 256) set for every emitted identifier.
Fingerprint256 ecfp(const MolecularGraph& graph, int radius = kDefaultFingerprintRadius);

/// Count fingerprint: slot (id mod 256) incremented once per emission.
Fingerprint256 ecfc(const MolecularGraph& graph, int radius = kDefaultFingerprintRadius);

/// 1 - |a & b| / |a | b| over binary fingerprints. Throws InvalidArgument on a
/// kind mismatch or when both are empty.
double tanimoto_distance(const Fingerprint256& a, const Fingerprint256& b);

}  // namespace chemkd
