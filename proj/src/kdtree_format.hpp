#pragma once

// On-disk layout shared by the builder and the reader.
//
//   header (36 bytes): "KDT1", u16 version, u16 dim, u64 count,
//                      u32 leaf_capacity, u64 internal count, u64 leaf offset
//   internal nodes (24 bytes each, preorder): u16 split_dim, u16 pad,
//                      f32 split, u64 left, u64 right
//   leaf pages, left to right: u64 count, then count x (u64 id, dim x f32)
//
// A child reference with the top bit set is the absolute file offset of a
// leaf page; otherwise it is an internal-node index. With no internal nodes
// the single leaf starts at the leaf offset.

#include <bit>
#include <cstdint>
#include <cstring>

#include "chemkd/io.hpp"

namespace chemkd::kd {

inline constexpr char kMagic[4] = {'K', 'D', 'T', '1'};
inline constexpr std::uint64_t kHeaderBytes = 36;
inline constexpr std::uint64_t kNodeBytes = 24;
inline constexpr std::uint64_t kLeafFlag = std::uint64_t{1} << 63;

struct Node {
  std::uint16_t split_dim = 0;
  float split = 0.0f;
  std::uint64_t left = 0;
  std::uint64_t right = 0;
};

inline void encode_node(const Node& n, unsigned char* out) {
  le::store<std::uint16_t>(out, n.split_dim);
  le::store<std::uint16_t>(out + 2, 0);
  le::store<float>(out + 4, n.split);
  le::store<std::uint64_t>(out + 8, n.left);
  le::store<std::uint64_t>(out + 16, n.right);
}

inline Node decode_node(const unsigned char* in) {
  Node n;
  n.split_dim = le::load<std::uint16_t>(in);
  n.split = le::load<float>(in + 4);
  n.left = le::load<std::uint64_t>(in + 8);
  n.right = le::load<std::uint64_t>(in + 16);
  return n;
}

inline std::uint64_t record_bytes(std::size_t dim) { return 8 + 4 * static_cast<std::uint64_t>(dim); }

inline std::uint64_t record_id(const unsigned char* rec) { return le::load<std::uint64_t>(rec); }
inline float record_coord(const unsigned char* rec, std::size_t i) { return le::load<float>(rec + 8 + 4 * i); }

/// Maps float bit patterns to unsigned integers with the same order
/// (-0 sorts just below +0). Coordinates are finite, so NaN never appears.
inline std::uint32_t ordered_bits(float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  return (bits & 0x80000000U) ? ~bits : (bits | 0x80000000U);
}

/// Total order used to split a node on dimension sd:
/// (coord[sd], id, coord[0], ..., coord[dim-1]).
inline int compare_for_split(const unsigned char* a, const unsigned char* b, std::size_t sd, std::size_t dim) {
  const std::uint32_t ka = ordered_bits(record_coord(a, sd));
  const std::uint32_t kb = ordered_bits(record_coord(b, sd));
  if (ka != kb) return ka < kb ? -1 : 1;
  const std::uint64_t ia = record_id(a);
  const std::uint64_t ib = record_id(b);
  if (ia != ib) return ia < ib ? -1 : 1;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint32_t ca = ordered_bits(record_coord(a, i));
    const std::uint32_t cb = ordered_bits(record_coord(b, i));
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

/// Canonical order of records inside a leaf page: (id, coord[0], ...).
inline bool leaf_less(const unsigned char* a, const unsigned char* b, std::size_t dim) {
  const std::uint64_t ia = record_id(a);
  const std::uint64_t ib = record_id(b);
  if (ia != ib) return ia < ib;
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint32_t ca = ordered_bits(record_coord(a, i));
    const std::uint32_t cb = ordered_bits(record_coord(b, i));
    if (ca != cb) return ca < cb;
  }
  return false;
}

}  // namespace chemkd::kd
