#pragma once

#include <array>
#include <cstdint>
#include <set>

#include "ectaks/authority.hpp"
#include "ectaks/curve.hpp"
#include "ectaks/hash.hpp"

namespace ectaks {

// alpha t_i G, sent in the clear by the initiator.
struct EphemeralShare {
  PointVector share;
  friend bool operator==(const EphemeralShare&, const EphemeralShare&) = default;
};

// ECTAK_{i-j} = alpha k_i . (m_{i-j} G)
struct Ectak {
  CurvePoint point;
  friend bool operator==(const Ectak&, const Ectak&) = default;
};

struct SessionKeys {
  Digest k1;  // encryption
  Digest k2;  // authentication
  friend bool operator==(const SessionKeys&, const SessionKeys&) = default;
};

inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr NodeId kBroadcastId = 0;

struct WireMessage {
  std::uint8_t version = kWireVersion;
  NodeId sender = 0;
  NodeId recipient = 0;
  EphemeralShare share;
  Bytes ciphertext;
  Digest tag{};

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

const Hash256& default_hash();

// --- point and message encoding (big-endian, fixed width) ---

// ceil(bits(q) / 8)
std::size_t coordinate_width(const CurveParams& curve);
// Affine: 0x04 || x || y. Identity: 0x00 followed by 2 * width zero bytes.
Bytes encode_point(const CurveParams& curve, const CurvePoint& pt);
CurvePoint decode_point(const CurveParams& curve, ByteView bytes);
Bytes encode_points(const CurveParams& curve, const PointVector& v);

// version(1) || sender(4) || recipient(4) || share(2 points) || ct_len(4) || ciphertext || tag(32)
Bytes encode(const CurveParams& curve, const WireMessage& msg);
WireMessage decode(const CurveParams& curve, ByteView bytes);

// --- handshake ---

struct Initiation {
  EphemeralShare share;
  Ectak ectak;
};

// Draws a fresh nonzero alpha; throws UnknownPeer when j is not in ANT_i.
Initiation initiate(const CurveParams& curve, const Lcd& lcd, NodeId peer, Rng& rng);
// Same, with a caller-chosen alpha.
Initiation initiate_with(const CurveParams& curve, const Lcd& lcd, NodeId peer, u64 alpha);

Ectak respond(const CurveParams& curve, const Lcd& lcd, const EphemeralShare& share);

// --- authenticated encryption ---

SessionKeys derive_keys(const CurveParams& curve, const Ectak& ectak, const EphemeralShare& share,
                        const Hash256& hash = default_hash());
SessionKeys derive_keys_from_bytes(ByteView ectak_bytes, ByteView share_bytes,
                                   const Hash256& hash = default_hash());

// Counter-mode keystream XOR; its own inverse.
Bytes apply_keystream(const Digest& k1, ByteView data, const Hash256& hash = default_hash());
Digest compute_tag(const Digest& k2, ByteView authenticated, const Hash256& hash = default_hash());

// No replay window: a captured message opens again. Callers needing replay
// protection must track (sender, share) pairs themselves.
WireMessage seal(const CurveParams& curve, const Lcd& lcd, NodeId peer, ByteView message, Rng& rng,
                 const Hash256& hash = default_hash());
Bytes open(const CurveParams& curve, const Lcd& lcd, const WireMessage& msg,
           const Hash256& hash = default_hash());

// One message for every cluster member (recipient id 0). All members must
// resolve to the same master-side session point, else ClusterNotFormed.
WireMessage multipoint_seal(const CurveParams& curve, const Lcd& master, const std::set<NodeId>& members,
                            ByteView message, Rng& rng, const Hash256& hash = default_hash());

}  // namespace ectaks
