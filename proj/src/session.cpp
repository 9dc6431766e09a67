#include "ectaks/session.hpp"

#include <bit>

namespace ectaks {

namespace {

constexpr std::string_view kKdfSalt = "ECTAKS-v1-kdf";
constexpr std::string_view kEncLabel = "ECTAKS-v1-enc";
constexpr std::string_view kMacLabel = "ECTAKS-v1-mac";
constexpr std::string_view kCtrLabel = "ECTAKS-v1-ctr";
constexpr std::string_view kTagLabel = "ECTAKS-v1-tag";

constexpr std::uint8_t kIdentityMarker = 0x00;
constexpr std::uint8_t kAffineMarker = 0x04;

void put_be(Bytes& out, u64 v, std::size_t width) {
  for (std::size_t i = width; i-- > 0;) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

u64 get_be(ByteView in, std::size_t width) {
  u64 v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 8) | in[i];
  return v;
}

std::size_t point_size(const CurveParams& curve) { return 1 + 2 * coordinate_width(curve); }

const PointVector& topology_vector(const Lcd& lcd, NodeId peer) {
  auto it = lcd.pub.find(peer);
  if (it == lcd.pub.end()) {
    throw Error(ErrorCode::UnknownPeer, "node " + std::to_string(peer) + " is not in ANT_" + std::to_string(lcd.node));
  }
  return it->second;
}

Bytes authenticated_prefix(const CurveParams& curve, const WireMessage& msg) {
  Bytes out;
  out.push_back(msg.version);
  put_be(out, msg.sender, 4);
  put_be(out, msg.recipient, 4);
  const Bytes share = encode_points(curve, msg.share.share);
  out.insert(out.end(), share.begin(), share.end());
  put_be(out, msg.ciphertext.size(), 4);
  out.insert(out.end(), msg.ciphertext.begin(), msg.ciphertext.end());
  return out;
}

WireMessage seal_with(const CurveParams& curve, NodeId sender, NodeId recipient, const Initiation& init,
                      ByteView message, const Hash256& hash) {
  if (message.size() > UINT32_MAX) throw Error(ErrorCode::InvalidParameter, "message too long");
  const SessionKeys keys = derive_keys(curve, init.ectak, init.share, hash);
  WireMessage msg;
  msg.sender = sender;
  msg.recipient = recipient;
  msg.share = init.share;
  msg.ciphertext = apply_keystream(keys.k1, message, hash);
  msg.tag = compute_tag(keys.k2, authenticated_prefix(curve, msg), hash);
  return msg;
}

}  // namespace

const Hash256& default_hash() {
  static const Sha256 sha;
  return sha;
}

std::size_t coordinate_width(const CurveParams& curve) {
  return static_cast<std::size_t>((std::bit_width(curve.q) + 7) / 8);
}

Bytes encode_point(const CurveParams& curve, const CurvePoint& pt) {
  const std::size_t w = coordinate_width(curve);
  Bytes out;
  out.reserve(1 + 2 * w);
  if (pt.is_identity()) {
    out.push_back(kIdentityMarker);
    out.resize(1 + 2 * w, 0);
    return out;
  }
  out.push_back(kAffineMarker);
  put_be(out, pt.x, w);
  put_be(out, pt.y, w);
  return out;
}

CurvePoint decode_point(const CurveParams& curve, ByteView bytes) {
  const std::size_t w = coordinate_width(curve);
  if (bytes.size() != 1 + 2 * w) throw Error(ErrorCode::MalformedMessage, "point encoding has wrong length");
  if (bytes[0] == kIdentityMarker) {
    for (std::size_t i = 1; i < bytes.size(); ++i) {
      if (bytes[i] != 0) throw Error(ErrorCode::InvalidPoint, "identity encoding carries coordinates");
    }
    return CurvePoint::identity();
  }
  if (bytes[0] != kAffineMarker) throw Error(ErrorCode::InvalidPoint, "unknown point marker");
  const CurvePoint pt = CurvePoint::affine(get_be(bytes.subspan(1), w), get_be(bytes.subspan(1 + w), w));
  if (!on_curve(curve, pt)) throw Error(ErrorCode::InvalidPoint, "decoded point is not on the curve");
  return pt;
}

Bytes encode_points(const CurveParams& curve, const PointVector& v) {
  Bytes out;
  for (const auto& pt : v.points()) {
    const Bytes b = encode_point(curve, pt);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

Bytes encode(const CurveParams& curve, const WireMessage& msg) {
  Bytes out = authenticated_prefix(curve, msg);
  out.insert(out.end(), msg.tag.begin(), msg.tag.end());
  return out;
}

WireMessage decode(const CurveParams& curve, ByteView bytes) {
  const std::size_t ps = point_size(curve);
  const std::size_t fixed = 1 + 4 + 4 + 2 * ps + 4;
  if (bytes.size() < fixed + 32) throw Error(ErrorCode::MalformedMessage, "message truncated");
  WireMessage msg;
  msg.version = bytes[0];
  if (msg.version != kWireVersion) {
    throw Error(ErrorCode::MalformedMessage, "unsupported version " + std::to_string(msg.version));
  }
  msg.sender = static_cast<NodeId>(get_be(bytes.subspan(1), 4));
  msg.recipient = static_cast<NodeId>(get_be(bytes.subspan(5), 4));
  msg.share.share = PointVector{decode_point(curve, bytes.subspan(9, ps)), decode_point(curve, bytes.subspan(9 + ps, ps))};
  const u64 ct_len = get_be(bytes.subspan(9 + 2 * ps), 4);
  if (bytes.size() != fixed + ct_len + 32) throw Error(ErrorCode::MalformedMessage, "length field disagrees with size");
  msg.ciphertext.assign(bytes.begin() + fixed, bytes.begin() + fixed + ct_len);
  std::copy(bytes.end() - 32, bytes.end(), msg.tag.begin());
  return msg;
}

Initiation initiate_with(const CurveParams& curve, const Lcd& lcd, NodeId peer, u64 alpha) {
  const PointVector& mG = topology_vector(lcd, peer);
  const FieldElement a(alpha, curve.p);
  if (a.is_zero()) throw Error(ErrorCode::InvalidParameter, "alpha must be nonzero");
  Initiation init;
  init.share.share = lift_vector(curve, lcd.secret.t.scaled(a));
  init.ectak.point = mixed_dot(curve, lcd.secret.k.scaled(a), mG);
  if (init.share.share.all_identity()) throw Error(ErrorCode::InvalidShare, "transmitted component is zero");
  if (init.ectak.point.is_identity()) {
    throw Error(ErrorCode::ZeroSessionKey, "session point toward " + std::to_string(peer) + " is the identity");
  }
  return init;
}

Initiation initiate(const CurveParams& curve, const Lcd& lcd, NodeId peer, Rng& rng) {
  topology_vector(lcd, peer);
  return initiate_with(curve, lcd, peer, rng.uniform_in(1, curve.p - 1));
}

Ectak respond(const CurveParams& curve, const Lcd& lcd, const EphemeralShare& share) {
  if (share.share.size() != lcd.secret.k.size()) throw Error(ErrorCode::InvalidShare, "share has wrong length");
  if (share.share.all_identity()) throw Error(ErrorCode::InvalidShare, "share is the all-identity vector");
  return {mixed_dot(curve, lcd.secret.k, share.share)};
}

SessionKeys derive_keys_from_bytes(ByteView ectak_bytes, ByteView share_bytes, const Hash256& hash) {
  const Digest prk = hmac(hash, as_bytes(kKdfSalt), {ectak_bytes, share_bytes});
  return {hmac(hash, prk, {as_bytes(kEncLabel)}), hmac(hash, prk, {as_bytes(kMacLabel)})};
}

SessionKeys derive_keys(const CurveParams& curve, const Ectak& ectak, const EphemeralShare& share,
                        const Hash256& hash) {
  return derive_keys_from_bytes(encode_point(curve, ectak.point), encode_points(curve, share.share), hash);
}

Bytes apply_keystream(const Digest& k1, ByteView data, const Hash256& hash) {
  Bytes out(data.begin(), data.end());
  Bytes counter;
  for (std::size_t block = 0; block * 32 < out.size(); ++block) {
    counter.clear();
    put_be(counter, block, 8);
    const Digest ks = hmac(hash, k1, {as_bytes(kCtrLabel), counter});
    for (std::size_t i = 0; i < 32 && block * 32 + i < out.size(); ++i) out[block * 32 + i] ^= ks[i];
  }
  return out;
}

Digest compute_tag(const Digest& k2, ByteView authenticated, const Hash256& hash) {
  return hmac(hash, k2, {as_bytes(kTagLabel), authenticated});
}

WireMessage seal(const CurveParams& curve, const Lcd& lcd, NodeId peer, ByteView message, Rng& rng,
                 const Hash256& hash) {
  return seal_with(curve, lcd.node, peer, initiate(curve, lcd, peer, rng), message, hash);
}

Bytes open(const CurveParams& curve, const Lcd& lcd, const WireMessage& msg, const Hash256& hash) {
  if (msg.version != kWireVersion) throw Error(ErrorCode::MalformedMessage, "unsupported version");
  if (msg.recipient != kBroadcastId && msg.recipient != lcd.node) {
    throw Error(ErrorCode::MalformedMessage, "addressed to node " + std::to_string(msg.recipient));
  }
  for (const auto& pt : msg.share.share.points()) {
    if (!on_curve(curve, pt)) throw Error(ErrorCode::InvalidPoint, "share is not on the curve");
  }
  const Ectak ectak = respond(curve, lcd, msg.share);
  const SessionKeys keys = derive_keys(curve, ectak, msg.share, hash);
  const Digest expected = compute_tag(keys.k2, authenticated_prefix(curve, msg), hash);
  if (!constant_time_equal(expected, msg.tag)) throw Error(ErrorCode::BadTag, "tag verification failed");
  return apply_keystream(keys.k1, msg.ciphertext, hash);
}

WireMessage multipoint_seal(const CurveParams& curve, const Lcd& master, const std::set<NodeId>& members,
                            ByteView message, Rng& rng, const Hash256& hash) {
  if (members.empty()) throw Error(ErrorCode::ClusterNotFormed, "cluster has no members");
  std::optional<CurvePoint> common;
  for (NodeId j : members) {
    const CurvePoint pt = mixed_dot(curve, master.secret.k, topology_vector(master, j));
    if (common && *common != pt) {
      throw Error(ErrorCode::ClusterNotFormed, "member " + std::to_string(j) + " is not on the cluster product");
    }
    common = pt;
  }
  // Every member shares k_master . m_{master-j}, so any member's vector yields
  // the same session point.
  const Initiation init = initiate(curve, master, *members.begin(), rng);
  return seal_with(curve, master.node, kBroadcastId, init, message, hash);
}

}  // namespace ectaks
