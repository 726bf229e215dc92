#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mhcl/address_space.hpp"

namespace mhcl {

// Wire layout (all multi-byte fields big-endian):
//
//   [kind:1][flag:1][src:2][dst:2][seq:2][options: 2 bytes per field]
//
//   kind  flag  options                     total
//   DIO    1    first_address, size         12
//   DIOACK 2    acked_seq                   10
//   DAO    1    descendant_count            10
//   DAOACK 2    acked_seq                   10
//   APP    0    address, direction          12
//   RPLDAO 0    target                      10   (storing-mode baseline only)

enum class MessageKind : std::uint8_t {
  DioMhcl = 1,
  DioAckMhcl = 2,
  DaoMhcl = 3,
  DaoAckMhcl = 4,
  AppData = 5,
  RplDao = 6,
};

enum class Direction : std::uint8_t { Up = 0, Down = 1 };

/// Address range grant from parent to child.
struct Dio {
  std::uint16_t first_address;
  std::uint16_t partition_size;  // >= 1
  friend bool operator==(const Dio&, const Dio&) = default;
};
struct DioAck {
  std::uint16_t acked_seq;
  friend bool operator==(const DioAck&, const DioAck&) = default;
};
/// Child-to-parent registration; in aggregate mode also the subtree size.
struct Dao {
  std::uint16_t descendant_count;
  friend bool operator==(const Dao&, const Dao&) = default;
};
struct DaoAck {
  std::uint16_t acked_seq;
  friend bool operator==(const DaoAck&, const DaoAck&) = default;
};
/// Application datagram. For Down it is the destination host address; for
/// Up it is the originator's address the root should answer to.
struct AppData {
  std::uint16_t address;
  Direction direction;
  friend bool operator==(const AppData&, const AppData&) = default;
};
/// Storing-mode route advertisement used by the baseline router.
struct RplDao {
  std::uint16_t target;
  friend bool operator==(const RplDao&, const RplDao&) = default;
};

using Payload = std::variant<Dio, DioAck, Dao, DaoAck, AppData, RplDao>;

struct Message {
  NodeId src = 0;
  NodeId dst = 0;
  std::uint16_t seq = 0;
  Payload payload;

  MessageKind kind() const;
  std::uint8_t flag() const;

  friend bool operator==(const Message&, const Message&) = default;
};

std::uint8_t flag_of(MessageKind kind);
std::size_t encoded_size(MessageKind kind);
std::string_view to_string(MessageKind kind);

/// Throws InvalidArgument for a DIO with partition_size 0.
std::vector<std::uint8_t> encode(const Message& msg);

/// Throws MalformedMessage on a short or overlong buffer, an unknown kind,
/// a flag that does not match the kind, or an invalid field value.
Message decode(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace mhcl
