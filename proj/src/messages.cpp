#include "mhcl/messages.hpp"

#include <array>

#include "mhcl/error.hpp"

namespace mhcl {

namespace {

constexpr std::size_t kHeaderSize = 8;

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::MalformedMessage, why);
}

class Writer {
 public:
  explicit Writer(std::size_t size) { out_.reserve(size); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return in_[pos_++]; }
  std::uint16_t u16() {
    const auto v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
    pos_ += 2;
    return v;
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

bool known_kind(std::uint8_t raw) { return raw >= 1 && raw <= 6; }

}  // namespace

MessageKind Message::kind() const {
  return std::visit(
      [](const auto& p) -> MessageKind {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Dio>) return MessageKind::DioMhcl;
        else if constexpr (std::is_same_v<T, DioAck>) return MessageKind::DioAckMhcl;
        else if constexpr (std::is_same_v<T, Dao>) return MessageKind::DaoMhcl;
        else if constexpr (std::is_same_v<T, DaoAck>) return MessageKind::DaoAckMhcl;
        else if constexpr (std::is_same_v<T, AppData>) return MessageKind::AppData;
        else return MessageKind::RplDao;
      },
      payload);
}

std::uint8_t Message::flag() const { return flag_of(kind()); }

std::uint8_t flag_of(MessageKind kind) {
  switch (kind) {
    case MessageKind::DioMhcl: return 1;
    case MessageKind::DioAckMhcl: return 2;
    case MessageKind::DaoMhcl: return 1;
    case MessageKind::DaoAckMhcl: return 2;
    case MessageKind::AppData:
    case MessageKind::RplDao: return 0;
  }
  return 0;
}

std::size_t encoded_size(MessageKind kind) {
  switch (kind) {
    case MessageKind::DioMhcl:
    case MessageKind::AppData: return kHeaderSize + 4;
    default: return kHeaderSize + 2;
  }
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::DioMhcl: return "DIO_MHCL";
    case MessageKind::DioAckMhcl: return "DIOACK_MHCL";
    case MessageKind::DaoMhcl: return "DAO_MHCL";
    case MessageKind::DaoAckMhcl: return "DAOACK_MHCL";
    case MessageKind::AppData: return "APP_DATA";
    case MessageKind::RplDao: return "RPL_DAO";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> encode(const Message& msg) {
  const auto kind = msg.kind();
  Writer w(encoded_size(kind));
  w.u8(static_cast<std::uint8_t>(kind));
  w.u8(flag_of(kind));
  w.u16(msg.src);
  w.u16(msg.dst);
  w.u16(msg.seq);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Dio>) {
          if (p.partition_size == 0) {
            throw Error(ErrorCode::InvalidArgument, "DIO_MHCL partition size must be >= 1");
          }
          w.u16(p.first_address);
          w.u16(p.partition_size);
        } else if constexpr (std::is_same_v<T, Dao>) {
          w.u16(p.descendant_count);
        } else if constexpr (std::is_same_v<T, DioAck> || std::is_same_v<T, DaoAck>) {
          w.u16(p.acked_seq);
        } else if constexpr (std::is_same_v<T, AppData>) {
          w.u16(p.address);
          w.u16(static_cast<std::uint16_t>(p.direction));
        } else {
          w.u16(p.target);
        }
      },
      msg.payload);
  return w.take();
}

Message decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    malformed("truncated message: " + std::to_string(bytes.size()) + " bytes");
  }
  if (!known_kind(bytes[0])) malformed("unknown kind byte " + std::to_string(bytes[0]));
  const auto kind = static_cast<MessageKind>(bytes[0]);
  if (bytes.size() != encoded_size(kind)) {
    malformed(std::string(to_string(kind)) + " must be " + std::to_string(encoded_size(kind)) +
              " bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes[1] != flag_of(kind)) {
    malformed(std::string(to_string(kind)) + " with flag " + std::to_string(bytes[1]));
  }

  Reader r(bytes);
  r.u8();
  r.u8();
  Message msg;
  msg.src = r.u16();
  msg.dst = r.u16();
  msg.seq = r.u16();
  switch (kind) {
    case MessageKind::DioMhcl: {
      Dio dio{r.u16(), r.u16()};
      if (dio.partition_size == 0) malformed("DIO_MHCL with empty partition");
      msg.payload = dio;
      break;
    }
    case MessageKind::DioAckMhcl: msg.payload = DioAck{r.u16()}; break;
    case MessageKind::DaoMhcl: msg.payload = Dao{r.u16()}; break;
    case MessageKind::DaoAckMhcl: msg.payload = DaoAck{r.u16()}; break;
    case MessageKind::AppData: {
      const auto address = r.u16();
      const auto direction = r.u16();
      if (direction > 1) malformed("APP_DATA direction " + std::to_string(direction));
      msg.payload = AppData{address, static_cast<Direction>(direction)};
      break;
    }
    case MessageKind::RplDao: msg.payload = RplDao{r.u16()}; break;
  }
  return msg;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr std::array<char, 16> digits = {'0', '1', '2', '3', '4', '5', '6', '7',
                                                  '8', '9', 'a', 'b', 'c', 'd', 'e', 'f'};
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

}  // namespace mhcl
